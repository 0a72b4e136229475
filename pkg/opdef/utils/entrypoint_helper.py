import sys
from typing import get_args, get_origin

import pandas as pd
from pydantic import BaseModel

from opdef.dataclasses.operator_spec import OperatorSpec, iter_nodes
from opdef.utils.fixtures import OpdefFixtures
from opdef.utils.logger import get_package_version


def _add_value(kwargs: dict, key: str, value):
    """
    Add a value to a keyword-argument dictionary.

    Repeated keys are merged into a list; existing scalar values are
    promoted to lists as needed.

    :param kwargs:
        Dictionary collecting parsed keyword arguments.
    :type kwargs: dict
    :param key:
        Argument name.
    :type key: str
    :param value:
        Value or list of values to associate with the key.
    :type value: Any
    """

    if key in kwargs:
        if not isinstance(kwargs[key], list):
            kwargs[key] = [kwargs[key]]
        if isinstance(value, list):
            kwargs[key].extend(value)
        else:
            kwargs[key].append(value)
    else:
        kwargs[key] = value


def _normalize_key(key: str) -> str:
    # --cert-tol and --cert_tol address the same option
    return key.replace("-", "_")


def collect_kwargs(argv: list[str]) -> dict:
    """
    Parse command-line arguments into a keyword-argument dictionary.

    The first argument may be a positional command (``opdef classify ...``);
    it is stored under ``command``. Supported option forms::

        --key=value
        --key value
        -key value
        --key v1 v2 v3
        repeated flags: --key v1 --key v2

    Keys are normalized from kebab-case to snake_case. Tokens such as ``-1``
    or ``-0.5j`` are values, not flags.

    :param argv:
        Command-line argument vector (typically ``sys.argv``).
    :type argv: list[str]
    :return:
        Dictionary mapping argument names to values or lists of values.
    :rtype: dict
    :raises ValueError:
        If a flag is missing its value or a token cannot be placed.
    """

    kwargs = {}
    i = 1

    def is_flag(token: str) -> bool:
        return token.startswith("--") or (token.startswith("-") and len(token) > 1
                                          and not (token[1].isdigit() or token[1] == "."))

    if len(argv) > 1 and not is_flag(argv[1]):
        kwargs["command"] = argv[1]
        i = 2

    while i < len(argv):
        arg = argv[i]

        if arg.startswith("--") and "=" in arg:
            key, value = arg[2:].split("=", 1)
            _add_value(kwargs, _normalize_key(key), value)
            i += 1
            continue

        if is_flag(arg):
            key = _normalize_key(arg.lstrip("-"))

            values = []
            j = i + 1
            while j < len(argv) and not is_flag(argv[j]):
                values.append(argv[j])
                j += 1

            if not values:
                raise ValueError(f"Missing value(s) for argument: {arg}")

            _add_value(kwargs, key, values[0] if len(values) == 1 else values)
            i = j
            continue

        raise ValueError(f"Invalid argument format: {arg}")

    return kwargs


def expand_dotted_keys(flat: dict) -> dict:
    # pydantic does not expand "--a.b" into nested mappings
    out = {}
    for key, value in flat.items():
        parts = key.split(".")
        cur = out
        for p in parts[:-1]:
            cur = cur.setdefault(p, {})
        cur[parts[-1]] = value
    return out


def print_logo():
    print("""  ___  _ __   __| | ___ / _|
 / _ \\| '_ \\ / _` |/ _ \\ |_
| (_) | |_) | (_| |  __/  _|
 \\___/| .__/ \\__,_|\\___|_|
      |_|                   """)


def print_help_CLI(tool: str, argv: list[str], parameters_object):
    def is_basemodel_type(tp):
        origin = get_origin(tp)
        if origin is not None:
            tp = get_args(tp)[0]
        return isinstance(tp, type) and issubclass(tp, BaseModel)

    def get_basemodel_type(tp):
        origin = get_origin(tp)
        if origin is not None:
            return get_args(tp)[0]
        return tp

    def print_help(model: type[BaseModel], prefix=""):
        for name, field in model.model_fields.items():
            option = f"{prefix}{name}".replace("_", "-")
            annotation = field.annotation

            if is_basemodel_type(annotation):
                print_help(get_basemodel_type(annotation), option + ".")
                continue

            typ = getattr(annotation, "__name__", str(annotation))
            desc = field.description or ""

            print(f"  --{option:<20} ")
            print(f"      [{typ}, default={field.default}]")
            if desc:
                print(f"      {desc}")

    if "--help" in argv or "-h" in argv or "--version" in argv or "-v" in argv:
        print("\n")
        print_logo()
        print("\nopdef classifies bounded operators on l2 as scalar-plus-compact (definable)\n"
              "or not, with numeric certificates and witnesses, and computes Fredholm\n"
              "indices, kernels, eigenspaces, essential-spectrum scans and distance predicates.")

        print("\n\nUsage:")
        print(f"  {tool} <command> --operator <path|name> [OPTIONS]\n")
        print("Commands:")
        print("  classify, spectrum, index, kernel, eigenspace, predicate-eval, invariant-subspace, report\n")
        print("Exit codes:")
        print("  0 definable / success, 1 not definable, 2 inconclusive, 3 input error\n")
        print("Options:")
        print_help(parameters_object)
        print(f"\nVersion: {get_package_version('opdef')}")
        sys.exit(0)


def operator_corpus_df() -> pd.DataFrame:
    """
    Summary of the bundled operator corpus: one row per spec with its name,
    field, root kind and number of tree nodes.

    :rtype: pandas.DataFrame
    """

    fixtures = OpdefFixtures()
    rows = []
    for name in fixtures.list_operators():
        spec = OperatorSpec.from_file(fixtures.operator_path(name))
        rows.append({"name": name,
                     "field": spec.field.value,
                     "kind": spec.kind,
                     "nodes": sum(1 for _ in iter_nodes(spec.root))})
    return pd.DataFrame(rows, columns=["name", "field", "kind", "nodes"])


def print_operator_list_CLI(destination: str):
    if destination is not None:
        df_operators = operator_corpus_df()
        if destination == "console":
            print(df_operators.to_string(index=False))
        else:
            df_operators.to_csv(destination, index=False)
        sys.exit(0)
