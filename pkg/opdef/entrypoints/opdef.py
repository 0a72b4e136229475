import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from opdef.dataclasses.operator_spec import OperatorSpec, ProjectionNode
from opdef.dataclasses.parameters.run_parameters import RunParameters
from opdef.dataclasses.results import Definable, Inconclusive
from opdef.dataclasses.scalars import ScalarField, decode_vector, scalar_to_pair
from opdef.definability.classifier import classify, classify_projection
from opdef.definability.fredholm import eigenspace, fredholm_index, kernel_basis
from opdef.definability.invariant_subspace import invariant_subspace
from opdef.definability.spectral import essential_spectrum_scan, parse_grid
from opdef.linalg.kernel import norm, pad_to
from opdef.operators.application import apply_full, complexify
from opdef.operators.parameters import extract_parameters
from opdef.predicates.distance import compact_predicate
from opdef.reporting.report import (Report, eigenspace_payload, invariant_subspace_payload, to_jsonable,
                                    verdict_payload, verdict_tables)
from opdef.utils.entrypoint_helper import collect_kwargs, expand_dotted_keys, print_help_CLI, print_operator_list_CLI
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import FieldMismatchError, OpdefError
from opdef.utils.files import read_json
from opdef.utils.fixtures import OpdefFixtures
from opdef.utils.logger import instantiate_logging_CLI

logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 3
# opdef errors that also derive from one of these are input errors, not inconclusive results
INPUT_ERRORS = (ValueError, TypeError, FileNotFoundError)
DEFAULT_GRID = "circle:64"


def load_operator(cfg: RunParameters) -> OperatorSpec:
    """
    Load the operator spec named by ``--operator`` (a JSON file or the name
    of a bundled spec) and apply the ``--field`` override.

    :param cfg:
        Run parameters.
    :type cfg: RunParameters
    :rtype: OperatorSpec
    :raises FileNotFoundError:
        If neither a file nor a bundled spec of that name exists.
    :raises FieldMismatchError:
        If a complex spec is requested as real.
    """

    if cfg.operator is None:
        raise_with_logging_error("No operator given; pass --operator <path|name>.",
                                 logger=logger,
                                 exception_type=ValueError)

    path = Path(cfg.operator)
    if not path.is_file():
        path = OpdefFixtures().operator_path(str(cfg.operator))
        if path is None:
            raise_with_logging_error(f"Operator '{cfg.operator}' is neither a file nor a bundled spec.",
                                     logger=logger,
                                     exception_type=FileNotFoundError)
    spec = OperatorSpec.from_file(path)
    logger.info("Loaded a %s '%s' operator from %s.", spec.field.value, spec.kind, path)

    if cfg.field == "complex" and spec.field is ScalarField.REAL:
        return complexify(spec)
    if cfg.field == "real" and spec.field is ScalarField.COMPLEX:
        raise_with_logging_error("A complex operator spec cannot be read over the real field.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    return spec


def parse_vector(text: Optional[str], field: ScalarField) -> np.ndarray:
    """
    Vector from a JSON file or an inline JSON list, e.g. ``[0, 1]`` or
    ``[[0, 1], [1, 0]]`` for complex coefficients. ``None`` is the zero vector.

    :rtype: numpy.ndarray
    """

    if text is None:
        return np.zeros(1, dtype=field.dtype)
    values = read_json(text) if Path(text).is_file() else json.loads(text)
    if not isinstance(values, list) or not values:
        raise ValueError(f"Vector must be a non-empty JSON list, got {text!r}.")
    return decode_vector(values, field)


def _run_classify(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    options = cfg.classify_options()
    if isinstance(spec.root, ProjectionNode):
        verdict = classify_projection(spec, options)
    else:
        verdict = classify(spec, options)
    report.result = verdict_payload(verdict)
    report.tables = verdict_tables(verdict)
    report.exit_code = verdict.exit_code


def _run_spectrum(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    grid = parse_grid(cfg.grid or DEFAULT_GRID)
    scan = essential_spectrum_scan(spec, grid, cfg.k_fraction, cfg.size)
    best = scan.loc[scan["defect"].idxmin()]
    report.result = {"points": len(scan),
                     "size": cfg.size,
                     "k_fraction": cfg.k_fraction,
                     "min_defect": float(best["defect"]),
                     "argmin": [float(best["mu_re"]), float(best["mu_im"])]}
    report.tables = {"scan": scan}


def _run_index(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    report.result = to_jsonable(fredholm_index(spec, cfg.rank_threshold, cfg.size))


def _run_kernel(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    result = kernel_basis(spec, cfg.rank_threshold, cfg.size, extract_parameters(spec))
    report.result = eigenspace_payload(result)


def _run_eigenspace(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    if cfg.mu is None:
        raise_with_logging_error("The eigenspace command needs --mu.",
                                 logger=logger,
                                 exception_type=ValueError)
    result = eigenspace(spec, cfg.mu, cfg.rank_threshold, cfg.size, extract_parameters(spec))
    report.result = eigenspace_payload(result)


def _run_predicate(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    x, y = parse_vector(cfg.x, spec.field), parse_vector(cfg.y, spec.field)
    predicate = compact_predicate(spec, cfg.sort, cfg.epsilon)
    value = predicate.evaluate(x, y)

    image = apply_full(spec, x)
    length = max(len(image), len(y))
    oracle = norm(pad_to(image, length) - pad_to(y, length))
    report.result = {"value": value,
                     "error_bound": predicate.error_bound,
                     "oracle": oracle,
                     "difference": abs(value - oracle),
                     "source_sort": predicate.source_sort,
                     "target_sort": predicate.target_sort,
                     "description": predicate.description,
                     "surrogate_size": predicate.surrogate_size}


def _run_invariant_subspace(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    verdict = classify(spec, cfg.classify_options())
    if not isinstance(verdict, Definable):
        logger.warning("Operator is not classified definable; no invariant subspace is computed.")
        report.result = verdict_payload(verdict)
        report.exit_code = verdict.exit_code
        return
    result = invariant_subspace(spec, verdict, size=min(cfg.size, 128), rank_threshold=cfg.rank_threshold)
    report.result = {"lambda": scalar_to_pair(verdict.lambda_value), **invariant_subspace_payload(result)}
    report.exit_code = result.exit_code if isinstance(result, Inconclusive) else 0


def _run_report(cfg: RunParameters, spec: OperatorSpec, report: Report) -> None:
    _run_classify(cfg, spec, report)
    complex_spec = spec if spec.field is ScalarField.COMPLEX else complexify(spec)
    try:
        report.result["fredholm"] = to_jsonable(fredholm_index(complex_spec, cfg.rank_threshold,
                                                               cfg.classify_options().index_size))
    except OpdefError as exp:
        report.result["fredholm"] = {"error": str(exp)}

    lambda_value = report.result.get("lambda")
    if lambda_value is not None and complex(*lambda_value) != 0:
        # a definable operator with lambda != 0 has its kernel inside sp(A)
        try:
            kernel = kernel_basis(spec, cfg.rank_threshold, cfg.classify_options().index_size,
                                  extract_parameters(spec))
            report.result["kernel"] = {"dimension": kernel.dimension,
                                       "containment_residuals": kernel.containment_residuals}
        except OpdefError as exp:
            report.result["kernel"] = {"error": str(exp)}


COMMANDS = {
    "classify": _run_classify,
    "spectrum": _run_spectrum,
    "index": _run_index,
    "kernel": _run_kernel,
    "eigenspace": _run_eigenspace,
    "predicate-eval": _run_predicate,
    "invariant-subspace": _run_invariant_subspace,
    "report": _run_report,
}


def run(cfg: RunParameters) -> Report:
    """
    Run one command and assemble its report.

    Exit codes of the resulting report:

    - 0: definable, or a non-classifying command that succeeded;
    - 1: not definable;
    - 2: inconclusive. Numerical failures of the non-classifying commands
      (:class:`NoSpectralGapError`, :class:`IndexInstabilityError`,
      :class:`ProbeDisagreementError`, :class:`NoTailBoundError`, ...) end here;
    - 3: input error, raised to the caller and mapped by :func:`main`. Every
      :class:`OpdefError` that is also one of ``INPUT_ERRORS`` belongs here,
      including :class:`LambdaCollisionError`: a ``--mu`` within the rank
      threshold of the measured ``lambda`` asks for an eigenspace that need
      not be finite-dimensional.

    :param cfg:
        Resolved run parameters.
    :type cfg: RunParameters
    :rtype: Report
    """

    start = time.perf_counter()
    spec = load_operator(cfg)
    report = Report(command=cfg.command, config=cfg.model_dump(mode="json"))
    try:
        COMMANDS[cfg.command](cfg, spec, report)
    except OpdefError as exp:
        if isinstance(exp, INPUT_ERRORS):
            raise
        logger.warning("Command '%s' is inconclusive: %s", cfg.command, exp)
        report.result = {"verdict": "inconclusive", "reason": str(exp), "diagnostics": to_jsonable(exp.payload)}
        report.exit_code = 2
    report.wall_time = time.perf_counter() - start
    return report


def _print_input_error(exp: Exception) -> None:
    if isinstance(exp, ValidationError):
        for error in exp.errors():
            location = ".".join(str(part) for part in error["loc"]) or "<root>"
            print(f"input error at {location}: {error['msg']}", file=sys.stderr)
    else:
        print(f"input error: {exp}", file=sys.stderr)


def main():
    """
    Entry point of the ``opdef`` command-line interface.

    This tool:

    - parses ``opdef <command> [OPTIONS]`` into :class:`RunParameters`
      (``--config`` files merged, CLI values winning);
    - initializes logging on stderr (and optionally a log file);
    - loads the operator spec and runs the command;
    - prints the report (text, json or csv) to stdout, optionally writing it
      to ``--report`` as well;
    - exits with 0 (definable / success), 1 (not definable),
      2 (inconclusive) or 3 (input error).
    """

    # -h/--help/-v/--version print the help message and end the execution
    print_help_CLI("opdef", sys.argv, RunParameters)

    try:
        raw_kwargs = expand_dotted_keys(collect_kwargs(sys.argv))
        cfg = RunParameters(**raw_kwargs)
    except ValueError as exp:
        _print_input_error(exp)
        sys.exit(EXIT_INPUT_ERROR)

    # --operator-list prints (or writes) the bundled corpus and ends the execution
    print_operator_list_CLI(cfg.operator_list)

    instantiate_logging_CLI(cfg=cfg, logger=logger)

    try:
        report = run(cfg)
    except INPUT_ERRORS as exp:
        _print_input_error(exp)
        sys.exit(EXIT_INPUT_ERROR)

    print(report.render(cfg.output))
    if cfg.report is not None:
        report.write(cfg.report, cfg.output)
    sys.exit(report.exit_code)


if __name__ == "__main__":
    main()
