import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, field_validator, model_validator

COMMANDS = ("classify", "spectrum", "index", "kernel", "eigenspace", "predicate-eval", "invariant-subspace", "report")


class ClassifyOptions(BaseModel):
    """
    Numerical knobs of the definability pipeline.

    :param cert_tol: Tolerance a compactness ladder has to fall below.
    :type cert_tol: float
    :param weyl_tol: Residual tolerance of Weyl families; candidate points
                     are kept more than ``10 * weyl_tol`` apart.
    :type weyl_tol: float
    :param rank_threshold: Relative singular-value threshold for kernels and cokernels.
    :type rank_threshold: float
    :param n_max: Largest truncation size of the compactness ladder.
    :type n_max: int
    :param witness_size: Section size used for Weyl families.
    :type witness_size: int
    :param index_size: Section size used for Fredholm indices (checked again at twice the size).
    :type index_size: int
    :param rank_budget: A Weyl family needs ``rank_budget + 1`` vectors.
    :type rank_budget: int
    :param probe_count: Number of lambda probe positions, at most 16 (positions double).
    :type probe_count: int
    :param probe_gap: Distance of the first lambda probe from the parameter support.
    :type probe_gap: int
    :param probe_tol: Agreement tolerance of the lambda probes.
    :type probe_tol: float
    :param parameter_cutoff: Index bound for basis vectors of infinite projection targets.
    :type parameter_cutoff: int
    :param decay_tolerance: Entry size below which decaying diagonals count as negligible.
    :type decay_tolerance: float
    :param seed: Seed of all randomized probes.
    :type seed: int
    """

    cert_tol: PositiveFloat = Field(default=1e-4, description="Compactness certificate tolerance.")
    weyl_tol: PositiveFloat = Field(default=0.08, description="Weyl family residual tolerance.")
    rank_threshold: PositiveFloat = Field(default=1e-6, description="Relative singular-value threshold for kernels.")
    n_max: PositiveInt = Field(default=512, description="Largest truncation size of the compactness ladder.")
    witness_size: PositiveInt = Field(default=256, description="Section size for Weyl families.")
    index_size: PositiveInt = Field(default=128, description="Section size for Fredholm indices.")
    rank_budget: PositiveInt = Field(default=5, description="Rank budget of Weyl families.")
    probe_count: PositiveInt = Field(default=3, le=16, description="Number of lambda probe positions.")
    probe_gap: PositiveInt = Field(default=4, description="Gap between the parameter support and the first probe.")
    probe_tol: PositiveFloat = Field(default=1e-8, description="Agreement tolerance of lambda probes.")
    parameter_cutoff: PositiveInt = Field(default=64, description="Cutoff for infinite projection targets.")
    decay_tolerance: PositiveFloat = Field(default=1e-12, description="Negligible size of decaying diagonal entries.")
    seed: int = Field(default=0, description="Seed of randomized probes.")

    model_config = {
        "extra": "forbid"
    }

    @model_validator(mode="after")
    def check_ladder(self):
        if self.n_max < 16:
            raise ValueError(f"n_max must be at least 16 so that the ladder 16, 32, ... fits, got {self.n_max}.")
        return self


class RunParameters(BaseModel):
    """
    Configuration model for an opdef command-line run.

    Parameters come from command-line arguments or from a YAML / JSON
    configuration file. Resolution order:

    1. Values from the configuration file (``--config``) are loaded first.
    2. Explicit CLI arguments override values from the config file.
    3. The merged configuration is validated and normalized.

    Invalid or unknown parameters are rejected.

    :param command: Command to run (first positional argument).
    :type command: str
    :param operator: Operator spec JSON file, or the name of a bundled spec.
    :type operator: pathlib.Path or str
    :param field: Optional field override; ``complex`` complexifies a real spec.
    :type field: str, optional
    :param grid: Scan grid, e.g. ``circle:64``, ``0,2,1+1j`` or ``box:-1,1,-1,1,5``;
                 parts are joined with ``;``.
    :type grid: str, optional
    :param output: Report format written to stdout.
    :type output: str
    :param report: Optional file the report is written to as well.
    :type report: pathlib.Path or str, optional
    :param operator_list: Print the bundled operator corpus (``"console"``) or
                          write it to a CSV file, then exit.
    :type operator_list: str, optional
    :param logger: Logging destination. Use ``"console"`` for stderr logging or
                   provide a file path to log to a file.
    :type logger: str
    :param debug: Enable verbose debug logging if ``True``.
    :type debug: bool

    :raises ValueError: If unknown or extra parameters are provided
                        (``extra="forbid"``).
    """

    config: Optional[Union[Path, str]] = Field(default=None, description="Path to a YAML or JSON configuration file (optional).")

    command: Literal["classify", "spectrum", "index", "kernel", "eigenspace", "predicate-eval",
                     "invariant-subspace", "report"] = Field(default="classify", description="Command to run.")
    operator: Optional[Union[Path, str]] = Field(default=None, description="Operator spec JSON file or bundled spec name.")
    field: Optional[Literal["real", "complex"]] = Field(default=None, description="Override the scalar field (real specs can be complexified).")
    cert_tol: PositiveFloat = Field(default=1e-4, description="Compactness certificate tolerance.")
    weyl_tol: PositiveFloat = Field(default=0.08, description="Weyl family residual tolerance.")
    rank_threshold: PositiveFloat = Field(default=1e-6, description="Relative singular-value threshold for kernels.")
    n_max: PositiveInt = Field(default=512, description="Largest truncation size (at least 16).")
    size: PositiveInt = Field(default=256, description="Section size for spectrum scans, witnesses and eigenspaces.")
    grid: Optional[str] = Field(default=None, description="Scan grid: circle:<count> | points | box:<re0,re1,im0,im1,steps>.")
    k_fraction: PositiveFloat = Field(default=1.0 / 64, description="Singular value index of the scan defect, as a fraction of the size.")
    mu: Optional[Union[complex, float, str]] = Field(default=None, description="Eigenvalue for the eigenspace command.")
    x: Optional[str] = Field(default=None, description="Vector x: JSON file or inline list.")
    y: Optional[str] = Field(default=None, description="Vector y: JSON file or inline list.")
    sort: PositiveInt = Field(default=1, description="Source sort n of the predicate (ball radius).")
    epsilon: PositiveFloat = Field(default=0.01, description="Error budget of compact predicates.")
    output: Literal["text", "json", "csv"] = Field(default="text", description="Report format on stdout.")
    report: Optional[Union[Path, str]] = Field(default=None, description="Write the report to this file as well.")
    operator_list: Optional[str] = Field(default=None, description="List the bundled operator specs: 'console' or a CSV file path, then exit.")
    seed: int = Field(default=0, description="Seed of randomized probes.")
    logger: Optional[str] = Field(default="console", description="Set logger to either console (default, stderr) or provide a file name.")
    debug: Optional[bool] = Field(default=False, description="If set to true, enable verbose debugging logging.")

    model_config = {
        "extra": "forbid"
    }

    def is_console_logging(self) -> bool:
        """
        Determine whether logging should be directed to the console.

        :returns:
            ``True`` if logging goes to stderr only, ``False`` if logging
            should be written to a file as well.
        :rtype: bool
        """

        return self.logger == "console"

    def log_file_path(self) -> Optional[Path]:
        if self.is_console_logging():
            return None
        return Path(self.logger)

    @model_validator(mode="before")
    @classmethod
    def load_config_file(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        """
        Load and merge a YAML or JSON configuration file.

        If a configuration file is specified via the ``config`` parameter, it
        is loaded first and used to initialize parameters. Any values provided
        directly (e.g. via CLI arguments) override those from the config file.
        Keys may be written in kebab-case (``cert-tol``) or snake_case.

        :param values:
            Raw keyword arguments passed to the model constructor.
        :type values: dict

        :returns:
            Merged parameter dictionary with CLI values taking precedence.
        :rtype: dict

        :raises ValueError:
            If the config file does not exist, has an unsupported extension,
            or does not contain a top-level mapping.
        """

        values = {str(k).replace("-", "_"): v for k, v in values.items()}
        config = values.get("config")
        if not config:
            return values

        config_path = Path(config)
        if not config_path.exists():
            raise ValueError(f"Config file does not exist: {config_path}.")

        if config_path.suffix in {".yaml", ".yml"}:
            with open(config_path, "r") as fh:
                config_data = yaml.safe_load(fh) or {}
        elif config_path.suffix == ".json":
            with open(config_path, "r") as fh:
                config_data = json.load(fh)
        else:
            raise ValueError("Config file must be YAML (.yaml/.yml) or JSON (.json).")

        if not isinstance(config_data, dict):
            raise ValueError("Config file must contain a mapping at the top level.")

        config_data = {str(k).replace("-", "_"): v for k, v in config_data.items()}
        # CLI args override config file values (if present)
        return {**config_data, **values}

    @field_validator("n_max", mode="after")
    @classmethod
    def validate_n_max(cls, n_max: int) -> int:
        if n_max < 16:
            raise ValueError(f"n_max must be at least 16 so that the ladder 16, 32, ... fits, got {n_max}.")
        return n_max

    @field_validator("mu", mode="after")
    @classmethod
    def validate_mu(cls, mu):
        """
        Parse ``mu`` into a Python number (``"0.5"``, ``"1+2j"``, ``"-1j"``).

        :raises ValueError:
            If the string is not a valid complex literal.
        """

        if isinstance(mu, str):
            mu = complex(mu.replace(" ", ""))
        if isinstance(mu, complex) and mu.imag == 0.0:
            return mu.real
        return mu

    def classify_options(self) -> ClassifyOptions:
        return ClassifyOptions(cert_tol=self.cert_tol,
                               weyl_tol=self.weyl_tol,
                               rank_threshold=self.rank_threshold,
                               n_max=self.n_max,
                               witness_size=self.size,
                               seed=self.seed)

    def dump_resolved_config(self) -> str:
        """
        Serialize the resolved configuration to YAML.

        All paths are converted to strings and complex values to
        ``[re, im]`` pairs for clean, human-readable output.

        :returns:
            YAML-formatted configuration string.
        :rtype: str
        """

        data = self.model_dump()

        for key, value in data.items():
            if isinstance(value, Path):
                data[key] = str(value)
            elif isinstance(value, complex):
                data[key] = [value.real, value.imag]

        return yaml.safe_dump(data, sort_keys=False)
