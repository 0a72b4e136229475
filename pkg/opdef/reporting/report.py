import json
import logging
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from opdef.dataclasses.results import (CompactnessCertificate, Definable, EigenspaceResult,
                                       IndexWitness, InvariantSubspace, KernelWitness, NotDefinable, WeylWitness)
from opdef.dataclasses.scalars import scalar_to_pair
from opdef.utils.files import log_writeout, write_text

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """
    Convert results into JSON-ready data.

    Complex scalars become ``[re, im]`` pairs, one-dimensional arrays become
    coefficient lists and matrices become lists of their columns (the
    convention for vector families and bases). Pydantic models are dumped
    field by field.

    :param value:
        Any result value.
    :rtype: Any
    """

    if isinstance(value, BaseModel):
        return {name: to_jsonable(getattr(value, name)) for name in type(value).model_fields}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return [to_jsonable(value[:, j]) for j in range(value.shape[1])]
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return scalar_to_pair(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


class Report(BaseModel):
    """
    Outcome of one command: the command and configuration echo, the result
    payload, plot-ready tables and the exit code.

    ``timestamp`` and ``wall_time`` are the only fields that vary between
    runs with identical configuration and seed.

    :param command: Command that produced the report.
    :type command: str
    :param config: Resolved configuration.
    :type config: dict
    :param result: JSON-ready result payload.
    :type result: dict
    :param tables: Named tables; the first one is the CSV payload.
    :type tables: dict[str, pandas.DataFrame]
    :param exit_code: 0 definable / success, 1 not definable, 2 inconclusive, 3 input error.
    :type exit_code: int
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    result: Dict[str, Any] = Field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = Field(default_factory=dict)
    exit_code: int = 0
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))
    wall_time: float = 0.0

    def to_document(self, include_volatile: bool = True) -> Dict[str, Any]:
        document = {"command": self.command,
                    "exit_code": self.exit_code,
                    "config": to_jsonable(self.config),
                    "result": to_jsonable(self.result),
                    "tables": {name: {"columns": list(df.columns), "rows": df.values.tolist()}
                               for name, df in self.tables.items()}}
        if include_volatile:
            document["timestamp"] = self.timestamp
            document["wall_time"] = self.wall_time
        return document

    def to_json(self, include_volatile: bool = True) -> str:
        # repr of a float is the shortest string that round-trips exactly
        return json.dumps(self.to_document(include_volatile), indent=2)

    def primary_table(self) -> pd.DataFrame:
        if self.tables:
            return next(iter(self.tables.values()))
        flat = pd.json_normalize(to_jsonable(self.result), sep=".")
        return pd.DataFrame({"key": flat.columns, "value": [json.dumps(v) if isinstance(v, list) else v
                                                            for v in flat.iloc[0].tolist()]})

    def to_csv(self) -> str:
        return self.primary_table().to_csv(index=False, float_format=CSV_FLOAT_FORMAT)

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"exit code: {self.exit_code}"]
        for key, value in to_jsonable(self.result).items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
                if len(value) > 120:
                    value = value[:117] + "..."
            lines.append(f"{key}: {value}")
        for name, df in self.tables.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.append(df.to_string(index=False))
        lines.append("")
        lines.append(f"wall time: {self.wall_time:.3f} s")
        return "\n".join(lines)

    def render(self, output: Literal["text", "json", "csv"]) -> str:
        if output == "json":
            return self.to_json()
        if output == "csv":
            return self.to_csv()
        return self.to_text()

    def write(self, path, output: Literal["text", "json", "csv"]) -> None:
        write_text(path, self.render(output))
        log_writeout(logger, path)


def ladder_df(ladder) -> pd.DataFrame:
    return pd.DataFrame([(int(n), float(v)) for n, v in ladder], columns=["N", "value"])


def certificate_payload(certificate: CompactnessCertificate) -> Dict[str, Any]:
    return {"lambda": scalar_to_pair(certificate.lambda_value),
            "route": certificate.route,
            "tolerance": certificate.tolerance,
            "ladder": [[n, v] for n, v in certificate.ladder],
            "final_size": certificate.final_size,
            "final_value": certificate.final_value,
            "epsilon_net": to_jsonable(certificate.epsilon_net)}


def witness_payload(witness) -> Dict[str, Any]:
    """
    JSON payload of a refutation witness.

    :param witness:
        Weyl, index or kernel witness.
    :rtype: dict
    """

    if isinstance(witness, WeylWitness):
        return {"kind": "weyl",
                "points": [scalar_to_pair(p) for p in witness.points],
                "tolerance": witness.tolerance,
                "truncation_size": witness.truncation_size,
                "rank_budget": witness.rank_budget,
                "on_adjoint": witness.on_adjoint,
                "families": [{"mu": scalar_to_pair(f.mu),
                              "residuals": list(f.residuals),
                              "vectors": to_jsonable(f.vectors)} for f in witness.families]}
    if isinstance(witness, IndexWitness):
        return to_jsonable(witness)
    if isinstance(witness, KernelWitness):
        return {"kind": "kernel",
                "lambda": scalar_to_pair(witness.lambda_value),
                "kernel_dims": [[n, d] for n, d in witness.kernel_dims],
                "plateau": [[n, v] for n, v in witness.plateau],
                "threshold": witness.threshold}
    raise TypeError(f"Unknown witness type {type(witness).__name__}.")


def witness_df(witness) -> Optional[pd.DataFrame]:
    if isinstance(witness, WeylWitness):
        rows = [(complex(f.mu).real, complex(f.mu).imag, j, r)
                for f in witness.families for j, r in enumerate(f.residuals)]
        return pd.DataFrame(rows, columns=["mu_re", "mu_im", "vector", "residual"])
    if isinstance(witness, KernelWitness):
        rows = [(n, d, v) for (n, d), (_, v) in zip(witness.kernel_dims, witness.plateau)]
        return pd.DataFrame(rows, columns=["N", "kernel_dim", "plateau"])
    return None


def verdict_payload(verdict) -> Dict[str, Any]:
    if isinstance(verdict, Definable):
        return {"verdict": "definable",
                "lambda": scalar_to_pair(verdict.lambda_value),
                "certificate": certificate_payload(verdict.certificate)}
    if isinstance(verdict, NotDefinable):
        return {"verdict": "not_definable", "witness": witness_payload(verdict.witness)}
    return {"verdict": "inconclusive", "reason": verdict.reason, "diagnostics": to_jsonable(verdict.diagnostics)}


def verdict_tables(verdict) -> Dict[str, pd.DataFrame]:
    if isinstance(verdict, Definable):
        return {"ladder": ladder_df(verdict.certificate.ladder)}
    if isinstance(verdict, NotDefinable):
        df = witness_df(verdict.witness)
        return {"witness": df} if df is not None else {}
    tables = {}
    ladders = verdict.diagnostics.get("ladders") or {}
    for route in ("structural", "measured"):
        if ladders.get(route):
            tables[f"{route}_ladder"] = ladder_df(ladders[route])
    return tables


def eigenspace_payload(result: EigenspaceResult) -> Dict[str, Any]:
    return {"mu": scalar_to_pair(result.mu),
            "dimension": result.dimension,
            "sizes": list(result.sizes),
            "residuals": list(result.residuals),
            "containment_residuals": result.containment_residuals,
            "basis": to_jsonable(result.basis)}


def invariant_subspace_payload(result) -> Dict[str, Any]:
    if not isinstance(result, InvariantSubspace):
        return verdict_payload(result)
    return {"route": result.route,
            "mu": None if result.mu is None else scalar_to_pair(result.mu),
            "dimension": result.dimension,
            "residual": result.residual,
            "truncation_size": result.truncation_size,
            "basis": to_jsonable(result.basis)}
