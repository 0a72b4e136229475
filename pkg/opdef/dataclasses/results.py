from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, model_validator

Scalar = Union[float, complex]


class _ResultModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


class LinearityReport(_ResultModel):
    """
    Outcome of randomized additivity and homogeneity probes.
    """

    trials: int
    additivity_residual: float
    homogeneity_residual: float
    tolerance: float
    seed: int

    @property
    def passed(self) -> bool:
        return max(self.additivity_residual, self.homogeneity_residual) <= self.tolerance


class CompactnessCertificate(_ResultModel):
    """
    Numeric evidence that ``T - lambda I`` is compact.

    :param lambda_value: Scalar part of the certified decomposition.
    :param route: ``structural`` (tail-bound ladder) or ``measured``
                  (singular value at index ``N // 2`` of each truncation).
    :param ladder: Rows ``(N, value)``; values are non-increasing in ``N``.
                   A measured ladder has at least two rows.
    :param tolerance: Certificate tolerance; the final ladder value lies below it.
    :param epsilon_net: Measured route only: the right singular vectors of the
                        final truncation whose singular values reach the
                        tolerance. On their orthogonal complement the
                        truncation has norm below the tolerance, so the image
                        of the unit ball lies within the tolerance of the
                        span of their images.
    """

    lambda_value: Scalar = 0.0
    route: Literal["structural", "measured"]
    ladder: List[Tuple[int, float]]
    tolerance: float
    epsilon_net: Optional[List[np.ndarray]] = None

    @model_validator(mode="after")
    def check_ladder(self):
        if not self.ladder:
            raise ValueError("A compactness certificate needs at least one ladder row.")
        if self.route == "measured" and len(self.ladder) < 2:
            raise ValueError("A measured compactness ladder needs at least two rows.")
        values = [v for _, v in self.ladder]
        if any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("Compactness ladder values must be non-increasing.")
        if values[-1] >= self.tolerance:
            raise ValueError(f"Final ladder value {values[-1]} is not below the tolerance {self.tolerance}.")
        return self

    @property
    def final_value(self) -> float:
        return self.ladder[-1][1]

    @property
    def final_size(self) -> int:
        return self.ladder[-1][0]


class WeylFamily(_ResultModel):
    """
    Orthonormal near-null vectors of ``T - mu I`` (as columns of ``vectors``).
    """

    mu: Scalar
    vectors: np.ndarray
    residuals: List[float]

    @property
    def size(self) -> int:
        return self.vectors.shape[1]


class WeylWitness(_ResultModel):
    """
    Two well separated points of the essential spectrum, each backed by more
    orthonormal near-null vectors than the rank budget can explain.

    :param on_adjoint: The families belong to the adjoint operator; the
                       points of ``T`` itself are their conjugates.
    """

    kind: Literal["weyl"] = "weyl"
    families: List[WeylFamily]
    tolerance: float
    truncation_size: int
    rank_budget: int = 5
    on_adjoint: bool = False

    @model_validator(mode="after")
    def check_families(self):
        if len(self.families) < 2:
            raise ValueError("A Weyl witness needs families at two distinct points.")
        mu_1, mu_2 = self.families[0].mu, self.families[1].mu
        if abs(mu_1 - mu_2) <= 10 * self.tolerance:
            raise ValueError("Weyl witness points must be separated by more than 10 x tolerance.")
        for family in self.families:
            if family.size <= self.rank_budget:
                raise ValueError("Each Weyl family must exceed the rank budget.")
            if max(family.residuals) >= self.tolerance:
                raise ValueError("Weyl family residuals must lie below the tolerance.")
        return self

    @property
    def points(self) -> List[Scalar]:
        if self.on_adjoint:
            return [np.conj(f.mu).item() for f in self.families]
        return [f.mu for f in self.families]


class IndexWitness(_ResultModel):
    """
    Kernel and cokernel dimensions measured on finite sections, stable between two sizes.
    """

    kind: Literal["index"] = "index"
    kernel_dim: NonNegativeInt
    cokernel_dim: NonNegativeInt
    index: int
    threshold: float
    sizes: List[int]

    @model_validator(mode="after")
    def check_index(self):
        if self.index != self.kernel_dim - self.cokernel_dim:
            raise ValueError("index must equal kernel_dim - cokernel_dim.")
        return self


class KernelWitness(_ResultModel):
    """
    A kernel that keeps growing with the section size, together with a
    singular-value plateau that rules out compactness.
    """

    kind: Literal["kernel"] = "kernel"
    lambda_value: Scalar
    kernel_dims: List[Tuple[int, int]]
    plateau: List[Tuple[int, float]]
    threshold: float


class EigenspaceResult(_ResultModel):
    """
    Orthonormal basis (columns of ``basis``) of an eigenspace ``E_mu(T)``.

    :param containment_residuals: Distance of each basis vector to ``sp(A)``,
                                  when a parameter set was supplied.
    """

    mu: Scalar
    basis: np.ndarray
    residuals: List[float]
    sizes: List[int] = Field(default_factory=list)
    containment_residuals: Optional[List[float]] = None

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


class InvariantSubspace(_ResultModel):
    """
    Basis of a closed subspace ``E`` with ``T(E)`` contained in ``E`` (up to the reported residual).
    """

    route: Literal["scalar", "eigenspace"]
    mu: Optional[Scalar] = None
    basis: np.ndarray
    residual: float
    truncation_size: int

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


class Definable(_ResultModel):
    kind: Literal["definable"] = "definable"
    lambda_value: Scalar
    certificate: CompactnessCertificate

    @property
    def exit_code(self) -> int:
        return 0


class NotDefinable(_ResultModel):
    kind: Literal["not_definable"] = "not_definable"
    witness: Union[WeylWitness, IndexWitness, KernelWitness] = Field(discriminator="kind")

    @property
    def exit_code(self) -> int:
        return 1


class Inconclusive(_ResultModel):
    kind: Literal["inconclusive"] = "inconclusive"
    reason: str
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 2


DefinabilityVerdict = Union[Definable, NotDefinable, Inconclusive]
