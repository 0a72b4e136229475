import logging
from typing import Optional, Tuple, Union

import numpy as np

from opdef.dataclasses.operator_spec import OperatorSpec
from opdef.dataclasses.parameter_set import ParameterSet
from opdef.dataclasses.results import EigenspaceResult, IndexWitness, KernelWitness
from opdef.dataclasses.scalars import ScalarField
from opdef.definability.lambda_extraction import lambda_extract
from opdef.linalg.kernel import norm, svd
from opdef.operators.application import adjoint_spec, apply_full, complexify, section, subtract_scalar
from opdef.operators.bounds import norm_bound
from opdef.operators.parameters import extract_parameters
from opdef.predicates.projection import span_residual
from opdef.utils.error_handling import raise_with_logging_error, raise_with_logging_warning
from opdef.utils.exceptions import (IndexInstabilityError, LambdaCollisionError, NoSpectralGapError,
                                    ProbeDisagreementError)

logger = logging.getLogger(__name__)

GAP_FACTOR = 10.0
PLATEAU_RATIO = 0.9

Scalar = Union[float, complex]


def _scale(spec: OperatorSpec) -> float:
    value = norm_bound(spec)
    return value if value > 0 else 1.0


def _null_space(spec: OperatorSpec, threshold: float, size: int, require_gap: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    # singular values of the section and the right vectors below threshold * ||T||
    decomposition = svd(section(spec, size))
    values = decomposition.singular_values
    cutoff = threshold * _scale(spec)
    if require_gap:
        inside = values[(values >= cutoff) & (values < GAP_FACTOR * cutoff)]
        if inside.size:
            raise_with_logging_warning(f"No spectral gap at N = {size}: {inside.size} singular value(s) in "
                                       f"[{cutoff:.3e}, {GAP_FACTOR * cutoff:.3e}).",
                                       logger=logger,
                                       exception_type=NoSpectralGapError,
                                       payload={"size": size, "cutoff": cutoff, "values": inside.tolist()})
    # sections have at least N rows, so there are N singular values
    return values, decomposition.right_vectors[:, values < cutoff]


def _nullity(spec: OperatorSpec, threshold: float, size: int) -> Tuple[int, float]:
    # kernel dimension and the smallest singular value kept out of the kernel
    values, vectors = _null_space(spec, threshold, size)
    kept = values[values >= threshold * _scale(spec)]
    return vectors.shape[1], float(kept.min()) if kept.size else 0.0


def fredholm_index(spec: OperatorSpec, threshold: float = 1e-6, size: int = 128) -> IndexWitness:
    """
    Kernel and cokernel dimensions of an operator, measured on finite
    sections.

    Kernels come from the section ``T P_N``, whose output rows cover the whole
    image, so shifts show no truncation boundary; cokernels are kernels of
    the adjoint's section. Both dimensions must agree at ``N`` and ``2N``, and
    the smallest singular value outside the kernel must not shrink between
    the two sizes (closed range), which rules out compact operators whose
    singular values merely pass the threshold late.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param threshold:
        Relative singular-value threshold; values below ``threshold * ||T||``
        count toward the kernel.
    :type threshold: float
    :param size:
        Section size ``N``.
    :type size: int
    :rtype: IndexWitness
    :raises NoSpectralGapError:
        If singular values fall into ``[threshold, 10 * threshold) * ||T||``.
    :raises IndexInstabilityError:
        If the dimensions differ between ``N`` and ``2N``.
    """

    adjoint = adjoint_spec(spec)
    dims, floors = {}, {}
    for n in (size, 2 * size):
        (kernel, floor), (cokernel, co_floor) = _nullity(spec, threshold, n), _nullity(adjoint, threshold, n)
        dims[n], floors[n] = (kernel, cokernel), min(floor, co_floor)
        logger.debug("Section N = %d: kernel %d, cokernel %d, lower bound %.3e.", n, kernel, cokernel, floors[n])

    if dims[size] != dims[2 * size]:
        raise_with_logging_warning(f"Kernel / cokernel dimensions unstable: {dims[size]} at N = {size}, "
                                   f"{dims[2 * size]} at N = {2 * size}.",
                                   logger=logger,
                                   exception_type=IndexInstabilityError,
                                   payload={str(n): list(d) for n, d in dims.items()})
    if floors[2 * size] < PLATEAU_RATIO * floors[size]:
        raise_with_logging_warning(f"Range not closed at this scale: lower bound {floors[size]:.3e} at N = {size}, "
                                   f"{floors[2 * size]:.3e} at N = {2 * size}.",
                                   logger=logger,
                                   exception_type=IndexInstabilityError,
                                   payload={str(n): f for n, f in floors.items()})

    kernel_dim, cokernel_dim = dims[size]
    return IndexWitness(kernel_dim=kernel_dim,
                        cokernel_dim=cokernel_dim,
                        index=kernel_dim - cokernel_dim,
                        threshold=threshold,
                        sizes=[size, 2 * size])


def kernel_basis(spec: OperatorSpec,
                 threshold: float = 1e-6,
                 size: int = 128,
                 parameters: Optional[ParameterSet] = None) -> EigenspaceResult:
    """
    Orthonormal basis of the kernel, as near-null right singular vectors of
    the section at size ``N``.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param threshold:
        Relative singular-value threshold.
    :type threshold: float
    :param size:
        Section size ``N``.
    :type size: int
    :param parameters:
        Optional parameter set; each kernel vector's distance to ``sp(A)`` is reported.
    :type parameters: ParameterSet, optional
    :rtype: EigenspaceResult
    :raises NoSpectralGapError:
        If there is no spectral gap around the threshold.
    """

    _, vectors = _null_space(spec, threshold, size)
    residuals = [norm(apply_full(spec, vectors[:, j])) for j in range(vectors.shape[1])]
    containment = None
    if parameters is not None:
        containment = [span_residual(parameters, vectors[:, j]) for j in range(vectors.shape[1])]
    return EigenspaceResult(mu=0.0, basis=vectors, residuals=residuals, sizes=[size],
                            containment_residuals=containment)


def eigenspace(spec: OperatorSpec,
               mu: Scalar,
               tol: float = 1e-6,
               size: int = 128,
               parameters: Optional[ParameterSet] = None,
               lambda_value: Optional[Scalar] = None) -> EigenspaceResult:
    """
    The eigenspace ``E_mu(T) = ker(T - mu I)``, with its dimension checked at
    ``N`` and ``2N``.

    ``mu`` must differ from the scalar part ``lambda(T)``, where no finiteness
    holds. When ``lambda_value`` is not given it is extracted; operators whose
    probes disagree have no scalar part and skip the check.

    :param spec:
        Operator spec; real specs are complexified for complex ``mu``.
    :type spec: OperatorSpec
    :param mu:
        Eigenvalue.
    :param tol:
        Relative singular-value threshold, also the collision distance to ``lambda``.
    :type tol: float
    :param size:
        Section size ``N``.
    :type size: int
    :param parameters:
        Optional parameter set for containment residuals.
    :type parameters: ParameterSet, optional
    :param lambda_value:
        Known scalar part of ``T``.
    :rtype: EigenspaceResult
    :raises LambdaCollisionError:
        If ``|mu - lambda| <= tol``.
    :raises IndexInstabilityError:
        If the dimension differs between ``N`` and ``2N``.
    """

    if spec.field is ScalarField.REAL and complex(mu).imag != 0.0:
        spec = complexify(spec)

    if lambda_value is None:
        try:
            lambda_value = lambda_extract(spec, parameters or extract_parameters(spec))
        except ProbeDisagreementError:
            logger.debug("No scalar part to compare mu = %s with.", mu)
    if lambda_value is not None and abs(mu - lambda_value) <= tol:
        raise_with_logging_error(f"mu = {mu} coincides with lambda = {lambda_value}; "
                                 f"the eigenspace there need not be finite-dimensional.",
                                 logger=logger,
                                 exception_type=LambdaCollisionError)

    shifted = subtract_scalar(spec, mu)
    small = kernel_basis(shifted, tol, size, parameters)
    large = kernel_basis(shifted, tol, 2 * size)
    if small.dimension != large.dimension:
        raise_with_logging_warning(f"Eigenspace dimension at mu = {mu} unstable: {small.dimension} at N = {size}, "
                                   f"{large.dimension} at N = {2 * size}.",
                                   logger=logger,
                                   exception_type=IndexInstabilityError,
                                   payload={str(size): small.dimension, str(2 * size): large.dimension})

    logger.debug("Eigenspace at mu = %s has dimension %d.", mu, small.dimension)
    return small.model_copy(update={"mu": mu, "sizes": [size, 2 * size]})


def _plateau_value(values: np.ndarray, cutoff: float) -> float:
    # median of the singular values above the kernel cutoff
    nonzero = np.sort(values[values >= cutoff])[::-1]
    return float(nonzero[len(nonzero) // 2]) if nonzero.size else 0.0


def kernel_witness(spec: OperatorSpec,
                   threshold: float = 1e-6,
                   size: int = 128,
                   rank_budget: int = 5,
                   mu: Scalar = 0.0) -> Optional[KernelWitness]:
    """
    Evidence that ``ker(T - mu I)`` is infinite-dimensional while ``T - mu I``
    is not compact.

    ``T - mu I = (lambda - mu) I + K`` has a finite-dimensional kernel unless
    ``lambda = mu``, in which case ``T - mu I`` is compact. A kernel that grows
    from ``N`` to ``2N`` beyond the rank budget, together with a plateau of
    the remaining singular values, rules out both cases.

    :rtype: KernelWitness or None
    """

    shifted = subtract_scalar(spec, mu)
    cutoff = threshold * _scale(shifted)
    dims, plateau = [], []
    for n in (size, 2 * size):
        values, vectors = _null_space(shifted, threshold, n, require_gap=False)
        dims.append((n, int(vectors.shape[1])))
        plateau.append((n, _plateau_value(values, cutoff)))

    (_, small), (_, large) = dims
    growing = small > rank_budget and large > small
    flat = plateau[0][1] > 0 and plateau[1][1] >= PLATEAU_RATIO * plateau[0][1]
    logger.debug("Kernel dimensions %s, plateau %s.", dims, plateau)
    if not (growing and flat):
        return None
    return KernelWitness(lambda_value=mu, kernel_dims=dims, plateau=plateau, threshold=threshold)
