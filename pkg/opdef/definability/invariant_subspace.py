import logging
from typing import Union

import numpy as np
import scipy.linalg

from opdef.dataclasses.operator_spec import OperatorSpec
from opdef.dataclasses.results import Definable, DefinabilityVerdict, Inconclusive, InvariantSubspace
from opdef.dataclasses.scalars import ScalarField
from opdef.definability.fredholm import eigenspace
from opdef.linalg.kernel import norm
from opdef.operators.application import apply_full, section, subtract_scalar, truncate
from opdef.operators.bounds import tail_norm_bound
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import (FieldMismatchError, IndexInstabilityError, LambdaCollisionError,
                                    NoSpectralGapError, NotDefinableInputError, SpectralConvergenceError)

logger = logging.getLogger(__name__)

EIGENVALUE_ATTEMPTS = 4


def invariance_residual(spec: OperatorSpec, basis: np.ndarray) -> float:
    """
    ``sup_u dist(T u, span E)`` over the orthonormal columns ``u`` of ``basis``.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param basis:
        Orthonormal basis of ``E`` as columns.
    :type basis: numpy.ndarray
    :rtype: float
    """

    image = apply_full(spec, basis)
    length = max(image.shape[0], basis.shape[0])
    padded_image = np.zeros((length, image.shape[1]), dtype=image.dtype)
    padded_image[:image.shape[0]] = image
    padded_basis = np.zeros((length, basis.shape[1]), dtype=basis.dtype)
    padded_basis[:basis.shape[0]] = basis

    rest = padded_image - padded_basis @ (padded_basis.conj().T @ padded_image)
    return max(norm(rest[:, j]) for j in range(rest.shape[1]))


def invariant_subspace(spec: OperatorSpec,
                       verdict: DefinabilityVerdict,
                       tol: float = 1e-8,
                       size: int = 64,
                       rank_threshold: float = 1e-6) -> Union[InvariantSubspace, Inconclusive]:
    """
    A nontrivial closed subspace ``E`` with ``T(E)`` contained in ``E``, for
    ``T = lambda I + K`` with ``K`` compact.

    Routes, in order:

    * ``scalar``: ``K`` vanishes within ``tol`` (section norm plus tail
      bound), so every line is invariant and ``E = span{e_0}``;
    * ``eigenspace``: ``K`` has an eigenvalue ``mu`` with ``|mu| > tol``
      (taken from the eigenvalues of the truncation of ``K``, largest modulus
      first); ``E = E_mu(K)`` is finite-dimensional and invariant under ``T``,
      since ``T`` commutes with ``K``;
    * otherwise the compact part looks quasinilpotent at working precision and
      the result is :class:`Inconclusive`. No constructive subspace is
      attempted in that case.

    :param spec:
        Complex-field operator spec.
    :type spec: OperatorSpec
    :param verdict:
        Prior classification of ``spec``; must be :class:`Definable`.
    :param tol:
        Invariance residual and eigenvalue tolerance.
    :type tol: float
    :param size:
        Truncation size for the eigenvalue search.
    :type size: int
    :param rank_threshold:
        Relative singular-value threshold of the eigenspace computation.
    :type rank_threshold: float
    :rtype: InvariantSubspace or Inconclusive
    :raises FieldMismatchError:
        If the spec is real.
    :raises NotDefinableInputError:
        If the verdict is not :class:`Definable`.
    """

    if spec.field is ScalarField.REAL:
        raise_with_logging_error("Invariant subspaces are computed over the complex field; complexify the spec first.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    if not isinstance(verdict, Definable):
        raise_with_logging_error(f"invariant_subspace needs a definable operator, got a '{verdict.kind}' verdict.",
                                 logger=logger,
                                 exception_type=NotDefinableInputError)

    compact = subtract_scalar(spec, verdict.lambda_value)

    tail = tail_norm_bound(compact, size)
    if tail is not None and scipy.linalg.norm(section(compact, size), 2) + tail < tol:
        basis = np.zeros((1, 1), dtype=spec.dtype)
        basis[0, 0] = 1.0
        logger.info("Compact part vanishes; every line is invariant.")
        return InvariantSubspace(route="scalar", basis=basis, residual=invariance_residual(spec, basis),
                                 truncation_size=size)

    try:
        eigenvalues = scipy.linalg.eigvals(truncate(compact, size))
    except scipy.linalg.LinAlgError as exp:
        raise_with_logging_error(f"Eigenvalues of the {size} x {size} truncation did not converge.",
                                 logger=logger,
                                 exception_type=SpectralConvergenceError,
                                 exp=exp)
    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    candidates = [complex(eigenvalues[i]) for i in order if abs(eigenvalues[i]) > tol][:EIGENVALUE_ATTEMPTS]

    attempts = []
    for mu in candidates:
        try:
            result = eigenspace(compact, mu, rank_threshold, size, lambda_value=0.0)
        except (NoSpectralGapError, IndexInstabilityError, LambdaCollisionError) as exp:
            attempts.append({"mu": [mu.real, mu.imag], "error": str(exp)})
            continue
        if result.dimension == 0:
            attempts.append({"mu": [mu.real, mu.imag], "error": "empty eigenspace"})
            continue
        residual = invariance_residual(spec, result.basis)
        if residual < tol:
            logger.info("Invariant eigenspace of the compact part at mu = %s, dimension %d.", mu, result.dimension)
            return InvariantSubspace(route="eigenspace", mu=mu, basis=result.basis, residual=residual,
                                     truncation_size=size)
        attempts.append({"mu": [mu.real, mu.imag], "residual": residual})

    largest = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    logger.info("No invariant subspace certified; largest eigenvalue modulus of the compact part %.3e.", largest)
    return Inconclusive(reason="compact part has no certifiable eigenvalue above the tolerance",
                        diagnostics={"largest_eigenvalue_modulus": largest, "attempts": attempts})
