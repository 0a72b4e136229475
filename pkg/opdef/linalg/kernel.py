import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from opdef.dataclasses.scalars import ScalarField
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import FieldMismatchError, NotHermitianError, SpectralConvergenceError, SupportSizeError

logger = logging.getLogger(__name__)

ORTHONORMALIZE_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-10


class SvdResult(BaseModel):
    """
    Thin singular value decomposition ``A = U diag(s) V*``.

    :param singular_values: Non-negative singular values, sorted descending.
    :type singular_values: numpy.ndarray
    :param left_vectors: Orthonormal columns ``U`` (rows x k).
    :type left_vectors: numpy.ndarray
    :param right_vectors: Orthonormal columns ``V`` (cols x k).
    :type right_vectors: numpy.ndarray
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T

    def smallest_right_vectors(self, count: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Right singular vectors belonging to the ``count`` smallest singular values.

        :param count:
            Number of vectors requested.
        :type count: int
        :return:
            Singular values (ascending) and the matching right vectors as columns.
        :rtype: tuple[numpy.ndarray, numpy.ndarray]
        """

        order = np.argsort(self.singular_values, kind="stable")[:count]
        return self.singular_values[order], self.right_vectors[:, order]


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise_with_logging_error(f"Expected a one-dimensional vector, got shape {x.shape}.",
                                 logger=logger,
                                 exception_type=SupportSizeError)
    return x


def pad_to(x: np.ndarray, length: int) -> np.ndarray:
    """
    Zero-pad (never truncate) a vector to ``length`` entries.

    :param x:
        Input vector.
    :type x: numpy.ndarray
    :param length:
        Target length; shorter targets leave ``x`` unchanged.
    :type length: int
    :rtype: numpy.ndarray
    """

    if len(x) >= length:
        return x
    out = np.zeros(length, dtype=x.dtype)
    out[:len(x)] = x
    return out


def inner_product(x, y) -> Union[float, complex]:
    """
    Inner product ``<x, y> = sum_i x_i conj(y_i)``, linear in the first and
    conjugate-linear in the second argument. The shorter vector is
    zero-padded.

    :param x:
        First vector.
    :type x: numpy.ndarray
    :param y:
        Second vector, same field as ``x``.
    :type y: numpy.ndarray
    :return:
        The inner product, ``float`` for real and ``complex`` for complex input.
    :raises FieldMismatchError:
        If one vector is real and the other complex.
    """

    x, y = _as_vector(x), _as_vector(y)
    if ScalarField.of(x) is not ScalarField.of(y):
        raise_with_logging_error("Inner product of a real and a complex vector is not defined.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)

    n = min(len(x), len(y))
    value = np.vdot(y[:n], x[:n])
    return complex(value) if np.iscomplexobj(x) else float(value)


def norm(x) -> float:
    """
    Euclidean norm ``sqrt(Re <x, x>)``.

    :param x:
        Input vector.
    :type x: numpy.ndarray
    :rtype: float
    """

    return float(scipy.linalg.norm(_as_vector(x)))


def svd(a) -> SvdResult:
    """
    Thin singular value decomposition of a dense matrix.

    LAPACK's divide-and-conquer driver is tried first; on non-convergence the
    QR-iteration driver is used. If both fail, the failure is reported.

    :param a:
        Matrix with at least one row and one column.
    :type a: numpy.ndarray
    :rtype: SvdResult
    :raises SupportSizeError:
        If the matrix is empty.
    :raises SpectralConvergenceError:
        If neither LAPACK driver converges.
    """

    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise_with_logging_error(f"svd needs a matrix with rows, cols >= 1, got shape {a.shape}.",
                                 logger=logger,
                                 exception_type=SupportSizeError)

    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesdd")
    except scipy.linalg.LinAlgError:
        logger.debug("gesdd did not converge on a %s matrix, retrying with gesvd.", a.shape)
        try:
            u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
        except scipy.linalg.LinAlgError as exp:
            raise_with_logging_error(f"SVD of a {a.shape} matrix did not converge.",
                                     logger=logger,
                                     exception_type=SpectralConvergenceError,
                                     exp=exp)
    return SvdResult(singular_values=s, left_vectors=u, right_vectors=vh.conj().T)


def hermitian_eigen(a) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian (real symmetric) matrix.

    :param a:
        Square Hermitian matrix.
    :type a: numpy.ndarray
    :return:
        Eigenvalues in ascending order and orthonormal eigenvectors as columns.
    :rtype: tuple[numpy.ndarray, numpy.ndarray]
    :raises NotHermitianError:
        If ``a`` is not square or deviates from its adjoint by more than
        ``1e-10 * max(1, ||a||)``.
    :raises SpectralConvergenceError:
        If the eigensolver fails.
    """

    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise_with_logging_error(f"hermitian_eigen needs a square matrix, got shape {a.shape}.",
                                 logger=logger,
                                 exception_type=NotHermitianError)

    scale = max(1.0, float(scipy.linalg.norm(a, 2))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOLERANCE * scale:
        raise_with_logging_error("Matrix is not Hermitian within tolerance.",
                                 logger=logger,
                                 exception_type=NotHermitianError)

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(a)
    except scipy.linalg.LinAlgError as exp:
        raise_with_logging_error(f"Hermitian eigensolver failed on a {a.shape} matrix.",
                                 logger=logger,
                                 exception_type=SpectralConvergenceError,
                                 exp=exp)
    return eigenvalues, eigenvectors


def orthonormalize(vectors: Sequence[np.ndarray], tolerance: float = ORTHONORMALIZE_TOLERANCE) -> List[np.ndarray]:
    """
    Orthonormal basis of the span of ``vectors``.

    Vectors of different lengths are zero-padded to a common length. The
    basis comes from a column-pivoted QR factorization; directions whose
    residual norm falls below ``tolerance`` are dropped.

    :param vectors:
        Input vectors (may be empty).
    :type vectors: list[numpy.ndarray]
    :param tolerance:
        Residual norm below which a direction counts as dependent.
    :type tolerance: float
    :return:
        Orthonormal vectors spanning the same subspace.
    :rtype: list[numpy.ndarray]
    """

    vectors = [_as_vector(v) for v in vectors]
    if not vectors:
        return []

    length = max(len(v) for v in vectors)
    if length == 0:
        return []
    dtype = np.result_type(*vectors, np.float64)
    matrix = np.column_stack([pad_to(v.astype(dtype), length) for v in vectors])

    q, r, _ = scipy.linalg.qr(matrix, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    rank = int(np.sum(diagonal > tolerance))
    return [q[:, j].copy() for j in range(rank)]
