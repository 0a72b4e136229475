import logging
from typing import List, Optional, Tuple, Union

import numpy as np

from opdef.dataclasses.operator_spec import OperatorSpec
from opdef.dataclasses.results import CompactnessCertificate
from opdef.linalg.kernel import svd
from opdef.operators.application import truncate
from opdef.operators.bounds import tail_norm_bound
from opdef.utils.error_handling import raise_with_logging_warning
from opdef.utils.exceptions import LadderExhaustedError

logger = logging.getLogger(__name__)

LADDER_START = 16
MEASURED_NOISE_FLOOR = 1e-12


def ladder_sizes(n_max: int) -> List[int]:
    """
    Doubling ladder ``16, 32, 64, ...`` up to ``n_max``.
    """

    sizes, size = [], LADDER_START
    while size <= n_max:
        sizes.append(size)
        size *= 2
    return sizes


def _smallest_size_below(spec: OperatorSpec, tol: float, low: int, high: int) -> Tuple[int, float]:
    # least N in (low, high] with tail(N) < tol, given tail(high) < tol
    while high - low > 1:
        middle = (low + high) // 2
        if tail_norm_bound(spec, middle) < tol:
            high = middle
        else:
            low = middle
    return high, tail_norm_bound(spec, high)


def structural_ladder(spec: OperatorSpec, tol: float, n_max: int) -> Optional[List[Tuple[int, float]]]:
    """
    Ladder of structural tail bounds ``||T - P_N T P_N||``.

    The ladder stops at the first size whose bound falls below ``tol``; that
    size is then replaced by the least ``N`` with a bound below ``tol``.

    :return:
        Rows ``(N, bound)``, or ``None`` if the tree has no tail bounds.
    :rtype: list[tuple[int, float]] or None
    """

    if tail_norm_bound(spec, 1) is None:
        return None

    ladder, previous = [], 0
    for size in ladder_sizes(n_max):
        value = tail_norm_bound(spec, size)
        if value < tol:
            ladder.append(_smallest_size_below(spec, tol, previous, size))
            break
        ladder.append((size, float(value)))
        previous = size
    return [(int(n), float(v)) for n, v in ladder]


def _measured_tail(singular_values) -> float:
    # rounding noise of an exactly rank-deficient truncation counts as zero
    value = float(singular_values[len(singular_values) // 2])
    scale = max(1.0, float(singular_values[0]))
    return 0.0 if value < MEASURED_NOISE_FLOOR * scale else value


def measured_ladder(spec: OperatorSpec, n_max: int) -> List[Tuple[int, float]]:
    """
    Ladder of measured tails ``s_{N // 2}(truncate(T, N))`` (descending
    singular values, 0-based) over every size of :func:`ladder_sizes`.

    Values below ``MEASURED_NOISE_FLOOR`` times the largest singular value
    are recorded as zero.
    """

    ladder = []
    for size in ladder_sizes(n_max):
        value = _measured_tail(svd(truncate(spec, size)).singular_values)
        ladder.append((size, value))
        logger.debug("Measured tail at N = %d: %.3e.", size, value)
    return ladder


def measured_net(spec: OperatorSpec, tol: float, size: int) -> List[np.ndarray]:
    """
    Right singular vectors of ``truncate(T, size)`` whose singular values
    reach ``tol``.
    """

    decomposition = svd(truncate(spec, size))
    keep = decomposition.singular_values >= tol
    return [decomposition.right_vectors[:, j].copy() for j in np.flatnonzero(keep)]


def _non_increasing(ladder: List[Tuple[int, float]]) -> bool:
    values = [v for _, v in ladder]
    return all(b <= a for a, b in zip(values, values[1:]))


def certify_compact(spec: OperatorSpec,
                    tol: float,
                    n_max: int,
                    lambda_value: Union[float, complex] = 0.0) -> CompactnessCertificate:
    """
    Certify that an operator is compact.

    Two routes are tried in order:

    * ``structural``: the tail bounds ``tail_norm_bound(T, N)`` fall below
      ``tol`` for some ``N <= n_max``;
    * ``measured``: the singular value ``s_{N // 2}`` of the truncations on
      the full ladder ``16, 32, ..., n_max`` (at least two sizes) is
      non-increasing and its value at ``n_max`` lies below ``tol``; the
      certificate then carries the right singular vectors of the final
      truncation that reach ``tol``.

    :param spec:
        Operator spec, usually ``T - lambda I``.
    :type spec: OperatorSpec
    :param tol:
        Certificate tolerance, ``> 0``.
    :type tol: float
    :param n_max:
        Largest truncation size.
    :type n_max: int
    :param lambda_value:
        Scalar recorded in the certificate.
    :return:
        The certificate with its route and ladder.
    :rtype: CompactnessCertificate
    :raises LadderExhaustedError:
        If neither route succeeds; the payload holds both ladders. This is
        not a refutation.
    """

    structural = structural_ladder(spec, tol, n_max)
    if structural and structural[-1][1] < tol:
        logger.debug("Structural compactness certificate at N = %d.", structural[-1][0])
        return CompactnessCertificate(lambda_value=lambda_value, route="structural", ladder=structural, tolerance=tol)

    measured = measured_ladder(spec, n_max)
    if len(measured) >= 2 and measured[-1][1] < tol and _non_increasing(measured):
        final_size = measured[-1][0]
        logger.debug("Measured compactness certificate at N = %d.", final_size)
        return CompactnessCertificate(lambda_value=lambda_value, route="measured", ladder=measured, tolerance=tol,
                                      epsilon_net=measured_net(spec, tol, final_size))

    raise_with_logging_warning(f"Compactness ladder exhausted up to N = {n_max} without falling below {tol}.",
                               logger=logger,
                               exception_type=LadderExhaustedError,
                               payload={"structural": structural, "measured": measured,
                                        "tolerance": tol, "n_max": n_max})
