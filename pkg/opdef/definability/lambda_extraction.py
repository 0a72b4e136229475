import logging
import math
from typing import List, Tuple, Union

import numpy as np

from opdef.dataclasses.operator_spec import OperatorSpec
from opdef.dataclasses.parameter_set import ParameterSet
from opdef.dataclasses.scalars import ScalarField
from opdef.dataclasses.windowed_vector import WindowedVector
from opdef.operators.application import apply_window
from opdef.operators.bounds import norm_bound, split_scalar
from opdef.utils.error_handling import raise_with_logging_warning
from opdef.utils.exceptions import ProbeDisagreementError

logger = logging.getLogger(__name__)

BLOCK_WIDTH = 8


def sample_positions(start: int, count: int) -> List[int]:
    """
    Geometrically spread indices ``k_0 = start``, ``k_{j+1} = 2 k_j + 1``.

    Consecutive indices can all miss a periodic structure (every fourth
    coordinate, say); doubling spreads them over residues and scales.
    """

    positions, k = [], start
    for _ in range(count):
        positions.append(k)
        k = 2 * k + 1
    return positions


def block_vector(offset: int, width: int, field: ScalarField) -> WindowedVector:
    # unit vector (e_offset + ... + e_{offset+width-1}) / sqrt(width)
    return WindowedVector(offset=offset, values=np.full((width, 1), 1.0 / math.sqrt(width), dtype=field.dtype))


def _window_inner(x: WindowedVector, y: WindowedVector) -> complex:
    # <x, y> for single-column windows
    lo, hi = max(x.offset, y.offset), min(x.stop, y.stop)
    if hi <= lo:
        return 0j
    return complex(np.vdot(y.values[lo - y.offset:hi - y.offset, 0], x.values[lo - x.offset:hi - x.offset, 0]))


def _measure(spec: OperatorSpec, parameters: ParameterSet, vector: WindowedVector) -> Tuple[complex, float]:
    image = apply_window(spec.root, vector, spec.field)
    value = _window_inner(image, vector)
    residual = float(parameters.complement_norms(image.added(vector.scaled(-value)))[0])
    return value, residual


def lambda_extract(spec: OperatorSpec,
                   parameters: ParameterSet,
                   probe_count: int = 3,
                   probe_gap: int = 4,
                   tolerance: float = 1e-8) -> Union[float, complex]:
    """
    The scalar ``lambda`` with ``T = P T + lambda (I - P)``, read off from
    unit vectors orthogonal to ``sp(A)``.

    Two families of unit vectors are used, both beyond the parameter support:

    * basis vectors ``e_k`` at the indices of :func:`sample_positions`,
      starting at ``support + probe_gap``;
    * block vectors ``(e_k + ... + e_{k + BLOCK_WIDTH - 1}) / sqrt(BLOCK_WIDTH)``
      at the same indices.

    Each vector ``x`` yields ``lambda_x = <T x, x>`` together with the
    residual ``||(I - P)(T x - lambda_x x)||``. All residuals must vanish
    (relative to ``max(1, norm_bound(T))``) and all ``lambda_x`` must agree
    within ``tolerance``. Block vectors see operators that act differently on
    neighbouring coordinates, such as a projection onto every fourth one. If
    the structural scalar part of the tree agrees with the measurement, it is
    returned instead of the measured value.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param parameters:
        Parameter set ``A``.
    :type parameters: ParameterSet
    :param probe_count:
        Number of positions; each carries a basis and a block vector. At
        least 3 is recommended.
    :type probe_count: int
    :param probe_gap:
        Distance of the first position from the parameter support.
    :type probe_gap: int
    :param tolerance:
        Agreement and residual tolerance.
    :type tolerance: float
    :return:
        ``lambda``, a ``float`` for real and a ``complex`` for complex specs.
    :raises ProbeDisagreementError:
        If the measurements disagree or leave residuals; the payload holds
        the table ``[(k, width, lambda_x, residual), ...]`` with ``width`` 1
        for basis vectors.
    """

    scale = max(1.0, norm_bound(spec))
    positions = sample_positions(parameters.support + probe_gap, probe_count)

    table = []
    for width in (1, BLOCK_WIDTH):
        for k in positions:
            value, residual = _measure(spec, parameters, block_vector(k, width, spec.field))
            table.append((k, width, value, residual))
            logger.debug("Lambda measurement at k = %d, width %d: value %s, residual %.3e.", k, width, value, residual)

    values = [v for _, _, v, _ in table]
    spread = max(abs(a - b) for a in values for b in values)
    worst = max(r for _, _, _, r in table)
    if spread > tolerance or worst > tolerance * scale:
        raise_with_logging_warning(f"Lambda probes disagree (spread {spread:.3e}, largest residual {worst:.3e}).",
                                   logger=logger,
                                   exception_type=ProbeDisagreementError,
                                   payload=[(k, w, [v.real, v.imag], r) for k, w, v, r in table])

    value = values[0]
    structural, _ = split_scalar(spec)
    if abs(structural - value) <= tolerance:
        value = complex(structural)
    logger.debug("Extracted lambda = %s from %d measurements.", value, len(table))
    return value.real if spec.field is ScalarField.REAL else value
