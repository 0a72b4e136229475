import logging
from typing import Optional, Tuple

import numpy as np

from opdef.dataclasses.parameter_set import ParameterSet
from opdef.linalg.kernel import ORTHONORMALIZE_TOLERANCE, norm

logger = logging.getLogger(__name__)


def orthogonal_project(parameters: ParameterSet, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split ``x`` into its component ``Px`` in ``sp(A)`` and the residual ``x - Px``.

    :param parameters:
        Parameter set ``A``.
    :type parameters: ParameterSet
    :param x:
        Dense vector.
    :type x: numpy.ndarray
    :return:
        ``(Px, x - Px)``; the residual is orthogonal to every basis vector of ``sp(A)``.
    :rtype: tuple[numpy.ndarray, numpy.ndarray]
    """

    return parameters.project(x)


def extend_span(parameters: ParameterSet, x) -> Tuple[ParameterSet, Optional[np.ndarray]]:
    """
    ``sp(A u {x}) = sp(A) + F (x - Px)``: the enlarged parameter set and the
    unit direction the span gained, or ``None`` if ``x`` already lies in
    ``sp(A)``.

    :param parameters:
        Parameter set ``A``.
    :type parameters: ParameterSet
    :param x:
        Dense vector.
    :type x: numpy.ndarray
    :rtype: tuple[ParameterSet, numpy.ndarray or None]
    """

    _, residual = parameters.project(x)
    extended = ParameterSet(vectors=list(parameters.vectors) + [np.asarray(x)],
                            coordinate_span=parameters.coordinate_span)
    length = norm(residual)
    if length <= ORTHONORMALIZE_TOLERANCE:
        logger.debug("Vector already lies in the parameter span (residual %.3e).", length)
        return extended, None
    return extended, residual / length


def span_residual(parameters: ParameterSet, x) -> float:
    # distance of x to sp(A)
    return norm(parameters.project(x)[1])
