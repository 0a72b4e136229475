import logging
import math
from typing import List, Tuple

import numpy as np

from opdef.dataclasses.operator_spec import DiagonalNode, DirectSumNode, FiniteRankNode, OperatorSpec, ProjectionNode
from opdef.dataclasses.parameter_set import ParameterSet
from opdef.dataclasses.scalars import ScalarField

logger = logging.getLogger(__name__)

PARAMETER_CUTOFF = 64
DECAY_TOLERANCE = 1e-12


def _basis_vector(index: int, field: ScalarField) -> np.ndarray:
    out = np.zeros(index + 1, dtype=field.dtype)
    out[index] = 1
    return out


def _interleave(vector: np.ndarray, parity: int) -> np.ndarray:
    # embed a half-space vector into even (0) or odd (1) coordinates
    out = np.zeros(2 * len(vector), dtype=vector.dtype)
    out[parity::2] = vector
    return out


def _node_parameters(node, field: ScalarField, cutoff: int, decay_tolerance: float) -> Tuple[List[np.ndarray], int]:
    if isinstance(node, FiniteRankNode):
        z, e = node.matrices(field)
        vectors = []
        for j in range(node.rank):
            vectors += [z[:, j].copy(), e[:, j].copy()]
        return vectors, 0

    if isinstance(node, ProjectionNode):
        target = node.target
        stop = target.extent if target.is_finite else cutoff
        return [_basis_vector(i, field) for i in target.members_below(stop)], 0

    if isinstance(node, DiagonalNode):
        vectors = [_basis_vector(i, field) for i in range(len(node.prefix))]
        span = 0
        if node.tail.rule == "reciprocal":
            # entries 1/(k+1) stay above the decay tolerance up to this index
            span = math.ceil(1.0 / decay_tolerance)
        return vectors, span

    if isinstance(node, DirectSumNode):
        left, left_span = _node_parameters(node.left, field, cutoff, decay_tolerance)
        right, right_span = _node_parameters(node.right, field, cutoff, decay_tolerance)
        vectors = [_interleave(v, 0) for v in left] + [_interleave(v, 1) for v in right]
        return vectors, 2 * max(left_span, right_span)

    vectors, span = [], 0
    for child in node.children:
        child_vectors, child_span = _node_parameters(child, field, cutoff, decay_tolerance)
        vectors += child_vectors
        span = max(span, child_span)
    return vectors, span


def extract_parameters(spec: OperatorSpec,
                       cutoff: int = PARAMETER_CUTOFF,
                       decay_tolerance: float = DECAY_TOLERANCE) -> ParameterSet:
    """
    Canonical parameter set ``A`` an operator spec is definable over.

    Leaves contribute as follows:

    * finite-rank pairs: every ``z_i`` and ``e_i``;
    * projections: the basis vectors of the target (finite targets entirely,
      infinite ones below ``cutoff``);
    * diagonals: the basis vectors of the prefix; a reciprocal tail adds the
      coordinate block up to the index where its entries fall below
      ``decay_tolerance``;
    * direct sums: the parameters of both halves, embedded into the even and
      odd coordinates.

    Identity, zero, shifts and subsequences contribute nothing.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param cutoff:
        Index bound for the basis vectors of infinite projection targets.
    :type cutoff: int
    :param decay_tolerance:
        Entry size below which a decaying diagonal counts as negligible.
    :type decay_tolerance: float
    :rtype: ParameterSet
    """

    vectors, span = _node_parameters(spec.root, spec.field, cutoff, decay_tolerance)
    parameters = ParameterSet(vectors=vectors, coordinate_span=span)
    logger.debug("Extracted %d parameter vectors (coordinate span %d) from a '%s' spec.",
                 len(vectors), span, spec.kind)
    return parameters
