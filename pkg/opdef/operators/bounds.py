import logging
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from opdef.dataclasses.operator_spec import (AdjointNode, ComposeNode, CoordinateSubsequenceNode, DiagonalNode,
                                             DiagonalTail, DirectSumNode, FiniteRankNode, IdentityNode,
                                             OperatorSpec, ProjectionNode, ScaleNode, ShiftLeftNode, ShiftRightNode,
                                             SumNode, ZeroNode, complement_of)
from opdef.dataclasses.scalars import ScalarField, decode_scalar, decode_vector, encode_scalar

logger = logging.getLogger(__name__)


def _spectral_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.norm(matrix, 2))


def _diagonal_sup(node: DiagonalNode, field: ScalarField, start: int = 0) -> float:
    # sup of |d_k| over k >= start
    prefix = np.abs(decode_vector(node.prefix, field))[start:]
    head = float(np.max(prefix)) if prefix.size else 0.0
    if node.tail.rule == "constant":
        tail = abs(decode_scalar(node.tail.value, field))
    elif node.tail.rule == "reciprocal":
        tail = 1.0 / (max(start, len(node.prefix)) + 1)
    else:
        tail = 0.0
    return max(head, tail)


def _node_norm_bound(node, field: ScalarField) -> float:
    if isinstance(node, IdentityNode):
        return 1.0
    if isinstance(node, ZeroNode):
        return 0.0
    if isinstance(node, DiagonalNode):
        return _diagonal_sup(node, field)
    if isinstance(node, (ShiftLeftNode, ShiftRightNode, CoordinateSubsequenceNode)):
        return 1.0
    if isinstance(node, ProjectionNode):
        target = node.target
        empty = target.is_finite and not target.members_below(target.extent)
        return 0.0 if empty else 1.0
    if isinstance(node, FiniteRankNode):
        return _spectral_norm(node.matrices(field)[0])
    if isinstance(node, ScaleNode):
        return abs(decode_scalar(node.c, field)) * _node_norm_bound(node.inner, field)
    if isinstance(node, SumNode):
        return _node_norm_bound(node.left, field) + _node_norm_bound(node.right, field)
    if isinstance(node, ComposeNode):
        return _node_norm_bound(node.outer, field) * _node_norm_bound(node.inner, field)
    if isinstance(node, AdjointNode):
        return _node_norm_bound(node.inner, field)
    if isinstance(node, DirectSumNode):
        return max(_node_norm_bound(node.left, field), _node_norm_bound(node.right, field))
    raise TypeError(f"Unknown operator node kind: {type(node).__name__}.")


def norm_bound(spec: OperatorSpec) -> float:
    """
    Upper bound on the operator norm ``||T||``.

    Exact for identity, zero, diagonal, shift, subsequence, projection and
    finite-rank leaves; composite trees use the triangle inequality and
    submultiplicativity, direct sums the maximum of both halves.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :rtype: float
    """

    return _node_norm_bound(spec.root, spec.field)


# --- scalar split

def _is_zero(node) -> bool:
    return isinstance(node, ZeroNode)


def _scaled(c, node, field: ScalarField):
    if c == 0 or _is_zero(node):
        return ZeroNode()
    if c == 1:
        return node
    return ScaleNode(c=encode_scalar(c, field), inner=node)


def _summed(*nodes):
    nodes = [n for n in nodes if not _is_zero(n)]
    if not nodes:
        return ZeroNode()
    out = nodes[0]
    for node in nodes[1:]:
        out = SumNode(left=out, right=node)
    return out


def _node_split(node, field: ScalarField) -> Tuple[Union[float, complex], object]:
    if isinstance(node, IdentityNode):
        return 1.0, ZeroNode()
    if isinstance(node, DiagonalNode) and node.tail.rule == "constant":
        c = decode_scalar(node.tail.value, field)
        prefix = [encode_scalar(v - c, field) for v in decode_vector(node.prefix, field)]
        return c, DiagonalNode(prefix=prefix, tail=DiagonalTail(rule="zero"))
    if isinstance(node, ProjectionNode) and node.target.is_cofinite:
        # P = I - Q with Q the projection onto the finite complement
        rest = ProjectionNode(target=complement_of(node.target))
        return 1.0, ScaleNode(c=encode_scalar(-1.0, field), inner=rest)
    if isinstance(node, ScaleNode):
        r = decode_scalar(node.c, field)
        c, rest = _node_split(node.inner, field)
        return r * c, _scaled(r, rest, field)
    if isinstance(node, SumNode):
        c_left, rest_left = _node_split(node.left, field)
        c_right, rest_right = _node_split(node.right, field)
        return c_left + c_right, _summed(rest_left, rest_right)
    if isinstance(node, ComposeNode):
        # (a + A)(b + B) = ab + aB + bA + AB
        a, rest_outer = _node_split(node.outer, field)
        b, rest_inner = _node_split(node.inner, field)
        product = ZeroNode() if _is_zero(rest_outer) or _is_zero(rest_inner) \
            else ComposeNode(outer=rest_outer, inner=rest_inner)
        return a * b, _summed(_scaled(a, rest_inner, field), _scaled(b, rest_outer, field), product)
    if isinstance(node, AdjointNode):
        c, rest = _node_split(node.inner, field)
        return np.conj(c).item(), rest if _is_zero(rest) else AdjointNode(inner=rest)
    if isinstance(node, DirectSumNode):
        c_left, rest_left = _node_split(node.left, field)
        c_right, rest_right = _node_split(node.right, field)
        if c_left == c_right:
            if _is_zero(rest_left) and _is_zero(rest_right):
                return c_left, ZeroNode()
            return c_left, DirectSumNode(left=rest_left, right=rest_right)
    return 0.0, node


def split_scalar(spec: OperatorSpec) -> Tuple[Union[float, complex], OperatorSpec]:
    """
    Rewrite ``T`` as ``c I + R``, collecting every scalar part the tree
    exposes structurally (identity leaves, constant diagonal tails, cofinite
    projections, products and equal-scalar direct sums of those).

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :return:
        The scalar ``c`` (in the spec's field) and the remainder ``R``.
    :rtype: tuple
    """

    c, rest = _node_split(spec.root, spec.field)
    c = decode_scalar(encode_scalar(c, spec.field), spec.field) if spec.field is ScalarField.REAL else complex(c)
    return c, spec.with_root(rest)


# --- tail bounds

def _finite_rank_tail(node: FiniteRankNode, field: ScalarField, size: int) -> float:
    # ||T - P T P|| <= ||(I - P) E|| ||Z|| + ||E|| ||(I - P) Z||
    z, e = node.matrices(field)
    return _spectral_norm(e[size:]) * _spectral_norm(z) + _spectral_norm(z[size:])


def _node_tail(node, field: ScalarField, size: int) -> Optional[float]:
    if isinstance(node, ZeroNode):
        return 0.0
    if isinstance(node, (IdentityNode, ShiftLeftNode, ShiftRightNode, CoordinateSubsequenceNode)):
        return None
    if isinstance(node, DiagonalNode):
        return _diagonal_sup(node, field, start=size)
    if isinstance(node, FiniteRankNode):
        return _finite_rank_tail(node, field, size)
    if isinstance(node, ProjectionNode):
        target = node.target
        if not target.is_finite:
            return None
        members = target.members_below(target.extent)
        return 0.0 if all(i < size for i in members) else 1.0
    if isinstance(node, ScaleNode):
        r = decode_scalar(node.c, field)
        if r == 0:
            return 0.0
        inner = _node_tail(node.inner, field, size)
        return None if inner is None else abs(r) * inner
    if isinstance(node, SumNode):
        left, right = _node_tail(node.left, field, size), _node_tail(node.right, field, size)
        return None if left is None or right is None else left + right
    if isinstance(node, ComposeNode):
        # AB - PABP = A(B - PBP) + (A - PAP)PBP + PA(P - I)BP
        outer, inner = _node_tail(node.outer, field, size), _node_tail(node.inner, field, size)
        if outer is None or inner is None:
            return None
        return _node_norm_bound(node.outer, field) * inner + 2.0 * outer * _node_norm_bound(node.inner, field)
    if isinstance(node, AdjointNode):
        return _node_tail(node.inner, field, size)
    if isinstance(node, DirectSumNode):
        left = _node_tail(node.left, field, (size + 1) // 2)
        right = _node_tail(node.right, field, size // 2)
        return None if left is None or right is None else max(left, right)
    raise TypeError(f"Unknown operator node kind: {type(node).__name__}.")


def tail_norm_bound(spec: OperatorSpec, size: int) -> Optional[float]:
    """
    Upper bound on ``||T - P_N T P_N||``, or ``None`` if the tree has no
    decaying structure.

    The scalar part ``c I`` is split off first: for ``c != 0`` the bound is
    ``|c| + tail(R)``, so ``T - lambda I`` trees whose scalar parts cancel
    exactly keep the tail of their compact remainder.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param size:
        Truncation size ``N``.
    :type size: int
    :rtype: float or None
    """

    c, rest = split_scalar(spec)
    tail = _node_tail(rest.root, rest.field, size)
    if tail is None:
        return None
    return abs(c) + tail


def is_structurally_compact(spec: OperatorSpec) -> bool:
    # tail bounds that vanish as N grows, i.e. R = T - cI is compact by structure
    c, rest = split_scalar(spec)
    return _node_tail(rest.root, rest.field, 1) is not None
