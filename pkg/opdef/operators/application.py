import logging
from typing import Union

import numpy as np

from opdef.dataclasses.operator_spec import (AdjointNode, ComposeNode, CoordinateSubsequenceNode, DiagonalNode,
                                             DiagonalTail, DirectSumNode, FiniteRankNode, IdentityNode, OperatorSpec,
                                             ProjectionNode, RankOnePair, ScaleNode, ShiftLeftNode, ShiftRightNode,
                                             SumNode, ZeroNode)
from opdef.dataclasses.results import LinearityReport
from opdef.dataclasses.scalars import ScalarField, conjugate_scalar, decode_scalar, encode_scalar, encode_vector
from opdef.dataclasses.windowed_vector import WindowedVector
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import FieldMismatchError, SupportSizeError

logger = logging.getLogger(__name__)

LINEARITY_TOLERANCE = 1e-9


# --- adjoints

def _adjoint_finite_rank(node: FiniteRankNode, field: ScalarField):
    # T = E Z*  =>  T* = Z E* = Q (E R*)* with Z = Q R
    if not node.pairs:
        return node
    z, e = node.matrices(field)
    if z.shape[0] == 0:
        return ZeroNode()
    q, r = np.linalg.qr(z, mode="reduced")
    new_z = e @ r.conj().T
    pairs = [RankOnePair(z=encode_vector(new_z[:, j], field), e=encode_vector(q[:, j], field))
             for j in range(q.shape[1])]
    return FiniteRankNode(pairs=pairs)


def adjoint_node(node, field: ScalarField):
    """
    Adjoint of a single tree node, as a new node of the same field.

    Coordinate subsequences have no closed structured adjoint and are
    wrapped in :class:`AdjointNode` (applied by scattering).

    :param node:
        Operator tree node.
    :param field:
        Scalar field of the enclosing spec.
    :type field: ScalarField
    :return:
        Node of the adjoint operator.
    """

    if isinstance(node, (IdentityNode, ZeroNode, ProjectionNode)):
        return node
    if isinstance(node, DiagonalNode):
        tail = DiagonalTail(rule=node.tail.rule, value=conjugate_scalar(node.tail.value))
        return DiagonalNode(prefix=[conjugate_scalar(v) for v in node.prefix], tail=tail)
    if isinstance(node, ShiftLeftNode):
        return ShiftRightNode()
    if isinstance(node, ShiftRightNode):
        return ShiftLeftNode()
    if isinstance(node, CoordinateSubsequenceNode):
        return AdjointNode(inner=node)
    if isinstance(node, FiniteRankNode):
        return _adjoint_finite_rank(node, field)
    if isinstance(node, ScaleNode):
        return ScaleNode(c=conjugate_scalar(node.c), inner=adjoint_node(node.inner, field))
    if isinstance(node, SumNode):
        return SumNode(left=adjoint_node(node.left, field), right=adjoint_node(node.right, field))
    if isinstance(node, ComposeNode):
        return ComposeNode(outer=adjoint_node(node.inner, field), inner=adjoint_node(node.outer, field))
    if isinstance(node, AdjointNode):
        return node.inner
    if isinstance(node, DirectSumNode):
        return DirectSumNode(left=adjoint_node(node.left, field), right=adjoint_node(node.right, field))
    raise_with_logging_error(f"Unknown operator node kind: {type(node).__name__}.",
                             logger=logger,
                             exception_type=TypeError)


# --- windowed application

def _apply_subsequence(node: CoordinateSubsequenceNode, w: WindowedVector) -> WindowedVector:
    lo = node.first_position_at_least(w.offset)
    hi = node.first_position_at_least(w.stop)
    if hi <= lo:
        return WindowedVector(offset=0, values=w.values[:0])
    gathered = node.index_at(np.arange(lo, hi, dtype=np.int64)) - w.offset
    return WindowedVector(offset=lo, values=w.values[gathered])


def _apply_subsequence_adjoint(node: CoordinateSubsequenceNode, w: WindowedVector) -> WindowedVector:
    if w.length == 0:
        return w
    targets = node.index_at(np.arange(w.offset, w.stop, dtype=np.int64))
    start = int(targets[0])
    out = np.zeros((int(targets[-1]) - start + 1, w.columns), dtype=w.values.dtype)
    out[targets - start] = w.values
    return WindowedVector(offset=start, values=out)


def _apply_finite_rank(node: FiniteRankNode, w: WindowedVector, field: ScalarField) -> WindowedVector:
    z, e = node.matrices(field)
    lo, hi = max(w.offset, 0), min(w.stop, z.shape[0])
    coefficients = np.zeros((z.shape[1], w.columns), dtype=field.dtype)
    if hi > lo:
        coefficients = z[lo:hi].conj().T @ w.values[lo - w.offset:hi - w.offset]
    return WindowedVector(offset=0, values=e @ coefficients)


def _apply_direct_sum(node: DirectSumNode, w: WindowedVector, field: ScalarField) -> WindowedVector:
    a, b = w.offset, w.stop
    even_lo, even_hi = (a + 1) // 2, (b + 1) // 2
    odd_lo, odd_hi = a // 2, b // 2
    evens = WindowedVector(offset=even_lo, values=w.values[2 * even_lo - a:2 * even_hi - a:2])
    odds = WindowedVector(offset=odd_lo, values=w.values[2 * odd_lo + 1 - a:2 * odd_hi + 1 - a:2])

    left = apply_window(node.left, evens, field)
    right = apply_window(node.right, odds, field)

    bounds = []
    if left.length:
        bounds += [2 * left.offset, 2 * left.stop - 1]
    if right.length:
        bounds += [2 * right.offset + 1, 2 * right.stop]
    if not bounds:
        return WindowedVector(offset=0, values=np.zeros((0, w.columns), dtype=w.values.dtype))

    start, stop = min(bounds), max(bounds)
    out = np.zeros((stop - start, w.columns), dtype=np.result_type(left.values, right.values))
    if left.length:
        out[2 * left.offset - start:2 * left.stop - start:2] = left.values
    if right.length:
        out[2 * right.offset + 1 - start:2 * right.stop + 1 - start:2] = right.values
    return WindowedVector(offset=start, values=out)


def apply_window(node, w: WindowedVector, field: ScalarField) -> WindowedVector:
    """
    Exact image of a windowed batch under an operator tree node.

    :param node:
        Operator tree node.
    :param w:
        Input batch; every column is a finitely supported vector.
    :type w: WindowedVector
    :param field:
        Scalar field of the enclosing spec.
    :type field: ScalarField
    :return:
        The images, again as a windowed batch.
    :rtype: WindowedVector
    """

    if isinstance(node, IdentityNode):
        return w
    if isinstance(node, ZeroNode):
        return WindowedVector(offset=0, values=np.zeros((0, w.columns), dtype=w.values.dtype))
    if isinstance(node, DiagonalNode):
        entries = node.entries(np.arange(w.offset, w.stop, dtype=np.int64), field)
        return WindowedVector(offset=w.offset, values=entries[:, None] * w.values)
    if isinstance(node, ShiftLeftNode):
        if w.offset == 0:
            return WindowedVector(offset=0, values=w.values[1:])
        return WindowedVector(offset=w.offset - 1, values=w.values)
    if isinstance(node, ShiftRightNode):
        return WindowedVector(offset=w.offset + 1, values=w.values)
    if isinstance(node, CoordinateSubsequenceNode):
        return _apply_subsequence(node, w)
    if isinstance(node, FiniteRankNode):
        return _apply_finite_rank(node, w, field)
    if isinstance(node, ProjectionNode):
        mask = node.target.contains(np.arange(w.offset, w.stop, dtype=np.int64))
        return WindowedVector(offset=w.offset, values=w.values * mask[:, None])
    if isinstance(node, ScaleNode):
        return apply_window(node.inner, w, field).scaled(decode_scalar(node.c, field))
    if isinstance(node, SumNode):
        return apply_window(node.left, w, field).added(apply_window(node.right, w, field))
    if isinstance(node, ComposeNode):
        return apply_window(node.outer, apply_window(node.inner, w, field), field)
    if isinstance(node, AdjointNode):
        if isinstance(node.inner, CoordinateSubsequenceNode):
            return _apply_subsequence_adjoint(node.inner, w)
        return apply_window(adjoint_node(node.inner, field), w, field)
    if isinstance(node, DirectSumNode):
        return _apply_direct_sum(node, w, field)
    raise_with_logging_error(f"Unknown operator node kind: {type(node).__name__}.",
                             logger=logger,
                             exception_type=TypeError)


def _check_field(spec: OperatorSpec, x: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(x) and spec.field is ScalarField.REAL:
        raise_with_logging_error("Complex vector passed to a real-field operator.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    return np.asarray(x, dtype=spec.dtype)


def apply_full(spec: OperatorSpec, x) -> np.ndarray:
    """
    Exact image ``T x`` of a dense vector (or of the columns of a matrix),
    returned densely from index 0 to the last coordinate that can be nonzero.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param x:
        Dense vector or matrix of column vectors.
    :type x: numpy.ndarray
    :rtype: numpy.ndarray
    """

    x = _check_field(spec, x)
    image = apply_window(spec.root, WindowedVector.from_dense(x), spec.field).dense()
    return image[:, 0] if x.ndim == 1 else image


def apply(spec: OperatorSpec, x, out_support: int) -> np.ndarray:
    """
    Apply an operator to a finitely supported vector.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param x:
        Coefficients of ``x`` (implicit zero tail).
    :type x: numpy.ndarray
    :param out_support:
        Number of leading output coordinates returned.
    :type out_support: int
    :return:
        ``T x`` restricted to its first ``out_support`` coordinates.
    :rtype: numpy.ndarray
    :raises FieldMismatchError:
        If a complex vector is passed to a real operator.
    :raises SupportSizeError:
        If ``out_support`` is smaller than 1.
    """

    if out_support < 1:
        raise_with_logging_error(f"out_support must be a positive integer, got {out_support}.",
                                 logger=logger,
                                 exception_type=SupportSizeError)
    x = _check_field(spec, x)
    image = apply_window(spec.root, WindowedVector.from_dense(x), spec.field)
    out = image.restrict(out_support)
    return out[:, 0] if x.ndim == 1 else out


def section(spec: OperatorSpec, size: int) -> np.ndarray:
    """
    Images of the first ``size`` basis vectors, as the columns of a dense
    matrix with every row that can be nonzero (at least ``size`` rows).

    Rectangular sections keep the boundary rows that a square truncation
    drops (e.g. the last row of the right shift).

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param size:
        Number of columns.
    :type size: int
    :rtype: numpy.ndarray
    """

    if size < 1:
        raise_with_logging_error(f"Section size must be a positive integer, got {size}.",
                                 logger=logger,
                                 exception_type=SupportSizeError)
    image = apply_window(spec.root, WindowedVector.identity_block(size, spec.field), spec.field)
    return image.restrict(max(size, image.stop))


def truncate(spec: OperatorSpec, size: int) -> np.ndarray:
    """
    Finite section ``P_N T P_N`` as an ``N x N`` matrix, entry ``(i, j) = <T e_j, e_i>``.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param size:
        Truncation size ``N``.
    :type size: int
    :rtype: numpy.ndarray
    """

    return section(spec, size)[:size, :size]


def adjoint_spec(spec: OperatorSpec) -> OperatorSpec:
    return spec.with_root(adjoint_node(spec.root, spec.field))


def _as_complex(value):
    return encode_scalar(decode_scalar(value, ScalarField.REAL), ScalarField.COMPLEX)


def _complexify_scalars(node):
    # real scalars become [re, 0] pairs; structure is untouched
    updates = {}
    if isinstance(node, ScaleNode):
        updates["c"] = _as_complex(node.c)
    elif isinstance(node, DiagonalNode):
        updates["prefix"] = [_as_complex(v) for v in node.prefix]
        updates["tail"] = DiagonalTail(rule=node.tail.rule, value=_as_complex(node.tail.value))
    elif isinstance(node, FiniteRankNode):
        updates["pairs"] = [RankOnePair(z=[_as_complex(v) for v in p.z], e=[_as_complex(v) for v in p.e])
                            for p in node.pairs]
    for name in ("inner", "outer", "left", "right"):
        child = getattr(node, name, None)
        if child is not None:
            updates[name] = _complexify_scalars(child)
    return node.model_copy(update=updates) if updates else node


def complexify(spec: OperatorSpec) -> OperatorSpec:
    """
    Canonical complex extension ``K^C`` of a real operator.

    :param spec:
        Real-field operator spec.
    :type spec: OperatorSpec
    :return:
        The same tree over the complex field.
    :rtype: OperatorSpec
    :raises FieldMismatchError:
        If the spec is already complex.
    """

    if spec.field is ScalarField.COMPLEX:
        raise_with_logging_error("Operator is already complex; complexify expects a real-field spec.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    return OperatorSpec(field=ScalarField.COMPLEX, root=_complexify_scalars(spec.root))


def subtract_scalar(spec: OperatorSpec, mu: Union[float, complex]) -> OperatorSpec:
    """
    The spec of ``T - mu I``.

    :raises FieldMismatchError:
        If ``mu`` is complex and the spec real.
    """

    if spec.field is ScalarField.REAL and complex(mu).imag != 0.0:
        raise_with_logging_error(f"Cannot shift a real operator by the complex scalar {mu}.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    if mu == 0:
        return spec
    shift = ScaleNode(c=encode_scalar(-complex(mu), spec.field), inner=IdentityNode())
    return spec.with_root(SumNode(left=spec.root, right=shift))


def _random_vectors(rng: np.random.Generator, field: ScalarField, size: int, count: int) -> np.ndarray:
    x = rng.standard_normal((size, count))
    if field is ScalarField.COMPLEX:
        x = x + 1j * rng.standard_normal((size, count))
    return x


def linearity_check(spec: OperatorSpec, trials: int = 100, seed: int = 0, size: int = 32) -> LinearityReport:
    """
    Randomized additivity and homogeneity probes of an operator.

    For ``trials`` seeded random vectors ``x, y`` and scalars ``a, b`` the
    residual ``||T(a x + b y) - a T x - b T y||`` is measured (additivity with
    homogeneity folded in), as well as ``||T(a x) - a T x||``, both relative
    to ``max(1, norm_bound(T))``.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param trials:
        Number of probe pairs, at least 1.
    :type trials: int
    :param seed:
        Seed of the probe generator.
    :type seed: int
    :param size:
        Support of the random probes.
    :type size: int
    :rtype: LinearityReport
    """

    from opdef.operators.bounds import norm_bound

    if trials < 1:
        raise_with_logging_error(f"linearity_check needs at least one trial, got {trials}.",
                                 logger=logger,
                                 exception_type=SupportSizeError)

    rng = np.random.default_rng(seed)
    x = _random_vectors(rng, spec.field, size, trials)
    y = _random_vectors(rng, spec.field, size, trials)
    a = _random_vectors(rng, spec.field, 1, trials)
    b = _random_vectors(rng, spec.field, 1, trials)

    tx, ty = apply_full(spec, x), apply_full(spec, y)
    combined = apply_full(spec, a * x + b * y)
    scaled = apply_full(spec, a * x)
    length = max(tx.shape[0], ty.shape[0], combined.shape[0], scaled.shape[0])

    def padded(m):
        out = np.zeros((length, trials), dtype=m.dtype)
        out[:m.shape[0]] = m
        return out

    tx, ty, combined, scaled = padded(tx), padded(ty), padded(combined), padded(scaled)
    scale = max(1.0, norm_bound(spec))
    additivity = np.linalg.norm(combined - a * tx - b * ty, axis=0) / scale
    homogeneity = np.linalg.norm(scaled - a * tx, axis=0) / scale

    report = LinearityReport(trials=trials,
                             additivity_residual=float(np.max(additivity)),
                             homogeneity_residual=float(np.max(homogeneity)),
                             tolerance=LINEARITY_TOLERANCE,
                             seed=seed)
    logger.debug("Linearity check over %d trials: additivity %.3e, homogeneity %.3e.",
                 trials, report.additivity_residual, report.homogeneity_residual)
    return report
