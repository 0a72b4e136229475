import logging
import math
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from opdef.dataclasses.operator_spec import FiniteRankNode, IdentityNode, OperatorSpec, ScaleNode, ZeroNode
from opdef.dataclasses.scalars import ScalarField, encode_scalar
from opdef.linalg.kernel import inner_product, norm, pad_to, svd
from opdef.operators.application import adjoint_spec, apply_full, truncate
from opdef.operators.bounds import norm_bound, split_scalar, tail_norm_bound
from opdef.utils.error_handling import raise_with_logging_error
from opdef.utils.exceptions import (FieldMismatchError, NoTailBoundError, NormalityError, SortOverflowError,
                                    SortViolationError, SupportSizeError)

logger = logging.getLogger(__name__)

SORT_SLACK = 1e-12
NORMALITY_TOLERANCE = 1e-9
MAX_SURROGATE_SIZE = 4096

Evaluator = Callable[[np.ndarray, np.ndarray], float]


class ComplexInnerParts(BaseModel):
    """
    The two real predicate values carried by a complex inner product:
    ``re = Re <x, y>`` and ``im = Im <x, y>``.
    """

    re: float
    im: float

    @classmethod
    def of(cls, x, y) -> "ComplexInnerParts":
        value = complex(inner_product(x, y))
        return cls(re=value.real, im=value.imag)

    @property
    def modulus_squared(self) -> float:
        return self.re ** 2 + self.im ** 2


class DistancePredicate(BaseModel):
    """
    Evaluator of ``d(f(x), y) = ||f(x) - y||`` on the sorts ``||x|| <= n`` and
    ``||y|| <= m``, exact up to ``error_bound`` uniformly on those sorts.

    Values are true distances; :meth:`normalized` maps them into ``[0, 1]``
    with the declared ``range_bound = n ||f|| + m``.

    :param source_sort: Radius ``n`` of the ball ``x`` ranges over.
    :type source_sort: int
    :param target_sort: Radius ``m`` of the ball ``y`` ranges over.
    :type target_sort: int
    :param error_bound: Uniform bound on ``|value - d(f(x), y)|``.
    :type error_bound: float
    :param evaluator: Raw evaluator, called without sort checks.
    :type evaluator: Callable
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    source_sort: PositiveInt
    target_sort: PositiveInt
    error_bound: float = Field(ge=0.0)
    evaluator: Evaluator
    range_bound: float
    field: ScalarField
    description: str = ""
    surrogate_size: Optional[int] = Field(default=None, description="Truncation size of a finite-rank surrogate.")

    def check_sorts(self, x, y) -> None:
        for name, vector, radius in (("x", x, self.source_sort), ("y", y, self.target_sort)):
            length = norm(vector)
            if length > radius * (1.0 + SORT_SLACK):
                raise_with_logging_error(f"||{name}|| = {length:.6g} exceeds the declared sort radius {radius}.",
                                         logger=logger,
                                         exception_type=SortViolationError)

    def evaluate(self, x, y) -> float:
        """
        Predicate value at ``(x, y)`` after checking both sorts.

        :raises SortViolationError:
            If ``||x|| > n`` or ``||y|| > m``.
        """

        self.check_sorts(x, y)
        return self.evaluator(np.asarray(x), np.asarray(y))

    def normalized(self, x, y) -> float:
        if self.range_bound == 0:
            return 0.0
        return min(1.0, self.evaluate(x, y) / self.range_bound)


def m_of(spec: OperatorSpec, n: int) -> int:
    """
    Least integer ``m >= 1`` with ``n * norm_bound(T) <= m``, i.e. the target
    sort of ``T`` on the ball of radius ``n``.

    A relative slack of ``1e-12`` absorbs rounding of exact integer norms.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param n:
        Source sort radius.
    :type n: int
    :rtype: int
    """

    value = n * norm_bound(spec)
    return max(1, math.ceil(value - SORT_SLACK * max(1.0, value)))


def _common(*arrays) -> list:
    length = max(a.shape[0] for a in arrays)
    out = []
    for a in arrays:
        padded = np.zeros((length,) + a.shape[1:], dtype=a.dtype)
        padded[:a.shape[0]] = a
        out.append(padded)
    return out


def _finite_rank_distance(z: np.ndarray, e: np.ndarray, x, y, field: ScalarField) -> float:
    """
    Closed-form ``||T x - y||`` for ``T x = sum_i <x, z_i> e_i`` without forming ``T x``.
    """

    x, y = np.asarray(x, dtype=field.dtype), np.asarray(y, dtype=field.dtype)
    z, e, x, y = _common(z, e, x, y)
    xz = z.conj().T @ x        # <x, z_i>
    ey = y.conj() @ e          # <e_i, y>
    y_squared = float(np.real(np.vdot(y, y)))

    if field is ScalarField.REAL:
        value = np.sum(xz ** 2) - 2.0 * np.sum(xz * ey) + y_squared
    else:
        # |<x,z>|^2 - 2 (Re<x,z> Re<e,y> - Im<x,z> Im<e,y>)
        value = np.sum(xz.real ** 2 + xz.imag ** 2) \
            - 2.0 * np.sum(xz.real * ey.real - xz.imag * ey.imag) + y_squared
    return math.sqrt(max(0.0, float(np.real(value))))


def _require_finite_rank(spec: OperatorSpec, field: ScalarField) -> FiniteRankNode:
    if not isinstance(spec.root, FiniteRankNode):
        raise_with_logging_error(f"Closed-form distance needs a finite_rank spec, got '{spec.kind}'.",
                                 logger=logger,
                                 exception_type=TypeError)
    if spec.field is not field:
        raise_with_logging_error(f"The {field.value} distance formula does not apply to a {spec.field.value} spec.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)
    return spec.root


def finite_rank_distance_real(spec: OperatorSpec, x, y) -> float:
    """
    ``||T x - y||`` for a real finite-rank ``T``, computed as
    ``sqrt(sum <x,z_i>^2 - 2 sum <x,z_i><e_i,y> + ||y||^2)``.

    :raises FieldMismatchError:
        For a complex spec.
    """

    node = _require_finite_rank(spec, ScalarField.REAL)
    z, e = node.matrices(ScalarField.REAL)
    return _finite_rank_distance(z, e, x, y, ScalarField.REAL)


def finite_rank_distance_complex(spec: OperatorSpec, x, y) -> float:
    """
    ``||T x - y||`` for a complex finite-rank ``T`` from the real and
    imaginary parts of the inner products:
    ``sqrt(sum (|<x,z_i>|^2 - 2 (Re<x,z_i> Re<e_i,y> - Im<x,z_i> Im<e_i,y>)) + ||y||^2)``.

    :raises FieldMismatchError:
        For a real spec.
    """

    node = _require_finite_rank(spec, ScalarField.COMPLEX)
    z, e = node.matrices(ScalarField.COMPLEX)
    return _finite_rank_distance(z, e, x, y, ScalarField.COMPLEX)


def _finite_rank_predicate(z: np.ndarray, e: np.ndarray, field: ScalarField, n: int, norm_value: float,
                           error_bound: float = 0.0, description: str = "", surrogate_size=None) -> DistancePredicate:
    m = max(1, math.ceil(n * norm_value - SORT_SLACK * max(1.0, n * norm_value)))
    return DistancePredicate(source_sort=n,
                             target_sort=m,
                             error_bound=error_bound,
                             evaluator=lambda x, y: _finite_rank_distance(z, e, x, y, field),
                             range_bound=n * norm_value + m,
                             field=field,
                             description=description,
                             surrogate_size=surrogate_size)


def zero_predicate(n: int, field: ScalarField) -> DistancePredicate:
    """
    Exact predicate ``||y||`` of the zero map.
    """

    return DistancePredicate(source_sort=n,
                             target_sort=1,
                             error_bound=0.0,
                             evaluator=lambda x, y: norm(y),
                             range_bound=1.0,
                             field=field,
                             description="zero")


def _surrogate_size(spec: OperatorSpec, n: int, epsilon: float) -> int:
    # least N with n * tail(N) < epsilon: doubling, then bisection
    def fits(size):
        tail = tail_norm_bound(spec, size)
        return n * tail < epsilon

    if tail_norm_bound(spec, 1) is None:
        raise_with_logging_error(f"No structural tail bound for a '{spec.kind}' spec; "
                                 f"the operator is not certifiably compact by structure.",
                                 logger=logger,
                                 exception_type=NoTailBoundError)
    if fits(1):
        return 1

    low, high = 1, 2
    while not fits(high):
        low, high = high, 2 * high
        if high > MAX_SURROGATE_SIZE:
            raise_with_logging_error(f"Tail bound stays above {epsilon / n:.3g} up to N = {MAX_SURROGATE_SIZE}.",
                                     logger=logger,
                                     exception_type=SupportSizeError)
    while high - low > 1:
        middle = (low + high) // 2
        if fits(middle):
            high = middle
        else:
            low = middle
    return high


def compact_predicate(spec: OperatorSpec, n: int, epsilon: float) -> DistancePredicate:
    """
    Distance predicate of a structurally compact operator (or of ``c I``
    plus one) up to ``epsilon``.

    The compact part ``R`` is replaced by the finite-rank surrogate
    ``P_N R P_N`` for the least ``N`` with ``n * tail_norm_bound(R, N) <
    epsilon``; its distance is then evaluated in closed form. A scalar part
    ``c I`` is added back with :func:`sum_predicate`.

    :param spec:
        Operator spec.
    :type spec: OperatorSpec
    :param n:
        Source sort radius.
    :type n: int
    :param epsilon:
        Error budget, ``> 0``.
    :type epsilon: float
    :rtype: DistancePredicate
    :raises NoTailBoundError:
        If the tree exposes no structural tail bound.
    """

    if epsilon <= 0:
        raise_with_logging_error(f"Predicate error budget must be positive, got {epsilon}.",
                                 logger=logger,
                                 exception_type=ValueError)

    c, rest = split_scalar(spec)
    if c != 0:
        inner = compact_predicate(rest, n, epsilon)
        scalar = spec.with_root(ScaleNode(c=encode_scalar(c, spec.field), inner=IdentityNode()))
        return sum_predicate(inner, scalar, n)

    if isinstance(spec.root, ZeroNode):
        return zero_predicate(n, spec.field)

    if isinstance(spec.root, FiniteRankNode):
        z, e = spec.root.matrices(spec.field)
        return _finite_rank_predicate(z, e, spec.field, n, norm_bound(spec), description="finite_rank")

    size = _surrogate_size(spec, n, epsilon)
    decomposition = svd(truncate(spec, size))
    keep = decomposition.singular_values > 0
    z = decomposition.right_vectors[:, keep] * decomposition.singular_values[keep]
    e = decomposition.left_vectors[:, keep]
    error = n * tail_norm_bound(spec, size)
    logger.debug("Compact predicate for a '%s' spec: surrogate size %d, error bound %.3e.", spec.kind, size, error)
    return _finite_rank_predicate(z, e, spec.field, n, norm_bound(spec),
                                  error_bound=error,
                                  description=f"surrogate N={size}",
                                  surrogate_size=size)


def scale_predicate(predicate: DistancePredicate, r: Union[float, complex]) -> DistancePredicate:
    """
    Predicate of ``r f`` from a predicate of ``f``:
    ``||r f(x) - y|| = |r| ||f(x) - y / r||``.

    The target sort grows to ``k m`` with ``k - 1 <= |r| < k``.

    :param predicate:
        Predicate of ``f``.
    :type predicate: DistancePredicate
    :param r:
        Nonzero scalar.
    :raises ValueError:
        For ``r = 0``; use :func:`zero_predicate`.
    """

    if r == 0:
        raise_with_logging_error("scale_predicate needs r != 0; the zero map has the predicate ||y||.",
                                 logger=logger,
                                 exception_type=ValueError)
    if predicate.field is ScalarField.REAL and complex(r).imag != 0.0:
        raise_with_logging_error("Complex scale factor for a real predicate.",
                                 logger=logger,
                                 exception_type=FieldMismatchError)

    factor = abs(r)
    k = math.floor(factor) + 1
    raw = predicate.evaluator
    return DistancePredicate(source_sort=predicate.source_sort,
                             target_sort=k * predicate.target_sort,
                             error_bound=factor * predicate.error_bound,
                             evaluator=lambda x, y: factor * raw(x, np.asarray(y) / r),
                             range_bound=factor * predicate.range_bound,
                             field=predicate.field,
                             description=f"{r} * ({predicate.description})")


def sum_predicate(predicate: DistancePredicate, f2: OperatorSpec, n: Optional[int] = None) -> DistancePredicate:
    """
    Predicate of ``f1 + f2`` from a predicate of ``f1`` and the application of ``f2``:
    ``||(f1 + f2)(x) - y|| = Q(x, y - f2(x))``.

    The target sort is ``2 max(m1, m(n, f2))``.

    :param predicate:
        Predicate of ``f1``.
    :type predicate: DistancePredicate
    :param f2:
        Spec of the summand applied directly.
    :type f2: OperatorSpec
    :param n:
        Source sort radius; defaults to the one of ``predicate``.
    :type n: int
    """

    n = predicate.source_sort if n is None else n
    raw = predicate.evaluator

    def evaluator(x, y):
        image = apply_full(f2, x)
        y = pad_to(np.asarray(y, dtype=image.dtype), len(image))
        return raw(x, y - pad_to(image, len(y)))

    m2 = m_of(f2, n)
    return DistancePredicate(source_sort=n,
                             target_sort=2 * max(predicate.target_sort, m2),
                             error_bound=predicate.error_bound,
                             evaluator=evaluator,
                             range_bound=predicate.range_bound + n * norm_bound(f2),
                             field=predicate.field,
                             description=f"({predicate.description}) + {f2.kind}",
                             surrogate_size=predicate.surrogate_size)


def compose_predicate(outer: DistancePredicate, inner: OperatorSpec, n: int) -> DistancePredicate:
    """
    Predicate of ``f2 o f1`` from a predicate of ``f2`` and the application of ``f1``:
    ``||f2(f1(x)) - y|| = Q(f1(x), y)``.

    :param outer:
        Predicate of ``f2``.
    :type outer: DistancePredicate
    :param inner:
        Spec of ``f1``.
    :type inner: OperatorSpec
    :param n:
        Source sort radius of the composite.
    :type n: int
    :raises SortOverflowError:
        If ``m(n, f1)`` exceeds the source sort of ``outer``.
    """

    m1 = m_of(inner, n)
    if m1 > outer.source_sort:
        raise_with_logging_error(f"Image sort {m1} of the inner map exceeds the outer source sort {outer.source_sort}.",
                                 logger=logger,
                                 exception_type=SortOverflowError)
    raw = outer.evaluator
    return DistancePredicate(source_sort=n,
                             target_sort=outer.target_sort,
                             error_bound=outer.error_bound,
                             evaluator=lambda x, y: raw(apply_full(inner, x), y),
                             range_bound=outer.range_bound,
                             field=outer.field,
                             description=f"({outer.description}) o {inner.kind}",
                             surrogate_size=outer.surrogate_size)


def check_normality(spec: OperatorSpec, probes: int = 8, seed: int = 0, support: int = 32) -> float:
    """
    Largest relative commutator residual ``||T*T u - T T* u||`` over seeded random probes.

    :raises NormalityError:
        If a residual exceeds ``1e-9 * max(1, norm_bound(T))**2``.
    """

    rng = np.random.default_rng(seed)
    u = rng.standard_normal((support, probes))
    if spec.field is ScalarField.COMPLEX:
        u = u + 1j * rng.standard_normal((support, probes))
    u /= np.linalg.norm(u, axis=0)

    star = adjoint_spec(spec)
    left, right = _common(apply_full(star, apply_full(spec, u)), apply_full(spec, apply_full(star, u)))
    residual = float(np.max(np.linalg.norm(left - right, axis=0)))
    scale = max(1.0, norm_bound(spec)) ** 2
    if residual > NORMALITY_TOLERANCE * scale:
        raise_with_logging_error(f"Operator is not normal: commutator residual {residual:.3e}.",
                                 logger=logger,
                                 exception_type=NormalityError,
                                 payload={"residual": residual})
    return residual / scale


def normal_adjoint_predicate(spec: OperatorSpec, x, y, probes: int = 8, seed: int = 0) -> float:
    """
    ``||T* x - y||`` of a normal operator without applying ``T*``:
    ``sqrt(||T x||^2 - 2 Re <T y, x> + ||y||^2)``.

    :param spec:
        Operator spec, normal on the commutator probes.
    :type spec: OperatorSpec
    :raises NormalityError:
        If the normality probes fail.
    """

    check_normality(spec, probes=probes, seed=seed)
    x, y = np.asarray(x, dtype=spec.dtype), np.asarray(y, dtype=spec.dtype)
    tx, ty = apply_full(spec, x), apply_full(spec, y)
    value = norm(tx) ** 2 - 2.0 * complex(inner_product(*_common(ty, x))).real + norm(y) ** 2
    return math.sqrt(max(0.0, value))
