import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from opdef.dataclasses.parameter_set import ParameterSet
from opdef.dataclasses.scalars import ScalarField
from opdef.linalg.kernel import norm, pad_to
from opdef.operators.application import adjoint_spec, apply_full, complexify
from opdef.predicates.distance import (compact_predicate, compose_predicate, finite_rank_distance_complex,
                                       finite_rank_distance_real, m_of, normal_adjoint_predicate, scale_predicate,
                                       sum_predicate)
from opdef.predicates.projection import orthogonal_project
from tests.helper_functions import brute_force_distance, load_bundled, random_finite_rank_spec, random_vector, spec_from

FINITE_RANK_ROOT = {"kind": "finite_rank", "pairs": [{"z": [1.0, 1.0], "e": [1.0, 0.0]}]}
# real operators of norm at most 1
CONTRACTIONS = ("identity", "zero", "shift_left_real", "shift_right_real", "evens_subsequence", "diagonal_reciprocal",
                "kernel_diagonal", "right_left_compose", "evens_projection")
ALL_OPERATORS = CONTRACTIONS + ("two_plus_reciprocal", "scalar_plus_finite_rank", "finite_rank", "shift_left",
                                "lr_directsum", "volterra", "complex_scalar_plus_decay", "shift_left_squared")
FIELDS = st.sampled_from([ScalarField.REAL, ScalarField.COMPLEX])


def _unit(rng, length, field=ScalarField.REAL):
    x = random_vector(rng, length, field)
    return x / np.linalg.norm(x)


def _wrap(kind, first, second):
    keys = {"sum": ("left", "right"), "compose": ("outer", "inner")}[kind]
    return spec_from({"field": "real", "kind": kind, keys[0]: first, keys[1]: second})


class Test_FiniteRankFormula(unittest.TestCase):

    @settings(max_examples=500, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), rank=st.integers(1, 5), length=st.integers(5, 20), field=FIELDS)
    def test_closed_form_matches_the_image(self, seed, rank, length, field):
        spec = random_finite_rank_spec(seed, field, rank=rank, length=length)
        rng = np.random.default_rng(seed)
        x = random_vector(rng, length, field)
        y = random_vector(rng, int(rng.integers(1, 21)), field)
        formula = finite_rank_distance_real if field is ScalarField.REAL else finite_rank_distance_complex
        self.assertLessEqual(abs(formula(spec, x, y) - brute_force_distance(spec, x, y)), 1e-10)


class Test_CompactPredicateSoundness(unittest.TestCase):

    @staticmethod
    def _specs():
        specs = [load_bundled("diagonal_reciprocal")]
        rng = np.random.default_rng(2024)
        for _ in range(3):
            prefix = rng.uniform(-1.0, 1.0, 40) * 0.8 ** np.arange(40)
            specs.append(spec_from({"field": "real", "kind": "diagonal", "prefix": prefix.tolist()}))
        return specs

    def test_error_stays_within_the_budget(self):
        rng = np.random.default_rng(8)
        for number, spec in enumerate(self._specs()):
            for epsilon in (0.1, 0.01):
                with self.subTest(spec=number, epsilon=epsilon):
                    predicate = compact_predicate(spec, 1, epsilon)
                    self.assertLess(predicate.error_bound, epsilon)
                    for _ in range(200):
                        x = _unit(rng, 120) * rng.uniform(0.1, 1.0)
                        y = _unit(rng, 120) * rng.uniform(0.0, 1.0)
                        oracle = brute_force_distance(spec, x, y)
                        self.assertLessEqual(abs(predicate.evaluate(x, y) - oracle), epsilon)


class Test_NormalAdjointPredicate(unittest.TestCase):

    def test_formula_against_the_adjoint(self):
        specs = [complexify(load_bundled(name))
                 for name in ("identity", "kernel_diagonal", "diagonal_reciprocal", "evens_projection")]
        specs.append(load_bundled("complex_scalar_plus_decay"))
        rng = np.random.default_rng(21)
        for spec in specs:
            with self.subTest(kind=spec.kind):
                star = adjoint_spec(spec)
                for _ in range(100):
                    x, y = random_vector(rng, 16, spec.field), random_vector(rng, 16, spec.field)
                    self.assertLessEqual(abs(normal_adjoint_predicate(spec, x, y) - brute_force_distance(star, x, y)),
                                         1e-9)


class Test_Transformers(unittest.TestCase):

    def setUp(self):
        self.base = compact_predicate(spec_from({"field": "real", **FINITE_RANK_ROOT}), 1, 0.01)

    @settings(max_examples=50, deadline=None)
    @given(r=st.floats(0.1, 4.0), sign=st.sampled_from([-1.0, 1.0]), seed=st.integers(0, 10 ** 6))
    def test_scale_agrees_with_application(self, r, sign, seed):
        rng = np.random.default_rng(seed)
        predicate = scale_predicate(self.base, sign * r)
        scaled = spec_from({"field": "real", "kind": "scale", "c": sign * r, "inner": FINITE_RANK_ROOT})
        x, y = _unit(rng, 4), _unit(rng, 5)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(scaled, x, y), places=9)

    @settings(max_examples=50, deadline=None)
    @given(name=st.sampled_from(CONTRACTIONS), seed=st.integers(0, 10 ** 6))
    def test_sum_agrees_with_application(self, name, seed):
        rng = np.random.default_rng(seed)
        summand = load_bundled(name)
        predicate = sum_predicate(self.base, summand)
        total = _wrap("sum", FINITE_RANK_ROOT, summand.root.model_dump(mode="json"))
        x, y = _unit(rng, 7), _unit(rng, 9)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(total, x, y), places=9)

    @settings(max_examples=50, deadline=None)
    @given(name=st.sampled_from(CONTRACTIONS), seed=st.integers(0, 10 ** 6))
    def test_compose_agrees_with_application(self, name, seed):
        rng = np.random.default_rng(seed)
        inner = load_bundled(name)
        predicate = compose_predicate(self.base, inner, 1)
        composite = _wrap("compose", FINITE_RANK_ROOT, inner.root.model_dump(mode="json"))
        x, y = _unit(rng, 7), _unit(rng, 3)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(composite, x, y), places=9)


class Test_SortBounds(unittest.TestCase):

    @settings(max_examples=100, deadline=None)
    @given(name=st.sampled_from(ALL_OPERATORS), n=st.integers(1, 5), seed=st.integers(0, 10 ** 6))
    def test_m_of_bounds_the_image(self, name, n, seed):
        spec = load_bundled(name)
        rng = np.random.default_rng(seed)
        x = n * _unit(rng, 24, spec.field) * rng.uniform(0.0, 1.0)
        self.assertLessEqual(norm(apply_full(spec, x)), m_of(spec, n) + 1e-9)


class Test_Projections(unittest.TestCase):

    @settings(max_examples=30, deadline=None)
    @given(name=st.sampled_from(["evens_projection", "first_five_projection", "cofinite_projection"]),
           seed=st.integers(0, 10 ** 6))
    def test_coordinate_projections_are_idempotent(self, name, seed):
        spec = load_bundled(name)
        x = random_vector(np.random.default_rng(seed), 20, spec.field)
        once = apply_full(spec, x)
        twice = apply_full(spec, once)
        length = max(len(once), len(twice))
        np.testing.assert_allclose(pad_to(twice, length), pad_to(once, length), atol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10 ** 6), count=st.integers(1, 4), field=FIELDS)
    def test_span_projection_is_idempotent(self, seed, count, field):
        rng = np.random.default_rng(seed)
        parameters = ParameterSet(vectors=[random_vector(rng, 8, field) for _ in range(count)])
        px, residual = orthogonal_project(parameters, random_vector(rng, 10, field))
        again, rest = orthogonal_project(parameters, px)
        length = max(len(again), len(px))
        np.testing.assert_allclose(pad_to(again, length), pad_to(px, length), atol=1e-10)
        self.assertLess(norm(rest), 1e-10)
        for basis_vector in parameters.orthonormalized_basis:
            self.assertLess(abs(np.vdot(pad_to(basis_vector, len(residual)), residual)), 1e-10)
