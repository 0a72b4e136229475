import unittest

import numpy as np

from opdef.dataclasses.scalars import ScalarField
from opdef.operators.application import adjoint_spec
from opdef.predicates.distance import (ComplexInnerParts, check_normality, compact_predicate, compose_predicate,
                                       finite_rank_distance_complex, finite_rank_distance_real, m_of,
                                       normal_adjoint_predicate, scale_predicate, sum_predicate, zero_predicate)
from opdef.utils.exceptions import (FieldMismatchError, NoTailBoundError, NormalityError, SortOverflowError,
                                    SortViolationError)
from tests.helper_functions import (brute_force_distance, load_bundled, random_finite_rank_spec, random_vector,
                                    spec_from, unit_vector)

FINITE_RANK_ROOT = {"kind": "finite_rank", "pairs": [{"z": [1.0, 1.0], "e": [1.0, 0.0]}]}


def _unit(rng, length, field):
    x = random_vector(rng, length, field)
    return x / np.linalg.norm(x)


class Test_FiniteRankDistance(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_exact_value(self):
        spec = load_bundled("finite_rank")
        self.assertAlmostEqual(finite_rank_distance_real(spec, unit_vector(1), unit_vector(0)), 0.0)
        self.assertAlmostEqual(finite_rank_distance_real(spec, unit_vector(1), unit_vector(1)), 2 ** 0.5)

    def test_real_formula_against_brute_force(self):
        for seed in range(5):
            spec = random_finite_rank_spec(seed, ScalarField.REAL)
            x, y = random_vector(self.rng, 8, ScalarField.REAL), random_vector(self.rng, 12, ScalarField.REAL)
            self.assertAlmostEqual(finite_rank_distance_real(spec, x, y), brute_force_distance(spec, x, y), places=9)

    def test_complex_formula_against_brute_force(self):
        for seed in range(5):
            spec = random_finite_rank_spec(seed, ScalarField.COMPLEX)
            x, y = random_vector(self.rng, 6, ScalarField.COMPLEX), random_vector(self.rng, 8, ScalarField.COMPLEX)
            self.assertAlmostEqual(finite_rank_distance_complex(spec, x, y), brute_force_distance(spec, x, y),
                                   places=9)

    def test_field_and_kind_errors(self):
        with self.assertRaises(FieldMismatchError):
            finite_rank_distance_complex(load_bundled("finite_rank"), unit_vector(0), unit_vector(0))
        with self.assertRaises(FieldMismatchError):
            finite_rank_distance_real(random_finite_rank_spec(0, ScalarField.COMPLEX), unit_vector(0), unit_vector(0))
        with self.assertRaises(TypeError):
            finite_rank_distance_real(load_bundled("identity"), unit_vector(0), unit_vector(0))

    def test_complex_inner_parts(self):
        parts = ComplexInnerParts.of(np.array([1.0j, 1.0]), np.array([1.0, 0.0]))
        self.assertEqual((parts.re, parts.im), (0.0, 1.0))
        self.assertEqual(parts.modulus_squared, 1.0)


class Test_Predicates(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_zero_predicate(self):
        predicate = zero_predicate(1, ScalarField.REAL)
        self.assertEqual(predicate.evaluate(unit_vector(3), unit_vector(0)), 1.0)
        self.assertEqual(predicate.target_sort, 1)

    def test_m_of(self):
        self.assertEqual(m_of(load_bundled("shift_left"), 3), 3)
        scaled = spec_from({"field": "real", "kind": "scale", "c": 2.5, "inner": {"kind": "identity"}})
        self.assertEqual(m_of(scaled, 2), 5)
        self.assertEqual(m_of(load_bundled("zero"), 4), 1)

    def test_sorts_are_checked(self):
        predicate = compact_predicate(load_bundled("finite_rank"), 1, 0.01)
        with self.assertRaises(SortViolationError):
            predicate.evaluate(2 * unit_vector(0), unit_vector(0))
        with self.assertRaises(SortViolationError):
            predicate.evaluate(unit_vector(0), 3 * unit_vector(0))

    def test_compact_surrogate_of_a_decaying_diagonal(self):
        spec = load_bundled("diagonal_reciprocal")
        predicate = compact_predicate(spec, 1, 0.01)
        self.assertEqual(predicate.surrogate_size, 100)
        self.assertAlmostEqual(predicate.error_bound, 1.0 / 101)
        for _ in range(5):
            x, y = _unit(self.rng, 150, ScalarField.REAL), _unit(self.rng, 150, ScalarField.REAL)
            difference = abs(predicate.evaluate(x, y) - brute_force_distance(spec, x, y))
            self.assertLessEqual(difference, predicate.error_bound + 1e-12)

    def test_compact_predicate_with_a_scalar_part(self):
        spec = load_bundled("two_plus_reciprocal")
        predicate = compact_predicate(spec, 1, 0.01)
        self.assertEqual(predicate.target_sort, 4)
        for _ in range(5):
            x, y = _unit(self.rng, 50, ScalarField.REAL), 2 * _unit(self.rng, 50, ScalarField.REAL)
            difference = abs(predicate.evaluate(x, y) - brute_force_distance(spec, x, y))
            self.assertLessEqual(difference, predicate.error_bound + 1e-12)

    def test_compact_predicate_needs_a_tail_bound(self):
        with self.assertRaises(NoTailBoundError):
            compact_predicate(load_bundled("shift_left"), 1, 0.01)
        with self.assertRaises(ValueError):
            compact_predicate(load_bundled("finite_rank"), 1, 0.0)

    def test_scale_predicate(self):
        base = compact_predicate(load_bundled("finite_rank"), 1, 0.01)
        predicate = scale_predicate(base, 2.5)
        self.assertEqual(predicate.target_sort, 6)
        scaled = spec_from({"field": "real", "kind": "scale", "c": 2.5, "inner": FINITE_RANK_ROOT})
        x, y = _unit(self.rng, 4, ScalarField.REAL), 3 * _unit(self.rng, 4, ScalarField.REAL)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(scaled, x, y), places=9)

        with self.assertRaises(ValueError):
            scale_predicate(base, 0.0)
        with self.assertRaises(FieldMismatchError):
            scale_predicate(base, 1.0j)

    def test_sum_predicate(self):
        base = compact_predicate(load_bundled("finite_rank"), 1, 0.01)
        shift = load_bundled("shift_left_real")
        predicate = sum_predicate(base, shift)
        total = spec_from({"field": "real", "kind": "sum", "left": FINITE_RANK_ROOT, "right": {"kind": "shift_left"}})
        x, y = _unit(self.rng, 6, ScalarField.REAL), _unit(self.rng, 9, ScalarField.REAL)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(total, x, y), places=9)

    def test_compose_predicate(self):
        outer = compact_predicate(load_bundled("finite_rank"), 1, 0.01)
        predicate = compose_predicate(outer, load_bundled("shift_left_real"), 1)
        composite = spec_from({"field": "real", "kind": "compose", "outer": FINITE_RANK_ROOT,
                               "inner": {"kind": "shift_left"}})
        x, y = _unit(self.rng, 6, ScalarField.REAL), _unit(self.rng, 3, ScalarField.REAL)
        self.assertAlmostEqual(predicate.evaluate(x, y), brute_force_distance(composite, x, y), places=9)

        tripled = spec_from({"field": "real", "kind": "scale", "c": 3.0, "inner": {"kind": "identity"}})
        with self.assertRaises(SortOverflowError):
            compose_predicate(outer, tripled, 1)

    def test_normal_adjoint_predicate(self):
        spec = load_bundled("complex_scalar_plus_decay")
        self.assertLess(check_normality(spec), 1e-12)
        star = adjoint_spec(spec)
        for _ in range(3):
            x, y = random_vector(self.rng, 7, ScalarField.COMPLEX), random_vector(self.rng, 7, ScalarField.COMPLEX)
            self.assertAlmostEqual(normal_adjoint_predicate(spec, x, y), brute_force_distance(star, x, y), places=8)

        with self.assertRaises(NormalityError):
            check_normality(load_bundled("shift_left"))
