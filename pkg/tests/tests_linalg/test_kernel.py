import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from opdef.linalg.kernel import hermitian_eigen, inner_product, norm, orthonormalize, pad_to, svd
from opdef.utils.exceptions import FieldMismatchError, NotHermitianError, SupportSizeError

finite_floats = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


class Test_Kernel(unittest.TestCase):

    def test_pad_to_never_truncates(self):
        x = np.array([1.0, 2.0, 3.0])
        self.assertEqual(len(pad_to(x, 2)), 3)
        np.testing.assert_array_equal(pad_to(x, 5), [1.0, 2.0, 3.0, 0.0, 0.0])

    def test_inner_product_is_conjugate_linear_in_second_argument(self):
        x = np.array([1.0 + 2.0j, -1.0j])
        y = np.array([0.5, 2.0 + 1.0j, 3.0])
        a = 2.0 - 3.0j
        self.assertAlmostEqual(inner_product(x, a * y), np.conj(a) * inner_product(x, y))
        self.assertAlmostEqual(inner_product(a * x, y), a * inner_product(x, y))

    def test_inner_product_field_mismatch(self):
        with self.assertRaises(FieldMismatchError):
            inner_product(np.array([1.0]), np.array([1.0j]))

    def test_vectors_must_be_one_dimensional(self):
        with self.assertRaises(SupportSizeError):
            norm(np.ones((2, 2)))

    @settings(max_examples=50, deadline=None)
    @given(x=arrays(np.float64, st.integers(1, 12), elements=finite_floats))
    def test_norm_matches_inner_product(self, x):
        self.assertAlmostEqual(norm(x) ** 2, inner_product(x, x), places=8)

    @settings(max_examples=30, deadline=None)
    @given(a=arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)), elements=finite_floats))
    def test_svd_reconstructs(self, a):
        result = svd(a)
        np.testing.assert_allclose(result.reconstruct(), a, atol=1e-8)
        self.assertTrue(np.all(np.diff(result.singular_values) <= 1e-12))
        self.assertTrue(np.all(result.singular_values >= 0))

    def test_svd_smallest_right_vectors(self):
        a = np.diag([3.0, 1.0, 2.0])
        values, vectors = svd(a).smallest_right_vectors(2)
        np.testing.assert_allclose(values, [1.0, 2.0])
        self.assertAlmostEqual(abs(vectors[1, 0]), 1.0)
        self.assertAlmostEqual(abs(vectors[2, 1]), 1.0)

    def test_svd_rejects_empty_matrix(self):
        with self.assertRaises(SupportSizeError):
            svd(np.zeros((0, 3)))

    def test_hermitian_eigen(self):
        a = np.array([[2.0, 1.0j], [-1.0j, 2.0]])
        values, vectors = hermitian_eigen(a)
        np.testing.assert_allclose(values, [1.0, 3.0], atol=1e-12)
        np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(2), atol=1e-12)

        with self.assertRaises(NotHermitianError):
            hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with self.assertRaises(NotHermitianError):
            hermitian_eigen(np.ones((2, 3)))

    def test_orthonormalize_drops_dependent_directions(self):
        basis = orthonormalize([np.array([1.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([1.0, 1.0])])
        self.assertEqual(len(basis), 2)
        q = np.column_stack(basis)
        np.testing.assert_allclose(q.T @ q, np.eye(2), atol=1e-12)
        self.assertEqual(orthonormalize([]), [])

    @settings(max_examples=30, deadline=None)
    @given(vectors=st.lists(arrays(np.float64, 6, elements=finite_floats), min_size=1, max_size=4))
    def test_orthonormalize_spans_input(self, vectors):
        basis = orthonormalize(vectors)
        if not basis:
            return
        q = np.column_stack(basis)
        np.testing.assert_allclose(q.T @ q, np.eye(len(basis)), atol=1e-8)
        for v in vectors:
            residual = v - q @ (q.T @ v)
            self.assertLess(np.linalg.norm(residual), 1e-6 * max(1.0, np.linalg.norm(v)))

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10 ** 6), rows=st.integers(1, 64), columns=st.integers(1, 64), complex_=st.booleans())
    def test_svd_reconstructs_larger_matrices(self, seed, rows, columns, complex_):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((rows, columns))
        if complex_:
            a = a + 1j * rng.standard_normal((rows, columns))
        result = svd(a)
        np.testing.assert_allclose(result.reconstruct(), a, atol=1e-9)
        self.assertAlmostEqual(result.singular_values[0], np.linalg.norm(a, 2), places=9)

    @settings(max_examples=50, deadline=None)
    @given(x=arrays(np.float64, st.integers(1, 12), elements=finite_floats),
           y=arrays(np.float64, st.integers(1, 12), elements=finite_floats))
    def test_cauchy_schwarz(self, x, y):
        self.assertLessEqual(abs(inner_product(x, y)), norm(x) * norm(y) * (1 + 1e-12) + 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(pair=st.integers(1, 12).flatmap(
        lambda n: st.tuples(arrays(np.float64, n, elements=finite_floats), arrays(np.float64, n, elements=finite_floats))))
    def test_parallelogram_identity(self, pair):
        x, y = pair
        left = norm(x + y) ** 2 + norm(x - y) ** 2
        right = 2 * norm(x) ** 2 + 2 * norm(y) ** 2
        self.assertLessEqual(abs(left - right), 1e-9 * max(1.0, right))
