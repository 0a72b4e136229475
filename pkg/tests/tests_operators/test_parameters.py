import unittest

import numpy as np

from opdef.operators.parameters import extract_parameters
from tests.helper_functions import load_bundled, spec_from


class Test_Parameters(unittest.TestCase):

    def test_finite_rank_contributes_both_vectors(self):
        parameters = extract_parameters(load_bundled("finite_rank"))
        self.assertEqual(len(parameters.vectors), 2)
        self.assertEqual(parameters.dimension, 2)
        self.assertEqual(parameters.support, 2)

    def test_projection_targets(self):
        self.assertEqual(extract_parameters(load_bundled("first_five_projection")).dimension, 5)
        # infinite targets only contribute below the cutoff
        self.assertEqual(extract_parameters(load_bundled("evens_projection"), cutoff=10).dimension, 5)
        self.assertEqual(extract_parameters(load_bundled("cofinite_projection"), cutoff=10).dimension, 7)

    def test_diagonals(self):
        parameters = extract_parameters(load_bundled("kernel_diagonal"))
        self.assertEqual(parameters.dimension, 2)
        self.assertEqual(parameters.coordinate_span, 0)

        parameters = extract_parameters(load_bundled("diagonal_reciprocal"), decay_tolerance=1e-3)
        self.assertGreaterEqual(parameters.coordinate_span, 1000)
        self.assertLessEqual(parameters.coordinate_span, 1001)

    def test_direct_sum_interleaves_parameters(self):
        spec = spec_from({"field": "real", "kind": "direct_sum",
                          "left": {"kind": "finite_rank", "pairs": [{"z": [1.0], "e": [1.0]}]},
                          "right": {"kind": "diagonal", "prefix": [2.0, 3.0]}})
        parameters = extract_parameters(spec)
        # e_0 from the even half, e_1 and e_3 from the odd half
        self.assertEqual(parameters.dimension, 3)
        self.assertEqual(parameters.support, 4)

    def test_scalar_trees_collect_the_diagonal_prefix(self):
        self.assertEqual(extract_parameters(load_bundled("complex_scalar_plus_decay")).dimension, 5)

    def test_shifts_have_no_parameters(self):
        for name in ("shift_left", "lr_directsum", "evens_subsequence", "identity"):
            self.assertTrue(extract_parameters(load_bundled(name)).is_empty, msg=name)

    def test_vectors_beyond_the_support_are_orthogonal(self):
        parameters = extract_parameters(load_bundled("scalar_plus_finite_rank"))
        probe = np.zeros(parameters.support + 4)
        probe[-1] = 1.0
        px, _ = parameters.project(probe)
        self.assertAlmostEqual(float(np.linalg.norm(px)), 0.0)
