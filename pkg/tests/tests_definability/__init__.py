from tests.tests_definability.test_lambda_extraction import *
from tests.tests_definability.test_compactness import *
from tests.tests_definability.test_spectral import *
from tests.tests_definability.test_fredholm import *
from tests.tests_definability.test_classifier import *
from tests.tests_definability.test_invariant_subspace import *
