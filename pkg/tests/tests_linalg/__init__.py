from tests.tests_linalg.test_kernel import *
