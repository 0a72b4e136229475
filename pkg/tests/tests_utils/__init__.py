from tests.tests_utils.test_logger import *
