from tests.tests_io.test_resources import *
