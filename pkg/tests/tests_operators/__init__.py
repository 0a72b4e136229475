from tests.tests_operators.test_application import *
from tests.tests_operators.test_bounds import *
from tests.tests_operators.test_parameters import *
from tests.tests_operators.test_properties import *
