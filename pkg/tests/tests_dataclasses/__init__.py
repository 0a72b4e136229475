from tests.tests_dataclasses.test_operator_spec import *
from tests.tests_dataclasses.test_parameter_set import *
from tests.tests_dataclasses.test_windowed_vector import *
from tests.tests_dataclasses.test_results import *
