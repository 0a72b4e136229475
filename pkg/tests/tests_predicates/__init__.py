from tests.tests_predicates.test_distance import *
from tests.tests_predicates.test_properties import *
