from tests.test_entrypoints.test_opdef import *
from tests.test_entrypoints.test_entrypoint_validation import *
