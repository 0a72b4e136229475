from tests.tests_reporting.test_report import *
