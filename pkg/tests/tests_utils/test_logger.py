import logging
import os
import shutil
import sys
import unittest
from pathlib import Path

from opdef.dataclasses.parameters.run_parameters import RunParameters
from opdef.utils.logger import CONFIG_LOGGER_NAME, configure_logging, get_config_logger, log_handlers, log_level
from opdef.utils.paths import attach_root_path
from tests.file_paths import UNITTEST_JUNK_FOLDER


class Test_Logger(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls._workdir = Path(attach_root_path(UNITTEST_JUNK_FOLDER)) / "logger"
        if os.path.exists(cls._workdir):
            shutil.rmtree(cls._workdir)
        cls._workdir.mkdir(parents=True, exist_ok=True)

    def tearDown(self):
        for name in (None, CONFIG_LOGGER_NAME):
            for handler in list(logging.getLogger(name).handlers):
                logging.getLogger(name).removeHandler(handler)
                handler.close()

    def test_console_run_logs_to_stderr_only(self):
        cfg = RunParameters.model_validate({"operator": "identity"})
        handlers = log_handlers(cfg)
        self.assertEqual(len(handlers), 1)
        self.assertIs(handlers[0].stream, sys.stderr)
        self.assertEqual(log_level(cfg), logging.INFO)

    def test_file_run_adds_a_file_handler(self):
        path = self._workdir / "run.log"
        cfg = RunParameters.model_validate({"operator": "identity", "logger": str(path), "debug": True})
        handlers = log_handlers(cfg)
        self.assertIsInstance(handlers[0], logging.FileHandler)
        self.assertEqual(handlers[0].baseFilename, os.path.abspath(path))
        self.assertEqual(log_level(cfg), logging.DEBUG)
        for handler in handlers:
            handler.close()

    def test_configuration_reaches_the_log_file(self):
        path = self._workdir / "config.log"
        cfg = RunParameters.model_validate({"operator": "identity", "logger": str(path)})
        configure_logging(cfg)
        logging.getLogger("opdef.tests").info("root message")
        config_logger = get_config_logger(cfg)
        config_logger.info("resolved")
        self.assertFalse(config_logger.propagate)
        for handler in logging.getLogger().handlers + config_logger.handlers:
            handler.flush()

        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertIn("INFO: root message", lines)
        self.assertIn("resolved", lines)

    def test_config_logger_is_rebuilt_per_run(self):
        cfg = RunParameters.model_validate({"operator": "identity"})
        get_config_logger(cfg)
        self.assertEqual(len(get_config_logger(cfg).handlers), 1)
