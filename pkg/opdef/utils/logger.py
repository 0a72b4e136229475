import sys
import logging
from importlib.metadata import version, PackageNotFoundError
from datetime import datetime
from typing import List

from opdef.dataclasses.parameters.run_parameters import RunParameters

DEBUG_FORMAT = "%(asctime)s|%(name)s|%(levelname)s: %(message)s"
"""
Logging format of ``--debug`` runs: timestamp, logger name, level and message.
"""

DEBUG_DATEFMT = "%Y-%m-%d|%H:%M:%S"

INFO_FORMAT = "%(levelname)s: %(message)s"

CONFIG_LOGGER_NAME = "opdef.config"


def log_level(cfg: RunParameters) -> int:
    return logging.DEBUG if cfg.debug else logging.INFO


def log_handlers(cfg: RunParameters) -> List[logging.Handler]:
    """
    Handlers of a run: stderr always (stdout carries the report), plus an
    appending file handler when ``--logger`` names a file.

    :param cfg:
        Resolved run parameters.
    :type cfg: RunParameters
    :rtype: list[logging.Handler]
    """

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if not cfg.is_console_logging():
        handlers.insert(0, logging.FileHandler(cfg.log_file_path(), mode="a", encoding="utf-8", delay=True))
    return handlers


def configure_logging(cfg: RunParameters) -> None:
    """
    Configure the root logger from ``cfg.logger`` and ``cfg.debug``.
    Handlers of an earlier configuration are replaced.
    """

    logging.basicConfig(
        level=log_level(cfg),
        format=DEBUG_FORMAT if cfg.debug else INFO_FORMAT,
        datefmt=DEBUG_DATEFMT if cfg.debug else None,
        handlers=log_handlers(cfg),
        force=True
    )


def get_config_logger(cfg: RunParameters) -> logging.Logger:
    """
    Logger that echoes the resolved configuration without level prefixes,
    to stderr and to the log file of ``cfg``. It does not propagate to the
    root logger.

    :param cfg:
        Resolved run parameters.
    :type cfg: RunParameters
    :rtype: logging.Logger
    """

    logger = logging.getLogger(CONFIG_LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    logger.setLevel(logging.INFO)
    logger.propagate = False
    for handler in log_handlers(cfg):
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    return logger


def get_package_version(pkg_name: str) -> str:
    """
    Installed version of a package, or ``"unknown"`` if it is not installed.

    :param pkg_name:
        Distribution name.
    :type pkg_name: str
    :rtype: str
    """

    try:
        return version(pkg_name)
    except PackageNotFoundError:
        return "unknown"


def instantiate_logging_CLI(cfg: RunParameters, logger) -> None:
    """
    Initialize logging for a command-line run and emit the log header:
    start time, installed opdef version and the resolved configuration.

    :param cfg:
        Resolved run parameters.
    :type cfg: RunParameters
    :param logger:
        Logger used for general execution messages.
    :type logger: logging.Logger
    """

    configure_logging(cfg)

    logger.info("Starting execution: %s", datetime.now().strftime("%Y-%m-%d %H:%M:%S"))
    logging.getLogger().info("opdef version installed: %s", get_package_version("opdef"))
    get_config_logger(cfg).info("Resolved configuration:\n%s", cfg.dump_resolved_config())
