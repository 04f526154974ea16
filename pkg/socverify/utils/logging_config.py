"""
Logging setup for socverify runs.

The package logs under one "socverify" logger with a single console handler
on stderr, so stdout stays free for the verdict lines printed by the CLI.
numpy floating-point warnings raised during integration are routed into the
same handler through the warnings capture.
"""

import logging
import os
import sys

LOG_LEVEL_ENV = "SOC_VERIFY_LOG_LEVEL"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
HANDLER_NAME = "socverify-console"


def _resolve_level(log_level: str | None) -> str:
    requested = (log_level if log_level is not None else os.environ.get(LOG_LEVEL_ENV, "INFO")).upper()
    if requested in LEVELS:
        return requested
    print(f"Warning: Invalid log level '{requested}', defaulting to INFO")
    return "INFO"


def setup_logging(app_name: str = "socverify", log_level: str | None = None) -> logging.Logger:
    """
    Configure the package logger.

    Calling it again replaces the console handler instead of stacking a second one.

    Args:
        app_name: Name of the package logger.
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL; None reads
            SOC_VERIFY_LOG_LEVEL and falls back to INFO.

    Returns:
        logging.Logger: The configured package logger.
    """
    level = getattr(logging, _resolve_level(log_level))
    logger = logging.getLogger(app_name)
    logger.setLevel(level)
    console = logging.StreamHandler(sys.stderr)
    console.set_name(HANDLER_NAME)
    console.setLevel(level)
    console.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))

    logging.captureWarnings(True)
    for target in (logger, logging.getLogger("py.warnings")):
        for handler in [h for h in target.handlers if h.get_name() == HANDLER_NAME]:
            target.removeHandler(handler)
        target.addHandler(console)

    logger.debug(f"logging at {logging.getLevelName(level)}")
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Module logger below the package logger.

    Args:
        name: Usually __name__; names outside the package are nested under it.

    Returns:
        logging.Logger: The "socverify.<name>" logger.
    """
    if name == "socverify" or name.startswith("socverify."):
        return logging.getLogger(name)
    return logging.getLogger(f"socverify.{name}")
