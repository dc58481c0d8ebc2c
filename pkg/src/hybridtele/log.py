"""Logging setup for hybridtele."""

import logging
import sys

PACKAGE_LOGGER = "hybridtele"


def get_logger(name: str) -> logging.Logger:
    """Get a configured logger for the given module name.

    Args:
        name: Logger name (typically __name__ of the calling module).

    Returns:
        Logger with a stderr handler and WARNING level.
    """
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s [%(levelname)s] %(message)s"))
        logger.addHandler(handler)
        logger.setLevel(logging.WARNING)
    return logger


def set_verbosity(verbose: int) -> None:
    """Lower the level of every hybridtele logger.

    Args:
        verbose: 0 keeps WARNING, 1 selects INFO, 2 or more selects DEBUG.
    """
    if verbose <= 0:
        level = logging.WARNING
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.DEBUG

    for name in list(logging.Logger.manager.loggerDict):
        if name == PACKAGE_LOGGER or name.startswith(PACKAGE_LOGGER + "."):
            logging.getLogger(name).setLevel(level)
