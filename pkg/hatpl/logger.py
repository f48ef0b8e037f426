import logging
import os


def setup_logger(name, level=None):
    """
    Create a module logger. The level defaults to INFO and can be overridden
    with the HATPL_LOG_LEVEL environment variable (e.g. DEBUG to trace the
    search).
    """
    logging.basicConfig()
    logger = logging.getLogger(name)
    level = level or os.environ.get("HATPL_LOG_LEVEL", "INFO")
    logger.setLevel(level)
    return logger
