# edgeworth/logger.py
"""Loggers for the expansion engine."""

import logging

from edgeworth import config

handlers = [logging.StreamHandler()]
if config.LOG_FILE:
    handlers.append(logging.FileHandler(config.LOG_FILE))

logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=handlers,
)

# Set the level for all loggers in the edgeworth package
package_logger = logging.getLogger("edgeworth")
package_logger.setLevel(logging.WARNING)  # Default level, can be overridden


def set_log_level(level):
    """Set logging level for all loggers in the edgeworth package"""
    package_logger = logging.getLogger("edgeworth")
    package_logger.setLevel(level)

    # Also update all child loggers
    for name in logging.root.manager.loggerDict:
        if name.startswith("edgeworth."):
            logging.getLogger(name).setLevel(level)
