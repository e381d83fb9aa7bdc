"""Entry-point to run the noisynet command-line interface."""


import logging
import sys

from . import cli
from .config import config_logging

LOGGER = logging.getLogger(__name__)


if __name__ == "__main__":
    config_logging()
    status = cli.main()
    LOGGER.debug("Done.")
    sys.exit(status)
