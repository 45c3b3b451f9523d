"""
command line execution module
this module serves as the project entry point, it configures logging and runs the click application
"""


# standard imports
import logging
import sys

# importing global config parameters, and generic utilities
import config
from utils import sprint, ColorFormatter

# importing application object to run
from folmmp import application


# application entry point
if __name__ == "__main__":
    try:
        # stderr handler keeps stdout free for tables, dot and json outputs
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColorFormatter(config.LOG_FORMAT))

        # attaching handler to the package logger
        logger = logging.getLogger(config.APP_NAME)
        logger.addHandler(handler)
        logger.setLevel(config.LOG_LEVEL.upper())

        # running command line application, exits with the command's status code
        application(prog_name=config.APP_NAME)
    except Exception as ex:
        # printing failures
        sprint("RED", str(ex))
        sys.exit(1)
