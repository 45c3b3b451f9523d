"""
global configuration variables module
contains project-wide settings and constants used throughout the toolkit
includes arithmetic defaults, text format headers, logging and external constants configurations
"""


# standard imports
import os

# pip install python-dotenv
# environment variable management
from dotenv import load_dotenv


# load environment variables from .env file
load_dotenv()


# application details and configurations
# baic global settings
APP_IMPORT = __name__
APP_FOLDER = "folmmp"
APP_NAME = "folmmp"
APP_VERSION = "1.0.0"
APP_TITLE = "Exact calculus for adjoint foliated surface singularities"

# logging configurations, logs are always written to stderr
LOG_LEVEL = os.environ.get("FOLMMP_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# adjoint parameters defaults, rationals are kept as "p/q" strings until parsed
EPSILON = os.environ.get("FOLMMP_EPSILON", "1/10")
DELTA = os.environ.get("FOLMMP_DELTA", "1")

# the mmp entry points require epsilon strictly below this value
EPSILON_CEILING = "1/5"

# resolution search settings
SEARCH_DEPTH = int(os.environ.get("FOLMMP_SEARCH_DEPTH", 8))
SEARCH_EXTENSION = int(os.environ.get("FOLMMP_SEARCH_EXTENSION", 2))
SEARCH_BUDGET = int(os.environ.get("FOLMMP_SEARCH_BUDGET", 400))

# germ polynomials degree cap, enforced at parse / construction time only
DEGREE_CAP = int(os.environ.get("FOLMMP_DEGREE_CAP", 16))

# versioned text formats headers
GERM_HEADER = "folmmp-germ v1"
SURFACE_HEADER = "folmmp-surface v1"
RUNLOG_HEADER = "folmmp-runlog v1"

# external constants table
# these constants are non-effective in the literature, values below are illustrative inputs only
# every entry must carry a provenance string, values are "p/q" strings
EXTERNAL_CONSTANTS = {
    "tau": {
        "value": os.environ.get("FOLMMP_TAU", "1/10"),
        "provenance": "illustrative input; no effective value of tau is known",
    },
    "lambda_0": {
        "value": os.environ.get("FOLMMP_LAMBDA_0", "9/10"),
        "provenance": "illustrative input; ACC constant for log canonical thresholds of foliated surfaces",
    },
    "E_I": {
        "value": os.environ.get("FOLMMP_E_I", "1/10"),
        "provenance": "illustrative input; boundary entry constant, see bounds entry for its explicit part",
    },
    "M": {
        "value": os.environ.get("FOLMMP_M", "12"),
        "provenance": "illustrative input; effective birationality constant",
    },
}

# volume floors v(epsilon), keyed by epsilon as "p/q"
VOLUME_FLOOR = {
    "1/10": {
        "value": os.environ.get("FOLMMP_VOLUME_FLOOR", "1/100"),
        "provenance": "illustrative input; lower bound of adjoint volumes at epsilon 1/10",
    },
}
