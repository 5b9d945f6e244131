"""Defaults and constants for model checking runs."""

import logging
from enum import IntEnum

logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    """Process exit codes of the command-line front end."""

    ACCEPT_H0 = 0
    USAGE_ERROR = 1
    RUNTIME_ERROR = 2
    ACCEPT_H1 = 3


# Row sums of a DTMC may deviate from 1 by at most this much before validation
# rejects the row; smaller deviations are renormalized away.
ROW_SUM_TOLERANCE = 1e-9

# Simulation safety cap on the number of steps of a single trace
DEFAULT_HARD_CAP = 1_000_000

# Sequential tests that have not decided after this many observations fail
DEFAULT_MAX_SAMPLES = 10_000_000

# Largest sample size considered when synthesizing a single sampling plan
DEFAULT_PLAN_N_MAX = 1_000_000

# Default strength and indifference half-width of a verification run
DEFAULT_ALPHA = 0.01
DEFAULT_BETA = 0.01
DEFAULT_DELTA = 0.01

DEFAULT_SEED = 0

# Threads evaluating outermost samples; 1 evaluates them one at a time
DEFAULT_WORKERS = 1

# Outermost samples evaluated per round when more than one worker is used
SAMPLE_BATCH_SIZE = 64

# Version of the JSON report document
REPORT_SCHEMA_VERSION = 1

# Sequential tests log their progress at DEBUG level every N observations
PROGRESS_LOG_INTERVAL = 1_000

# Distances to 0.5 closer than this are ties when choosing a black-box plan
BLACKBOX_TIE_TOLERANCE = 1e-12
