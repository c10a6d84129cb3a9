# Settings for the ccic workbench
#
# Every value can be overridden from the environment (or a .env file next to
# run.py) with the CCIC_ prefix. See env.example for the full list.

import os

from dotenv import load_dotenv

from .errors import ConfigError

load_dotenv()


def _int_env(name: str, default: int | None) -> int | None:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


# Input length limits
MAX_N = 12
COVER_LIMIT = _int_env("CCIC_COVER_LIMIT", 3)
DEFAULT_COVER_LIMIT = 3

# Step budget for witness programs; None means calibrate per function
BUDGET = _int_env("CCIC_BUDGET", None)

# Theorem checks
TOLERANCE_BITS = _int_env("CCIC_TOLERANCE", 3)

# Extra guess bits beyond the longest structured witness in soundness sweeps
WMAX_SLACK = _int_env("CCIC_WMAX_SLACK", 2)

# Decision-clause VM enumeration
VM_LMAX = _int_env("CCIC_VM_LMAX", 10)
VM_LMAX_CAP = 14

# Sweep corpus
RANDOM_COUNT = _int_env("CCIC_RANDOM_COUNT", 100)
SEED = _int_env("CCIC_SEED", 2024)
WORKERS = _int_env("CCIC_WORKERS", 1)

LOG_LEVEL = os.getenv("CCIC_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "[%(module)s] %(message)s"

# Report server
HOST = os.getenv("CCIC_HOST", "127.0.0.1")
PORT = _int_env("CCIC_PORT", 3000)
