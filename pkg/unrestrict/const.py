"""Constants for the unrestrict toolkit."""

from __future__ import annotations

import os
from typing import Final

# Defaults (overridable from the environment, then from CLI flags)
DEFAULT_SEED = 20240917
DEFAULT_THREADS = 4
DEFAULT_LOG_LEVEL = "WARNING"

ENV_THREADS = "UNRESTRICT_THREADS"
ENV_SEED = "UNRESTRICT_SEED"
ENV_LOG_LEVEL = "UNRESTRICT_LOG_LEVEL"

# Size limits
MAX_TENSOR_ORDER = 8
MAX_BORDER_RANK_DECISION = 5
MAX_ALGEBRA_DIM = 64
# Number of exchange / saturation rounds before a basis search is declared stuck
MAX_BASIS_ROUNDS = 512

# Finite-field scan
SCAN_CHUNK_SIZE = 1 << 18
SCAN_MAX_VECTORS = 3**16
SCAN_LARGE_MAX_VECTORS = 2**32

# Documents
REPORT_SCHEMA_VERSION = 1

KEY_DIMS = "dims"
KEY_FORMAT = "format"
KEY_FIELD = "field"
KEY_ENTRIES = "entries"
KEY_INDEX = "index"
KEY_VALUE = "value"
KEY_NUM = "num"
KEY_DEN = "den"
KEY_EXP_DENOMINATOR = "N"
KEY_FIELD_PRIME = "Fp"
FIELD_RATIONALS = "Q"

KEY_VARIABLES = "variables"
KEY_DEGREE = "degree"
KEY_TERMS = "terms"
KEY_MONOMIAL = "monomial"
KEY_COEFF = "coeff"

KEY_DIM = "dim"
KEY_MULT = "mult"
KEY_UNIT = "unit"
KEY_PRESENTATION = "presentation"
KEY_EPS = "eps"
KEY_MAPS = "maps"
KEY_ALGEBRA = "algebra"

KEY_SCHEMA_VERSION = "schema_version"

# Pencil rendering
PENCIL_VARIABLE = "x"
SERIES_PARAMETER = "t"

# Minor choice strategies
MINOR_CHOICE_LEX_SMALLEST = "lex_smallest"
MINOR_CHOICE_LEX_LARGEST = "lex_largest"
MINOR_CHOICES: Final[frozenset[str]] = frozenset(
    {MINOR_CHOICE_LEX_SMALLEST, MINOR_CHOICE_LEX_LARGEST}
)

# σ₂ census
SIGMA2_KIND_B = "B"
SIGMA2_KIND_C = "C"
BASE_X = "x"
BASE_Y = "y"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def configured_threads() -> int:
    """Return the worker count for the parallel scan."""
    return max(1, _env_int(ENV_THREADS, DEFAULT_THREADS))


def configured_seed() -> int:
    """Return the default seed for randomized fast paths."""
    return _env_int(ENV_SEED, DEFAULT_SEED)


def configured_log_level() -> str:
    """Return the log level name requested through the environment."""
    return os.environ.get(ENV_LOG_LEVEL, DEFAULT_LOG_LEVEL).upper()
