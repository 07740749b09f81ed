"""
Constants and reference data.

This package contains the configuration constants of the engine:
- Unit conversions and the distance clamp
- Transmitter kinds, player keys and cognitive hierarchy levels
- Full-size and desk-scale scenario profiles
- Solver, dynamics and output defaults
"""

from .units import DBM_OFFSET, D_MIN_M, POWER_SUFFIXES
from .levels import (
    RRH,
    MACRO,
    PICO,
    FEMTO,
    CRAN,
    TOTAL,
    BS_KINDS,
    RATE_KINDS,
    CU_PLAYER,
    CH_LEVELS,
    CH_TOP_LEVEL,
    CH_DEFAULT_TAU,
    NE,
    CHE,
    EQUAL_POWER,
    CONCEPTS,
    CONCEPT_ALIASES,
)
from .defaults import (
    RADIO_DEFAULTS,
    FULL_SCALE,
    DESK_SCALE,
    DESK_REALIZATIONS,
    SOLVER_DEFAULTS,
    NE_DEFAULTS,
    CERTIFICATE_TOL,
    UTILITY_EPS,
    CSV_COLUMNS,
    CHANNEL_DUMP_COLUMNS,
    ENCODING,
)

__all__ = [
    # Units
    "DBM_OFFSET",
    "D_MIN_M",
    "POWER_SUFFIXES",
    # Kinds and levels
    "RRH",
    "MACRO",
    "PICO",
    "FEMTO",
    "CRAN",
    "TOTAL",
    "BS_KINDS",
    "RATE_KINDS",
    "CU_PLAYER",
    "CH_LEVELS",
    "CH_TOP_LEVEL",
    "CH_DEFAULT_TAU",
    # Concepts
    "NE",
    "CHE",
    "EQUAL_POWER",
    "CONCEPTS",
    "CONCEPT_ALIASES",
    # Profiles and defaults
    "RADIO_DEFAULTS",
    "FULL_SCALE",
    "DESK_SCALE",
    "DESK_REALIZATIONS",
    "SOLVER_DEFAULTS",
    "NE_DEFAULTS",
    "CERTIFICATE_TOL",
    "UTILITY_EPS",
    "CSV_COLUMNS",
    "CHANNEL_DUMP_COLUMNS",
    "ENCODING",
]
