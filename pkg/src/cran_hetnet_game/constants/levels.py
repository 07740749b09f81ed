"""
Transmitter kinds, player naming and cognitive hierarchy levels.
"""

# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# TRANSMITTER KINDS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

RRH = "RRH"
MACRO = "Macro"
PICO = "Pico"
FEMTO = "Femto"

BS_KINDS = (MACRO, PICO, FEMTO)

# Rate-report kinds (the CRAN is reported as one player)
CRAN = "CRAN"
TOTAL = "Total"
RATE_KINDS = (CRAN, MACRO, PICO, FEMTO)

# Player key of the cloud control unit in result maps
CU_PLAYER = "CU"


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# COGNITIVE HIERARCHY
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

# Level 0 is the non-strategic equal-power anchor.
CH_LEVELS = {
    FEMTO: 1,
    PICO: 2,
    MACRO: 3,
    CRAN: 4,
}

CH_TOP_LEVEL = 4
CH_DEFAULT_TAU = 1.0


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SOLUTION CONCEPTS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

NE = "NE"
CHE = "CHE"
EQUAL_POWER = "EqualPower"

CONCEPTS = (NE, CHE, EQUAL_POWER)

# CLI / sweep-file spelling -> concept
CONCEPT_ALIASES = {
    "ne": NE,
    "che": CHE,
    "ch": CHE,
    "equal": EQUAL_POWER,
    "equalpower": EQUAL_POWER,
}
