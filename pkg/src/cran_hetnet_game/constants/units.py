"""
Physical units and geometry guards.

All internal computation is in linear units (watts, hertz, meters). dBm only
appears at the configuration boundary.
"""

# dBm -> W: 10 ** ((x_dbm - DBM_OFFSET) / 10)
DBM_OFFSET = 30.0

# Path loss d ** -alpha diverges at d -> 0; every distance is clamped from below.
D_MIN_M = 1.0

# Accepted suffixes for power values in scenario and sweep files
POWER_SUFFIXES = ("dbm", "w")
