"""
Default scenario profiles, solver settings and output formats.

Powers are given in dBm here, as in the scenario files; they are converted to
watts when a Scenario is built.
"""

from .levels import CH_DEFAULT_TAU, CH_TOP_LEVEL

# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SCENARIO PROFILES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

# Radio and geometry constants shared by both profiles
RADIO_DEFAULTS = {
    "bandwidth_hz": 100e6,
    "noise_power_dbm": -90.8,
    "pathloss_exponent": 3.0,
    "p_max_rrh_dbm": 30.0,
    "p_max_macro_dbm": 37.0,
    "p_max_pico_dbm": 27.0,
    "p_max_femto_dbm": 20.0,
    "grid_side_m": 3000.0,
    "radius_macro_m": 1000.0,
    "radius_pico_m": 150.0,
    "radius_femto_m": 10.0,
    # "variance 10 dBm" is ambiguous for a dimensionless gain; read as linear 10
    "rayleigh_mean_power": 10.0,
    "ch_tau": CH_DEFAULT_TAU,
    "ch_top_level": CH_TOP_LEVEL,
}

FULL_SCALE = {
    "n_rrh": 40,
    "n_cran_users": 70,
    "n_macro": 5,
    "n_pico": 5,
    "n_femto": 5,
    "users_per_macro": 25,
    "users_per_pico": 15,
    "users_per_femto": 7,
    "n_subcarriers": 8,
    **RADIO_DEFAULTS,
}

DESK_SCALE = {
    "n_rrh": 4,
    "n_cran_users": 8,
    "n_macro": 1,
    "n_pico": 2,
    "n_femto": 2,
    "users_per_macro": 6,
    "users_per_pico": 4,
    "users_per_femto": 2,
    "n_subcarriers": 4,
    **RADIO_DEFAULTS,
}

DESK_REALIZATIONS = 50


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SOLVERS AND DYNAMICS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

SOLVER_DEFAULTS = {
    "tol_kkt": 1e-8,
    "tol_step": 1e-10,
    "max_iters": 10_000,
    "p_floor": 1e-12,  # fraction of P_max
    "armijo_c": 1e-4,
    "backtrack_beta": 0.5,
}

NE_DEFAULTS = {
    "damping": 0.5,
    "tol_outer": 1e-6,  # fraction of P_max
    "max_sweeps": 200,
}

# Relative improvement below which a profile is certified as an equilibrium
CERTIFICATE_TOL = 1e-6

# Floor of the denominator in relative improvements
UTILITY_EPS = 1e-12


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# OUTPUT
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

CSV_COLUMNS = [
    "variable",
    "value",
    "concept",
    "kind",
    "mean_rate_bps",
    "std_rate_bps",
    "n",
]

CHANNEL_DUMP_COLUMNS = ["tx_id", "user_id", "k", "re", "im"]

ENCODING = "utf-8"
