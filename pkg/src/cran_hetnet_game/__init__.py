"""
CRAN-HetNet game - downlink power allocation between a cloud RAN and a HetNet.

This library computes, per Monte Carlo channel realization:
- The Nash equilibrium (damped best-response dynamics)
- The cognitive hierarchy equilibrium (femto < pico < macro < CRAN levels)
- The equal-power baseline

Example usage:
    >>> from cran_hetnet_game import desk_scenario, sample_deployment, sample_channels, solve_che
    >>> s = desk_scenario()
    >>> d = sample_deployment(s, seed=7)
    >>> c = sample_channels(d, s, seed=8)
    >>> result = solve_che(s, d, c)
    >>> print(result.per_type_rates)
"""

from .scenario import (
    dbm_to_watts,
    watts_to_dbm,
    desk_scenario,
    full_scenario,
    load_scenario,
    sample_deployment,
    ScenarioParser,
)
from .channel import sample_channels, rx_power, dump_channels, load_channels
from .rates import assign_users, link_gains
from .equilibrium import (
    solve_equal_power,
    solve_ne,
    solve_che,
    verify_ne,
    verify_che,
    make_solver,
    EqualPowerSolver,
    NashSolver,
    CognitiveHierarchySolver,
)
from .experiments import load_sweep_spec, run_sweep, emit_csv, read_csv
from .oracles import run_oracles
from .schemas import (
    Scenario,
    Deployment,
    ChannelRealization,
    Assignment,
    PowerProfile,
    SolverOptions,
    LevelStrategyTable,
    EquilibriumResult,
    SweepSpec,
    SweepResult,
    OracleCheck,
)
from .exceptions import (
    GameError,
    ScenarioError,
    ScenarioParseError,
    ScenarioFileNotFoundError,
    ChannelLookupError,
    UndefinedWeightsError,
    LevelStrategyError,
    SolverConvergenceError,
    EquilibriumError,
    SweepError,
)

__version__ = "0.1.0"

__all__ = [
    # Scenario and channels
    "dbm_to_watts",
    "watts_to_dbm",
    "desk_scenario",
    "full_scenario",
    "load_scenario",
    "sample_deployment",
    "ScenarioParser",
    "sample_channels",
    "rx_power",
    "dump_channels",
    "load_channels",
    "assign_users",
    "link_gains",
    # Solution concepts
    "solve_equal_power",
    "solve_ne",
    "solve_che",
    "verify_ne",
    "verify_che",
    "make_solver",
    "EqualPowerSolver",
    "NashSolver",
    "CognitiveHierarchySolver",
    # Experiments
    "load_sweep_spec",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "run_oracles",
    # Schemas
    "Scenario",
    "Deployment",
    "ChannelRealization",
    "Assignment",
    "PowerProfile",
    "SolverOptions",
    "LevelStrategyTable",
    "EquilibriumResult",
    "SweepSpec",
    "SweepResult",
    "OracleCheck",
    # Exceptions
    "GameError",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioFileNotFoundError",
    "ChannelLookupError",
    "UndefinedWeightsError",
    "LevelStrategyError",
    "SolverConvergenceError",
    "EquilibriumError",
    "SweepError",
]
