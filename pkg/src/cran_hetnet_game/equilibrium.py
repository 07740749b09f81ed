"""
Solution concepts: equal power, Nash equilibrium and cognitive hierarchy equilibrium.

Each concept is an EquilibriumSolver. `solve` assigns subcarriers, builds the
link gains and leaves the power profile to the subclass; realized rates are
always recomputed from the final profile with the true interference.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from .constants import (
    CERTIFICATE_TOL,
    CHE,
    CONCEPT_ALIASES,
    CU_PLAYER,
    EQUAL_POWER,
    NE,
    NE_DEFAULTS,
    UTILITY_EPS,
)
from .exceptions import EquilibriumError, GameError, SolverConvergenceError
from .rates import assign_users, ch_belief, link_gains, summarize_by_kind, utilities
from .schemas import (
    ChannelRealization,
    Deployment,
    EquilibriumResult,
    LevelStrategyTable,
    LevelWeights,
    LinkGains,
    PowerProfile,
    Scenario,
    SolverOptions,
)
from .solvers import (
    bs_ch_best_response,
    bs_ch_objective,
    cu_best_response,
    cu_objective,
    nash_bs_best_response,
    nash_cu_best_response,
    poisson_level_weights,
)

logger = logging.getLogger(__name__)


def game_gains(s: Scenario, d: Deployment, c: ChannelRealization) -> LinkGains:
    """Assign subcarriers with the first-frame fairness averages and build link gains."""
    a = assign_users(c, d, alpha=s.pathloss_exponent)
    return link_gains(c, d, a, s)


class EquilibriumSolver(ABC):
    """
    Abstract base class for solution concepts.

    Implements common logic:
    - Subcarrier assignment and link gains
    - Realized-rate evaluation and per-kind aggregation
    - Wrapping of inner solver failures with the offending player

    Subclasses must implement:
    - CONCEPT: Concept name written to results
    - _solve: Compute the played PowerProfile
    """

    CONCEPT: str = ""

    def __init__(self, opts: Optional[SolverOptions] = None):
        self.opts = opts or SolverOptions()

    @abstractmethod
    def _solve(self, s: Scenario, d: Deployment, gains: LinkGains) -> dict:
        """
        Compute the played profile.

        Returns:
            Dict with at least `profile` (PowerProfile); other keys are passed to
            EquilibriumResult (converged, iterations, ...)
        """
        ...

    def solve(self, s: Scenario, d: Deployment, c: ChannelRealization) -> EquilibriumResult:
        """
        Solve one channel realization.

        Args:
            s: Scenario
            d: Deployment
            c: Channel realization

        Returns:
            EquilibriumResult with realized rates under the played profile

        Raises:
            EquilibriumError: If an inner best response fails
        """
        logger.info(f"Solving {self.CONCEPT} for {len(d.players())} players")
        gains = game_gains(s, d, c)
        outcome = self._solve(s, d, gains)
        result = self._result(d, gains, **outcome)
        logger.info(
            f"{self.CONCEPT} done: converged={result.converged}, "
            f"iterations={result.iterations}, total={result.total_rate:.4e} bits/s"
        )
        return result

    def _result(self, d: Deployment, gains: LinkGains, profile: PowerProfile, **diagnostics):
        rates = utilities(gains, profile.p)
        means, totals = summarize_by_kind(d, rates)
        return EquilibriumResult(
            concept=self.CONCEPT,
            profile=profile,
            realized_rates=rates,
            per_type_rates=means,
            per_type_totals=totals,
            **diagnostics,
        )


class EqualPowerSolver(EquilibriumSolver):
    """Baseline: every transmitter splits its budget evenly, p_ik = P_i / L."""

    CONCEPT = EQUAL_POWER

    def _solve(self, s: Scenario, d: Deployment, gains: LinkGains) -> dict:
        return {"profile": PowerProfile.equal(d.p_max, s.n_subcarriers)}


class NashSolver(EquilibriumSolver):
    """
    Gauss-Seidel best-response dynamics.

    Players move in a fixed order (CU first, then BSs by id) starting from
    equal power. Every sweep, the first one included, applies
    p <- theta * BR + (1 - theta) * p. The dynamics stop when the largest power
    change of a sweep, relative to P_max, is at most tol_outer.

    Non-convergence is reported through `converged`, never raised.
    """

    CONCEPT = NE

    def __init__(
        self,
        opts: Optional[SolverOptions] = None,
        damping: float = NE_DEFAULTS["damping"],
        tol_outer: float = NE_DEFAULTS["tol_outer"],
        max_sweeps: int = NE_DEFAULTS["max_sweeps"],
    ):
        super().__init__(opts)
        if not 0 < damping <= 1:
            raise ValueError(f"damping must be in (0, 1], got {damping}")
        self.damping = damping
        self.tol_outer = tol_outer
        self.max_sweeps = max_sweeps

    def _solve(self, s: Scenario, d: Deployment, gains: LinkGains) -> dict:
        p_max = d.p_max
        p = PowerProfile.equal(p_max, s.n_subcarriers).p.copy()
        players = d.players()
        theta = self.damping
        calls = 0
        change = float("inf")
        converged = False

        for sweep in range(1, self.max_sweeps + 1):
            previous = p.copy()
            for player in players:
                tx = d.player_transmitters(player)
                response = nash_best_response(gains, player, p, p_max, self.opts)
                calls += 1
                p[tx] = theta * response + (1.0 - theta) * p[tx]

            change = float(np.max(np.abs(p - previous) / p_max[:, np.newaxis]))
            logger.debug(f"NE sweep {sweep}: max relative change {change:.3e}")
            if change <= self.tol_outer:
                converged = True
                break

        if not converged:
            logger.warning(
                f"NE dynamics did not converge in {self.max_sweeps} sweeps "
                f"(last change {change:.3e})"
            )
        return {
            "profile": PowerProfile(p=p, p_max=p_max),
            "converged": converged,
            "iterations": sweep,
            "max_residual": change,
            "best_response_calls": calls,
        }


class CognitiveHierarchySolver(EquilibriumSolver):
    """
    One-shot cognitive hierarchy recursion.

    Level 0 is equal power for every player. For h = 1..top, every player's
    level-h strategy is its best response to the Poisson-weighted mix of the
    stored strategies at levels below h (plus, for BSs, the same-level belief
    term). The played profile takes each player at its assigned level
    (femto 1, pico 2, macro 3, CU 4).
    """

    CONCEPT = CHE

    def __init__(self, opts: Optional[SolverOptions] = None, tau: Optional[float] = None):
        super().__init__(opts)
        self.tau = tau

    def level_table(self, s: Scenario, d: Deployment, gains: LinkGains) -> LevelStrategyTable:
        """
        Build the strategy of every transmitter at every level 0..top.

        Raises:
            EquilibriumError: If a best response fails (carries player and level)
        """
        return self._fill_levels(s, d, gains)[0]

    def _fill_levels(
        self, s: Scenario, d: Deployment, gains: LinkGains
    ) -> tuple[LevelStrategyTable, int]:
        """The level table and the number of best responses it took."""
        tau = self.tau if self.tau is not None else s.ch_tau
        p_max = d.p_max
        levels = [PowerProfile.equal(p_max, s.n_subcarriers).p]
        calls = 0

        for level in range(1, s.ch_top_level + 1):
            weights = poisson_level_weights(tau, level)
            table = LevelStrategyTable(p=np.stack(levels), p_max=p_max)
            current = np.empty_like(levels[0])
            for player in d.players():
                tx = d.player_transmitters(player)
                current[tx] = ch_best_response(gains, player, table, weights, p_max, self.opts)
                calls += 1
            levels.append(current)
            logger.debug(f"CH level {level} filled (g = {np.round(weights.g, 4).tolist()})")

        return LevelStrategyTable(p=np.stack(levels), p_max=p_max), calls

    def _solve(self, s: Scenario, d: Deployment, gains: LinkGains) -> dict:
        table, calls = self._fill_levels(s, d, gains)
        played = np.empty_like(table.p[0])
        for player in d.players():
            tx = d.player_transmitters(player)
            played[tx] = table.p[d.player_level(player), tx]

        return {
            "profile": PowerProfile(p=played, p_max=d.p_max),
            "iterations": table.top_level,
            "best_response_calls": calls,
            "level_table": table,
        }


SOLVERS = {
    NE: NashSolver,
    CHE: CognitiveHierarchySolver,
    EQUAL_POWER: EqualPowerSolver,
}


def normalize_concept(name: str) -> str:
    """Map CLI / sweep-file spellings (ne, che, equal) to concept names."""
    if name in SOLVERS:
        return name
    key = name.strip().lower()
    if key not in CONCEPT_ALIASES:
        raise ValueError(f"Unknown concept: {name!r}")
    return CONCEPT_ALIASES[key]


def make_solver(
    concept: str,
    opts: Optional[SolverOptions] = None,
    tau: Optional[float] = None,
    **dynamics,
) -> EquilibriumSolver:
    """
    Solver instance for a concept name or alias.

    `tau` only applies to CHE and `dynamics` (damping, tol_outer, max_sweeps) only to NE.
    """
    concept = normalize_concept(concept)
    if concept == CHE:
        return CognitiveHierarchySolver(opts, tau=tau)
    if concept == NE:
        return NashSolver(opts, **dynamics)
    return SOLVERS[concept](opts)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# BEST RESPONSES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def nash_best_response(
    gains: LinkGains,
    player: str,
    p: np.ndarray,
    p_max: np.ndarray,
    opts: SolverOptions,
) -> np.ndarray:
    """Exact best response of a player to the powers `p` of everyone else."""
    try:
        if player == CU_PLAYER:
            return nash_cu_best_response(gains, p, p_max[gains.rrh_ids], opts)
        bs_id = int(player)
        return nash_bs_best_response(gains, bs_id, p, float(p_max[bs_id]), opts)
    except SolverConvergenceError as e:
        raise EquilibriumError(f"Nash best response of {player} failed: {e}", player=player)


def ch_best_response(
    gains: LinkGains,
    player: str,
    table: LevelStrategyTable,
    weights: LevelWeights,
    p_max: np.ndarray,
    opts: SolverOptions,
) -> np.ndarray:
    """Best response of a player at level weights.m to its hierarchy belief."""
    interference, same_level = ch_belief(gains, player, table, weights)
    try:
        if player == CU_PLAYER:
            return cu_best_response(
                gains.cran_amplitude, interference, p_max[gains.rrh_ids], gains.w_over_l, opts
            )
        bs_id = int(player)
        c_vec = gains.power[bs_id, gains.group_of(bs_id), :]
        return bs_ch_best_response(
            c_vec, same_level, interference, float(p_max[bs_id]), gains.w_over_l, opts
        )
    except SolverConvergenceError as e:
        raise EquilibriumError(
            f"CH best response of {player} at level {weights.m} failed: {e}",
            player=player,
            level=weights.m,
        )


def ch_utility(
    gains: LinkGains,
    player: str,
    table: LevelStrategyTable,
    weights: LevelWeights,
    own: np.ndarray,
) -> float:
    """Belief-based utility of a player playing `own` at level weights.m."""
    interference, same_level = ch_belief(gains, player, table, weights)
    if player == CU_PLAYER:
        return cu_objective(own, gains.cran_amplitude, interference, gains.w_over_l)
    bs_id = int(player)
    c_vec = gains.power[bs_id, gains.group_of(bs_id), :]
    return bs_ch_objective(own, c_vec, same_level, interference, gains.w_over_l)


def _relative_gain(best: float, current: float) -> float:
    return (best - current) / max(current, UTILITY_EPS)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# PUBLIC API
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def solve_equal_power(s: Scenario, d: Deployment, c: ChannelRealization) -> EquilibriumResult:
    """Equal-power baseline on one realization."""
    return EqualPowerSolver().solve(s, d, c)


def solve_ne(
    s: Scenario,
    d: Deployment,
    c: ChannelRealization,
    opts: Optional[SolverOptions] = None,
    **dynamics,
) -> EquilibriumResult:
    """
    Nash equilibrium by damped Gauss-Seidel best-response dynamics.

    Args:
        s: Scenario
        d: Deployment
        c: Channel realization
        opts: Inner solver options
        **dynamics: damping, tol_outer, max_sweeps overrides

    Returns:
        EquilibriumResult (converged=False if the sweep cap was hit)
    """
    return NashSolver(opts, **dynamics).solve(s, d, c)


def solve_che(
    s: Scenario,
    d: Deployment,
    c: ChannelRealization,
    opts: Optional[SolverOptions] = None,
    tau: Optional[float] = None,
) -> EquilibriumResult:
    """
    Cognitive hierarchy equilibrium.

    The result carries the LevelStrategyTable in `level_table`.
    """
    return CognitiveHierarchySolver(opts, tau=tau).solve(s, d, c)


def verify_ne(
    result: EquilibriumResult,
    s: Scenario,
    d: Deployment,
    c: ChannelRealization,
    opts: Optional[SolverOptions] = None,
) -> float:
    """
    Largest relative gain any player gets by deviating unilaterally.

    max_i (U_i(BR_i) - U_i(p)) / max(U_i(p), eps) with U the true sum rates. A
    value at most CERTIFICATE_TOL certifies a Nash equilibrium.
    """
    opts = opts or SolverOptions()
    gains = game_gains(s, d, c)
    p = result.profile.p
    current = utilities(gains, p)

    worst = 0.0
    for player in d.players():
        tx = d.player_transmitters(player)
        deviation = p.copy()
        deviation[tx] = nash_best_response(gains, player, p, d.p_max, opts)
        gain = _relative_gain(utilities(gains, deviation)[player], current[player])
        worst = max(worst, gain)

    logger.info(
        f"NE certificate for {result.concept}: {worst:.3e} "
        f"({'pass' if worst <= CERTIFICATE_TOL else 'fail'})"
    )
    return worst


def verify_che(
    result: EquilibriumResult,
    table: Optional[LevelStrategyTable],
    s: Scenario,
    d: Deployment,
    c: ChannelRealization,
    opts: Optional[SolverOptions] = None,
    tau: Optional[float] = None,
) -> float:
    """
    Largest relative gain against each player's hierarchy utility at its own level.

    The level table is held fixed; it defaults to `result.level_table`.
    """
    table = table if table is not None else result.level_table
    if table is None:
        raise GameError("verify_che needs a level strategy table")
    opts = opts or SolverOptions()
    tau = tau if tau is not None else s.ch_tau
    gains = game_gains(s, d, c)
    p = result.profile.p

    worst = 0.0
    for player in d.players():
        tx = d.player_transmitters(player)
        weights = poisson_level_weights(tau, d.player_level(player))
        played = p[tx] if player == CU_PLAYER else p[tx][0]
        best = ch_best_response(gains, player, table, weights, d.p_max, opts)
        gain = _relative_gain(
            ch_utility(gains, player, table, weights, best),
            ch_utility(gains, player, table, weights, played),
        )
        worst = max(worst, gain)

    logger.info(
        f"CHE certificate for {result.concept}: {worst:.3e} "
        f"({'pass' if worst <= CERTIFICATE_TOL else 'fail'})"
    )
    return worst
