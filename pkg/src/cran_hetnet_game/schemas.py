"""
Pydantic models for the power allocation game.

This module defines type-safe data models for scenarios, deployments, channel
realizations, power profiles, equilibria and sweeps. Array payloads are numpy
arrays and are made read-only on construction. All powers are in watts.
"""

from functools import cached_property
from typing import Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import (
    CH_DEFAULT_TAU,
    CH_LEVELS,
    CH_TOP_LEVEL,
    CONCEPTS,
    CRAN,
    CSV_COLUMNS,
    CU_PLAYER,
    D_MIN_M,
    FEMTO,
    MACRO,
    PICO,
    RRH,
    SOLVER_DEFAULTS,
    TOTAL,
)

TransmitterKind = Literal["RRH", "Macro", "Pico", "Femto"]
Concept = Literal["NE", "CHE", "EqualPower"]

# Relative tolerance of the equality budget sum_k p_ik = P_i,max
BUDGET_RTOL = 1e-9


def _frozen_array(value, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class Scenario(BaseModel):
    """
    Static description of the network: counts, max powers, geometry, radio constants.

    Powers are in watts. Use `scenario.load_scenario` or the profile builders in
    `scenario` to build one from dBm values.
    """

    model_config = ConfigDict(frozen=True)

    # Counts
    n_rrh: int = Field(..., ge=1, description="Number of RRHs (|K_c|)")
    n_cran_users: int = Field(..., ge=1, description="Number of CRAN users (|N_c|)")
    n_macro: int = Field(..., ge=0, description="Number of macro BSs")
    n_pico: int = Field(..., ge=0, description="Number of pico BSs")
    n_femto: int = Field(..., ge=0, description="Number of femto BSs")
    users_per_macro: int = Field(..., ge=1, description="Users served by each macro BS")
    users_per_pico: int = Field(..., ge=1, description="Users served by each pico BS")
    users_per_femto: int = Field(..., ge=1, description="Users served by each femto BS")
    n_subcarriers: int = Field(..., ge=1, description="Number of OFDMA subcarriers (L)")

    # Radio
    bandwidth_hz: float = Field(..., gt=0, description="Transmission bandwidth W (Hz)")
    noise_power_w: float = Field(..., gt=0, description="Noise variance sigma^2 (W)")
    pathloss_exponent: float = Field(3.0, gt=0, description="Path loss exponent alpha")

    # Max powers
    p_max_rrh_w: float = Field(..., gt=0, description="RRH max power (W)")
    p_max_macro_w: float = Field(..., gt=0, description="Macro BS max power (W)")
    p_max_pico_w: float = Field(..., gt=0, description="Pico BS max power (W)")
    p_max_femto_w: float = Field(..., gt=0, description="Femto BS max power (W)")

    # Geometry
    grid_side_m: float = Field(..., gt=0, description="Side of the square deployment area (m)")
    radius_macro_m: float = Field(..., gt=0, description="Macro coverage radius (m)")
    radius_pico_m: float = Field(..., gt=0, description="Pico coverage radius (m)")
    radius_femto_m: float = Field(..., gt=0, description="Femto coverage radius (m)")

    # Fading and hierarchy
    rayleigh_mean_power: float = Field(
        10.0, gt=0, description="E[|h|^2] of the Rayleigh fading (linear)"
    )
    ch_tau: float = Field(
        CH_DEFAULT_TAU, gt=0, description="Poisson rate tau of the level distribution"
    )
    ch_top_level: int = Field(
        CH_TOP_LEVEL, ge=CH_TOP_LEVEL, description="Highest cognitive hierarchy level"
    )

    @property
    def n_bs(self) -> int:
        """Number of HetNet base stations."""
        return self.n_macro + self.n_pico + self.n_femto

    @property
    def n_transmitters(self) -> int:
        """RRHs plus HetNet BSs."""
        return self.n_rrh + self.n_bs

    @property
    def n_users(self) -> int:
        """CRAN users plus all HetNet users."""
        return (
            self.n_cran_users
            + self.n_macro * self.users_per_macro
            + self.n_pico * self.users_per_pico
            + self.n_femto * self.users_per_femto
        )

    @property
    def w_over_l(self) -> float:
        """Per-subcarrier bandwidth W/L (Hz)."""
        return self.bandwidth_hz / self.n_subcarriers

    def p_max_for(self, kind: str) -> float:
        """Max transmit power (W) of a transmitter kind."""
        return {
            RRH: self.p_max_rrh_w,
            MACRO: self.p_max_macro_w,
            PICO: self.p_max_pico_w,
            FEMTO: self.p_max_femto_w,
        }[kind]

    def radius_for(self, kind: str) -> float:
        """Coverage radius (m) of a HetNet BS kind."""
        return {
            MACRO: self.radius_macro_m,
            PICO: self.radius_pico_m,
            FEMTO: self.radius_femto_m,
        }[kind]

    def users_per(self, kind: str) -> int:
        """Users served by each BS of a kind."""
        return {
            MACRO: self.users_per_macro,
            PICO: self.users_per_pico,
            FEMTO: self.users_per_femto,
        }[kind]

    def count(self, kind: str) -> int:
        """Number of transmitters of a kind."""
        return {
            RRH: self.n_rrh,
            MACRO: self.n_macro,
            PICO: self.n_pico,
            FEMTO: self.n_femto,
        }[kind]

    def with_overrides(self, **fields) -> "Scenario":
        """
        Return a validated copy with some fields replaced.

        Args:
            **fields: Scenario field names and new values

        Returns:
            New Scenario (the original is unchanged)
        """
        return Scenario.model_validate({**self.model_dump(), **fields})


class Transmitter(BaseModel):
    """An RRH or HetNet base station."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0, description="Transmitter id (RRHs first, then BSs)")
    kind: TransmitterKind = Field(..., description="RRH, Macro, Pico or Femto")
    position: tuple[float, float] = Field(..., description="(x, y) position in meters")
    p_max_w: float = Field(..., gt=0, description="Max transmit power (W)")


class User(BaseModel):
    """A single-antenna user, served by the CRAN or by one HetNet BS."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0, description="User id (CRAN users first)")
    owner: Optional[int] = Field(None, description="Serving BS id; None for CRAN users")
    position: tuple[float, float] = Field(..., description="(x, y) position in meters")

    @property
    def is_cran(self) -> bool:
        return self.owner is None


class Deployment(BaseModel):
    """
    Sampled positions of RRHs, BSs and users with their pairwise distances.

    `distance[i, j]` is the distance (m) between transmitter i and user j,
    clamped below by D_MIN_M.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    transmitters: list[Transmitter] = Field(..., description="RRHs then BSs, ordered by id")
    users: list[User] = Field(..., description="CRAN users then BS users, ordered by id")
    distance: np.ndarray = Field(..., description="Distances (n_tx, n_users) in meters")

    @field_validator("distance", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_geometry(self) -> "Deployment":
        n_tx, n_users = len(self.transmitters), len(self.users)
        if self.distance.shape != (n_tx, n_users):
            raise ValueError(
                f"distance shape {self.distance.shape} != ({n_tx}, {n_users})"
            )
        if [t.id for t in self.transmitters] != list(range(n_tx)):
            raise ValueError("transmitter ids must be 0..n_tx-1 in order")
        if [u.id for u in self.users] != list(range(n_users)):
            raise ValueError("user ids must be 0..n_users-1 in order")
        if not np.all(np.isfinite(self.distance)) or np.any(self.distance < D_MIN_M):
            raise ValueError(f"distances must be finite and >= {D_MIN_M} m")
        for user in self.users:
            if user.owner is not None and (
                user.owner >= n_tx or self.transmitters[user.owner].kind == RRH
            ):
                raise ValueError(f"user {user.id} owner {user.owner} is not a HetNet BS")
        has_rrh = any(t.kind == RRH for t in self.transmitters)
        has_cran_user = any(u.owner is None for u in self.users)
        if has_rrh != has_cran_user:
            raise ValueError("RRHs and CRAN users must be both present or both absent")
        return self

    @classmethod
    def from_positions(
        cls, transmitters: list[Transmitter], users: list[User]
    ) -> "Deployment":
        """
        Build a Deployment from explicit positions, computing clamped distances.

        Args:
            transmitters: Transmitters ordered by id
            users: Users ordered by id

        Returns:
            Deployment with distance = max(Euclidean distance, D_MIN_M)
        """
        tx_xy = np.array([t.position for t in transmitters], dtype=float).reshape(-1, 2)
        user_xy = np.array([u.position for u in users], dtype=float).reshape(-1, 2)
        diff = tx_xy[:, np.newaxis, :] - user_xy[np.newaxis, :, :]
        distance = np.maximum(np.hypot(diff[..., 0], diff[..., 1]), D_MIN_M)
        return cls(transmitters=transmitters, users=users, distance=distance)

    @property
    def n_transmitters(self) -> int:
        return len(self.transmitters)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @cached_property
    def rrh_ids(self) -> np.ndarray:
        """Transmitter ids of the RRHs."""
        return np.array([t.id for t in self.transmitters if t.kind == RRH], dtype=int)

    @cached_property
    def bs_ids(self) -> np.ndarray:
        """Transmitter ids of the HetNet BSs."""
        return np.array([t.id for t in self.transmitters if t.kind != RRH], dtype=int)

    @cached_property
    def cran_user_ids(self) -> np.ndarray:
        """User ids served by the CRAN."""
        return np.array([u.id for u in self.users if u.owner is None], dtype=int)

    @cached_property
    def p_max(self) -> np.ndarray:
        """Max power (W) per transmitter id."""
        return _frozen_array([t.p_max_w for t in self.transmitters])

    def users_of(self, bs_id: int) -> np.ndarray:
        """User ids served by HetNet BS `bs_id`."""
        return np.array([u.id for u in self.users if u.owner == bs_id], dtype=int)

    def kind_of(self, tx_id: int) -> str:
        return self.transmitters[tx_id].kind

    def players(self) -> list[str]:
        """Player keys: the CU (if any RRH exists) then every BS id as a string."""
        keys = [CU_PLAYER] if len(self.rrh_ids) else []
        return keys + [str(i) for i in self.bs_ids]

    def player_kind(self, player: str) -> str:
        """Rate-report kind of a player (CRAN for the CU)."""
        return CRAN if player == CU_PLAYER else self.kind_of(int(player))

    def player_level(self, player: str) -> int:
        """Cognitive hierarchy level of a player."""
        return CH_LEVELS[self.player_kind(player)]

    def player_transmitters(self, player: str) -> np.ndarray:
        """Transmitter ids controlled by a player."""
        return self.rrh_ids if player == CU_PLAYER else np.array([int(player)], dtype=int)

    def to_dataframe(self) -> pd.DataFrame:
        """
        Flat table of transmitters and users (one row per node).

        Returns:
            DataFrame with columns node, id, kind, owner, x, y, p_max_w
        """
        rows = [
            {
                "node": "transmitter",
                "id": t.id,
                "kind": t.kind,
                "owner": None,
                "x": t.position[0],
                "y": t.position[1],
                "p_max_w": t.p_max_w,
            }
            for t in self.transmitters
        ]
        rows += [
            {
                "node": "user",
                "id": u.id,
                "kind": CRAN if u.owner is None else self.kind_of(u.owner),
                "owner": u.owner,
                "x": u.position[0],
                "y": u.position[1],
                "p_max_w": None,
            }
            for u in self.users
        ]
        return pd.DataFrame(rows)


class ChannelRealization(BaseModel):
    """
    Complex small-scale fading gains for every (transmitter, user, subcarrier).

    One realization is one frame; equilibria are computed per realization.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h: np.ndarray = Field(..., description="Complex gains (n_tx, n_users, L)")

    @field_validator("h", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value, dtype=complex)

    @model_validator(mode="after")
    def _check_finite(self) -> "ChannelRealization":
        if self.h.ndim != 3:
            raise ValueError(f"h must be 3-D (n_tx, n_users, L), got shape {self.h.shape}")
        if not np.all(np.isfinite(self.h)):
            raise ValueError("channel gains must be finite")
        return self

    @property
    def n_subcarriers(self) -> int:
        return self.h.shape[2]

    @cached_property
    def power_gain(self) -> np.ndarray:
        """|h|^2 for every entry."""
        return _frozen_array(np.abs(self.h) ** 2)


class Assignment(BaseModel):
    """
    Subcarrier-to-user assignment of the CRAN and of every HetNet BS.

    `bs_user[b, k]` is the user of the b-th BS (in `Deployment.bs_ids` order)
    on subcarrier k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    cran_user: np.ndarray = Field(..., description="CRAN user id per subcarrier (L,)")
    bs_user: np.ndarray = Field(..., description="User id per (BS, subcarrier) (n_bs, L)")
    rbar: np.ndarray = Field(..., description="Fairness average rate per (user, subcarrier)")

    @field_validator("cran_user", "bs_user", mode="before")
    @classmethod
    def _as_int_array(cls, value) -> np.ndarray:
        return _frozen_array(value, dtype=int)

    @field_validator("rbar", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_rbar(self) -> "Assignment":
        if np.any(self.rbar <= 0):
            raise ValueError("rbar must be strictly positive")
        if self.bs_user.ndim != 2 or self.bs_user.shape[1] != self.cran_user.shape[0]:
            raise ValueError("bs_user must have shape (n_bs, L)")
        return self

    @property
    def n_subcarriers(self) -> int:
        return self.cran_user.shape[0]


class PowerProfile(BaseModel):
    """
    Per-transmitter, per-subcarrier transmit powers of all players.

    Every row satisfies p >= 0 and sum_k p_ik = p_max_i (relative 1e-9).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: np.ndarray = Field(..., description="Powers (n_tx, L) in watts")
    p_max: np.ndarray = Field(..., description="Budget per transmitter (n_tx,) in watts")

    @field_validator("p", "p_max", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_budget(self) -> "PowerProfile":
        if self.p.ndim != 2 or self.p.shape[0] != self.p_max.shape[0]:
            raise ValueError(f"p shape {self.p.shape} incompatible with p_max {self.p_max.shape}")
        if np.any(self.p < 0):
            raise ValueError("powers must be non-negative")
        sums = self.p.sum(axis=1)
        if np.any(np.abs(sums - self.p_max) > BUDGET_RTOL * self.p_max):
            worst = int(np.argmax(np.abs(sums - self.p_max) / self.p_max))
            raise ValueError(
                f"transmitter {worst} uses {sums[worst]!r} W of a {self.p_max[worst]!r} W budget"
            )
        return self

    @classmethod
    def equal(cls, p_max: np.ndarray, n_subcarriers: int) -> "PowerProfile":
        """Equal split p_ik = P_i,max / L."""
        p_max = np.asarray(p_max, dtype=float)
        p = np.repeat(p_max[:, np.newaxis] / n_subcarriers, n_subcarriers, axis=1)
        return cls(p=p, p_max=p_max)


class SolverOptions(BaseModel):
    """Tolerances and line-search constants of the inner solvers."""

    model_config = ConfigDict(frozen=True)

    tol_kkt: float = Field(
        SOLVER_DEFAULTS["tol_kkt"], gt=0, lt=1, description="KKT residual tolerance"
    )
    tol_step: float = Field(
        SOLVER_DEFAULTS["tol_step"], gt=0, lt=1, description="Step / bracket tolerance"
    )
    max_iters: int = Field(SOLVER_DEFAULTS["max_iters"], ge=1, description="Iteration cap")
    p_floor: float = Field(
        SOLVER_DEFAULTS["p_floor"], gt=0, lt=1, description="Smaller shares become 0"
    )
    armijo_c: float = Field(SOLVER_DEFAULTS["armijo_c"], gt=0, lt=1, description="Armijo constant")
    backtrack_beta: float = Field(
        SOLVER_DEFAULTS["backtrack_beta"], gt=0, lt=1, description="Backtracking factor"
    )


class LevelWeights(BaseModel):
    """Normalized Poisson proportions g_m(0..m) perceived by a level-m player."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: int = Field(..., ge=0, description="Level of the perceiving player")
    g: np.ndarray = Field(..., description="Weights g_m(h), h = 0..m")

    @field_validator("g", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_normalized(self) -> "LevelWeights":
        if self.g.shape != (self.m + 1,):
            raise ValueError(f"expected {self.m + 1} weights, got {self.g.shape}")
        if np.any(self.g < 0) or abs(self.g.sum() - 1.0) > 1e-12:
            raise ValueError("level weights must be non-negative and sum to 1")
        return self


class LinkGains(BaseModel):
    """
    Gains from every transmitter to the user each group serves on each subcarrier.

    Group 0 is the CRAN, group b + 1 is the b-th HetNet BS.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    power: np.ndarray = Field(..., description="|h|^2 d^-alpha, shape (n_tx, n_groups, L)")
    cran_amplitude: np.ndarray = Field(
        ..., description="|h| sqrt(d^-alpha) from each RRH to the CRAN user, (n_rrh, L)"
    )
    served: np.ndarray = Field(..., description="User id per (group, subcarrier)")
    rrh_ids: np.ndarray = Field(..., description="Transmitter ids of the RRHs")
    bs_ids: np.ndarray = Field(..., description="Transmitter ids of the BSs, group order")
    noise_power_w: float = Field(..., gt=0)
    w_over_l: float = Field(..., gt=0)

    @field_validator("power", "cran_amplitude", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @field_validator("served", "rrh_ids", "bs_ids", mode="before")
    @classmethod
    def _as_int_array(cls, value) -> np.ndarray:
        return _frozen_array(value, dtype=int)

    def group_of(self, bs_id: int) -> int:
        """Group index of HetNet BS `bs_id`."""
        return int(np.flatnonzero(self.bs_ids == bs_id)[0]) + 1


class LevelStrategyTable(BaseModel):
    """
    Strategy of every transmitter at every hierarchy level, p[h, i, k].

    Level 0 is the equal-power anchor; the CU's level-h strategy occupies the
    RRH rows of slice h.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: np.ndarray = Field(..., description="Powers (levels, n_tx, L) in watts")
    p_max: np.ndarray = Field(..., description="Budget per transmitter (n_tx,)")

    @field_validator("p", "p_max", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_slices(self) -> "LevelStrategyTable":
        if self.p.ndim != 3:
            raise ValueError("level table must be 3-D (levels, n_tx, L)")
        for level in range(self.p.shape[0]):
            PowerProfile(p=self.p[level], p_max=self.p_max)
        equal = self.p_max[:, np.newaxis] / self.p.shape[2]
        if not np.allclose(self.p[0], equal, rtol=BUDGET_RTOL, atol=0.0):
            raise ValueError("level 0 must be the equal-power strategy")
        return self

    @property
    def top_level(self) -> int:
        return self.p.shape[0] - 1

    def to_dict(self, deployment: Deployment) -> dict:
        """
        Structured dump: players -> levels -> power arrays.

        Args:
            deployment: Deployment the table was computed on

        Returns:
            Nested dict of plain lists, JSON serializable
        """
        return {
            player: {
                str(level): self.p[level, deployment.player_transmitters(player)].tolist()
                for level in range(self.p.shape[0])
            }
            for player in deployment.players()
        }


class EquilibriumResult(BaseModel):
    """
    Outcome of one solution concept on one channel realization.

    `realized_rates` are the true utilities under `profile`, recomputed from the
    profile with the actual interference.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    concept: Concept
    profile: PowerProfile
    realized_rates: dict[str, float] = Field(..., description="Player -> sum rate (bits/s)")
    per_type_rates: dict[str, float] = Field(
        ..., description="Kind -> mean sum rate per player of that kind (bits/s)"
    )
    per_type_totals: dict[str, float] = Field(
        ..., description="Kind -> summed rate of all players of that kind (bits/s)"
    )
    converged: bool = True
    iterations: int = Field(0, ge=0, description="Sweeps (NE) or levels (CHE) performed")
    max_residual: float = Field(0.0, description="Final power change (NE) or 0")
    best_response_calls: int = Field(0, ge=0, description="Inner best responses computed")
    level_table: Optional[LevelStrategyTable] = Field(
        None, description="Level strategies behind a CHE profile"
    )

    @property
    def total_rate(self) -> float:
        """System sum rate (bits/s)."""
        return float(sum(self.realized_rates.values()))

    def to_dict(self, deployment: Deployment) -> dict:
        """Structured dump of the result (players -> power arrays)."""
        dump = {
            "concept": self.concept,
            "converged": self.converged,
            "iterations": self.iterations,
            "max_residual": self.max_residual,
            "best_response_calls": self.best_response_calls,
            "realized_rates": dict(self.realized_rates),
            "per_type_rates": dict(self.per_type_rates),
            "powers": {
                player: self.profile.p[deployment.player_transmitters(player)].tolist()
                for player in deployment.players()
            },
        }
        if self.level_table is not None:
            dump["levels"] = self.level_table.to_dict(deployment)
        return dump


class SweepSpec(BaseModel):
    """A parameter sweep over RRH count or RRH max power."""

    model_config = ConfigDict(frozen=True)

    variable: Literal["n_rrh", "p_max_rrh"] = Field(..., description="Swept scenario variable")
    values: list[float] = Field(..., min_length=1, description="Swept values (watts for power)")
    n_realizations: int = Field(..., ge=1, description="Monte Carlo realizations per value")
    seed: int = Field(0, ge=0, description="Base seed")
    concepts: list[Concept] = Field(default_factory=lambda: list(CONCEPTS))
    scenario: Scenario = Field(..., description="Base scenario with overrides applied")

    @model_validator(mode="after")
    def _check_values(self) -> "SweepSpec":
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.variable == "n_rrh" and any(v != int(v) or v < 1 for v in self.values):
            raise ValueError("n_rrh values must be positive integers")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("concepts must not repeat")
        return self

    def scenario_at(self, value: float) -> Scenario:
        """Scenario with the swept variable set to `value`."""
        if self.variable == "n_rrh":
            return self.scenario.with_overrides(n_rrh=int(value))
        return self.scenario.with_overrides(p_max_rrh_w=float(value))


class SweepRow(BaseModel):
    """One aggregated CSV row."""

    model_config = ConfigDict(frozen=True)

    variable: str
    value: float
    concept: Concept
    kind: Literal["CRAN", "Macro", "Pico", "Femto", "Total"]
    mean_rate_bps: float
    std_rate_bps: float
    n: int = Field(..., ge=0)


class SweepResult(BaseModel):
    """
    Aggregated sweep output.

    Provides two levels of access:
    - rows: typed aggregate rows (the CSV contract)
    - samples: per-realization values the rows were aggregated from
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: list[SweepRow] = Field(default_factory=list)
    failures: dict[str, int] = Field(
        default_factory=dict, description="'value/concept' -> skipped realizations"
    )
    type_counts: dict[str, int] = Field(
        default_factory=dict, description="Kind -> players of that kind (per scenario value)"
    )

    _samples: Optional[pd.DataFrame] = None

    @property
    def samples(self) -> pd.DataFrame:
        """
        Per-realization rates behind the aggregates.

        Returns:
            DataFrame with columns value, realization, concept, kind, rate_bps
        """
        if self._samples is None:
            raise ValueError("Per-realization samples not available (result read from CSV)")
        return self._samples

    def set_samples(self, df: pd.DataFrame) -> None:
        """Internal method to attach per-realization values."""
        self._samples = df

    def to_dataframe(self) -> pd.DataFrame:
        """Rows as a DataFrame with the CSV columns."""
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=CSV_COLUMNS)

    def kind_totals(self) -> pd.Series:
        """
        System rate rebuilt from the per-kind rows as sum over kinds of players x mean.

        Per-kind rows average over the players of a kind, so this needs
        `type_counts`; pass them to `read_csv` for results read back from CSV.

        Returns:
            Series indexed by (value, concept)

        Raises:
            ValueError: If type_counts are missing
        """
        if not self.type_counts:
            raise ValueError("type_counts are needed to rebuild totals from per-kind rows")
        df = self.to_dataframe()
        kinds = df[df["kind"] != TOTAL]
        weighted = kinds["mean_rate_bps"] * kinds["kind"].map(self.type_counts)
        return weighted.groupby([kinds["value"], kinds["concept"]]).sum().rename("total_rate_bps")


class OracleCheck(BaseModel):
    """Outcome of one acceptance oracle suite."""

    name: str
    passed: bool
    cases: int = Field(..., ge=0)
    failures: int = Field(..., ge=0)
    worst: float = Field(..., description="Worst observed metric of the suite")
    threshold: float
    seconds: float
    detail: str = ""


__all__ = [
    "Scenario",
    "Transmitter",
    "User",
    "Deployment",
    "ChannelRealization",
    "Assignment",
    "PowerProfile",
    "SolverOptions",
    "LevelWeights",
    "LinkGains",
    "LevelStrategyTable",
    "EquilibriumResult",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "OracleCheck",
]
