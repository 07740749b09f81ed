"""
Subcarrier assignment and rate / utility formulas.

Every formula is evaluated on LinkGains: the power gain |h|^2 d^-alpha from each
transmitter to the user each group (the CRAN, then every HetNet BS) serves on
each subcarrier. Rates are in bits/s with a log2 and the W/L prefactor.
"""

import logging
from typing import Optional

import numpy as np

from .channel import pathloss
from .constants import CU_PLAYER, RADIO_DEFAULTS, RATE_KINDS
from .exceptions import LevelStrategyError, UndefinedWeightsError
from .schemas import (
    Assignment,
    ChannelRealization,
    Deployment,
    LevelStrategyTable,
    LevelWeights,
    LinkGains,
    PowerProfile,
    Scenario,
)

logger = logging.getLogger(__name__)

# Served-user id of the CRAN group when the deployment has no CRAN
NO_USER = -1


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# ASSIGNMENT
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def default_rbar(d: Deployment, n_subcarriers: int) -> np.ndarray:
    """Fairness averages for the first frame: 1 for every (user, subcarrier)."""
    return np.ones((d.n_users, n_subcarriers))


def assign_cran(
    c: ChannelRealization,
    d: Deployment,
    rbar: np.ndarray,
    alpha: float = RADIO_DEFAULTS["pathloss_exponent"],
) -> np.ndarray:
    """
    Pick the CRAN user of every subcarrier.

    The metric of user j on subcarrier k is sum_i |h_ijk| sqrt(d_ij^-alpha) / rbar[j, k]
    over the RRHs; ties go to the lowest user id.

    Args:
        c: Channel realization
        d: Deployment
        rbar: Fairness averages (n_users, L), strictly positive
        alpha: Path loss exponent

    Returns:
        CRAN user id per subcarrier (L,); NO_USER everywhere without a CRAN
    """
    users = d.cran_user_ids
    if len(users) == 0:
        return np.full(c.n_subcarriers, NO_USER, dtype=int)

    amplitude = np.sqrt(c.power_gain[d.rrh_ids][:, users, :])
    amplitude *= np.sqrt(pathloss(d, alpha)[d.rrh_ids][:, users])[:, :, np.newaxis]
    metric = amplitude.sum(axis=0) / rbar[users]
    return users[np.argmax(metric, axis=0)]


def assign_bs(c: ChannelRealization, d: Deployment, i: int, rbar: np.ndarray) -> np.ndarray:
    """
    Pick the user of HetNet BS `i` on every subcarrier: argmax_j |h_ijk| / rbar[j, k].

    Ties go to the lowest user id.

    Returns:
        User id per subcarrier (L,)
    """
    users = d.users_of(i)
    if len(users) == 0:
        raise ValueError(f"BS {i} serves no users")
    metric = np.abs(c.h[i, users, :]) / rbar[users]
    return users[np.argmax(metric, axis=0)]


def assign_users(
    c: ChannelRealization,
    d: Deployment,
    rbar: Optional[np.ndarray] = None,
    alpha: float = RADIO_DEFAULTS["pathloss_exponent"],
) -> Assignment:
    """
    Assign every subcarrier of the CRAN and of every BS.

    Args:
        c: Channel realization
        d: Deployment
        rbar: Fairness averages (n_users, L); all ones when omitted
        alpha: Path loss exponent

    Returns:
        Assignment
    """
    if rbar is None:
        rbar = default_rbar(d, c.n_subcarriers)
    rbar = np.asarray(rbar, dtype=float)
    if rbar.shape != (d.n_users, c.n_subcarriers):
        raise ValueError(f"rbar shape {rbar.shape} != ({d.n_users}, {c.n_subcarriers})")

    bs_user = np.array(
        [assign_bs(c, d, int(i), rbar) for i in d.bs_ids], dtype=int
    ).reshape(len(d.bs_ids), c.n_subcarriers)
    return Assignment(cran_user=assign_cran(c, d, rbar, alpha), bs_user=bs_user, rbar=rbar)


def link_gains(c: ChannelRealization, d: Deployment, a: Assignment, s: Scenario) -> LinkGains:
    """
    Gains from every transmitter to every served user.

    Args:
        c: Channel realization
        d: Deployment
        a: Assignment
        s: Scenario (path loss, noise, bandwidth)

    Returns:
        LinkGains with power[t, g, k] = |h[t, served[g, k], k]|^2 d^-alpha
    """
    served = np.vstack([a.cran_user[np.newaxis, :], a.bs_user])
    ks = np.arange(a.n_subcarriers)[np.newaxis, :]
    pl = pathloss(d, s.pathloss_exponent)

    power = c.power_gain[:, served, ks] * pl[:, served]
    if len(d.cran_user_ids) == 0:
        power[:, 0, :] = 0.0

    return LinkGains(
        power=power,
        cran_amplitude=np.sqrt(power[d.rrh_ids, 0, :]),
        served=served,
        rrh_ids=d.rrh_ids,
        bs_ids=d.bs_ids,
        noise_power_w=s.noise_power_w,
        w_over_l=s.w_over_l,
    )


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# VECTORIZED RATES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def _rate(w_over_l: float, sinr: np.ndarray) -> np.ndarray:
    return w_over_l * np.log2(1.0 + sinr)


def cran_interference(gains: LinkGains, p: np.ndarray) -> np.ndarray:
    """Noise plus HetNet interference at the CRAN user, per subcarrier (L,)."""
    return gains.noise_power_w + np.einsum(
        "bk,bk->k", gains.power[gains.bs_ids, 0, :], p[gains.bs_ids]
    )


def cran_signal(gains: LinkGains, p: np.ndarray) -> np.ndarray:
    """Coherently combined signal power (sum_i |h| sqrt(p d^-alpha))^2 per subcarrier."""
    return np.einsum("ik,ik->k", gains.cran_amplitude, np.sqrt(p[gains.rrh_ids])) ** 2


def cran_rates(gains: LinkGains, p: np.ndarray) -> np.ndarray:
    """CRAN MISO rate on every subcarrier (L,)."""
    if len(gains.rrh_ids) == 0:
        return np.zeros(p.shape[1])
    return _rate(gains.w_over_l, cran_signal(gains, p) / cran_interference(gains, p))


def bs_interference(gains: LinkGains, p: np.ndarray) -> np.ndarray:
    """Noise plus interference from every other transmitter, per (BS, subcarrier)."""
    received = gains.power[:, 1:, :] * p[:, np.newaxis, :]
    groups = np.arange(len(gains.bs_ids))
    received[gains.bs_ids, groups, :] = 0.0
    return gains.noise_power_w + received.sum(axis=0)


def bs_rates(gains: LinkGains, p: np.ndarray) -> np.ndarray:
    """Rate of every HetNet BS on every subcarrier (n_bs, L)."""
    groups = np.arange(1, len(gains.bs_ids) + 1)
    signal = gains.power[gains.bs_ids, groups, :] * p[gains.bs_ids]
    return _rate(gains.w_over_l, signal / bs_interference(gains, p))


def utilities(gains: LinkGains, p: np.ndarray) -> dict[str, float]:
    """
    True sum rate of every player under the powers `p`.

    Returns:
        Player key ("CU" or BS id) -> bits/s
    """
    result = {}
    if len(gains.rrh_ids):
        result[CU_PLAYER] = float(cran_rates(gains, p).sum())
    for bs_id, rate in zip(gains.bs_ids, bs_rates(gains, p).sum(axis=1)):
        result[str(bs_id)] = float(rate)
    return result


def summarize_by_kind(
    d: Deployment, rates: dict[str, float]
) -> tuple[dict[str, float], dict[str, float]]:
    """
    Aggregate player rates by kind.

    Kinds without players are left out.

    Returns:
        (mean rate per player of each kind, summed rate of each kind)
    """
    by_kind: dict[str, list[float]] = {}
    for player, rate in rates.items():
        by_kind.setdefault(d.player_kind(player), []).append(rate)
    means = {kind: float(np.mean(by_kind[kind])) for kind in RATE_KINDS if kind in by_kind}
    totals = {kind: float(np.sum(by_kind[kind])) for kind in RATE_KINDS if kind in by_kind}
    return means, totals


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# PER-SUBCARRIER OPERATIONS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def cran_rate_k(
    c: ChannelRealization,
    d: Deployment,
    a: Assignment,
    profile: PowerProfile,
    k: int,
    s: Scenario,
) -> float:
    """
    CRAN rate on subcarrier k for the user a.cran_user[k].

    (W/L) log2(1 + (sum_i |h_ik| sqrt(p_ik d_ik^-alpha))^2 / (sigma^2 + HetNet interference))
    """
    return float(cran_rates(link_gains(c, d, a, s), profile.p)[k])


def bs_rate_k(
    c: ChannelRealization,
    d: Deployment,
    a: Assignment,
    profile: PowerProfile,
    i: int,
    k: int,
    s: Scenario,
) -> float:
    """Rate of HetNet BS `i` on subcarrier k, interfered by every other transmitter."""
    gains = link_gains(c, d, a, s)
    return float(bs_rates(gains, profile.p)[gains.group_of(i) - 1, k])


def utility_cu(
    c: ChannelRealization, d: Deployment, a: Assignment, profile: PowerProfile, s: Scenario
) -> float:
    """CU utility: CRAN rate summed over subcarriers."""
    return float(cran_rates(link_gains(c, d, a, s), profile.p).sum())


def utility_bs(
    c: ChannelRealization,
    d: Deployment,
    a: Assignment,
    profile: PowerProfile,
    i: int,
    s: Scenario,
) -> float:
    """Utility of HetNet BS `i`: its rate summed over subcarriers."""
    gains = link_gains(c, d, a, s)
    return float(bs_rates(gains, profile.p)[gains.group_of(i) - 1].sum())


def beamforming_weights(
    c: ChannelRealization,
    d: Deployment,
    a: Assignment,
    profile: PowerProfile,
    k: int,
    s: Scenario,
) -> np.ndarray:
    """
    MISO signaling weights of the RRHs on subcarrier k.

    v_i = conj(h_ik) sqrt(p_ik d_ik^-alpha) / (|h_ik| sum_l sqrt(p_lk d_lk^-alpha)).
    Diagnostic only; rates use the closed form.

    Returns:
        Complex weight per RRH (n_rrh,)

    Raises:
        UndefinedWeightsError: If every RRH power on k is zero
    """
    rrh = d.rrh_ids
    p_k = profile.p[rrh, k]
    if not np.any(p_k > 0):
        raise UndefinedWeightsError(f"All RRH powers are zero on subcarrier {k}")

    h = c.h[rrh, a.cran_user[k], k]
    scaled = np.sqrt(p_k * pathloss(d, s.pathloss_exponent)[rrh, a.cran_user[k]])
    magnitude = np.abs(h)
    phase = np.divide(np.conj(h), magnitude, out=np.ones_like(h), where=magnitude > 0)
    return phase * scaled / scaled.sum()


def beamformed_rate_k(
    c: ChannelRealization,
    d: Deployment,
    a: Assignment,
    profile: PowerProfile,
    k: int,
    s: Scenario,
) -> float:
    """
    CRAN rate on k obtained by transmitting with the beamforming weights.

    RRH i sends with amplitude sqrt(p_ik) along the phase of v_i; the received
    amplitudes add coherently, so the result equals cran_rate_k.
    """
    rrh = d.rrh_ids
    j = a.cran_user[k]
    v = beamforming_weights(c, d, a, profile, k, s)
    magnitude = np.abs(v)
    phase = np.divide(v, magnitude, out=np.zeros_like(v), where=magnitude > 0)

    amplitude = np.sqrt(pathloss(d, s.pathloss_exponent)[rrh, j] * profile.p[rrh, k])
    signal = np.abs(np.sum(c.h[rrh, j, k] * amplitude * phase)) ** 2

    gains = link_gains(c, d, a, s)
    return float(_rate(s.w_over_l, signal / cran_interference(gains, profile.p)[k]))


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# COGNITIVE HIERARCHY BELIEFS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def ch_belief(
    gains: LinkGains,
    player: str,
    table: LevelStrategyTable,
    weights: LevelWeights,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Expected interference seen by a level-m player, split by origin.

    A BS at level m believes every other transmitter is at level h < m with
    probability g_m(h), playing its stored level-h strategy, or at its own
    level playing the BS's own power. The CU believes only HetNet interferers at
    levels h < m and has no own-power term.

    Args:
        gains: Link gains
        player: "CU" or BS id
        table: Strategies for levels 0..m-1 (at least)
        weights: g_m

    Returns:
        (I, D) per subcarrier: I = sigma^2 + lower-level interference,
        D = same-level coefficient multiplying the player's own p_k

    Raises:
        LevelStrategyError: If the table lacks a level below m
    """
    m = weights.m
    if table.top_level < m - 1:
        raise LevelStrategyError(
            f"Player {player} at level {m} needs strategies up to level {m - 1}, "
            f"table stops at {table.top_level}"
        )

    if player == CU_PLAYER:
        others, group = gains.bs_ids, 0
    else:
        bs_id = int(player)
        others = np.flatnonzero(np.arange(gains.power.shape[0]) != bs_id)
        group = gains.group_of(bs_id)

    g_others = gains.power[others, group, :]
    interference = gains.noise_power_w + np.einsum(
        "h,hok,ok->k", weights.g[:m], table.p[:m][:, others, :], g_others
    )
    if player == CU_PLAYER:
        same_level = np.zeros_like(interference)
    else:
        same_level = weights.g[m] * g_others.sum(axis=0)
    return interference, same_level


def ch_expected_interference(
    gains: LinkGains,
    player: str,
    k: int,
    table: LevelStrategyTable,
    weights: LevelWeights,
    own_p: float = 0.0,
) -> float:
    """
    Expected interference (W, noise excluded) of a level-m player on subcarrier k.

    g_m(m) * sum_{l != i} G_lk * own_p + sum_{l != i} sum_{h < m} g_m(h) * G_lk * p_lk(h);
    the CU has no own-power term and sums over HetNet interferers only.
    """
    interference, same_level = ch_belief(gains, player, table, weights)
    return float(interference[k] - gains.noise_power_w + same_level[k] * own_p)
