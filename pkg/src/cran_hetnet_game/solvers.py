"""
Constrained concave maximizers behind every best response.

- poisson_level_weights: truncated Poisson level proportions g_m(h)
- waterfill: Nash best response of a HetNet BS
- bs_ch_best_response: cognitive hierarchy best response of a HetNet BS
- cu_best_response: CRAN power split over RRHs x subcarriers (ascent on amplitudes)

All outputs satisfy the equality budget sum_k p_k = p_max. Multipliers use the
natural-log convention: water-filling returns mu with p_k = (w_over_l / mu - 1 / c_k)^+.
"""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.stats import poisson

from .exceptions import SolverConvergenceError
from .rates import bs_interference, cran_interference
from .schemas import LevelWeights, LinkGains, SolverOptions

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
# Equal-power share mixed into a CU warm start
WARM_START_MIX = 1e-12


def poisson_level_weights(tau: float, m: int) -> LevelWeights:
    """
    Level proportions perceived by a level-m player.

    g_m(h) = f(h) / sum_{i=0}^{m} f(i) with f the Poisson(tau) pmf.

    Example:
        >>> poisson_level_weights(1.0, 2).g
        array([0.4, 0.4, 0.2])
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if m < 0:
        raise ValueError(f"level must be non-negative, got {m}")
    f = poisson.pmf(np.arange(m + 1), tau)
    return LevelWeights(m=m, g=f / f.sum())


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SIMPLEX
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def simplex_project(v: np.ndarray, budget) -> np.ndarray:
    """
    Euclidean projection onto {x >= 0, sum(x) = budget}.

    Rows of a 2-D input are projected independently; `budget` may be a scalar or
    one value per row.

    Args:
        v: Vector (n,) or matrix (rows, n)
        budget: Positive total

    Returns:
        Projected array with the shape of `v`
    """
    v = np.asarray(v, dtype=float)
    rows = np.atleast_2d(v)
    budget = np.broadcast_to(np.asarray(budget, dtype=float), (rows.shape[0],))
    if np.any(budget <= 0):
        raise ValueError("budget must be positive")

    n = rows.shape[1]
    u = -np.sort(-rows, axis=1)
    cssv = np.cumsum(u, axis=1) - budget[:, np.newaxis]
    ind = np.arange(1, n + 1)
    cond = u - cssv / ind > 0
    rho = n - np.argmax(cond[:, ::-1], axis=1)
    theta = cssv[np.arange(rows.shape[0]), rho - 1] / rho
    out = np.maximum(rows - theta[:, np.newaxis], 0.0)
    return out.reshape(v.shape)


def _restore_budget(p: np.ndarray, p_max) -> np.ndarray:
    """Rescale rows so they sum exactly to p_max."""
    scale = np.asarray(p_max, dtype=float) / p.sum(axis=-1)
    return p * np.expand_dims(scale, -1)


def _stationarity_residual(grad: np.ndarray, p: np.ndarray, threshold: float) -> float:
    """
    Relative KKT residual of one budget row.

    Coordinates above `threshold` must share one derivative mu; the others must
    not exceed it.
    """
    active = p > threshold
    if not active.any():
        return float("inf")
    mu = grad[active].mean()
    residual = np.abs(grad[active] - mu).max() / mu
    if (~active).any():
        residual = max(residual, float(np.max(grad[~active] - mu)) / mu)
    return float(max(residual, 0.0))


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# WATER-FILLING
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def waterfill(
    c_vec: np.ndarray,
    p_max: float,
    w_over_l: float,
    opts: Optional[SolverOptions] = None,
) -> tuple[np.ndarray, float]:
    """
    Maximize sum_k w_over_l * log2(1 + c_k p_k) subject to sum_k p_k = p_max.

    The water level nu = w_over_l / mu is bracketed and found with brentq, then
    recomputed exactly on its active set: p_k = (nu - 1/c_k)^+.

    Args:
        c_vec: Effective gains c_k > 0 (gain over noise plus interference)
        p_max: Budget (W)
        w_over_l: Per-subcarrier bandwidth
        opts: Solver options

    Returns:
        (powers, mu): optimum powers and the budget multiplier

    Raises:
        SolverConvergenceError: If the water level search fails
    """
    opts = opts or SolverOptions()
    c = np.asarray(c_vec, dtype=float)
    if np.any(c <= 0) or not np.all(np.isfinite(c)):
        raise ValueError("water-filling gains must be positive and finite")
    if p_max <= 0:
        raise ValueError(f"p_max must be positive, got {p_max}")

    inv = 1.0 / c
    lo, hi = inv.min(), inv.max() + 2.0 * p_max
    try:
        nu = brentq(
            lambda level: np.maximum(level - inv, 0.0).sum() - p_max,
            lo,
            hi,
            xtol=opts.tol_step * hi,
            maxiter=opts.max_iters,
        )
    except RuntimeError as e:
        raise SolverConvergenceError(f"Water level search failed: {e}")

    # Exact water level on the active set
    active = inv < nu
    for _ in range(len(c)):
        nu = (p_max + inv[active].sum()) / active.sum()
        refreshed = inv < nu
        if np.array_equal(refreshed, active):
            break
        active = refreshed

    p = np.where(active, nu - inv, 0.0)
    p = _restore_budget(np.maximum(p, 0.0), p_max)
    return p, w_over_l / nu


def waterfill_kkt_residual(
    p: np.ndarray, c_vec: np.ndarray, p_max: float, w_over_l: float, p_floor: float = 1e-12
) -> float:
    """Relative stationarity residual of a water-filling point."""
    c = np.asarray(c_vec, dtype=float)
    grad = w_over_l / LN2 * c / (1.0 + c * p)
    return _stationarity_residual(grad, p, p_floor * p_max)


def nash_bs_best_response(
    gains: LinkGains,
    bs_id: int,
    p: np.ndarray,
    p_max: float,
    opts: Optional[SolverOptions] = None,
) -> np.ndarray:
    """
    Nash best response of a HetNet BS: water-filling against the others' powers.

    c_k = G_ik / (sigma^2 + sum_{l != i} G_lk p_lk), with G the power gain to the
    user the BS serves on k.

    Args:
        gains: Link gains
        bs_id: Transmitter id of the BS
        p: Current powers of all transmitters (n_tx, L)
        p_max: The BS budget
        opts: Solver options

    Returns:
        Powers of the BS (L,)
    """
    group = gains.group_of(bs_id)
    interference = bs_interference(gains, p)[group - 1]
    c_vec = gains.power[bs_id, group, :] / interference
    powers, _ = waterfill(c_vec, p_max, gains.w_over_l, opts)
    return powers


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# COGNITIVE HIERARCHY BS RESPONSE
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def bs_ch_objective(
    p: np.ndarray,
    c_vec: np.ndarray,
    same_level: np.ndarray,
    interference: np.ndarray,
    w_over_l: float,
) -> float:
    """sum_k w_over_l * log2(1 + c_k p_k / (I_k + D_k p_k))."""
    sinr = c_vec * p / (interference + same_level * p)
    return float(np.sum(w_over_l * np.log2(1.0 + sinr)))


def _bs_ch_derivative(p, c, d, i, w_over_l):
    return w_over_l / LN2 * c * i / ((i + (c + d) * p) * (i + d * p))


def _bs_ch_powers(mu: float, c: np.ndarray, d: np.ndarray, i: np.ndarray) -> np.ndarray:
    """
    Per-subcarrier powers where the derivative equals mu (natural-log units).

    Positive root of D(c+D) p^2 + I(c+2D) p + I^2 - cI/mu = 0, or 0 when mu >= c/I.
    """
    a = d * (c + d)
    b = i * (c + 2.0 * d)
    neg_c = np.maximum(c * i / mu - i * i, 0.0)
    return 2.0 * neg_c / (b + np.sqrt(b * b + 4.0 * a * neg_c))


def bs_ch_best_response(
    c_vec: np.ndarray,
    same_level: np.ndarray,
    interference: np.ndarray,
    p_max: float,
    w_over_l: float,
    opts: Optional[SolverOptions] = None,
) -> np.ndarray:
    """
    Cognitive hierarchy best response of a HetNet BS.

    Maximizes sum_k w_over_l * log2(1 + c_k p_k / (I_k + D_k p_k)) over the scaled
    simplex. Each per-subcarrier derivative is strictly decreasing in p_k, so
    for a multiplier mu every p_k is a closed-form quadratic root; mu is found
    with brentq so the budget binds.

    Args:
        c_vec: Own power gains |h|^2 d^-alpha (L,)
        same_level: D_k, the same-level belief coefficient (L,)
        interference: I_k, noise plus lower-level expected interference (L,)
        p_max: Budget (W)
        w_over_l: Per-subcarrier bandwidth
        opts: Solver options

    Returns:
        Powers (L,)

    Raises:
        SolverConvergenceError: If the multiplier search fails
    """
    opts = opts or SolverOptions()
    c = np.asarray(c_vec, dtype=float)
    d = np.asarray(same_level, dtype=float)
    i = np.asarray(interference, dtype=float)
    if np.any(d < 0) or np.any(i <= 0):
        raise ValueError("same-level coefficients must be >= 0 and interference > 0")

    if not np.any(d):
        powers, _ = waterfill(c / i, p_max, w_over_l, opts)
        return powers

    # Natural-log units: derivative of log(1 + c p / (I + D p)) at p = 0 is c / I
    hi = float(np.max(c / i))
    lo = hi
    while _bs_ch_powers(lo, c, d, i).sum() < p_max:
        lo /= 2.0
        if lo < np.finfo(float).tiny:
            raise SolverConvergenceError("Could not bracket the budget multiplier")

    try:
        mu = brentq(
            lambda m: _bs_ch_powers(m, c, d, i).sum() - p_max,
            lo,
            hi,
            xtol=opts.tol_step * lo,
            maxiter=opts.max_iters,
        )
    except RuntimeError as e:
        raise SolverConvergenceError(f"Multiplier search failed: {e}")

    p = _bs_ch_powers(mu, c, d, i)
    p = np.where(p > opts.p_floor * p_max, p, 0.0)
    return _restore_budget(p, p_max)


def bs_ch_kkt_residual(
    p: np.ndarray,
    c_vec: np.ndarray,
    same_level: np.ndarray,
    interference: np.ndarray,
    p_max: float,
    w_over_l: float,
    p_floor: float = 1e-12,
) -> float:
    """Relative stationarity residual of a CH best response."""
    grad = _bs_ch_derivative(p, c_vec, same_level, interference, w_over_l)
    return _stationarity_residual(grad, p, p_floor * p_max)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# CU RESPONSE
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def cu_objective(p: np.ndarray, amplitude: np.ndarray, e: np.ndarray, w_over_l: float) -> float:
    """
    CRAN sum rate with frozen interference terms.

    F(p) = sum_k w_over_l * log2(1 + S_k^2 / e_k), S_k = sum_i a_ik sqrt(p_ik).

    Args:
        p: RRH powers (n_rrh, L)
        amplitude: |h| sqrt(d^-alpha) from each RRH to the CRAN user (n_rrh, L)
        e: Noise plus interference per subcarrier (L,)
        w_over_l: Per-subcarrier bandwidth
    """
    s = np.einsum("ik,ik->k", amplitude, np.sqrt(p))
    return float(np.sum(w_over_l * np.log2(1.0 + s * s / e)))


def cu_gradient(p: np.ndarray, amplitude: np.ndarray, e: np.ndarray, w_over_l: float) -> np.ndarray:
    """
    Gradient of cu_objective for strictly positive p.

    dF/dp_ik = w_over_l / ln2 * (a_ik^2 + (a_ik / sqrt(p_ik)) sum_{l != i} a_lk sqrt(p_lk))
              / (e_k + S_k^2)
    """
    root = np.sqrt(p)
    s = np.einsum("ik,ik->k", amplitude, root)
    return w_over_l / LN2 * amplitude * s / (root * (e + s * s))


def _cu_scaled_gains(amplitude: np.ndarray, e: np.ndarray, p_max: np.ndarray) -> np.ndarray:
    """Dimensionless gains b_ik = a_ik sqrt(P_i / e_k)."""
    return amplitude * np.sqrt(p_max[:, np.newaxis] / e[np.newaxis, :])


def _cu_ascent_terms(y: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    """Objective sum_k log(1 + T_k^2) and its gradient, T_k = sum_i b_ik y_ik."""
    t = (b * y).sum(axis=0)
    return float(np.log1p(t * t).sum()), 2.0 * b * (t / (1.0 + t * t))


def _cu_tangent(y: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Row multipliers, tangent gradient and relative residual on the unit rows.

    lambda_i = g_i . y_i; the residual is max_ik |g_ik - lambda_i y_ik| / lambda_i.
    Rows with lambda_i = 0 carry no gradient and count as stationary.
    """
    lam = (g * y).sum(axis=1, keepdims=True)
    tangent = g - lam * y
    scale = np.where(lam > 0, lam, 1.0)
    return lam, tangent, float(np.max(np.abs(tangent) / scale))


def _unit_rows(y: np.ndarray) -> np.ndarray:
    return y / np.linalg.norm(y, axis=1, keepdims=True)


def _cu_powers(y: np.ndarray, budget: np.ndarray, floor: float) -> np.ndarray:
    """Powers P_i y_ik^2 with shares at or below the floor returned as exact zeros."""
    shares = y * y
    p = np.where(shares > floor, budget[:, np.newaxis] * shares, 0.0)
    return _restore_budget(p, budget)


def cu_kkt_residual(
    p: np.ndarray,
    amplitude: np.ndarray,
    e: np.ndarray,
    p_max: np.ndarray,
) -> float:
    """
    Worst relative stationarity residual over the RRH rows.

    Measured in amplitudes x_ik = sqrt(p_ik / P_i), where a subcarrier every RRH
    leaves dark is a smooth point: |g_ik - lambda_i x_ik| / lambda_i with g the
    gradient in x and lambda_i = g_i . x_i.
    """
    budget = np.asarray(p_max, dtype=float)
    e = np.asarray(e, dtype=float)
    y = np.sqrt(np.asarray(p, dtype=float) / budget[:, np.newaxis])
    _, g = _cu_ascent_terms(y, _cu_scaled_gains(np.asarray(amplitude, dtype=float), e, budget))
    return _cu_tangent(y, g)[2]


def cu_best_response(
    amplitude: np.ndarray,
    e: np.ndarray,
    p_max: np.ndarray,
    w_over_l: float,
    opts: Optional[SolverOptions] = None,
    initial: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Best CRAN power split for frozen interference terms e_k.

    Works on amplitudes y_ik = sqrt(p_ik / P_i), one unit vector per RRH, where
    the rate reads sum_k log(1 + T_k^2) with T_k = sum_i a_ik sqrt(P_i / e_k) y_ik.
    In powers the optimum may sit on a corner where all RRHs leave a weak
    subcarrier dark and the derivative blows up; in amplitudes that point is
    smooth. Each step is a tangent gradient step of length tau on every row,
    y_i <- normalize((1 - tau lambda_i)^+ y_i + tau g_i), which keeps y >= 0 and
    saturates at the fixed point y_i ∝ g_i. tau follows Barzilai-Borwein with
    Armijo backtracking. Shares at or below p_floor come back as exact zeros.

    Args:
        amplitude: |h| sqrt(d^-alpha) from each RRH to the CRAN user (n_rrh, L)
        e: Noise plus interference per subcarrier (L,), all >= sigma^2
        p_max: Budget per RRH (n_rrh,)
        w_over_l: Per-subcarrier bandwidth (scales the rate, not the optimum)
        opts: Solver options
        initial: Warm start powers (n_rrh, L); equal power when omitted

    Returns:
        Powers (n_rrh, L)

    Raises:
        SolverConvergenceError: If the residual is above tol_kkt after max_iters,
            or the iterate stops moving before reaching it
    """
    opts = opts or SolverOptions()
    amplitude = np.asarray(amplitude, dtype=float)
    e = np.asarray(e, dtype=float)
    budget = np.asarray(p_max, dtype=float)
    n_rrh, n_sub = amplitude.shape
    if np.any(e <= 0):
        raise ValueError("interference terms must be positive")

    if n_sub == 1:
        return budget[:, np.newaxis].copy()

    b = _cu_scaled_gains(amplitude, e, budget)
    if initial is None:
        shares = np.full((n_rrh, n_sub), 1.0 / n_sub)
    else:
        shares = simplex_project(np.asarray(initial, dtype=float) / budget[:, np.newaxis], 1.0)
    # A little equal power keeps every subcarrier reachable from a warm start
    y = _unit_rows(np.sqrt((1.0 - WARM_START_MIX) * shares + WARM_START_MIX / n_sub))

    f, g = _cu_ascent_terms(y, b)
    lam, tangent, residual = _cu_tangent(y, g)
    tau = 1.0 / max(float(lam.max()), np.finfo(float).tiny)

    for iteration in range(opts.max_iters):
        if residual <= opts.tol_kkt:
            break

        step = tau
        while True:
            y_new = _unit_rows(np.maximum(1.0 - step * lam, 0.0) * y + step * g)
            f_new, g_new = _cu_ascent_terms(y_new, b)
            ascent = float(np.sum(g * (y_new - y)))
            if f_new >= f + opts.armijo_c * ascent - 1e-12 * abs(f):
                break
            step *= opts.backtrack_beta
            if step * float(lam.max()) < 1e-300:
                y_new, f_new, g_new = y, f, g
                break

        dy = y_new - y
        if np.abs(dy).max() <= opts.tol_step:
            raise SolverConvergenceError(
                f"CU best response stalled at iteration {iteration} "
                f"(residual {residual:.3e})",
                best_iterate=_cu_powers(y, budget, opts.p_floor),
                residual=residual,
            )

        lam_new, tangent_new, residual = _cu_tangent(y_new, g_new)
        sy = -float(np.sum(dy * (tangent_new - tangent)))
        tau = float(np.sum(dy * dy)) / sy if sy > 0 else step / opts.backtrack_beta
        # past 1 / lambda_i every row is at its fixed point
        tau = min(tau, 1.0 / max(float(lam_new[lam_new > 0].min(initial=np.inf)), 1e-300))
        y, f, g, lam, tangent = y_new, f_new, g_new, lam_new, tangent_new
    else:
        if residual > opts.tol_kkt:
            raise SolverConvergenceError(
                f"CU best response did not converge in {opts.max_iters} iterations "
                f"(residual {residual:.3e})",
                best_iterate=_cu_powers(y, budget, opts.p_floor),
                residual=residual,
            )

    logger.debug(f"CU response: {iteration} iterations, residual {residual:.3e}")
    return _cu_powers(y, budget, opts.p_floor)


def nash_cu_best_response(
    gains: LinkGains,
    p: np.ndarray,
    p_max: np.ndarray,
    opts: Optional[SolverOptions] = None,
) -> np.ndarray:
    """
    Nash best response of the CU against the HetNet powers in `p`.

    Warm-started from the current RRH powers.
    """
    e = cran_interference(gains, p)
    return cu_best_response(
        gains.cran_amplitude, e, p_max, gains.w_over_l, opts, initial=p[gains.rrh_ids]
    )
