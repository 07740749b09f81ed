"""
Acceptance oracle suites.

Each suite draws its own random instances from a seed and compares a solver
against an independent oracle (grid search, finite differences, midpoint
checks, re-optimization). `run_oracles` runs a selection and returns one
OracleCheck per suite.

The `trend` and `ordering` suites judge one desk-scale NE/CHE sweep (trend
directions, CHE gains over NE); they are never part of the default selection.
"""

import logging
import multiprocessing as mp
import time
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .channel import sample_channels
from .constants import (
    BS_KINDS,
    CERTIFICATE_TOL,
    CHE,
    CRAN,
    DESK_REALIZATIONS,
    FEMTO,
    MACRO,
    NE,
    PICO,
)
from .equilibrium import solve_che, solve_ne, verify_che, verify_ne
from .exceptions import GameError
from .experiments import cell_seeds, cells_where_che_beats_ne, run_sweep
from .scenario import derive_seed, desk_scenario, make_rng, sample_deployment
from .schemas import OracleCheck, SweepResult, SweepSpec
from .solvers import cu_best_response, cu_gradient, cu_objective, waterfill

logger = logging.getLogger(__name__)

# Grid resolution (fraction of P_max) of the water-filling oracle; four
# subcarriers use a coarser grid to keep the simplex enumeration small.
WATERFILL_GRID_STEP = {1: 1e-3, 2: 1e-3, 3: 1e-3, 4: 1e-2}
CU_GRID_STEP = 1e-3

WATERFILL_TOL = 1e-6
CU_GRID_TOL = 1e-4
GRADIENT_TOL = 1e-5
CONCAVITY_TOL = 1e-9
NE_PASS_FRACTION = 0.95
NE_MAX_NONCONVERGED = 0.10

TREND_VALUES = [2, 4, 6, 8]
CHE_GAIN_SMALL_CELLS = 2.0
CHE_LOSS_LARGE_CELLS = 0.15
CHE_TOTAL_WIN_FRACTION = 0.8


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# HELPERS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def simplex_grid(n_parts: int, step: float) -> np.ndarray:
    """
    Every point of {x >= 0, sum(x) = 1} whose coordinates are multiples of `step`.

    Returns:
        Array (points, n_parts)
    """
    n = int(round(1.0 / step))
    if n_parts == 1:
        return np.ones((1, 1))
    axes = [np.arange(n + 1)] * (n_parts - 1)
    head = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n_parts - 1)
    head = head[head.sum(axis=1) <= n]
    return np.column_stack([head, n - head.sum(axis=1)]) / n


def _waterfill_objective(p: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.sum(np.log2(1.0 + c * p), axis=-1)


def _bs_rate(p: np.ndarray, c: np.ndarray, interference: np.ndarray) -> float:
    return float(np.sum(np.log2(1.0 + c * p / interference)))


def _random_cu_instance(rng: np.random.Generator, n_rrh: int, n_sub: int):
    amplitude = np.sqrt(rng.exponential(1.0, (n_rrh, n_sub))) * 10 ** rng.uniform(-0.5, 1.0)
    e = rng.uniform(0.5, 2.0, n_sub)
    return amplitude, e


def _desk_cell(seed: int, index: int):
    s = desk_scenario()
    deployment_seed, channel_seed = cell_seeds(seed, 0, index)
    d = sample_deployment(s, deployment_seed)
    return s, d, sample_channels(d, s, channel_seed)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SOLVER ORACLES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def check_waterfill(rng: np.random.Generator, n_cases: int = 100) -> dict:
    """Water-filling never beaten by a simplex grid search (relative gap)."""
    gaps = []
    for _ in range(n_cases):
        n_sub = int(rng.integers(1, 5))
        c = 10 ** rng.uniform(-1.0, 2.0, n_sub)
        p, _ = waterfill(c, 1.0, 1.0)
        ours = float(_waterfill_objective(p, c))
        points = simplex_grid(n_sub, WATERFILL_GRID_STEP[n_sub])
        grid = float(_waterfill_objective(points, c).max())
        gaps.append((grid - ours) / ours)
    return {"metrics": gaps, "threshold": WATERFILL_TOL}


def check_cu_grid(rng: np.random.Generator, n_cases: int = 25) -> dict:
    """CU best response with two RRHs and two subcarriers against a 2-D split grid."""
    x = np.linspace(0.0, 1.0, int(round(1.0 / CU_GRID_STEP)) + 1)
    x0, x1 = np.meshgrid(x, x, indexing="ij")
    gaps = []
    for _ in range(n_cases):
        amplitude, e = _random_cu_instance(rng, 2, 2)
        p = cu_best_response(amplitude, e, np.ones(2), 1.0)
        ours = cu_objective(p, amplitude, e, 1.0)

        s0 = amplitude[0, 0] * np.sqrt(x0) + amplitude[1, 0] * np.sqrt(x1)
        s1 = amplitude[0, 1] * np.sqrt(1.0 - x0) + amplitude[1, 1] * np.sqrt(1.0 - x1)
        grid = np.log2(1.0 + s0**2 / e[0]) + np.log2(1.0 + s1**2 / e[1])
        gaps.append((float(grid.max()) - ours) / ours)
    return {"metrics": gaps, "threshold": CU_GRID_TOL}


def check_gradient(rng: np.random.Generator, n_cases: int = 100) -> dict:
    """Analytic CU gradient against central finite differences at interior points."""
    errors = []
    for _ in range(n_cases):
        n_rrh, n_sub = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        amplitude, e = _random_cu_instance(rng, n_rrh, n_sub)
        p = rng.uniform(0.05, 1.0, (n_rrh, n_sub))
        analytic = cu_gradient(p, amplitude, e, 1.0)

        numeric = np.empty_like(p)
        for idx in np.ndindex(p.shape):
            h = 1e-5 * p[idx]
            up, down = p.copy(), p.copy()
            up[idx] += h
            down[idx] -= h
            rise = cu_objective(up, amplitude, e, 1.0) - cu_objective(down, amplitude, e, 1.0)
            numeric[idx] = rise / (2.0 * h)
        errors.append(float(np.abs(numeric - analytic).max() / np.abs(analytic).max()))
    return {"metrics": errors, "threshold": GRADIENT_TOL}


def check_concavity(rng: np.random.Generator, n_cases: int = 1000) -> dict:
    """Midpoint concavity of the CRAN sum rate and the BS sum rate in own powers."""
    violations = []
    for case in range(n_cases):
        t = float(rng.uniform())
        n_sub = int(rng.integers(1, 5))
        if case % 2 == 0:
            n_rrh = int(rng.integers(1, 5))
            amplitude, e = _random_cu_instance(rng, n_rrh, n_sub)
            # some coordinates at zero to cover the boundary
            keep = rng.uniform(size=(2, n_rrh, n_sub)) > 0.2
            x, y = rng.uniform(0.0, 1.0, (2, n_rrh, n_sub)) * keep

            def f(p):
                return cu_objective(p, amplitude, e, 1.0)

        else:
            c = 10 ** rng.uniform(-1.0, 2.0, n_sub)
            interference = rng.uniform(0.5, 2.0, n_sub)
            x, y = rng.uniform(0.0, 1.0, (2, n_sub))

            def f(p):
                return _bs_rate(p, c, interference)

        violations.append(t * f(x) + (1.0 - t) * f(y) - f(t * x + (1.0 - t) * y))
    return {"metrics": violations, "threshold": CONCAVITY_TOL}


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# EQUILIBRIUM CERTIFICATES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def _ne_certificate(seed: int, index: int) -> Optional[float]:
    """NE certificate of one desk cell; None if the dynamics did not converge."""
    s, d, c = _desk_cell(seed, index)
    result = solve_ne(s, d, c)
    return verify_ne(result, s, d, c) if result.converged else None


def _che_certificate(seed: int, index: int) -> float:
    s, d, c = _desk_cell(seed, index)
    return verify_che(solve_che(s, d, c), None, s, d, c)


def _guarded(certify: Callable[[int, int], Optional[float]], seed: int, index: int):
    """(certificate, error message); a GameError becomes a message instead of propagating."""
    try:
        return certify(seed, index), ""
    except GameError as e:
        logger.warning(f"Desk seed {index} failed: {e}")
        return None, str(e)


def _per_seed(certify, seed: int, n_seeds: int, workers: int) -> list[tuple]:
    jobs = [(certify, seed, index) for index in range(n_seeds)]
    if workers > 1:
        with mp.Pool(workers) as pool:
            return pool.starmap(_guarded, jobs)
    return [_guarded(*job) for job in jobs]


def check_ne_certificate(seed: int, n_seeds: int = DESK_REALIZATIONS, workers: int = 1) -> dict:
    """
    Converged NE profiles admit no profitable unilateral deviation.

    Seeds whose dynamics do not converge, or whose solve fails, are excluded
    from the pass fraction; together they are capped.
    """
    outcomes = _per_seed(_ne_certificate, seed, n_seeds, workers)
    certificates = [cert for cert, _ in outcomes if cert is not None]
    errors = sum(bool(error) for _, error in outcomes)
    skipped = len(outcomes) - len(certificates)

    passing = sum(cert <= CERTIFICATE_TOL for cert in certificates)
    passed = (
        skipped <= NE_MAX_NONCONVERGED * n_seeds
        and bool(certificates)
        and passing >= NE_PASS_FRACTION * len(certificates)
    )
    return {
        "metrics": certificates,
        "threshold": CERTIFICATE_TOL,
        "passed": passed,
        "detail": (
            f"{passing}/{len(certificates)} converged seeds certified, "
            f"{skipped - errors} not converged, {errors} failed"
        ),
    }


def check_che_certificate(seed: int, n_seeds: int = DESK_REALIZATIONS, workers: int = 1) -> dict:
    """Every CHE player plays a best response to its hierarchy belief; a failed solve fails."""
    outcomes = _per_seed(_che_certificate, seed, n_seeds, workers)
    certificates = [np.inf if error else cert for cert, error in outcomes]
    errors = sum(bool(error) for _, error in outcomes)
    return {
        "metrics": certificates,
        "threshold": CERTIFICATE_TOL,
        "detail": f"{errors} failed" if errors else "",
    }


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SWEEP REPORTS
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


@lru_cache(maxsize=4)
def _desk_sweep(seed: int, n_realizations: int, workers: int = 1) -> SweepResult:
    spec = SweepSpec(
        variable="n_rrh",
        values=TREND_VALUES,
        n_realizations=n_realizations,
        seed=seed,
        concepts=[NE, CHE],
        scenario=desk_scenario(),
    )
    return run_sweep(spec, workers=workers)


def monotone_within_noise(means: list[float], stds: list[float], increasing: bool) -> bool:
    """
    True if `means` move in one direction, allowing one inversion within one std.

    Example:
        >>> monotone_within_noise([1.0, 0.9, 2.0], [0.2, 0.2, 0.2], increasing=True)
        True
    """
    sign = 1.0 if increasing else -1.0
    inversions = 0
    for j in range(len(means) - 1):
        step = sign * (means[j + 1] - means[j])
        if step < 0:
            inversions += 1
            if -step > max(stds[j], stds[j + 1]) or inversions > 1:
                return False
    return True


def check_trend(seed: int, n_seeds: int = DESK_REALIZATIONS, workers: int = 1) -> dict:
    """CRAN rate grows with the RRH count while every HetNet tier's rate does not."""
    df = _desk_sweep(seed, n_seeds, workers).to_dataframe()
    verdicts = []
    for concept in (NE, CHE):
        for kind in (CRAN, *BS_KINDS):
            rows = df[(df["concept"] == concept) & (df["kind"] == kind)].sort_values("value")
            if rows.empty:
                continue
            ok = monotone_within_noise(
                rows["mean_rate_bps"].tolist(),
                rows["std_rate_bps"].tolist(),
                increasing=kind == CRAN,
            )
            verdicts.append((f"{concept}/{kind}", ok))
    failed = [name for name, ok in verdicts if not ok]
    return {
        "metrics": [0.0 if ok else 1.0 for _, ok in verdicts],
        "threshold": 0.0,
        "detail": f"off-trend: {', '.join(failed)}" if failed else "all series on trend",
    }


def check_ordering(seed: int, n_seeds: int = DESK_REALIZATIONS, workers: int = 1) -> dict:
    """CHE against NE per tier and in total across the same sweep cells."""
    result = _desk_sweep(seed, n_seeds, workers)
    df = result.to_dataframe()
    means = df.groupby(["concept", "kind"])["mean_rate_bps"].mean()

    def ratio(kind: str) -> float:
        return float(means[(CHE, kind)] / means[(NE, kind)])

    small = [ratio(kind) for kind in (FEMTO, PICO)]
    large = [ratio(kind) - 1.0 for kind in (MACRO, CRAN)]
    win = cells_where_che_beats_ne(result)
    passed = (
        min(small) >= CHE_GAIN_SMALL_CELLS
        and max(abs(change) for change in large) <= CHE_LOSS_LARGE_CELLS
        and win >= CHE_TOTAL_WIN_FRACTION
    )
    return {
        "metrics": [0.0 if passed else 1.0],
        "threshold": 0.0,
        "detail": (
            f"CHE/NE femto {small[0]:.3g}x, pico {small[1]:.3g}x, "
            f"macro {large[0]:+.1%}, CRAN {large[1]:+.1%}, total wins {win:.0%}"
        ),
    }


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# RUNNER
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

# Suites drawing random instances take a Generator; the others a base seed
INSTANCE_SUITES: dict[str, Callable[..., dict]] = {
    "waterfill": check_waterfill,
    "cu_grid": check_cu_grid,
    "gradient": check_gradient,
    "concavity": check_concavity,
}
SEEDED_SUITES: dict[str, Callable[..., dict]] = {
    "ne_certificate": check_ne_certificate,
    "che_certificate": check_che_certificate,
    "trend": check_trend,
    "ordering": check_ordering,
}
# ordering reads the same cached sweep as trend
SEED_GROUPS = {"ordering": "trend"}
DEFAULT_SUITES = (*INSTANCE_SUITES, "ne_certificate", "che_certificate")
ALL_SUITES = (*INSTANCE_SUITES, *SEEDED_SUITES)


def run_oracles(
    suites: Optional[Iterable[str]] = None,
    n_seeds: int = DESK_REALIZATIONS,
    seed: int = 0,
    workers: int = 1,
) -> list[OracleCheck]:
    """
    Run oracle suites.

    Args:
        suites: Suite names (default: the six solver and certificate suites)
        n_seeds: Desk-scale seeds for the certificate and sweep suites
        seed: Base seed of every suite
        workers: Worker processes for the certificate and sweep suites

    Returns:
        One OracleCheck per suite, in the requested order

    Raises:
        ValueError: If a suite name is unknown
    """
    names = list(suites) if suites is not None else list(DEFAULT_SUITES)
    unknown = [name for name in names if name not in ALL_SUITES]
    if unknown:
        raise ValueError(f"Unknown oracle suites: {', '.join(unknown)}")

    checks = []
    for name in names:
        start = time.perf_counter()
        suite_seed = derive_seed(seed, ALL_SUITES.index(SEED_GROUPS.get(name, name)))
        if name in INSTANCE_SUITES:
            outcome = INSTANCE_SUITES[name](make_rng(suite_seed))
        else:
            outcome = SEEDED_SUITES[name](suite_seed, n_seeds, workers)

        metrics = np.asarray(outcome["metrics"], dtype=float)
        threshold = outcome["threshold"]
        failures = int(np.sum(metrics > threshold))
        worst = outcome.get("worst", float(metrics.max()) if metrics.size else 0.0)
        check = OracleCheck(
            name=name,
            passed=outcome.get("passed", failures == 0),
            cases=int(metrics.size),
            failures=failures,
            worst=float(worst),
            threshold=threshold,
            seconds=time.perf_counter() - start,
            detail=outcome.get("detail", ""),
        )
        level = logging.INFO if check.passed else logging.WARNING
        logger.log(
            level,
            f"Oracle {name}: {'pass' if check.passed else 'FAIL'} "
            f"(worst {check.worst:.3e}, {check.failures}/{check.cases} over {threshold:g})",
        )
        checks.append(check)
    return checks


__all__ = [
    "run_oracles",
    "simplex_grid",
    "monotone_within_noise",
    "DEFAULT_SUITES",
    "ALL_SUITES",
]
