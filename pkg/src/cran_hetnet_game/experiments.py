"""
Monte Carlo sweeps over the RRH count or the RRH max power, with CSV output.

Sweep spec files use the scenario file format:

    variable = n_rrh
    values = 2, 4, 6, 8
    n_realizations = 50
    seed = 1
    concepts = ne, che, equal
    scenario_file = ../scenarios/desk.scenario
    scenario.n_subcarriers = 4

Every (value, realization) cell draws its deployment and channels from seeds
derived from (seed, value index, realization index), so cells can run in any
order or in parallel without changing a number.
"""

import logging
import multiprocessing as mp
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .base import KeyValueParser
from .channel import sample_channels
from .constants import BS_KINDS, CONCEPTS, CRAN, CSV_COLUMNS, ENCODING, TOTAL
from .equilibrium import make_solver, normalize_concept
from .exceptions import (
    GameError,
    ScenarioError,
    ScenarioFileNotFoundError,
    SweepError,
)
from .scenario import (
    derive_seed,
    desk_scenario,
    load_scenario,
    parse_power,
    parse_scenario_fields,
    sample_deployment,
)
from .schemas import Scenario, SolverOptions, SweepResult, SweepRow, SweepSpec

logger = logging.getLogger(__name__)

SWEEP_KEYS = ("variable", "values", "n_realizations", "seed", "concepts", "scenario_file")
SCENARIO_PREFIX = "scenario."

# Stream indices passed to derive_seed after (value index, realization index)
DEPLOYMENT_STREAM = 0
CHANNEL_STREAM = 1


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SPEC FILES
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


class SweepSpecParser(KeyValueParser):
    """
    Parser for sweep spec files.

    `scenario_file` is resolved relative to the spec file; without it the base
    scenario is the desk-scale profile. `scenario.<field>` keys override single
    scenario fields.
    """

    def is_allowed_key(self, key: str) -> bool:
        if key.startswith(SCENARIO_PREFIX):
            return key[len(SCENARIO_PREFIX) :] in Scenario.model_fields
        return key in SWEEP_KEYS

    def _build(self, pairs: dict[str, str]) -> SweepSpec:
        for required in ("variable", "values", "n_realizations"):
            if required not in pairs:
                raise ScenarioError(f"Sweep spec is missing '{required}'")

        scenario = self._base_scenario(pairs.get("scenario_file"))
        overrides = parse_scenario_fields(
            {
                key[len(SCENARIO_PREFIX) :]: value
                for key, value in pairs.items()
                if key.startswith(SCENARIO_PREFIX)
            }
        )
        if overrides:
            scenario = scenario.with_overrides(**overrides)

        variable = pairs["variable"]
        concepts = pairs.get("concepts")
        try:
            spec = SweepSpec(
                variable=variable,
                values=parse_values(variable, pairs["values"]),
                n_realizations=int(pairs["n_realizations"]),
                seed=int(pairs.get("seed", 0)),
                concepts=parse_concepts(concepts) if concepts else list(CONCEPTS),
                scenario=scenario,
            )
        except ValidationError:
            raise
        except ValueError as e:
            raise ScenarioError(f"Invalid sweep spec: {e}")
        logger.info(
            f"Sweep spec: {spec.variable} over {len(spec.values)} values, "
            f"{spec.n_realizations} realizations, concepts {spec.concepts}"
        )
        return spec

    def _base_scenario(self, scenario_file: Optional[str]) -> Scenario:
        if scenario_file is None:
            return desk_scenario()
        path = Path(scenario_file)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return load_scenario(path)


def parse_values(variable: str, raw: str) -> list[float]:
    """Comma-separated sweep values; RRH powers may carry dbm / w suffixes."""
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if variable == "p_max_rrh":
        return [parse_power(item) for item in items]
    return [float(item) for item in items]


def parse_concepts(raw: str) -> list[str]:
    """Comma-separated concept names or aliases (ne, che, equal)."""
    return [normalize_concept(item) for item in raw.split(",") if item.strip()]


def load_sweep_spec(file_path: Union[str, Path]) -> SweepSpec:
    """
    Load a sweep spec file.

    Raises:
        ScenarioFileNotFoundError: If the spec or its scenario file doesn't exist
        ScenarioError: If a key or value is invalid
    """
    return SweepSpecParser().parse_file(file_path)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# SWEEP
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def cell_seeds(base: int, value_index: int, realization: int) -> tuple[int, int]:
    """(deployment seed, channel seed) of one sweep cell."""
    return (
        derive_seed(base, value_index, realization, DEPLOYMENT_STREAM),
        derive_seed(base, value_index, realization, CHANNEL_STREAM),
    )


def type_counts(s: Scenario) -> dict[str, int]:
    """Players of each rate kind; kinds without players are left out."""
    counts = {CRAN: 1 if s.n_rrh else 0}
    counts.update({kind: s.count(kind) for kind in BS_KINDS})
    return {kind: n for kind, n in counts.items() if n}


def _run_cell(
    spec: SweepSpec,
    value_index: int,
    realization: int,
    opts: Optional[SolverOptions],
    tau: Optional[float],
    dynamics: dict,
) -> tuple[list[dict], list[str]]:
    """
    Solve every requested concept on one (value, realization) cell.

    If any concept fails the whole cell is dropped, so every concept averages
    over the same cells.
    """
    value = spec.values[value_index]
    scenario = spec.scenario_at(value)
    deployment_seed, channel_seed = cell_seeds(spec.seed, value_index, realization)
    deployment = sample_deployment(scenario, deployment_seed)
    channels = sample_channels(deployment, scenario, channel_seed)

    samples, failures = [], []
    for concept in spec.concepts:
        try:
            solver = make_solver(concept, opts, tau=tau, **dynamics)
            result = solver.solve(scenario, deployment, channels)
        except GameError as e:
            logger.warning(
                f"{concept} failed at {spec.variable}={value}, realization {realization}: {e}"
            )
            failures.append(f"{value!r}/{concept}")
            continue

        rates = dict(result.per_type_rates)
        rates[TOTAL] = result.total_rate
        for kind, rate in rates.items():
            samples.append(
                {
                    "value": value,
                    "realization": realization,
                    "concept": concept,
                    "kind": kind,
                    "rate_bps": rate,
                    "converged": result.converged,
                }
            )

    if failures:
        logger.warning(
            f"Dropping {spec.variable}={value}, realization {realization} from every concept"
        )
        return [], failures
    return samples, failures


def run_sweep(
    spec: SweepSpec,
    opts: Optional[SolverOptions] = None,
    tau: Optional[float] = None,
    workers: int = 1,
    **dynamics,
) -> SweepResult:
    """
    Run a Monte Carlo sweep.

    For each value and realization a deployment and a channel realization are
    sampled and every requested concept is solved. A failed solve is counted
    in `failures` under "value/concept" and its cell is left out of every
    concept's average.

    Args:
        spec: Sweep specification
        opts: Inner solver options
        tau: CH Poisson rate override
        workers: Worker processes (1 runs in-process)
        **dynamics: NE damping, tol_outer, max_sweeps overrides

    Returns:
        SweepResult with aggregate rows and per-realization samples
    """
    jobs = [
        (spec, value_index, realization, opts, tau, dynamics)
        for value_index in range(len(spec.values))
        for realization in range(spec.n_realizations)
    ]
    logger.info(f"Running {len(jobs)} sweep cells with {workers} worker(s)")

    if workers > 1:
        with mp.Pool(workers) as pool:
            outputs = pool.starmap(_run_cell, jobs)
    else:
        outputs = [_run_cell(*job) for job in jobs]

    records, failures = [], {}
    for samples, failed in outputs:
        records.extend(samples)
        for key in failed:
            failures[key] = failures.get(key, 0) + 1

    samples_df = pd.DataFrame(
        records, columns=["value", "realization", "concept", "kind", "rate_bps", "converged"]
    )
    result = SweepResult(
        rows=aggregate(spec.variable, samples_df),
        failures=failures,
        type_counts=type_counts(spec.scenario_at(spec.values[0])),
    )
    result.set_samples(samples_df)
    if failures:
        logger.warning(f"Skipped realizations: {failures}")
    return result


def aggregate(variable: str, samples: pd.DataFrame) -> list[SweepRow]:
    """
    Mean, sample std and count per (value, concept, kind).

    Rows are sorted by (value, concept, kind); the std of a single sample is 0.
    """
    if samples.empty:
        return []
    grouped = (
        samples.groupby(["value", "concept", "kind"], sort=True)["rate_bps"]
        .agg(mean_rate_bps="mean", std_rate_bps="std", n="count")
        .reset_index()
    )
    grouped["std_rate_bps"] = grouped["std_rate_bps"].fillna(0.0)
    return [
        SweepRow(
            variable=variable,
            value=float(row.value),
            concept=row.concept,
            kind=row.kind,
            mean_rate_bps=float(row.mean_rate_bps),
            std_rate_bps=float(row.std_rate_bps),
            n=int(row.n),
        )
        for row in grouped.itertuples(index=False)
    ]


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
# CSV
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━


def _shortest(x: float) -> str:
    return repr(float(x))


def emit_csv(result: SweepResult, file_path: Union[str, Path]) -> None:
    """
    Write aggregate rows as CSV.

    Header `variable,value,concept,kind,mean_rate_bps,std_rate_bps,n`, rows
    sorted by (value, concept, kind), floats as shortest round-trip decimals.

    Per-kind rows average over the players of that kind while `Total` rows sum
    every player, so Total equals the per-kind means weighted by the player
    counts. The counts are not written; keep `result.type_counts` next to the
    file to check that relation after `read_csv`.

    Raises:
        SweepError: If the file cannot be written
    """
    df = result.to_dataframe().sort_values(["value", "concept", "kind"], kind="mergesort")
    for column in ("value", "mean_rate_bps", "std_rate_bps"):
        df[column] = df[column].map(_shortest)
    try:
        df.to_csv(file_path, index=False, encoding=ENCODING, lineterminator="\n")
    except OSError as e:
        raise SweepError(f"Failed to write {file_path}: {e}")
    logger.info(f"Wrote {len(df)} rows to {file_path}")


def read_csv(
    file_path: Union[str, Path], type_counts: Optional[dict[str, int]] = None
) -> SweepResult:
    """
    Read rows written by emit_csv.

    The CSV carries no player counts; pass `type_counts` (from the sweep result
    or `type_counts(scenario)`) to rebuild totals with `SweepResult.kind_totals`.

    Raises:
        ScenarioFileNotFoundError: If the file doesn't exist
        SweepError: If the columns or values are invalid
    """
    path = Path(file_path)
    if not path.is_file():
        raise ScenarioFileNotFoundError(f"File not found: {file_path}")
    try:
        df = pd.read_csv(
            path,
            dtype={"variable": str, "concept": str, "kind": str, "n": int},
            encoding=ENCODING,
            engine="c",
            float_precision="round_trip",
        )
    except (pd.errors.ParserError, ValueError) as e:
        raise SweepError(f"Failed to read {file_path}: {e}")

    if list(df.columns) != CSV_COLUMNS:
        raise SweepError(f"{file_path}: expected columns {CSV_COLUMNS}, got {list(df.columns)}")
    try:
        rows = [SweepRow(**record) for record in df.to_dict(orient="records")]
    except ValueError as e:
        raise SweepError(f"{file_path}: invalid row: {e}")
    return SweepResult(rows=rows, type_counts=type_counts or {})


def cells_where_che_beats_ne(result: SweepResult) -> float:
    """
    Fraction of (value, realization) cells where the CHE total rate is at least the NE total.

    Needs per-realization samples with both concepts.
    """
    totals = result.samples[result.samples["kind"] == TOTAL]
    wide = totals.pivot_table(
        index=["value", "realization"], columns="concept", values="rate_bps"
    ).dropna()
    if wide.empty or "CHE" not in wide or "NE" not in wide:
        raise SweepError("CHE and NE totals are both needed")
    return float(np.mean(wide["CHE"] >= wide["NE"]))


__all__ = [
    "SweepSpecParser",
    "load_sweep_spec",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "cell_seeds",
    "cells_where_che_beats_ne",
]
