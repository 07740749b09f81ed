"""
Tests for sweep specs, Monte Carlo sweeps and the CSV contract.
"""

import numpy as np
import pandas as pd
import pytest

from cran_hetnet_game import (
    dbm_to_watts,
    desk_scenario,
    emit_csv,
    load_sweep_spec,
    read_csv,
    run_sweep,
    sample_channels,
    sample_deployment,
    solve_che,
)
from cran_hetnet_game import experiments
from cran_hetnet_game.constants import CSV_COLUMNS
from cran_hetnet_game.exceptions import (
    EquilibriumError,
    ScenarioError,
    ScenarioFileNotFoundError,
    SweepError,
)
from cran_hetnet_game.experiments import (
    SweepSpecParser,
    cell_seeds,
    cells_where_che_beats_ne,
    parse_values,
    type_counts,
)
from cran_hetnet_game.schemas import SweepResult, SweepRow

from tests.conftest import REPO_DIR, TINY_SWEEP_FILE


@pytest.fixture
def tiny_spec():
    """n_rrh in {1, 2}, two realizations, equal power and CHE."""
    return load_sweep_spec(TINY_SWEEP_FILE)


@pytest.fixture
def tiny_result(tiny_spec):
    return run_sweep(tiny_spec)


class TestSweepSpec:
    """Sweep spec files."""

    @pytest.fixture
    def parser(self):
        return SweepSpecParser()

    def test_tiny_fixture(self, tiny_spec):
        """Keys, aliases and the relative scenario file are resolved."""
        assert tiny_spec.variable == "n_rrh"
        assert tiny_spec.values == [1.0, 2.0]
        assert tiny_spec.n_realizations == 2
        assert tiny_spec.seed == 5
        assert tiny_spec.concepts == ["EqualPower", "CHE"]
        assert tiny_spec.scenario.n_subcarriers == 2

    def test_shipped_power_sweep(self):
        """sweeps/p_max_rrh.sweep sweeps 20..40 dBm in watts."""
        spec = load_sweep_spec(REPO_DIR / "sweeps" / "p_max_rrh.sweep")
        np.testing.assert_allclose(spec.values, dbm_to_watts(np.arange(20.0, 41.0, 5.0)))
        assert spec.concepts == ["NE", "CHE", "EqualPower"]
        assert spec.scenario == desk_scenario()

    def test_shipped_rrh_sweep(self):
        """sweeps/n_rrh.sweep sweeps 2, 4, 6, 8 RRHs."""
        spec = load_sweep_spec(REPO_DIR / "sweeps" / "n_rrh.sweep")
        assert spec.values == [2.0, 4.0, 6.0, 8.0]
        assert [spec.scenario_at(v).n_rrh for v in spec.values] == [2, 4, 6, 8]

    def test_defaults(self, parser):
        """Without scenario_file, seed or concepts: desk profile, seed 0, every concept."""
        spec = parser.parse(b"variable = n_rrh\nvalues = 2\nn_realizations = 3\n")
        assert spec.scenario == desk_scenario()
        assert spec.seed == 0
        assert spec.concepts == ["NE", "CHE", "EqualPower"]

    def test_scenario_overrides(self, parser):
        """scenario.<field> keys override the base scenario."""
        spec = parser.parse(
            b"variable = p_max_rrh\nvalues = 1 w, 2 w\nn_realizations = 1\n"
            b"scenario.n_subcarriers = 3\nscenario.p_max_femto_w = 23 dbm\n"
        )
        assert spec.scenario.n_subcarriers == 3
        assert spec.scenario.p_max_femto_w == pytest.approx(dbm_to_watts(23.0))
        assert spec.scenario_at(2.0).p_max_rrh_w == 2.0

    def test_parse_values(self):
        """Power values take units; RRH counts are plain numbers."""
        assert parse_values("p_max_rrh", "20 dbm, 1 w") == pytest.approx([0.1, 1.0])
        assert parse_values("n_rrh", "2, 4,6") == [2.0, 4.0, 6.0]

    @pytest.mark.parametrize(
        "content",
        [
            b"values = 2\nn_realizations = 1\n",
            b"variable = n_rrh\nn_realizations = 1\n",
            b"variable = n_rrh\nvalues = 2\n",
            b"variable = n_rrh\nvalues = 4, 2\nn_realizations = 1\n",
            b"variable = n_rrh\nvalues = 1.5\nn_realizations = 1\n",
            b"variable = n_rrh\nvalues = 2\nn_realizations = 0\n",
            b"variable = n_users\nvalues = 2\nn_realizations = 1\n",
            b"variable = n_rrh\nvalues = 2\nn_realizations = 1\nconcepts = ne, pareto\n",
            b"variable = n_rrh\nvalues = 2\nn_realizations = 1\nconcepts = ne, ne\n",
            b"variable = n_rrh\nvalues = 2\nn_realizations = 1\nscenario.n_rhh = 3\n",
            b"variable = n_rrh\nvalues = 2\nn_realizations = 1\nworkers = 3\n",
        ],
    )
    def test_invalid_specs(self, parser, content):
        """Missing keys, bad values and unknown keys are ScenarioErrors."""
        with pytest.raises(ScenarioError):
            parser.parse(content)

    def test_missing_scenario_file(self, tmp_path):
        """A scenario_file that doesn't exist is reported as such."""
        spec_file = tmp_path / "broken.sweep"
        spec_file.write_text(
            "variable = n_rrh\nvalues = 2\nn_realizations = 1\nscenario_file = gone.scenario\n"
        )
        with pytest.raises(ScenarioFileNotFoundError):
            load_sweep_spec(spec_file)


class TestRunSweep:
    """Monte Carlo sweep execution."""

    def test_rows(self, tiny_spec, tiny_result):
        """One row per (value, concept, kind), each over every realization."""
        rows = tiny_result.rows
        assert len(rows) == len(tiny_spec.values) * len(tiny_spec.concepts) * 5
        assert all(row.n == tiny_spec.n_realizations for row in rows)
        assert {row.kind for row in rows} == {"CRAN", "Macro", "Pico", "Femto", "Total"}
        assert tiny_result.failures == {}

    def test_rows_sorted(self, tiny_result):
        """Rows come out sorted by (value, concept, kind)."""
        keys = [(row.value, row.concept, row.kind) for row in tiny_result.rows]
        assert keys == sorted(keys)

    def test_type_counts(self, tiny_result):
        """One player of every kind in the tiny network."""
        assert tiny_result.type_counts == {"CRAN": 1, "Macro": 1, "Pico": 1, "Femto": 1}
        assert type_counts(desk_scenario()) == {"CRAN": 1, "Macro": 1, "Pico": 2, "Femto": 2}

    def test_total_is_sum_of_kinds(self, tiny_result):
        """Each Total sample equals the sum of that cell's per-kind samples."""
        samples = tiny_result.samples
        kinds = samples[samples["kind"] != "Total"]
        totals = samples[samples["kind"] == "Total"].set_index(["value", "realization", "concept"])
        summed = kinds.groupby(["value", "realization", "concept"])["rate_bps"].sum()
        pd.testing.assert_series_equal(
            summed.sort_index(), totals["rate_bps"].sort_index(), check_names=False, rtol=1e-12
        )

    def test_aggregates_match_samples(self, tiny_result):
        """Row means and stds are those of the samples."""
        samples = tiny_result.samples
        for row in tiny_result.rows:
            cell = samples[
                (samples["value"] == row.value)
                & (samples["concept"] == row.concept)
                & (samples["kind"] == row.kind)
            ]["rate_bps"]
            assert row.mean_rate_bps == pytest.approx(cell.mean(), rel=1e-12)
            assert row.std_rate_bps == pytest.approx(cell.std(ddof=1), rel=1e-12)

    def test_single_cell_matches_direct_solve(self, tiny_spec):
        """A one-value, one-realization sweep reproduces a direct solve."""
        spec = tiny_spec.model_copy(update={"values": [2.0], "n_realizations": 1})
        result = run_sweep(spec)

        scenario = spec.scenario_at(2.0)
        deployment_seed, channel_seed = cell_seeds(spec.seed, 0, 0)
        d = sample_deployment(scenario, deployment_seed)
        direct = solve_che(scenario, d, sample_channels(d, scenario, channel_seed))

        row = next(r for r in result.rows if r.concept == "CHE" and r.kind == "Total")
        assert row.mean_rate_bps == direct.total_rate
        assert row.std_rate_bps == 0.0

    def test_deterministic(self, tiny_spec, tiny_result):
        """Same spec and seed, same rows."""
        assert run_sweep(tiny_spec).rows == tiny_result.rows

    def test_workers_do_not_change_numbers(self, tiny_spec, tiny_result):
        """A process pool gives the same rows as the in-process run."""
        assert run_sweep(tiny_spec, workers=2).rows == tiny_result.rows

    def test_failed_cell_dropped_for_every_concept(self, tiny_spec, monkeypatch):
        """A failed solve is counted and its cell leaves every concept's average."""
        real_make_solver = experiments.make_solver

        def flaky_make_solver(concept, *args, **kwargs):
            solver = real_make_solver(concept, *args, **kwargs)
            if solver.CONCEPT == "CHE":
                solve = solver.solve

                def fail_on_one_rrh(s, d, c):
                    if s.n_rrh == 1:
                        raise EquilibriumError("stuck", player="CU")
                    return solve(s, d, c)

                solver.solve = fail_on_one_rrh
            return solver

        monkeypatch.setattr(experiments, "make_solver", flaky_make_solver)
        result = run_sweep(tiny_spec)
        assert result.failures == {"1.0/CHE": 2}
        assert {row.value for row in result.rows} == {2.0}
        assert {row.concept for row in result.rows} == {"EqualPower", "CHE"}
        assert all(row.n == tiny_spec.n_realizations for row in result.rows)
        assert set(result.samples["value"]) == {2.0}


class TestCsv:
    """CSV output contract."""

    def test_header_and_rows(self, tiny_result, tmp_path):
        """Fixed header, one line per row, LF line endings."""
        path = tmp_path / "out.csv"
        emit_csv(tiny_result, path)
        content = path.read_bytes().decode("utf-8")
        lines = content.split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[-1] == ""
        assert len(lines) == len(tiny_result.rows) + 2
        assert "\r" not in content

    def test_round_trip(self, tiny_result, tmp_path):
        """Reading the CSV gives back the exact rows."""
        path = tmp_path / "out.csv"
        emit_csv(tiny_result, path)
        assert read_csv(path).rows == tiny_result.rows

    def test_byte_identical_reruns(self, tiny_spec, tmp_path):
        """Two runs of one spec write identical bytes."""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(run_sweep(tiny_spec), first)
        emit_csv(run_sweep(tiny_spec), second)
        assert first.read_bytes() == second.read_bytes()

    def test_empty_result(self, tmp_path):
        """No rows: just the header."""
        path = tmp_path / "empty.csv"
        emit_csv(SweepResult(), path)
        assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
        assert read_csv(path).rows == []

    def test_single_row(self, tmp_path):
        """Floats are written as shortest round-trip decimals."""
        row = SweepRow(
            variable="n_rrh",
            value=2.0,
            concept="NE",
            kind="Total",
            mean_rate_bps=1.5e8,
            std_rate_bps=0.0,
            n=1,
        )
        path = tmp_path / "one.csv"
        emit_csv(SweepResult(rows=[row]), path)
        assert path.read_text().splitlines()[1] == "n_rrh,2.0,NE,Total,150000000.0,0.0,1"

    def test_unwritable_path(self, tiny_result, tmp_path):
        """A missing output directory is a SweepError."""
        with pytest.raises(SweepError):
            emit_csv(tiny_result, tmp_path / "missing" / "out.csv")

    def test_totals_rebuilt_with_counts(self, tiny_result, tmp_path):
        """Total rows equal the per-kind means weighted by the player counts."""
        path = tmp_path / "out.csv"
        emit_csv(tiny_result, path)
        result = read_csv(path, type_counts=tiny_result.type_counts)
        df = result.to_dataframe()
        totals = df[df["kind"] == "Total"].set_index(["value", "concept"])["mean_rate_bps"]
        pd.testing.assert_series_equal(
            result.kind_totals().sort_index(),
            totals.sort_index(),
            check_names=False,
            rtol=1e-9,
        )

    def test_kind_totals_weight_by_count(self):
        """Two pico players count twice."""
        rows = [
            SweepRow(
                variable="n_rrh",
                value=2.0,
                concept="NE",
                kind=kind,
                mean_rate_bps=rate,
                std_rate_bps=0.0,
                n=1,
            )
            for kind, rate in [("CRAN", 3.0), ("Pico", 2.0), ("Total", 7.0)]
        ]
        result = SweepResult(rows=rows, type_counts={"CRAN": 1, "Pico": 2})
        assert result.kind_totals()[(2.0, "NE")] == pytest.approx(7.0)

    def test_kind_totals_need_counts(self, tiny_result, tmp_path):
        """Without counts a CSV read-back cannot rebuild totals."""
        path = tmp_path / "out.csv"
        emit_csv(tiny_result, path)
        with pytest.raises(ValueError, match="type_counts"):
            read_csv(path).kind_totals()

    def test_read_missing_file(self, tmp_path):
        """Reading a missing file raises ScenarioFileNotFoundError."""
        with pytest.raises(ScenarioFileNotFoundError):
            read_csv(tmp_path / "nope.csv")

    def test_read_wrong_columns(self, tmp_path):
        """Unexpected columns are a SweepError."""
        path = tmp_path / "bad.csv"
        path.write_text("variable,value,concept\nn_rrh,2.0,NE\n")
        with pytest.raises(SweepError):
            read_csv(path)

    def test_read_invalid_row(self, tmp_path):
        """Rows with unknown concepts are a SweepError."""
        path = tmp_path / "bad.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\nn_rrh,2.0,Pareto,Total,1.0,0.0,1\n")
        with pytest.raises(SweepError):
            read_csv(path)


class TestCheAgainstNe:
    """Fraction of cells where CHE beats NE."""

    @staticmethod
    def result_with(records):
        result = SweepResult()
        result.set_samples(
            pd.DataFrame(records, columns=["value", "realization", "concept", "kind", "rate_bps"])
        )
        return result

    def test_fraction(self):
        """CHE >= NE in one of two cells gives 0.5."""
        result = self.result_with(
            [
                (2.0, 0, "NE", "Total", 10.0),
                (2.0, 0, "CHE", "Total", 12.0),
                (2.0, 1, "NE", "Total", 10.0),
                (2.0, 1, "CHE", "Total", 9.0),
                (2.0, 1, "CHE", "CRAN", 100.0),
            ]
        )
        assert cells_where_che_beats_ne(result) == 0.5

    def test_needs_both_concepts(self, tiny_result):
        """Without NE samples there is nothing to compare."""
        with pytest.raises(SweepError):
            cells_where_che_beats_ne(tiny_result)

    def test_needs_samples(self):
        """Results read back from CSV carry no samples."""
        with pytest.raises(ValueError):
            cells_where_che_beats_ne(SweepResult())


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
