"""
Tests for scenario files, unit conversions and node placement.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from cran_hetnet_game import (
    Deployment,
    ScenarioParser,
    dbm_to_watts,
    desk_scenario,
    load_scenario,
    full_scenario,
    sample_deployment,
    watts_to_dbm,
)
from cran_hetnet_game.constants import CH_DEFAULT_TAU, CH_TOP_LEVEL, D_MIN_M
from cran_hetnet_game.exceptions import (
    ScenarioError,
    ScenarioFileNotFoundError,
    ScenarioParseError,
)
from cran_hetnet_game.scenario import derive_seed, make_rng, parse_power
from cran_hetnet_game.schemas import Transmitter, User

from tests.conftest import REPO_DIR, TINY_SCENARIO_FILE


class TestUnits:
    """dBm <-> watt conversions and power parsing."""

    def test_reference_points(self):
        """30 dBm is 1 W and 0 dBm is 1 mW."""
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-15)
        assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-15)

    def test_noise_floor(self):
        """-90.8 dBm is 10^-12.08 W."""
        assert dbm_to_watts(-90.8) == pytest.approx(10 ** (-12.08), rel=1e-12)

    def test_array_input(self):
        """Arrays convert elementwise."""
        np.testing.assert_allclose(dbm_to_watts(np.array([20.0, 30.0])), [0.1, 1.0], rtol=1e-14)

    @given(st.floats(min_value=-150.0, max_value=100.0))
    def test_round_trip(self, x):
        """watts_to_dbm inverts dbm_to_watts to 1e-12 absolute."""
        assert abs(watts_to_dbm(dbm_to_watts(x)) - x) <= 1e-12

    @pytest.mark.parametrize(
        "raw, expected",
        [
            ("30 dbm", 1.0),
            ("30dBm", 1.0),
            ("2 W", 2.0),
            ("0.5", 0.5),
            ("1e-3 w", 1e-3),
        ],
    )
    def test_parse_power(self, raw, expected):
        """Powers accept dbm / w suffixes; bare numbers are watts."""
        assert parse_power(raw) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("raw", ["abc", "30 dbw", "", "1.2.3 w"])
    def test_parse_power_rejects_garbage(self, raw):
        """Anything else is a ScenarioError."""
        with pytest.raises(ScenarioError):
            parse_power(raw)


class TestScenarioFiles:
    """Key-value scenario files."""

    @pytest.fixture
    def parser(self):
        return ScenarioParser()

    def test_partial_file_takes_desk_defaults(self, parser):
        """Keys left out take the desk-scale value."""
        s = parser.parse(b"n_rrh = 8\np_max_rrh_w = 33 dbm\n")
        assert s.n_rrh == 8
        assert s.p_max_rrh_w == pytest.approx(dbm_to_watts(33.0))
        assert s.n_cran_users == desk_scenario().n_cran_users

    def test_comments_and_blank_lines(self, parser):
        """`#` starts a comment anywhere on a line."""
        s = parser.parse(b"# header\n\nn_subcarriers = 6  # six\n")
        assert s.n_subcarriers == 6

    def test_shipped_desk_file_matches_profile(self):
        """scenarios/desk.scenario is the desk-scale profile."""
        assert load_scenario(REPO_DIR / "scenarios" / "desk.scenario") == desk_scenario()

    def test_shipped_full_file_matches_profile(self):
        """scenarios/full.scenario is the full-size profile."""
        assert load_scenario(REPO_DIR / "scenarios" / "full.scenario") == full_scenario()

    def test_tiny_fixture(self):
        """The tiny fixture has one BS of each tier."""
        s = load_scenario(TINY_SCENARIO_FILE)
        assert (s.n_macro, s.n_pico, s.n_femto) == (1, 1, 1)
        assert s.n_users == 3 + 2 + 2 + 1

    def test_unknown_key(self, parser):
        """Keys that are not Scenario fields are rejected."""
        with pytest.raises(ScenarioError, match="n_rhh"):
            parser.parse(b"n_rhh = 4\n")

    def test_invalid_value(self, parser):
        """Non-numeric values are a ScenarioError."""
        with pytest.raises(ScenarioError):
            parser.parse(b"n_rrh = four\n")

    def test_out_of_range_value(self, parser):
        """Model constraints surface as ScenarioError."""
        with pytest.raises(ScenarioError):
            parser.parse(b"n_subcarriers = 0\n")

    def test_ch_top_level_below_cran_level(self, parser):
        """The hierarchy must reach the CU's level."""
        with pytest.raises(ScenarioError):
            parser.parse(b"ch_top_level = 3\n")

    @pytest.mark.parametrize(
        "content",
        [b"n_rrh 4\n", b"n_rrh =\n", b"n_rrh = 4\nn_rrh = 5\n", b"= 4\n", b"\xff\xfe = 1\n"],
    )
    def test_malformed_lines(self, parser, content):
        """Malformed lines, duplicates and bad encodings are parse errors."""
        with pytest.raises(ScenarioParseError):
            parser.parse(content)

    def test_missing_file(self, tmp_path):
        """A missing file raises ScenarioFileNotFoundError."""
        with pytest.raises(ScenarioFileNotFoundError):
            load_scenario(tmp_path / "nope.scenario")


class TestScenarioModel:
    """Derived quantities and overrides."""

    def test_derived_counts(self):
        """Transmitter and user counts of the desk profile."""
        s = desk_scenario()
        assert s.n_bs == 5
        assert s.n_transmitters == 9
        assert s.n_users == 8 + 6 + 2 * 4 + 2 * 2
        assert s.w_over_l == pytest.approx(25e6)

    def test_hierarchy_defaults(self):
        """Both profiles use the default Poisson rate and top level."""
        for s in (desk_scenario(), full_scenario()):
            assert s.ch_tau == CH_DEFAULT_TAU
            assert s.ch_top_level == CH_TOP_LEVEL

    def test_with_overrides_copies(self):
        """Overrides return a new scenario and leave the original alone."""
        s = desk_scenario()
        t = s.with_overrides(n_rrh=6)
        assert t.n_rrh == 6
        assert s.n_rrh == 4

    def test_with_overrides_validates(self):
        """Invalid overrides are rejected."""
        with pytest.raises(ValidationError):
            desk_scenario().with_overrides(p_max_rrh_w=-1.0)


class TestSeeds:
    """Seed derivation."""

    def test_derive_seed_is_pure(self):
        """Same arguments, same seed."""
        assert derive_seed(7, 1, 2, 0) == derive_seed(7, 1, 2, 0)

    def test_derive_seed_separates_cells(self):
        """Different indices give different seeds."""
        seeds = {derive_seed(7, v, r, s) for v in range(3) for r in range(3) for s in range(2)}
        assert len(seeds) == 18

    def test_make_rng_is_deterministic(self):
        """A seeded generator replays its stream."""
        assert np.array_equal(make_rng(11).random(5), make_rng(11).random(5))


class TestSampleDeployment:
    """Node placement."""

    @pytest.fixture
    def scenario(self):
        return desk_scenario()

    def test_reproducible(self, scenario):
        """Identical (scenario, seed) gives an identical deployment."""
        a = sample_deployment(scenario, seed=7)
        b = sample_deployment(scenario, seed=7)
        assert np.array_equal(a.distance, b.distance)
        assert a.transmitters == b.transmitters
        assert a.users == b.users

    def test_seed_changes_positions(self, scenario):
        """Different seeds give different deployments."""
        a = sample_deployment(scenario, seed=7)
        b = sample_deployment(scenario, seed=8)
        assert not np.array_equal(a.distance, b.distance)

    def test_layout(self, scenario):
        """RRHs first, then macro, pico and femto BSs; CRAN users first."""
        d = sample_deployment(scenario, seed=1)
        kinds = [t.kind for t in d.transmitters]
        assert kinds == ["RRH"] * 4 + ["Macro"] + ["Pico"] * 2 + ["Femto"] * 2
        assert list(d.cran_user_ids) == list(range(8))
        assert [len(d.users_of(i)) for i in d.bs_ids] == [6, 4, 4, 2, 2]
        assert d.players() == ["CU", "4", "5", "6", "7", "8"]

    def test_budgets(self, scenario):
        """Every transmitter carries the budget of its kind."""
        d = sample_deployment(scenario, seed=1)
        for t in d.transmitters:
            assert t.p_max_w == scenario.p_max_for(t.kind)

    def test_users_inside_coverage(self, scenario):
        """HetNet users lie within the coverage radius of their BS."""
        d = sample_deployment(scenario, seed=5)
        for user in d.users:
            if user.owner is not None:
                radius = scenario.radius_for(d.kind_of(user.owner))
                assert d.distance[user.owner, user.id] <= radius + 1e-9

    def test_macro_users_within_1000m(self):
        """25 macro users all lie within 1000 m of the macro BS."""
        s = desk_scenario(n_macro=1, users_per_macro=25, radius_macro_m=1000.0)
        d = sample_deployment(s, seed=3)
        macro = int(d.bs_ids[0])
        assert np.all(d.distance[macro, d.users_of(macro)] <= 1000.0 + 1e-9)

    def test_distances_clamped(self, scenario):
        """No distance is below D_MIN_M."""
        d = sample_deployment(scenario, seed=9)
        assert d.distance.min() >= D_MIN_M

    def test_distances_match_positions(self, scenario):
        """Distances are the Euclidean distances of the stored positions."""
        d = sample_deployment(scenario, seed=2)
        for t in d.transmitters[:3]:
            for u in d.users[:5]:
                expected = max(np.hypot(*np.subtract(t.position, u.position)), D_MIN_M)
                assert d.distance[t.id, u.id] == pytest.approx(expected, rel=1e-12)

    def test_cran_users_uniform_on_square(self):
        """Mean distance of CRAN users from the grid center matches a uniform square."""
        s = desk_scenario()
        side = s.grid_side_m
        center = np.array([side / 2, side / 2])
        radii = []
        for seed in range(1000):
            d = sample_deployment(s, seed=seed)
            xy = np.array([u.position for u in d.users if u.owner is None])
            radii.extend(np.hypot(*(xy - center).T))
        expected = side * (np.sqrt(2.0) + np.log(1.0 + np.sqrt(2.0))) / 6.0
        assert np.mean(radii) == pytest.approx(expected, rel=0.02)

    def test_negative_seed(self, scenario):
        """Seeds must be non-negative."""
        with pytest.raises(ScenarioError):
            sample_deployment(scenario, seed=-1)


class TestDeploymentModel:
    """Deployment invariants."""

    def test_rrh_without_cran_users(self):
        """RRHs without CRAN users are rejected."""
        with pytest.raises(ValidationError):
            Deployment.from_positions(
                [Transmitter(id=0, kind="RRH", position=(0.0, 0.0), p_max_w=1.0)], []
            )

    def test_user_owned_by_rrh(self):
        """HetNet users cannot be owned by an RRH."""
        with pytest.raises(ValidationError):
            Deployment.from_positions(
                [Transmitter(id=0, kind="RRH", position=(0.0, 0.0), p_max_w=1.0)],
                [User(id=0, position=(1.0, 1.0)), User(id=1, owner=0, position=(2.0, 2.0))],
            )

    def test_to_dataframe(self):
        """One row per node."""
        d = sample_deployment(desk_scenario(), seed=1)
        df = d.to_dataframe()
        assert len(df) == d.n_transmitters + d.n_users
        assert set(df["node"]) == {"transmitter", "user"}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
