"""
Shared fixtures: a tiny network with every player kind, and a builder for
hand-placed deployments.
"""

from pathlib import Path

import numpy as np
import pytest

from cran_hetnet_game import (
    ChannelRealization,
    Deployment,
    desk_scenario,
    load_scenario,
    sample_channels,
    sample_deployment,
)
from cran_hetnet_game.equilibrium import game_gains
from cran_hetnet_game.schemas import Transmitter, User

FIXTURES_DIR = Path(__file__).parent / "fixtures"
REPO_DIR = Path(__file__).parent.parent
TINY_SCENARIO_FILE = FIXTURES_DIR / "tiny.scenario"
TINY_SWEEP_FILE = FIXTURES_DIR / "tiny.sweep"


def make_deployment(rrhs=(), cran_users=(), stations=(), p_max=None) -> Deployment:
    """
    Deployment from explicit positions.

    Args:
        rrhs: RRH (x, y) positions
        cran_users: CRAN user (x, y) positions
        stations: (kind, (x, y), [user (x, y), ...]) per HetNet BS
        p_max: Optional budget per transmitter id (default: desk-scale budget of its kind)
    """
    s = desk_scenario()
    transmitters = [
        Transmitter(id=i, kind="RRH", position=xy, p_max_w=s.p_max_rrh_w)
        for i, xy in enumerate(rrhs)
    ]
    users = [User(id=j, position=xy) for j, xy in enumerate(cran_users)]
    for kind, xy, served in stations:
        tx_id = len(transmitters)
        transmitters.append(
            Transmitter(id=tx_id, kind=kind, position=xy, p_max_w=s.p_max_for(kind))
        )
        for user_xy in served:
            users.append(User(id=len(users), owner=tx_id, position=user_xy))
    if p_max is not None:
        transmitters = [t.model_copy(update={"p_max_w": w}) for t, w in zip(transmitters, p_max)]
    return Deployment.from_positions(transmitters, users)


def constant_channels(
    d: Deployment, n_subcarriers: int, value: complex = 1.0
) -> ChannelRealization:
    """Every gain equal to `value`."""
    return ChannelRealization(h=np.full((d.n_transmitters, d.n_users, n_subcarriers), value))


@pytest.fixture
def tiny_scenario():
    """Two RRHs, three CRAN users, one BS of each tier, two subcarriers."""
    return load_scenario(TINY_SCENARIO_FILE)


@pytest.fixture
def tiny_network(tiny_scenario):
    """(scenario, deployment, channels) of the tiny network, seed 3."""
    d = sample_deployment(tiny_scenario, seed=3)
    c = sample_channels(d, tiny_scenario, seed=4)
    return tiny_scenario, d, c


@pytest.fixture
def tiny_gains(tiny_network):
    """Link gains of the tiny network."""
    return game_gains(*tiny_network)


@pytest.fixture
def desk_network():
    """(scenario, deployment, channels) of the desk-scale network, seed 1."""
    s = desk_scenario()
    d = sample_deployment(s, seed=1)
    return s, d, sample_channels(d, s, seed=2)
