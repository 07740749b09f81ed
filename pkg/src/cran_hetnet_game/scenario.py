"""
Network configuration, node placement and unit conversions.

Scenario files are flat `key = value` text; keys are exactly the Scenario field
names and power values may carry a `dbm` or `w` suffix. Placement is a pure
function of (Scenario, seed).
"""

import logging
import re
from pathlib import Path
from typing import Union

import numpy as np

from .base import KeyValueParser
from .constants import (
    BS_KINDS,
    DBM_OFFSET,
    DESK_SCALE,
    FULL_SCALE,
    POWER_SUFFIXES,
    RRH,
)
from .exceptions import ScenarioError
from .schemas import Deployment, Scenario, Transmitter, User

logger = logging.getLogger(__name__)

_POWER_RE = re.compile(
    rf"^\s*([-+0-9.eE]+)\s*({'|'.join(POWER_SUFFIXES)})?\s*$", re.IGNORECASE
)


def dbm_to_watts(x_dbm):
    """
    Convert dBm to watts: 10 ** ((x - 30) / 10).

    Args:
        x_dbm: Power in dBm (scalar or array)

    Returns:
        Power in watts
    """
    return np.power(10.0, (np.asarray(x_dbm, dtype=float) - DBM_OFFSET) / 10.0)[()]


def watts_to_dbm(x_w):
    """Convert watts to dBm (inverse of dbm_to_watts)."""
    return (10.0 * np.log10(np.asarray(x_w, dtype=float)) + DBM_OFFSET)[()]


def parse_power(raw: str) -> float:
    """
    Parse a power value such as '30 dbm', '1e-3 W' or '0.5'.

    Bare numbers are watts.

    Raises:
        ScenarioError: If the value is not a number with an optional dbm/w suffix
    """
    match = _POWER_RE.match(raw)
    if match is None:
        raise ScenarioError(f"Invalid power value: {raw!r}")
    try:
        number = float(match.group(1))
    except ValueError:
        raise ScenarioError(f"Invalid power value: {raw!r}")
    unit = (match.group(2) or "w").lower()
    return float(dbm_to_watts(number)) if unit == "dbm" else number


def _profile_to_fields(profile: dict) -> dict:
    """Turn a dBm profile from constants.defaults into Scenario fields."""
    fields = {}
    for key, value in profile.items():
        if key.endswith("_dbm"):
            fields[key[: -len("_dbm")] + "_w"] = float(dbm_to_watts(value))
        else:
            fields[key] = value
    return fields


def desk_scenario(**overrides) -> Scenario:
    """
    Desk-scale profile: 4 RRHs, 8 CRAN users, 1 macro, 2 pico, 2 femto BSs, L = 4.

    Args:
        **overrides: Scenario fields to replace (watts for powers)
    """
    return Scenario(**{**_profile_to_fields(DESK_SCALE), **overrides})


def full_scenario(**overrides) -> Scenario:
    """Full-size profile: 40 RRHs, 70 CRAN users, 5 BSs of each kind, L = 8."""
    return Scenario(**{**_profile_to_fields(FULL_SCALE), **overrides})


class ScenarioParser(KeyValueParser):
    """
    Parser for scenario files.

    Keys are Scenario field names. Keys left out take the desk-scale value.

    Example:
        >>> parser = ScenarioParser()
        >>> scenario = parser.parse(b"n_rrh = 8\\np_max_rrh_w = 33 dbm\\n")
        >>> scenario.n_rrh
        8
    """

    def is_allowed_key(self, key: str) -> bool:
        return key in Scenario.model_fields

    def _build(self, pairs: dict[str, str]) -> Scenario:
        fields = _profile_to_fields(DESK_SCALE)
        fields.update(parse_scenario_fields(pairs))
        scenario = Scenario(**fields)
        logger.info(
            f"Scenario: {scenario.n_rrh} RRHs, {scenario.n_bs} BSs, "
            f"{scenario.n_users} users, L={scenario.n_subcarriers}"
        )
        return scenario


def parse_scenario_fields(pairs: dict[str, str]) -> dict:
    """
    Convert raw scenario strings to typed field values.

    Args:
        pairs: Field name -> raw string

    Returns:
        Field name -> int / float (powers in watts)

    Raises:
        ScenarioError: If a key is not a Scenario field or a value does not parse
    """
    fields = {}
    for key, raw in pairs.items():
        info = Scenario.model_fields.get(key)
        if info is None:
            raise ScenarioError(f"Unknown scenario key: {key}")
        try:
            if key.startswith("p_max_") or key == "noise_power_w":
                fields[key] = parse_power(raw)
            elif info.annotation is int:
                fields[key] = int(raw)
            else:
                fields[key] = float(raw)
        except ValueError:
            raise ScenarioError(f"Invalid value for {key}: {raw!r}")
    return fields


def load_scenario(file_path: Union[str, Path]) -> Scenario:
    """
    Load a scenario file.

    Args:
        file_path: Path to a `key = value` scenario file

    Returns:
        Validated Scenario

    Raises:
        ScenarioFileNotFoundError: If the file doesn't exist
        ScenarioError: If a key is unknown or a value is invalid
    """
    return ScenarioParser().parse_file(file_path)


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator (portable across platforms)."""
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(base: int, *indices: int) -> int:
    """
    Derive an independent seed from a base seed and integer indices.

    Pure function: the same arguments always give the same seed, whatever
    order cells are executed in.
    """
    state = np.random.SeedSequence([int(base), *map(int, indices)]).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


def _uniform_disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def sample_deployment(s: Scenario, seed: int) -> Deployment:
    """
    Sample node positions.

    RRHs, HetNet BSs and CRAN users are uniform on the grid_side x grid_side
    square; each BS's users are uniform in the disc of its coverage radius.

    Args:
        s: Scenario
        seed: Non-negative integer seed

    Returns:
        Deployment with distances clamped below by D_MIN_M
    """
    if seed < 0:
        raise ScenarioError(f"seed must be non-negative, got {seed}")

    rng = make_rng(seed)
    side = s.grid_side_m

    rrh_xy = rng.random((s.n_rrh, 2)) * side
    bs_xy = rng.random((s.n_bs, 2)) * side
    cran_xy = rng.random((s.n_cran_users, 2)) * side

    transmitters = [
        Transmitter(id=i, kind=RRH, position=tuple(rrh_xy[i]), p_max_w=s.p_max_rrh_w)
        for i in range(s.n_rrh)
    ]
    bs_kinds = [kind for kind in BS_KINDS for _ in range(s.count(kind))]
    for b, kind in enumerate(bs_kinds):
        transmitters.append(
            Transmitter(
                id=s.n_rrh + b,
                kind=kind,
                position=tuple(bs_xy[b]),
                p_max_w=s.p_max_for(kind),
            )
        )

    users = [User(id=j, owner=None, position=tuple(cran_xy[j])) for j in range(s.n_cran_users)]
    for b, kind in enumerate(bs_kinds):
        offsets = _uniform_disc(rng, s.users_per(kind), s.radius_for(kind))
        for xy in bs_xy[b] + offsets:
            users.append(User(id=len(users), owner=s.n_rrh + b, position=tuple(xy)))

    deployment = Deployment.from_positions(transmitters, users)
    logger.debug(
        f"Sampled deployment (seed={seed}): {deployment.n_transmitters} transmitters, "
        f"{deployment.n_users} users"
    )
    return deployment
