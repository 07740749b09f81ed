"""
Rayleigh fading realizations and received-power building blocks.

A ChannelRealization is one frame: complex gains h[i, j, k] for every
(transmitter, user, subcarrier). Phases are kept because the CRAN
beamforming weights need conj(h).
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .constants import CHANNEL_DUMP_COLUMNS, ENCODING, RADIO_DEFAULTS
from .exceptions import (
    ChannelLookupError,
    ScenarioFileNotFoundError,
    ScenarioParseError,
)
from .scenario import make_rng
from .schemas import ChannelRealization, Deployment, Scenario

logger = logging.getLogger(__name__)


def sample_channels(d: Deployment, s: Scenario, seed: int) -> ChannelRealization:
    """
    Draw i.i.d. circularly-symmetric complex Gaussian gains.

    Each h[i, j, k] has E[|h|^2] = s.rayleigh_mean_power, so |h| is Rayleigh.

    Args:
        d: Deployment (fixes n_tx and n_users)
        s: Scenario (fixes L and the fading power)
        seed: Non-negative integer seed

    Returns:
        ChannelRealization of shape (n_tx, n_users, L)
    """
    rng = make_rng(seed)
    shape = (d.n_transmitters, d.n_users, s.n_subcarriers)
    scale = np.sqrt(s.rayleigh_mean_power / 2.0)
    real = rng.standard_normal(shape)
    imag = rng.standard_normal(shape)
    return ChannelRealization(h=scale * (real + 1j * imag))


def pathloss(d: Deployment, alpha: float) -> np.ndarray:
    """d_ij ** -alpha for every (transmitter, user) pair."""
    return d.distance ** (-alpha)


def rx_power(
    c: ChannelRealization,
    d: Deployment,
    i: int,
    j: int,
    k: int,
    p_ik: float,
    alpha: float = RADIO_DEFAULTS["pathloss_exponent"],
) -> float:
    """
    Received power |h_ijk|^2 * p_ik * d_ij^-alpha.

    Args:
        c: Channel realization
        d: Deployment
        i: Transmitter id
        j: User id
        k: Subcarrier
        p_ik: Transmit power (W), non-negative
        alpha: Path loss exponent

    Returns:
        Received power in watts

    Raises:
        ChannelLookupError: If (i, j, k) is outside the realization
    """
    if p_ik < 0:
        raise ValueError(f"p_ik must be non-negative, got {p_ik}")
    n_tx, n_users, n_sub = c.h.shape
    if not (0 <= i < n_tx and 0 <= j < n_users and 0 <= k < n_sub):
        raise ChannelLookupError(f"No gain for transmitter {i}, user {j}, subcarrier {k}")
    if (n_tx, n_users) != d.distance.shape:
        raise ChannelLookupError("Channel realization does not match the deployment")
    return float(c.power_gain[i, j, k] * p_ik * d.distance[i, j] ** (-alpha))


def dump_channels(c: ChannelRealization, file_path: Union[str, Path]) -> None:
    """
    Write a realization as columns tx_id, user_id, k, re, im.

    Floats are written with full round-trip precision.
    """
    tx, user, k = np.indices(c.h.shape)
    df = pd.DataFrame(
        {
            "tx_id": tx.ravel(),
            "user_id": user.ravel(),
            "k": k.ravel(),
            "re": c.h.real.ravel(),
            "im": c.h.imag.ravel(),
        },
        columns=CHANNEL_DUMP_COLUMNS,
    )
    df.to_csv(file_path, index=False, encoding=ENCODING, float_format="%.17g")
    logger.info(f"Wrote {len(df)} channel gains to {file_path}")


def load_channels(file_path: Union[str, Path], d: Deployment) -> ChannelRealization:
    """
    Read a realization written by dump_channels.

    Args:
        file_path: Path to the dump
        d: Deployment the realization belongs to

    Returns:
        ChannelRealization

    Raises:
        ScenarioFileNotFoundError: If the file doesn't exist
        ScenarioParseError: If columns are missing or the index grid is incomplete
    """
    path = Path(file_path)
    if not path.is_file():
        raise ScenarioFileNotFoundError(f"File not found: {file_path}")

    try:
        df = pd.read_csv(
            path,
            dtype={"tx_id": int, "user_id": int, "k": int, "re": float, "im": float},
            encoding=ENCODING,
            engine="c",
            float_precision="round_trip",
        )
    except (pd.errors.ParserError, ValueError) as e:
        raise ScenarioParseError(f"Failed to read channel dump {file_path}: {e}")

    if list(df.columns) != CHANNEL_DUMP_COLUMNS:
        raise ScenarioParseError(
            f"{file_path}: expected columns {CHANNEL_DUMP_COLUMNS}, got {list(df.columns)}"
        )
    if df.empty:
        raise ScenarioParseError(f"{file_path}: no channel gains")

    n_sub = int(df["k"].max()) + 1
    shape = (d.n_transmitters, d.n_users, n_sub)
    idx = df[["tx_id", "user_id", "k"]].to_numpy()
    if (
        len(df) != np.prod(shape)
        or idx.min() < 0
        or np.any(idx.max(axis=0) >= shape)
        or df.duplicated(["tx_id", "user_id", "k"]).any()
    ):
        raise ScenarioParseError(f"{file_path}: gains do not cover the grid {shape} exactly once")

    h = np.empty(shape, dtype=complex)
    h[idx[:, 0], idx[:, 1], idx[:, 2]] = df["re"].to_numpy() + 1j * df["im"].to_numpy()
    try:
        realization = ChannelRealization(h=h)
    except ValidationError as e:
        raise ScenarioParseError(f"{file_path}: invalid gains: {e}")
    logger.info(f"Loaded channel realization {shape} from {file_path}")
    return realization
