"""
Exceptions raised by the CRAN/HetNet power allocation engine.
"""

from typing import Optional

import numpy as np


class GameError(Exception):
    """Base exception for all errors raised by this package."""

    pass


class ScenarioError(GameError):
    """Invalid scenario, deployment or sweep values."""

    pass


class ScenarioParseError(GameError):
    """Malformed scenario, sweep spec or channel dump content."""

    pass


class ScenarioFileNotFoundError(GameError):
    """Input file not found at specified path."""

    pass


class ChannelLookupError(GameError):
    """Unknown (transmitter, user) pair."""

    pass


class UndefinedWeightsError(GameError):
    """Beamforming weights requested for an all-zero power vector."""

    pass


class LevelStrategyError(GameError):
    """A level strategy needed by the cognitive hierarchy belief is missing."""

    pass


class SolverConvergenceError(GameError):
    """
    Inner solver did not converge within its iteration budget.

    Attributes:
        best_iterate: Best feasible point found before giving up
        residual: Stationarity residual at best_iterate
    """

    def __init__(
        self,
        message: str,
        best_iterate: Optional[np.ndarray] = None,
        residual: float = float("nan"),
    ):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual


class EquilibriumError(GameError):
    """Equilibrium computation failed for a given player and level."""

    def __init__(self, message: str, player: str = "", level: Optional[int] = None):
        super().__init__(message)
        self.player = player
        self.level = level


class SweepError(GameError):
    """Invalid sweep specification or sweep output failure."""

    pass
