"""
Broadcast channel: one LED superposes K users' power levels, every user
receives the sum through its own gain and decodes with SIC.
"""

from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constellation import generate_constellations, normalize, profiles_from
from .errors import ConfigError
from .mac_decoders import sic_decode_batch


class BcConfig(BaseModel):
    """Users in SIC decode order (user 1 weakest gain, largest levels)."""

    model_config = ConfigDict(frozen=True)

    etas: List[int]
    gains: List[float]
    noise_vars: List[float]
    budget: float = Field(default=1.0, gt=0.0)
    levels: List[List[float]]

    @model_validator(mode="after")
    def _check(self) -> "BcConfig":
        k = len(self.etas)
        if k == 0:
            raise ValueError("at least one user is required")
        if not (len(self.gains) == len(self.noise_vars) == len(self.levels) == k):
            raise ValueError("etas, gains, noise_vars and levels must have equal length")
        for alpha, (eta, points) in enumerate(zip(self.etas, self.levels), 1):
            if len(points) != 2 ** eta:
                raise ValueError(f"user {alpha} needs {2 ** eta} levels, got {len(points)}")
        if any(g <= 0 for g in self.gains):
            raise ValueError("user gains must be positive")
        if any(s <= 0 for s in self.noise_vars):
            raise ValueError("noise variances must be positive")
        peak = sum(points[-1] for points in self.levels)
        if peak > self.budget * (1 + 1e-12):
            raise ValueError(f"peak superposed level {peak} exceeds budget {self.budget}")
        return self

    @property
    def num_users(self) -> int:
        return len(self.etas)

    @classmethod
    def from_users(cls, etas: Sequence[int], gains: Sequence[float],
                   noise_vars: Sequence[float], budget: float = 1.0,
                   strict: bool = False) -> "BcConfig":
        """
        Build user levels with the MAC construction, user gains standing in for
        transmitter gains.
        """
        raw = generate_constellations(profiles_from(etas, gains), strict=strict)
        norm = normalize(raw, budget)
        try:
            return cls(etas=list(etas), gains=list(gains), noise_vars=list(noise_vars),
                       budget=budget, levels=norm.levels)
        except ValidationError as e:
            raise ConfigError(f"invalid broadcast configuration: {e}") from e

    def with_noise(self, noise_vars: Sequence[float]) -> "BcConfig":
        return self.model_copy(update={"noise_vars": list(noise_vars)})


class BcDecision(BaseModel):
    """Own index of user alpha plus the indices it cancelled on the way."""

    index: int
    intermediate: List[int]
    ml_computations: int


def bc_user_ml_count(config: BcConfig, alpha: int) -> int:
    """ML computations spent by user alpha, cancellation of users 1..alpha-1 included."""
    _check_user(config, alpha)
    return sum(2 ** eta for eta in config.etas[:alpha])


def _check_user(config: BcConfig, alpha: int) -> None:
    if not 1 <= alpha <= config.num_users:
        raise ConfigError(f"user index must lie in 1..{config.num_users}, got {alpha}")


def superpose(config: BcConfig, indices: Sequence[int]) -> float:
    """Transmit level: sum of every user's chosen level (1-based indices)."""
    if len(indices) != config.num_users:
        raise ConfigError(f"{config.num_users} users but {len(indices)} indices")
    total = 0.0
    for alpha, (q, points) in enumerate(zip(indices, config.levels), 1):
        if not 1 <= q <= len(points):
            raise ConfigError(f"user {alpha} index {q} outside 1..{len(points)}")
        total += points[q - 1]
    return total


def superpose_batch(config: BcConfig, indices: np.ndarray) -> np.ndarray:
    """Vectorised superpose over rows of 1-based indices, shape (n, K)."""
    total = np.zeros(indices.shape[0])
    for alpha, points in enumerate(config.levels):
        total = total + np.asarray(points)[indices[:, alpha] - 1]
    return total


def bc_user_decode_batch(samples: np.ndarray, config: BcConfig, alpha: int) -> np.ndarray:
    """
    SIC at user alpha: users 1..alpha-1 decoded and cancelled through g_alpha,
    users alpha+1..K left as noise.

    Returns:
        1-based indices of users 1..alpha, shape (n, alpha)
    """
    _check_user(config, alpha)
    g = config.gains[alpha - 1]
    return sic_decode_batch(samples, config.levels[:alpha], [g] * alpha)


def bc_user_decode(y: float, config: BcConfig, alpha: int) -> BcDecision:
    """Decode one received sample at user alpha."""
    decided = bc_user_decode_batch(np.array([y]), config, alpha)[0]
    return BcDecision(
        index=int(decided[-1]),
        intermediate=[int(q) for q in decided[:-1]],
        ml_computations=bc_user_ml_count(config, alpha),
    )
