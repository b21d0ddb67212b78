"""Lateralised steering: left/right novelty difference -> angular speed.

omega = alpha * (d_left - d_right) / (d_left + d_right). The normalisation
makes the command scale-free in the novelty magnitudes, so it is insensitive
to how many views were learned; the output is always bounded by alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class SteeringParams:
    alpha: float = 1.0
    v_test: float = 0.2

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class SteeringCommand:
    v: float
    omega: float


def compute_turn(d_left: float, d_right: float, params: SteeringParams) -> SteeringCommand:
    """Turn command from a pair of novelty readings.

    Both novelties zero means both views are perfectly familiar; going
    straight is the only symmetric choice, so omega is 0 there.
    """
    if not (math.isfinite(d_left) and math.isfinite(d_right)):
        raise ValueError("novelty values must be finite")
    if d_left < 0 or d_right < 0:
        raise ValueError(f"novelty must be nonnegative, got ({d_left}, {d_right})")
    total = d_left + d_right
    omega = 0.0 if total == 0 else params.alpha * (d_left - d_right) / total
    return SteeringCommand(v=params.v_test, omega=omega)
