"""Market model primitives.

A single asset is held either long or short.  Each period a fresh signal
arrives; the tradeable return is driven by the current signal and the
previous one (the older signal's predictive power has decayed), plus
mean-zero Gaussian noise.  Flipping the position costs a fixed fee.

Everything here is an immutable value type or a pure function, safe to
share across threads.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Position(enum.IntEnum):
    """Holding direction; integer value is the signed exposure."""

    LONG = 1
    SHORT = -1


class Action(enum.Enum):
    GO_LONG = "go_long"
    GO_SHORT = "go_short"

    @property
    def target(self) -> Position:
        """Position held after applying the action."""
        return Position.LONG if self is Action.GO_LONG else Position.SHORT


@dataclass(frozen=True)
class ModelParams:
    """Signal-to-return correlation strengths and the position-switch fee.

    rho0 weights the current signal, rho1 the one-period-old signal, c is
    charged whenever the position flips.  rho0 must be positive and rho1
    nonzero (the decision boundary divides by rho1).
    """

    rho0: float
    rho1: float
    c: float = 0.0

    def __post_init__(self):
        for name in ("rho0", "rho1", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.rho0 <= 0:
            raise ValueError(f"rho0 must be > 0, got {self.rho0}")
        if self.rho1 == 0:
            raise ValueError("rho1 must be nonzero")
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c}")

    @property
    def kappa(self) -> float:
        """Lag-to-current correlation ratio, always recomputed."""
        return self.rho1 / self.rho0


@dataclass(frozen=True)
class MarketState:
    """Current signal, previous signal and the held position."""

    x0: float
    x1: float
    q: Position

    def __post_init__(self):
        object.__setattr__(self, "q", Position(self.q))

    def mirrored(self) -> "MarketState":
        """State with both signals and the position negated."""
        return MarketState(-self.x0, -self.x1, Position(-int(self.q)))


def transition(state: MarketState, action: Action, noise: float) -> MarketState:
    """Advance one period: the disturbance becomes the new signal, the old
    current signal becomes the lagged one, and the position is whatever the
    action dictates.  Deterministic given ``noise``."""
    return MarketState(x0=noise, x1=state.x0, q=action.target)


def reward(state: MarketState, action: Action, params: ModelParams) -> float:
    """One-period reward: predictable return on the new position, minus the
    switch fee when the position flips."""
    q_new = action.target
    switch = q_new != state.q
    return (params.rho0 * state.x0 + params.rho1 * state.x1) * int(q_new) - (
        params.c if switch else 0.0
    )


def predictable_return(x0, x1, q, params: ModelParams):
    """Expected per-period return of holding position ``q``: q*(rho0*x0 + rho1*x1).

    The mean-zero target noise is excluded so Monte Carlo estimates built on
    this quantity carry no extraneous variance.  Accepts scalars or arrays.
    """
    return q * (params.rho0 * x0 + params.rho1 * x1)


def target_value(x0, x1, noise, params: ModelParams):
    """Realized target (price movement) including its Gaussian noise term."""
    return params.rho0 * x0 + params.rho1 * x1 + noise
