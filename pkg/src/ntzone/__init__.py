"""Solver and simulation harness for the long/short trading policy with a
two-lag decaying signal and fixed position-switch costs."""

__version__ = "0.1.0"

from .model import Action, MarketState, ModelParams, Position
from .numerics import GridFunction, Quadrature
from .solver import BiasBoundary, SolveReport, SolverConfig, solve

__all__ = [
    "Action",
    "BiasBoundary",
    "GridFunction",
    "MarketState",
    "ModelParams",
    "Position",
    "Quadrature",
    "SolveReport",
    "SolverConfig",
    "solve",
    "__version__",
]
