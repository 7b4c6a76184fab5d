"""Coupled fixed-point solver for the optimal trading policy.

The average-reward dynamic program reduces, after exploiting the model's
sign symmetries, to two coupled functional equations on the long-position
slices: one for the bias offset H(x) and one for the decision boundary
G(x).  Both maps are evaluated on a fixed signal grid; the iteration
applies them Jacobi-style (both updates read the previous pair) until the
sup-norm updates fall below tolerance.  The boundary for a short holder is
the long-holder boundary shifted up by c/rho1; all other slices of the
bias follow from the mirror symmetries.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .approx import bias_at_zero_cost, naive_boundary
from .model import Action, MarketState, ModelParams, Position
from .numerics import (
    GRID_EXTENT,
    GRID_NODES,
    GridFunction,
    NotMonotone,
    make_grid,
    std_normal_cdf,
)


class BoundaryNotInvertible(RuntimeError):
    """A boundary iterate lost strict monotonicity and cannot be inverted."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class NotConverged(RuntimeError):
    """Raised in strict mode when the iteration hits its cap; carries the
    partial report."""

    def __init__(self, message: str, report: "SolveReport"):
        super().__init__(message)
        self.report = report


class RegimeWarning(UserWarning):
    """Parameters are outside the regime where geometric convergence of the
    coupled iteration is guaranteed; results are reported, not assumed."""


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-8
    max_iterations: int = 500
    grid_extent: float = GRID_EXTENT
    grid_nodes: int = GRID_NODES
    init: str = "zero-cost"  # zero-cost | naive | user
    initial: tuple[GridFunction, GridFunction] | None = None  # (bias, boundary)
    # Sign convention of the inverse-boundary bound inside the switch-cost
    # term of the bias update.  The default is the convention consistent
    # with the average-reward identity; the alternative is kept only for
    # comparison and disagrees with the discretized-MDP oracle.
    alt_cost_term: bool = False
    strict: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.init not in ("zero-cost", "naive", "user"):
            raise ValueError(f"unknown initialization mode {self.init!r}")
        if self.init == "user" and self.initial is None:
            raise ValueError("init='user' requires an initial (bias, boundary) pair")


@dataclass(frozen=True)
class BiasBoundary:
    """Long-position slices of the bias offset and decision boundary."""

    bias: GridFunction
    boundary: GridFunction
    params: ModelParams

    def __post_init__(self):
        if not self.boundary.monotone_decreasing:
            raise BoundaryNotInvertible("boundary must be monotone decreasing")

    def boundary_at(self, x0, q: int = 1):
        """Decision threshold on the lagged signal for a holder of position q."""
        base = self.boundary(x0)
        if int(q) == 1:
            return base
        return base + self.params.c / self.params.rho1


@dataclass(frozen=True)
class SolveReport:
    lam: float
    iterations: int
    residuals_bias: list[float] = field(default_factory=list)
    residuals_boundary: list[float] = field(default_factory=list)
    converged: bool = False
    epsilon: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "iterations": self.iterations,
            "epsilon": self.epsilon,
            "converged": self.converged,
            "residuals_bias": list(self.residuals_bias),
            "residuals_boundary": list(self.residuals_boundary),
        }


def update_bias(current: BiasBoundary, alt_cost_term: bool = False) -> GridFunction:
    """One sweep of the bias map over the grid.

    At each node the inverse boundary sets the split point between the
    keep-long and flip-to-short branches of next period's decision; the
    bias integrals on either side of zero and the Gaussian mass terms have
    closed forms in the cumulative tables.
    """
    p = current.params
    x = current.bias.nodes
    a = current.boundary.invert(x)
    cdf_a = std_normal_cdf(a)
    half_shift = p.c / (2.0 * p.rho1)

    bias_term = current.bias.gaussian_integral(a, np.zeros_like(a)) - current.bias.gaussian_integral(
        np.zeros_like(a), -a
    )
    cost_term = p.c * (0.5 - cdf_a) if alt_cost_term else p.c * (cdf_a - 0.5)
    values = (
        p.rho0 * (x + half_shift)
        + p.rho1 * x * (1.0 - 2.0 * cdf_a)
        + bias_term
        - cost_term
    )
    return GridFunction(x, values)


def update_boundary(current: BiasBoundary) -> GridFunction:
    """One sweep of the boundary map over the grid.

    The four inverse-boundary bounds mark where next period's decision
    flips for each of the two current positions; at zero cost every bound
    pair coincides and the output is exactly the line -(rho0/rho1) x.
    """
    p = current.params
    x = current.boundary.nodes
    shift = p.c / p.rho1
    inv = current.boundary.invert
    b_pm = inv(x)
    b_pp = inv(x - shift)
    b_mm = inv(-x)
    b_mp = inv(-x - shift)

    bias_gap = current.bias.gaussian_integral(b_mm, b_mp) - current.bias.gaussian_integral(
        b_pm, b_pp
    )
    values = (
        -(p.rho0 / p.rho1) * x
        - 0.5 * shift
        + bias_gap / (2.0 * p.rho1)
        - x * (std_normal_cdf(b_pp) - std_normal_cdf(b_pm))
        - 0.5 * shift * (std_normal_cdf(b_mm) - std_normal_cdf(b_pm))
    )
    try:
        return GridFunction(x, values, monotone_decreasing=True)
    except NotMonotone as exc:
        raise BoundaryNotInvertible(f"boundary update lost monotonicity: {exc}") from exc


def average_reward(current: BiasBoundary) -> float:
    """Long-run reward per period implied by a bias slice."""
    p = current.params
    tail = current.bias.gaussian_integral(0.0, np.inf)
    return -(p.rho0 / (2.0 * p.rho1)) * p.c - 0.5 * p.c + 2.0 * tail


def _initial_pair(params: ModelParams, config: SolverConfig, grid: np.ndarray):
    if config.init == "user":
        bias0, boundary0 = config.initial
        bias = GridFunction(grid, bias0(grid))
        boundary = GridFunction(grid, boundary0(grid), monotone_decreasing=True)
        return bias, boundary
    boundary = GridFunction(grid, naive_boundary(grid, +1, params), monotone_decreasing=True)
    if config.init == "naive":
        bias = GridFunction(grid, np.zeros_like(grid))
    else:  # zero-cost warm start, exact when c == 0
        bias = GridFunction(grid, bias_at_zero_cost(grid, params))
    return bias, boundary


def solve(params: ModelParams, config: SolverConfig | None = None) -> tuple[BiasBoundary, SolveReport]:
    """Iterate the coupled bias/boundary maps to a fixed point.

    Returns the final iterate and the residual history.  In strict mode a
    run that hits the iteration cap raises NotConverged (report attached);
    otherwise the report's flag records the outcome.
    """
    config = config or SolverConfig()
    if params.rho1 < 0:
        raise ValueError(
            "solver requires rho1 > 0; negate the lagged signal to map a "
            "negative rho1 model onto an equivalent positive one"
        )
    if params.rho1 > params.rho0 or params.c > params.rho0:
        warnings.warn(
            "parameters are outside the proven contraction regime "
            f"(rho1={params.rho1}, rho0={params.rho0}, c={params.c}); "
            "convergence is reported, not guaranteed",
            RegimeWarning,
            stacklevel=2,
        )

    grid = make_grid(config.grid_extent, config.grid_nodes)
    bias, boundary = _initial_pair(params, config, grid)
    current = BiasBoundary(bias, boundary, params)

    res_bias: list[float] = []
    res_boundary: list[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        try:
            new_bias = update_bias(current, alt_cost_term=config.alt_cost_term)
            new_boundary = update_boundary(current)
        except BoundaryNotInvertible as exc:
            raise BoundaryNotInvertible(str(exc), iteration=iteration) from exc
        res_bias.append(float(np.max(np.abs(new_bias.values - current.bias.values))))
        res_boundary.append(
            float(np.max(np.abs(new_boundary.values - current.boundary.values)))
        )
        current = BiasBoundary(new_bias, new_boundary, params)
        if res_bias[-1] <= config.epsilon and res_boundary[-1] <= config.epsilon:
            converged = True
            break

    report = SolveReport(
        lam=average_reward(current),
        iterations=iteration,
        residuals_bias=res_bias,
        residuals_boundary=res_boundary,
        converged=converged,
        epsilon=config.epsilon,
    )
    if config.strict and not converged:
        raise NotConverged(
            f"no convergence within {config.max_iterations} iterations "
            f"(last residuals {res_bias[-1]:.3e}/{res_boundary[-1]:.3e})",
            report,
        )
    return current, report


def bias_value(bb: BiasBoundary, x0: float, x1: float, q: int) -> float:
    """Full bias function reconstructed from the long-position slices.

    On the go-long side of the boundary the bias is rho1*x1 plus the
    long-side offset; on the go-short side it is -rho1*x1 plus the
    short-side offset.  Off-slice offsets follow from the mirror symmetry
    and the fixed +-c shifts between position slices.
    """
    p = bb.params
    q = int(q)
    offset_long = bb.bias(x0) - (0.0 if q == 1 else p.c)
    offset_short = bb.bias(-x0) - (p.c if q == 1 else 0.0)
    if x1 >= bb.boundary_at(x0, q):
        return p.rho1 * x1 + offset_long
    return -p.rho1 * x1 + offset_short


def decide(bb: BiasBoundary, state: MarketState) -> Action:
    """Optimal action for a state: go long iff the lagged signal clears the
    holder's boundary slice (ties go long)."""
    if state.x1 >= bb.boundary_at(state.x0, int(state.q)):
        return Action.GO_LONG
    return Action.GO_SHORT


def export_solution_csv(bb: BiasBoundary, path) -> None:
    """CSV with the grid, bias slice and both boundary slices."""
    shift = bb.params.c / bb.params.rho1
    lines = ["x,bias,boundary_long,boundary_short"]
    for x, h, g in zip(bb.bias.nodes, bb.bias.values, bb.boundary.values):
        lines.append(f"{x:.17g},{h:.17g},{g:.17g},{g + shift:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def export_report_json(report: SolveReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
