"""Closed-form small-cost machinery.

The myopic (naive) decision boundary, the zero-cost bias slice, the
sensitivity of the optimal boundary to the switch cost at zero cost, and
the resulting first-order boundary approximation.  All quantities are cheap
pointwise evaluations built from the Gaussian pdf/CDF; no grids involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .numerics import GridFunction, std_normal_cdf, std_normal_pdf


def naive_boundary(x, q: int, params: ModelParams):
    """Threshold on the lagged signal above which the myopic rule goes long.

    The myopic rule maximizes the current period's reward net of the switch
    fee, ignoring any effect on future decisions.  The long-holder (q=+1)
    threshold sits c/(2 rho1) below the zero-cost line, the short-holder
    threshold the same amount above it.
    """
    p = params
    shift = p.c / (2.0 * p.rho1)
    return -(p.rho0 / p.rho1) * np.asarray(x, dtype=float) - int(q) * shift


def bias_at_zero_cost(x, params: ModelParams):
    """Zero-cost bias slice for the long position as a function of the
    current signal.  Exact fixed point of the bias update when c = 0."""
    p = params
    k = p.kappa
    x = np.asarray(x, dtype=float)
    out = (
        p.rho0 * x
        + p.rho1 * x * (2.0 * std_normal_cdf(k * x) - 1.0)
        - 2.0 * p.rho0 * (std_normal_pdf(0.0) - std_normal_pdf(k * x))
    )
    return float(out) if out.ndim == 0 else out


def boundary_cost_sensitivity(x, params: ModelParams):
    """Derivative of the long-holder boundary with respect to the switch
    cost, evaluated at zero cost.

    Assembled from the zero-cost bias slice; the bias terms cancel against
    the signal term, so the whole expression collapses to -cdf(kappa*x)/rho1
    (tests assert this identity).  At x = 0 it equals -1/(2 rho1), matching
    the myopic intercept.
    """
    p = params
    k = p.kappa
    x = np.asarray(x, dtype=float)
    fx = std_normal_pdf(k * x)
    bias_gap = bias_at_zero_cost(k * x, p) - bias_at_zero_cost(-k * x, p)
    out = (
        -1.0 / (2.0 * p.rho1)
        + bias_gap * fx / (2.0 * p.rho0 * p.rho1)
        - x * fx / p.rho0
        - (2.0 * std_normal_cdf(k * x) - 1.0) / (2.0 * p.rho1)
    )
    return float(out) if out.ndim == 0 else out


def first_order_boundary(x, c: float, params: ModelParams, q: int = 1):
    """Optimal boundary expanded to first order in the switch cost.

    The q=-1 slice sits c/rho1 above the q=+1 slice.  At c = 0 this reduces
    exactly to the zero-cost line -(rho0/rho1) x.
    """
    p = params
    x = np.asarray(x, dtype=float)
    out = -(p.rho0 / p.rho1) * x + boundary_cost_sensitivity(x, p) * c
    if int(q) == -1:
        out = out + c / p.rho1
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FirstOrderBoundary:
    """Callable first-order boundary for a fixed parameter set."""

    params: ModelParams

    def __call__(self, x, q: int = 1):
        return first_order_boundary(x, self.params.c, self.params, q=q)

    def as_grid(self, nodes: np.ndarray) -> GridFunction:
        return GridFunction(nodes, self(nodes), monotone_decreasing=True)


def boundary_comparison_rows(params: ModelParams, xs, solver_boundary=None):
    """Rows (x, naive long/short, first-order long/short, solver long/short)
    for plotting boundary comparisons; solver columns are NaN when no solved
    boundary is supplied."""
    xs = np.asarray(xs, dtype=float)
    cols = [
        xs,
        naive_boundary(xs, +1, params),
        naive_boundary(xs, -1, params),
        first_order_boundary(xs, params.c, params, q=+1),
        first_order_boundary(xs, params.c, params, q=-1),
    ]
    if solver_boundary is not None:
        g_long = solver_boundary(xs)
        cols += [g_long, g_long + params.c / params.rho1]
    else:
        cols += [np.full_like(xs, np.nan)] * 2
    return np.column_stack(cols)
