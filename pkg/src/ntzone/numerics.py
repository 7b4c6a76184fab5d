"""Gaussian-weighted numerics.

Provides the standard normal density/CDF, a fixed Gauss-Legendre rule for
expectations of smooth callables, and `GridFunction`: an immutable tabulated
function supporting interpolation, monotone inversion, CSV round-trips and
accurate integration against the Gaussian weight between arbitrary bounds.

Integration scheme for tabulated functions: the interpolant is integrated
cell by cell with a small Gauss-Legendre rule (machine-exact for a cubic
times the locally near-polynomial Gaussian), accumulated into a prefix
table so that any `[a, b]` integral is a difference of two cumulative
evaluations.  This makes integrals interval-additive to roundoff.  Beyond
the tabulated range the function is extended linearly with the boundary
slope, and those tail integrals against the Gaussian have closed forms, so
infinite bounds are exact rather than truncated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.special import ndtr

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Default signal-space grid: six standard deviations, 0.01 spacing.
GRID_EXTENT = 6.0
GRID_NODES = 1201

# Gauss-Legendre points per grid cell; exact to machine precision for the
# cubic-times-Gaussian integrands that arise from cell-wise interpolants.
_CELL_RULE_NODES = 12


class NonFiniteInput(ValueError):
    """An integration bound or lookup target was NaN."""


class NotMonotone(ValueError):
    """A grid function was used as invertible without being monotone."""


def std_normal_pdf(y):
    """Standard Gaussian density, vectorized."""
    y = np.asarray(y, dtype=float)
    out = np.exp(-0.5 * y * y) / SQRT_2PI
    return float(out) if out.ndim == 0 else out


def std_normal_cdf(y):
    """Standard Gaussian CDF, vectorized."""
    out = ndtr(np.asarray(y, dtype=float))
    return float(out) if out.ndim == 0 else out


def make_grid(extent: float = GRID_EXTENT, n_nodes: int = GRID_NODES) -> np.ndarray:
    if n_nodes < 2:
        raise ValueError("need at least two grid nodes")
    if extent <= 0:
        raise ValueError("grid extent must be positive")
    return np.linspace(-extent, extent, n_nodes)


def _linear_gaussian_integral(intercept, slope, lo, hi):
    """Closed form of the Gaussian-weighted integral of intercept + slope*y
    over [lo, hi]; bounds may be +-inf."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return intercept * (ndtr(hi) - ndtr(lo)) + slope * (
        np.exp(-0.5 * lo * lo) / SQRT_2PI - np.exp(-0.5 * hi * hi) / SQRT_2PI
    )


@dataclass(frozen=True)
class Quadrature:
    """Fixed Gauss-Legendre rule used for Gaussian expectations of callables.

    Bounds beyond `extent` standard deviations are truncated there; the
    omitted Gaussian mass at the default extent is below 2e-9.
    """

    kind: str = "legendre"
    n_nodes: int = 128
    extent: float = GRID_EXTENT

    def __post_init__(self):
        if self.kind != "legendre":
            raise ValueError(f"unsupported quadrature kind {self.kind!r}")
        if self.n_nodes < 2:
            raise ValueError("quadrature needs at least two nodes")

    @cached_property
    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        nodes, weights = np.polynomial.legendre.leggauss(self.n_nodes)
        return nodes, weights

    def gaussian_expectation(self, fn, a=-np.inf, b=np.inf) -> float:
        """Integral of fn(y) * pdf(y) over [a, b] (signed in the bounds)."""
        if np.isnan(a) or np.isnan(b):
            raise NonFiniteInput("integration bounds must not be NaN")
        lo = float(np.clip(a, -self.extent, self.extent))
        hi = float(np.clip(b, -self.extent, self.extent))
        nodes, weights = self.rule
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid + half * nodes
        return half * float(np.sum(weights * fn(pts) * std_normal_pdf(pts)))


@dataclass(frozen=True)
class GridFunction:
    """A real function tabulated on strictly increasing nodes.

    Interpolation is piecewise cubic (shape-preserving when the function is
    flagged monotone decreasing, which also enables inversion) with linear
    extrapolation at the boundary slopes.  Instances are immutable; the
    interpolant, inverse and integration tables are built once and cached.
    """

    nodes: np.ndarray
    values: np.ndarray
    monotone_decreasing: bool = False

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        if nodes.ndim != 1 or values.ndim != 1:
            raise ValueError("nodes and values must be one-dimensional")
        if nodes.size != values.size:
            raise ValueError("nodes and values must have equal length")
        if nodes.size < 2:
            raise ValueError("need at least two nodes")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise ValueError("nodes and values must be finite")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if self.monotone_decreasing and not np.all(np.diff(values) < 0):
            raise NotMonotone("values are not strictly decreasing")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    # -- interpolation ----------------------------------------------------

    @cached_property
    def _spline(self):
        if self.monotone_decreasing:
            return PchipInterpolator(self.nodes, self.values, extrapolate=False)
        return CubicSpline(self.nodes, self.values, bc_type="not-a-knot", extrapolate=False)

    @cached_property
    def _end_slopes(self) -> tuple[float, float]:
        d = self._spline.derivative()
        return float(d(self.nodes[0])), float(d(self.nodes[-1]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        lo, hi = self.nodes[0], self.nodes[-1]
        out = np.empty_like(x)
        inside = (x >= lo) & (x <= hi)
        out[inside] = self._spline(x[inside])
        sl, sr = self._end_slopes
        left = x < lo
        right = x > hi
        out[left] = self.values[0] + sl * (x[left] - lo)
        out[right] = self.values[-1] + sr * (x[right] - hi)
        return float(out[0]) if scalar else out

    # -- inversion ---------------------------------------------------------

    @cached_property
    def _inverse_spline(self):
        if not self.monotone_decreasing:
            raise NotMonotone("inversion requires the monotone_decreasing flag")
        # Reversed so the inverse's abscissa (this function's values) ascends.
        return PchipInterpolator(self.values[::-1], self.nodes[::-1], extrapolate=False)

    @cached_property
    def _inverse_end_slopes(self) -> tuple[float, float]:
        d = self._inverse_spline.derivative()
        return float(d(self.values[-1])), float(d(self.values[0]))

    def invert(self, target):
        """Abscissa x with value(x) == target; linear extrapolation beyond
        the tabulated value range."""
        inv = self._inverse_spline
        t = np.asarray(target, dtype=float)
        if np.any(np.isnan(t)):
            raise NonFiniteInput("inversion target must not be NaN")
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        v_lo, v_hi = self.values[-1], self.values[0]
        out = np.empty_like(t)
        inside = (t >= v_lo) & (t <= v_hi)
        out[inside] = inv(t[inside])
        sl, sr = self._inverse_end_slopes
        below = t < v_lo
        above = t > v_hi
        out[below] = self.nodes[-1] + sl * (t[below] - v_lo)
        out[above] = self.nodes[0] + sr * (t[above] - v_hi)
        return float(out[0]) if scalar else out

    # -- Gaussian-weighted integration --------------------------------------

    @cached_property
    def _cell_rule(self) -> tuple[np.ndarray, np.ndarray]:
        return np.polynomial.legendre.leggauss(_CELL_RULE_NODES)

    @cached_property
    def _weighted_prefix(self) -> np.ndarray:
        """prefix[i] = integral of interpolant * pdf from nodes[0] to nodes[i]."""
        gl_x, gl_w = self._cell_rule
        lo = self.nodes[:-1]
        hi = self.nodes[1:]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * gl_x[None, :]
        integrand = self._spline(pts) * std_normal_pdf(pts)
        cells = half * (integrand @ gl_w)
        prefix = np.empty(self.nodes.size)
        prefix[0] = 0.0
        np.cumsum(cells, out=prefix[1:])
        return prefix

    def _weighted_cumulative(self, t: np.ndarray) -> np.ndarray:
        """Integral of the (linearly extended) interpolant times pdf from
        nodes[0] to t, for an array of bounds t (may be +-inf)."""
        nodes = self.nodes
        prefix = self._weighted_prefix
        sl, sr = self._end_slopes
        out = np.empty_like(t)

        left = t < nodes[0]
        right = t > nodes[-1]
        inner = ~(left | right)

        if np.any(inner):
            ti = t[inner]
            cell = np.clip(np.searchsorted(nodes, ti, side="right") - 1, 0, nodes.size - 2)
            lo = nodes[cell]
            gl_x, gl_w = self._cell_rule
            mid = 0.5 * (lo + ti)
            half = 0.5 * (ti - lo)
            pts = mid[:, None] + half[:, None] * gl_x[None, :]
            integrand = self._spline(pts) * std_normal_pdf(pts)
            out[inner] = prefix[cell] + half * (integrand @ gl_w)

        if np.any(left):
            a0 = self.values[0] - sl * nodes[0]
            out[left] = -_linear_gaussian_integral(a0, sl, t[left], nodes[0])
        if np.any(right):
            a0 = self.values[-1] - sr * nodes[-1]
            out[right] = prefix[-1] + _linear_gaussian_integral(a0, sr, nodes[-1], t[right])
        return out

    def gaussian_integral(self, a, b):
        """Integral of this function times the standard normal pdf over [a, b].

        Signed in the bounds: swapping a and b negates the result.  Bounds
        may be +-inf (closed-form linear tails beyond the grid).
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(np.isnan(a)) or np.any(np.isnan(b)):
            raise NonFiniteInput("integration bounds must not be NaN")
        scalar = a.ndim == 0 and b.ndim == 0
        a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
        w = self._weighted_cumulative(np.concatenate([a, b]))
        out = w[a.size :] - w[: a.size]
        return float(out[0]) if scalar else out

    # -- serialization -------------------------------------------------------

    def to_csv(self, path) -> None:
        """Two-column CSV (node,value), 17 significant digits."""
        lines = ["node,value"]
        lines += [f"{x:.17g},{v:.17g}" for x, v in zip(self.nodes, self.values)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, monotone_decreasing: bool = False) -> "GridFunction":
        rows = Path(path).read_text().strip().splitlines()
        if not rows or rows[0].strip() != "node,value":
            raise ValueError("expected a 'node,value' header")
        data = np.array([[float(f) for f in r.split(",")] for r in rows[1:]])
        return cls(data[:, 0], data[:, 1], monotone_decreasing=monotone_decreasing)


def integrate_weighted(h: GridFunction, a: float, b: float) -> float:
    """Gaussian-weighted integral of a tabulated function between two bounds."""
    return h.gaussian_integral(a, b)


def invert_monotone(g: GridFunction, target):
    """Solve g(x) == target for a monotone-decreasing grid function."""
    if not g.monotone_decreasing:
        raise NotMonotone("grid function is not flagged monotone_decreasing")
    return g.invert(target)
