"""Brute-force validator: full discretization of the trading MDP.

Both signals are quantized onto a shared grid, the Gaussian disturbance is
binned into the grid's Voronoi cells, and the resulting finite MDP is
solved by textbook relative value iteration with span-seminorm stopping.
This module is a correctness instrument for the functional-equation
solver, not an efficient method; it shares nothing with the solver's
update formulas beyond the model definition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .numerics import GRID_EXTENT, std_normal_cdf
from .solver import NotConverged

# Position axis layout used throughout: index 0 holds q=+1, index 1 holds q=-1.
POSITIONS = (1, -1)


@dataclass(frozen=True)
class DiscreteMDP:
    """Grid, Gaussian destination weights, and per-(state, action) rewards.

    reward_long/reward_short have shape (n, n, 2) indexed by
    (current-signal node, lagged-signal node, position index).
    """

    grid: np.ndarray
    weights: np.ndarray
    params: ModelParams
    reward_long: np.ndarray
    reward_short: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.grid.size


def build_discrete(params: ModelParams, n_nodes: int, extent: float = GRID_EXTENT) -> DiscreteMDP:
    """Quantize the signal space and bin the disturbance by Voronoi cell.

    The outer cells extend to infinity so destination weights sum to one
    exactly.  The lagged signal copies the current one deterministically,
    so only the fresh-signal axis carries randomness.
    """
    if n_nodes < 21:
        raise ValueError("need at least 21 nodes")
    if n_nodes % 2 == 0:
        raise ValueError("n_nodes must be odd so zero is a node")
    grid = np.linspace(-extent, extent, n_nodes)
    edges = np.concatenate([[-np.inf], 0.5 * (grid[:-1] + grid[1:]), [np.inf]])
    weights = np.diff(std_normal_cdf(edges))

    signal = params.rho0 * grid[:, None] + params.rho1 * grid[None, :]
    switch_from = np.array([[0.0, params.c], [params.c, 0.0]])  # [new, old]
    reward_long = signal[:, :, None] - switch_from[0][None, None, :]
    reward_short = -signal[:, :, None] - switch_from[1][None, None, :]
    return DiscreteMDP(grid, weights, params, reward_long, reward_short)


def relative_value_iteration(
    mdp: DiscreteMDP,
    epsilon: float = 1e-9,
    max_iterations: int = 200_000,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Solve the discrete MDP for (average reward, bias table, greedy policy).

    The bias is pinned to zero at the reference state (0, 0, long); the
    stopping rule is the span seminorm of successive updates, which is the
    correct criterion for average-reward value iteration.  The returned
    policy table is boolean: True where going long is greedy (ties long).
    """
    n = mdp.n_nodes
    ref = (n // 2, n // 2, 0)
    bias = np.zeros((n, n, 2))
    lam = float("nan")
    for _ in range(max_iterations):
        # Continuation depends only on (current signal, next position):
        # the fresh draw replaces the current signal, which becomes the lag.
        cont = np.tensordot(mdp.weights, bias, axes=([0], [0]))  # (n, 2)
        q_long = mdp.reward_long + cont[:, 0][:, None, None]
        q_short = mdp.reward_short + cont[:, 1][:, None, None]
        updated = np.maximum(q_long, q_short)
        delta = updated - bias
        lam = float(delta[ref])
        span = float(delta.max() - delta.min())
        bias = updated - updated[ref]
        if span < epsilon:
            policy = q_long >= q_short
            return lam, bias, policy
    raise NotConverged(
        f"relative value iteration: span {span:.3e} after {max_iterations} sweeps",
        report=None,
    )


def policy_boundary(mdp: DiscreteMDP, policy: np.ndarray) -> np.ndarray:
    """Bracket the go-long threshold on the lagged signal per (signal, position).

    Returns an array of shape (n, 2, 2) holding [below, above] lagged-signal
    nodes around the first go-long row; -inf/+inf mark thresholds outside
    the grid.  Requires the policy to be a monotone threshold in the lag.
    """
    n = mdp.n_nodes
    out = np.empty((n, 2, 2))
    for qi in range(2):
        for i in range(n):
            column = policy[i, :, qi]
            first_long = int(np.argmax(column)) if column.any() else n
            if first_long == 0:
                out[i, qi] = (-np.inf, mdp.grid[0])
            elif first_long == n:
                out[i, qi] = (mdp.grid[-1], np.inf)
            else:
                out[i, qi] = (mdp.grid[first_long - 1], mdp.grid[first_long])
    return out


def threshold_violations(policy: np.ndarray) -> int:
    """Count (signal, position) columns whose go-long region is not an upper
    set in the lagged signal."""
    ordered = np.sort(policy, axis=1)  # False rows first == monotone threshold
    return int(np.sum(np.any(ordered != policy, axis=1)))


def export_policy_csv(mdp: DiscreteMDP, policy: np.ndarray, path) -> None:
    lines = ["x0,x1,q,go_long"]
    for qi, q in enumerate(POSITIONS):
        for i, x0 in enumerate(mdp.grid):
            for j, x1 in enumerate(mdp.grid):
                lines.append(f"{x0:.17g},{x1:.17g},{q},{int(policy[i, j, qi])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
