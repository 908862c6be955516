"""Brute-force baselines for small instances.

These search the problem directly, without any of the KKT structure the
optimizer relies on, and exist to cross-check it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .duration_opt import Budget
from .model import DeviceParams, PulseSchedule, WritePulse

__all__ = ["OracleResult", "grid_search_single_bit", "grid_search_word", "MAX_ORACLE_BITS"]

MAX_ORACLE_BITS = 3
MAX_ORACLE_CURRENT = 6.0
_CHUNK = 1 << 18


@dataclass(frozen=True)
class OracleResult:
    schedule: PulseSchedule
    mse: float
    coarse: bool
    evaluations: int


def grid_search_single_bit(budget: Budget, grid_points: int = 100_001) -> WritePulse:
    """Maximize ``(i - 1) * E / i**2`` over a current grid on ``[1 + eps, 20]``."""
    if grid_points < 2:
        raise ValueError("need at least two grid points")
    E = budget.energy
    i = np.linspace(1.0 + budget.epsilon, 20.0, grid_points)
    k = int(np.argmax((i - 1.0) * E / (i * i)))
    return WritePulse(float(i[k]), E / float(i[k]) ** 2)


def _evaluate(points, bits, E, c_prime, cap):
    """MSE of parameter points ``(i_0..i_{B-1}, s_0..s_{B-2})``; infeasible -> inf."""
    cur = points[:, :bits]
    shares = np.empty_like(cur)
    shares[:, : bits - 1] = points[:, bits:]
    shares[:, bits - 1] = 1.0 - points[:, bits:].sum(axis=1)
    t = shares * E / (cur * cur)
    weights = 4.0 ** np.arange(bits)
    value = c_prime * np.sum(weights * np.exp(-2.0 * (cur - 1.0) * t), axis=1)
    bad = shares[:, bits - 1] < -1e-12
    if math.isfinite(cap):
        bad |= np.any(t > cap, axis=1)
    value[bad] = np.inf
    return value, t


def _grid_argmin(axes, bits, E, c_prime, cap):
    """Exhaustive argmin over the tensor grid spanned by ``axes``.

    Ties go to the lowest lexicographic grid index.
    """
    shape = tuple(a.size for a in axes)
    total = int(np.prod(shape))
    best_val, best_idx = math.inf, -1
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, shape)
        pts = np.column_stack([axes[d][idx[d]] for d in range(len(axes))])
        val, _ = _evaluate(pts, bits, E, c_prime, cap)
        k = int(np.argmin(val))
        if val[k] < best_val:
            best_val, best_idx = float(val[k]), int(flat[k])
    point = np.array([axes[d][j] for d, j in enumerate(np.unravel_index(best_idx, shape))])
    return point, best_val, total


def grid_search_word(
    bits: int,
    budget: Budget,
    dev: DeviceParams | None = None,
    resolution: int = 21,
    refinements: int = 8,
) -> OracleResult:
    """Grid search over currents and energy shares, refined around the best point.

    Durations are parameterized on the energy shell as
    ``t_b = s_b * E / i_b**2`` with shares ``s_b >= 0`` summing to one, and
    currents range over ``[1 + epsilon, 6]``. Each refinement rebuilds a grid
    of ``resolution`` points per axis on a box of two coarse steps around
    the incumbent. Points violating a latency cap are discarded.

    ``coarse`` is set when a grid neighbour of the final point differs from
    it by more than 1% in MSE, i.e. the grid is too coarse to trust.
    """
    if not 1 <= bits <= MAX_ORACLE_BITS:
        raise ValueError(
            f"grid search is limited to 1..{MAX_ORACLE_BITS} bits (cost grows as "
            f"resolution**(2B-1)); got {bits}"
        )
    if resolution < 3:
        raise ValueError("resolution must be at least 3")
    dev = dev or DeviceParams()
    E = budget.energy
    cap = math.inf if budget.latency_cap is None else float(budget.latency_cap)
    lower = np.array([1.0 + budget.epsilon] * bits + [0.0] * (bits - 1))
    upper = np.array([MAX_ORACLE_CURRENT] * bits + [1.0] * (bits - 1))

    lo, hi = lower.copy(), upper.copy()
    evaluations = 0
    best = None
    for _ in range(refinements + 1):
        axes = [np.linspace(lo[d], hi[d], resolution) for d in range(lo.size)]
        point, value, n = _grid_argmin(axes, bits, E, dev.c_prime, cap)
        evaluations += n
        if best is None or value <= best[1]:
            best = (point, value)
        step = (hi - lo) / (resolution - 1)
        lo = np.maximum(lower, best[0] - 2.0 * step)
        hi = np.minimum(upper, best[0] + 2.0 * step)

    point, value = best
    if not math.isfinite(value):
        raise ValueError("no feasible grid point; the latency cap is too tight for this budget")
    coarse = _is_coarse(point, value, step, lower, upper, bits, E, dev.c_prime, cap)
    _, t = _evaluate(point[None, :], bits, E, dev.c_prime, cap)
    sched = PulseSchedule.from_arrays(point[:bits], np.maximum(t[0], 0.0))
    return OracleResult(sched, value, coarse, evaluations)


def _is_coarse(point, value, step, lower, upper, bits, E, c_prime, cap):
    neighbours = []
    for d, sgn in itertools.product(range(point.size), (-1.0, 1.0)):
        q = point.copy()
        q[d] += sgn * step[d]
        if lower[d] <= q[d] <= upper[d]:
            neighbours.append(q)
    if not neighbours:
        return False
    vals, _ = _evaluate(np.array(neighbours), bits, E, c_prime, cap)
    vals = vals[np.isfinite(vals)]
    return bool(np.any(np.abs(vals - value) > 0.01 * value))
