"""Optimal write durations for fixed write currents.

For fixed currents the duration subproblem is convex and its KKT point has a
water-filling structure in the log domain.  Each bit ``b`` has a ground level

    g_b = log(i_b**2 / (2 * 4**b * (i_b - 1)))

and a common water level ``L = log(nu')`` sets the water depth
``2 * (i_b - 1) * t_b = L - g_b`` of every bit whose ground lies below it.
A latency cap ``delta`` bounds each depth by ``2 * (i_b - 1) * delta``
(cave-filling).  ``L`` is found by bisection on the energy residual, which is
nondecreasing in ``L``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import BisectionConfig, bisect_monotone

__all__ = [
    "DEFAULT_EPSILON",
    "Budget",
    "DualSolveOutcome",
    "WaterLevel",
    "ground_levels",
    "waterfill_durations",
    "cavefill_durations",
    "water_level_report",
]

DEFAULT_EPSILON = 1e-3
_LOG2 = math.log(2.0)
_LOG4 = math.log(4.0)


@dataclass(frozen=True)
class Budget:
    """Resource budget of a word write.

    Parameters
    ----------
    energy : float
        Normalized energy cap ``sum_b i_b**2 * t_b <= energy``.
    latency_cap : float or None
        Optional cap on ``max_b t_b``.
    epsilon : float
        Current margin; every current satisfies ``i_b >= 1 + epsilon``.
    """

    energy: float
    latency_cap: float | None = None
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (math.isfinite(self.energy) and self.energy > 0):
            raise ValueError(f"energy budget must be positive and finite, got {self.energy!r}")
        if self.latency_cap is not None and not self.latency_cap > 0:
            raise ValueError(f"latency cap must be positive, got {self.latency_cap!r}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")

    @property
    def min_current(self) -> float:
        return 1.0 + self.epsilon


@dataclass(frozen=True)
class DualSolveOutcome:
    """Result of the water-level search.

    ``active_bits`` holds every bit with positive duration (capped bits
    included); ``capped_bits`` those sitting exactly at the latency cap.
    ``saturated`` is set when even all-capped durations cannot spend the
    budget, in which case ``residual`` is the unspent energy.
    """

    dual_value: float
    log_dual: float
    active_bits: frozenset
    capped_bits: frozenset
    residual: float
    saturated: bool = False


@dataclass(frozen=True)
class WaterLevel:
    bit: int
    ground: float
    depth: float
    level: float
    status: str
    residual: float


def ground_levels(currents) -> np.ndarray:
    """Ground level ``log(i_b**2 / (2 * 4**b * (i_b - 1)))`` of every bit."""
    i = np.asarray(currents, dtype=float)
    b = np.arange(i.size)
    return 2.0 * np.log(i) - _LOG2 - b * _LOG4 - np.log(i - 1.0)


def _check_currents(currents, epsilon):
    i = np.asarray(currents, dtype=float)
    if i.ndim != 1 or i.size == 0:
        raise ValueError("currents must be a nonempty vector")
    if np.any(~np.isfinite(i)) or np.any(i < (1.0 + epsilon) * (1.0 - 1e-15)):
        raise ValueError(f"every current must be at least 1 + epsilon = {1.0 + epsilon!r}")
    return i


def _durations_at(level, ground, slope, cap):
    depth = level - ground
    t = np.where(depth <= 0.0, 0.0, depth / slope)
    if math.isfinite(cap):
        t = np.where(depth >= slope * cap, cap, t)
    return t


def _fill(currents, energy_budget, cap):
    i = currents
    sq = i * i
    ground = ground_levels(i)
    slope = 2.0 * (i - 1.0)
    tol = 1e-10 * max(1.0, energy_budget)
    cfg = BisectionConfig(abs_tol=tol)

    def spent(t):
        return float(np.sum(sq * t))

    if math.isfinite(cap) and spent(np.full(i.size, cap)) <= energy_budget:
        t = np.full(i.size, cap)
        level = float(np.max(ground + slope * cap))
        bits = frozenset(range(i.size))
        return t, DualSolveOutcome(
            dual_value=math.exp(level),
            log_dual=level,
            active_bits=bits,
            capped_bits=bits,
            residual=energy_budget - spent(t),
            saturated=True,
        )

    lo = float(np.min(ground))
    hi = float(np.max(ground)) + energy_budget / float(np.sum(sq / slope))
    if math.isfinite(cap):
        hi = min(hi, float(np.max(ground + slope * cap)))
    def gain(x):
        t = _durations_at(x, ground, slope, cap)
        interior = (t > 0) & (t < cap)
        return float(np.sum(sq[interior] / slope[interior]))

    level = bisect_monotone(
        lambda x: spent(_durations_at(x, ground, slope, cap)), energy_budget, lo, hi, cfg,
        fprime=gain,
    )
    level = _polish(level, ground, slope, sq, cap, energy_budget)
    t = _durations_at(level, ground, slope, cap)
    return t, DualSolveOutcome(
        dual_value=math.exp(level),
        log_dual=level,
        active_bits=frozenset(int(b) for b in np.flatnonzero(t > 0)),
        capped_bits=frozenset(int(b) for b in np.flatnonzero(t == cap)),
        residual=abs(spent(t) - energy_budget),
    )


def _polish(level, ground, slope, sq, cap, energy_budget):
    """Solve the energy equation exactly once the active set is known.

    Energy is affine in the level on a fixed active set, so the bisection
    result is replaced by the exact root when the sets do not change.
    """
    t = _durations_at(level, ground, slope, cap)
    capped = t == cap
    interior = (t > 0) & ~capped
    if not np.any(interior):
        return level
    w = sq[interior] / slope[interior]
    fixed = float(np.sum(sq[capped])) * cap if np.any(capped) else 0.0
    exact = (energy_budget - fixed + float(np.sum(w * ground[interior]))) / float(np.sum(w))
    t_exact = _durations_at(exact, ground, slope, cap)
    same_sets = np.array_equal(t_exact == cap, capped) and np.array_equal(
        (t_exact > 0) & (t_exact != cap), interior
    )
    return exact if same_sets else level


def waterfill_durations(currents, budget: Budget):
    """Energy-constrained optimal durations without a latency cap.

    Any ``budget.latency_cap`` is ignored; see :func:`cavefill_durations`.

    Returns
    -------
    (durations, outcome) : (np.ndarray, DualSolveOutcome)
    """
    i = _check_currents(currents, budget.epsilon)
    return _fill(i, budget.energy, math.inf)


def cavefill_durations(currents, budget: Budget):
    """Optimal durations under both the energy budget and ``budget.latency_cap``.

    Each duration is 0, the cap, or the water-filling value. If the budget
    cannot be spent even with every bit at the cap, all bits are capped and
    the outcome is flagged ``saturated``. Without a cap this is
    :func:`waterfill_durations`.
    """
    i = _check_currents(currents, budget.epsilon)
    cap = math.inf if budget.latency_cap is None else float(budget.latency_cap)
    return _fill(i, budget.energy, cap)


def water_level_report(currents, durations, nu_prime=None, latency_cap=None) -> list[WaterLevel]:
    """Per-bit (ground, depth, level) diagnostics of a duration assignment.

    ``residual`` measures the violation of the bit's KKT case: for interior
    bits ``|level - ground - depth|``, for zero bits how far the level rises
    above the ground, for capped bits how far it falls short of the cave
    ceiling. When ``nu_prime`` is omitted the level is taken as the mean of
    ``ground + depth`` over interior bits.
    """
    i = np.asarray(currents, dtype=float)
    t = np.asarray(durations, dtype=float)
    ground = ground_levels(i)
    slope = 2.0 * (i - 1.0)
    depth = slope * t
    cap = math.inf if latency_cap is None else float(latency_cap)
    status = np.where(t == 0.0, "zero", np.where(t == cap, "capped", "interior"))
    if nu_prime is None:
        mask = status == "interior"
        if not np.any(mask):
            raise ValueError("cannot infer the water level without interior bits")
        level = float(np.mean(ground[mask] + depth[mask]))
    else:
        level = math.log(nu_prime)

    report = []
    for b in range(i.size):
        if status[b] == "zero":
            resid = max(0.0, level - ground[b])
        elif status[b] == "capped":
            resid = max(0.0, ground[b] + slope[b] * cap - level)
        else:
            resid = abs(level - ground[b] - depth[b])
        report.append(
            WaterLevel(b, float(ground[b]), float(depth[b]), level, str(status[b]), float(resid))
        )
    return report
