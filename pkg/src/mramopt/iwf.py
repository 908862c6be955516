"""Iterative water-filling: alternating duration and current solves.

Each outer iteration first assigns durations for the current currents
(water-filling, or cave-filling under a latency cap) and then assigns
currents for those durations (Lambert W).  Both steps solve their convex
subproblem exactly, so the MSE never increases from one iteration to the
next.  The uniform pulse ``(2, E / (4B))`` on every bit is the reference the
reduction ratio is measured against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .current_opt import optimize_currents
from .duration_opt import Budget, DualSolveOutcome, cavefill_durations, waterfill_durations
from .model import DeviceParams, PulseSchedule, mse, mse_terms

__all__ = [
    "IwfConfig",
    "OptimizationReport",
    "optimize_word",
    "uniform_baseline",
    "closed_form_first_halfstep",
    "reduction_ratio_bound",
    "all_active_threshold",
]


@dataclass(frozen=True)
class IwfConfig:
    """Knobs of the outer loop.

    ``start_current`` is a scalar applied to every bit or one value per bit.
    The loop stops once the relative MSE change of an iteration is at most
    ``rel_mse_tol`` and no current moved by more than ``step_tol``.
    """

    start_current: float | Sequence[float] = 2.0
    rel_mse_tol: float = 1e-10
    max_iters: int = 1000
    use_latency_cap: bool = True
    step_tol: float = 1e-9

    def __post_init__(self):
        if not self.rel_mse_tol > 0 or not self.step_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def start_vector(self, bits: int, epsilon: float) -> np.ndarray:
        start = np.asarray(self.start_current, dtype=float)
        if start.ndim == 0:
            start = np.full(bits, float(start))
        if start.shape != (bits,):
            raise ValueError(f"start_current needs {bits} entries, got {start.size}")
        if np.any(start < 1.0 + epsilon):
            raise ValueError("start currents must be at least 1 + epsilon")
        return start


@dataclass
class OptimizationReport:
    schedule: PulseSchedule
    mse: float
    mse_trace: list[float]
    duals: list[tuple[float, float]]
    iterations: int
    converged: bool
    uniform_mse: float
    budget: Budget
    device: DeviceParams
    duration_outcome: DualSolveOutcome | None = None
    half_step_trace: list[float] = field(default_factory=list)

    @property
    def reduction_ratio(self) -> float:
        """Final MSE over the uniform-allocation MSE at the same budget."""
        return self.mse / self.uniform_mse

    @property
    def nu_prime(self) -> float:
        return self.duals[-1][0]

    @property
    def mu(self) -> float:
        return self.duals[-1][1]


def reduction_ratio_bound(bits: int) -> float:
    """Upper bound ``(3B/2) * 2**B / (4**B - 1)`` on the reduction ratio."""
    if bits < 1:
        raise ValueError("bits must be at least 1")
    return 1.5 * bits * 2.0 ** bits / (4.0 ** bits - 1.0)


def all_active_threshold(bits: int) -> float:
    """Budget ``2B(B-1) log 2`` above which uniform currents activate every bit."""
    return 2.0 * bits * (bits - 1) * math.log(2.0)


def uniform_baseline(bits: int, budget: Budget, dev: DeviceParams):
    """Same pulse ``(2, E / (4B))`` on every bit; the latency cap is not applied.

    Returns ``(schedule, mse)``.
    """
    if bits < 1:
        raise ValueError("bits must be at least 1")
    t = budget.energy / (4.0 * bits)
    sched = PulseSchedule.from_arrays([2.0] * bits, [t] * bits)
    return sched, mse(sched, dev)


def closed_form_first_halfstep(bits: int, budget: Budget, dev: DeviceParams):
    """Durations and MSE of the first duration step from currents ``(2, ..., 2)``.

    Valid when the budget exceeds :func:`all_active_threshold`, where every
    bit is active and ``t_b = E/(4B) + (b - (B-1)/2) log 2``; the MSE is then
    ``c' * B * 2**(B-1) * exp(-E/(2B))``.

    Raises
    ------
    ValueError
        If some bit would receive zero duration; use
        :func:`~mramopt.duration_opt.waterfill_durations` instead.
    """
    if bits < 1:
        raise ValueError("bits must be at least 1")
    E = budget.energy
    if not E > all_active_threshold(bits):
        raise ValueError(
            f"budget {E!r} does not exceed 2B(B-1)log2 = {all_active_threshold(bits)!r}; "
            "some bits are inactive, use waterfill_durations for the general case"
        )
    b = np.arange(bits)
    t = E / (4.0 * bits) + (b - (bits - 1) / 2.0) * math.log(2.0)
    value = dev.c_prime * bits * 2.0 ** (bits - 1) * math.exp(-E / (2.0 * bits))
    return t, value


def optimize_word(
    bits: int,
    budget: Budget,
    dev: DeviceParams | None = None,
    cfg: IwfConfig | None = None,
) -> OptimizationReport:
    """Minimize the word MSE over per-bit currents and durations.

    Non-convergence within ``cfg.max_iters`` is reported through
    ``converged=False``; the last iterate is still the best one seen.
    """
    dev = dev or DeviceParams()
    cfg = cfg or IwfConfig()
    if bits < 1:
        raise ValueError("bits must be at least 1")
    capped = cfg.use_latency_cap and budget.latency_cap is not None
    solve_durations = cavefill_durations if capped else waterfill_durations

    i = cfg.start_vector(bits, budget.epsilon)
    trace, half, duals = [], [], []
    converged = False
    outcome = None
    t = None
    prev = None
    for _ in range(cfg.max_iters):
        t, outcome = solve_durations(i, budget)
        m_half = float(np.sum(mse_terms(i, t, dev)))
        i_next, mu = optimize_currents(t, budget)
        m = float(np.sum(mse_terms(i_next, t, dev)))
        step = float(np.max(np.abs(i_next - i)))
        i = i_next
        half.append(m_half)
        trace.append(m)
        duals.append((outcome.dual_value, mu))
        ref = m_half if prev is None else prev
        if abs(ref - m) <= cfg.rel_mse_tol * ref and step <= cfg.step_tol:
            converged = True
            break
        prev = m

    sched = PulseSchedule.from_arrays(i, t)
    _, m_uniform = uniform_baseline(bits, budget, dev)
    return OptimizationReport(
        schedule=sched,
        mse=trace[-1],
        mse_trace=trace,
        duals=duals,
        iterations=len(trace),
        converged=converged,
        uniform_mse=m_uniform,
        budget=budget,
        device=dev,
        duration_outcome=outcome,
        half_step_trace=half,
    )
