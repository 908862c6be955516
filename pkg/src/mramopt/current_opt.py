"""Optimal write currents for fixed write durations.

Stationarity of the current subproblem gives, for every bit with positive
duration, ``mu = 4**b * exp(-2*t_b*(i_b - 1)) / i_b``.  Substituting
``z = 2*t_b*i_b`` turns this into ``z*exp(z) = 2*4**b*t_b*exp(2*t_b)/mu``,
solved by the principal Lambert W branch.  Bits whose solution would fall
below ``1 + epsilon`` are clamped there.  The energy budget fixes ``mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .duration_opt import Budget
from .numerics import BisectionConfig, bisect_monotone, lambert_w0_log_array

__all__ = ["optimize_currents", "currents_at", "stationarity_report", "Stationarity"]

_LOG4 = math.log(4.0)


@dataclass(frozen=True)
class Stationarity:
    bit: int
    status: str
    marginal: float
    residual: float


def currents_at(log_mu: float, durations, epsilon: float) -> np.ndarray:
    """Stationary currents for dual value ``exp(log_mu)``.

    Zero-duration bits get ``1 + epsilon``.
    """
    t = np.asarray(durations, dtype=float)
    active = t > 0
    i = np.full(t.size, 1.0 + epsilon)
    if not np.any(active):
        return i
    ta = t[active]
    b = np.flatnonzero(active)
    log_arg = np.log(2.0 * ta) + b * _LOG4 + 2.0 * ta - log_mu
    w = lambert_w0_log_array(log_arg)
    i[active] = np.maximum(w / (2.0 * ta), 1.0 + epsilon)
    return i


def optimize_currents(durations, budget: Budget):
    """Energy-constrained optimal currents for fixed durations.

    Returns
    -------
    (currents, mu) : (np.ndarray, float)
        Optimal currents, LSB first, and the energy dual variable.

    Raises
    ------
    ValueError
        If every duration is zero, or if the durations alone overspend the
        budget even at the minimum current ``1 + epsilon``.
    """
    t = np.asarray(durations, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(~np.isfinite(t)) or np.any(t < 0):
        raise ValueError("durations must be a nonempty vector of finite nonnegative values")
    active = t > 0
    if not np.any(active):
        raise ValueError("all durations are zero; no current can spend the energy budget")
    eps = budget.epsilon
    target = budget.energy
    tol = 1e-10 * max(1.0, target)

    def spent(log_mu):
        i = currents_at(log_mu, t, eps)
        return float(np.sum(i[active] ** 2 * t[active]))

    def slope(log_mu):
        return _energy_slope(currents_at(log_mu, t, eps), t, eps)

    b = np.flatnonzero(active)
    ta = t[active]
    hi = float(np.max(b * _LOG4 - 2.0 * ta * eps - math.log1p(eps)))
    floor = (1.0 + eps) ** 2 * float(np.sum(ta))
    if floor > target + tol:
        raise ValueError(
            f"durations need at least {floor!r} energy at minimum current, budget is {target!r}"
        )
    if floor >= target - tol:
        return currents_at(hi, t, eps), math.exp(hi)

    # Any single bit driven at sqrt(E/t_b) + 1 already overspends the budget.
    i_big = np.sqrt(target / ta) + 1.0
    lo = float(np.max(b * _LOG4 - 2.0 * ta * (i_big - 1.0) - np.log(i_big)))
    cfg = BisectionConfig(abs_tol=tol)
    log_mu = bisect_monotone(spent, target, lo, hi, cfg, increasing=False, fprime=slope)
    log_mu = _newton_polish(log_mu, spent, slope, target)
    return currents_at(log_mu, t, eps), math.exp(log_mu)


def _energy_slope(i, t, eps):
    """``d energy / d log mu``; each interior bit moves as ``-1 / (2 t_b + 1 / i_b)``."""
    interior = (t > 0) & (i > 1.0 + eps)
    ii, tt = i[interior], t[interior]
    return -float(np.sum(2.0 * ii * tt / (2.0 * tt + 1.0 / ii)))


def _newton_polish(log_mu, spent, slope, target, steps=3):
    # Drive the residual below the bisection tolerance; keep only improving steps.
    r = spent(log_mu) - target
    for _ in range(steps):
        d = slope(log_mu)
        if r == 0.0 or d == 0.0:
            break
        cand = log_mu - r / d
        r_cand = spent(cand) - target
        if abs(r_cand) >= abs(r):
            break
        log_mu, r = cand, r_cand
    return log_mu


def stationarity_report(currents, durations, mu: float, epsilon: float) -> list[Stationarity]:
    """Per-bit check of the current stationarity conditions.

    Zero-duration bits are omitted. For an interior bit ``residual`` is
    ``|mu - m_b| / mu`` with the marginal ``m_b = 4**b*exp(-2*t_b*(i_b-1))/i_b``;
    for a bit clamped at ``1 + epsilon`` it is the relative shortfall of
    ``mu`` below the clamp threshold (zero when the clamp is justified).
    """
    i = np.asarray(currents, dtype=float)
    t = np.asarray(durations, dtype=float)
    out = []
    for b in np.flatnonzero(t > 0):
        marginal = 4.0 ** b * math.exp(-2.0 * t[b] * (i[b] - 1.0)) / i[b]
        if i[b] <= (1.0 + epsilon) * (1.0 + 1e-12):
            threshold = 4.0 ** b * math.exp(-2.0 * t[b] * epsilon) / (1.0 + epsilon)
            out.append(Stationarity(int(b), "clamped", marginal, max(0.0, threshold - mu) / mu))
        else:
            out.append(Stationarity(int(b), "interior", marginal, abs(mu - marginal) / mu))
    return out
