"""Numerical kernels: principal-branch Lambert W and monotone bisection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SolverError",
    "BracketError",
    "ConvergenceError",
    "BisectionConfig",
    "lambert_w0",
    "lambert_w0_log",
    "lambert_w0_log_array",
    "bisect_monotone",
]

_HALLEY_MAX_ITER = 50


class SolverError(RuntimeError):
    """Base class for numerical solver failures."""


class BracketError(SolverError):
    """No sign-changing bracket could be found."""


class ConvergenceError(SolverError):
    """The iteration budget ran out before the tolerance was met."""


@dataclass(frozen=True)
class BisectionConfig:
    abs_tol: float = 1e-10
    max_iter: int = 200
    bracket_growth: float = 2.0
    max_expansions: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function on ``x >= 0``.

    Solves ``w * exp(w) = x`` by Halley iteration, starting from
    ``log(1 + x)`` for ``x <= e`` and ``log(x) - log(log(x))`` above.

    >>> lambert_w0(0.0)
    0.0
    >>> round(lambert_w0(math.e), 12)
    1.0
    """
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"lambert_w0 is defined here for finite x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x > math.e:
        # w*e^w = x is better conditioned in log form for large x.
        return lambert_w0_log(math.log(x))
    w = math.log1p(x)
    for _ in range(_HALLEY_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 4e-16 * max(1.0, abs(w)):
            break
    return w


def lambert_w0_log(log_x: float) -> float:
    """``W(exp(log_x))`` without forming ``exp(log_x)``.

    Used when the argument of W would overflow a double. For ``log_x > 1``
    Halley iteration runs on ``w + log(w) = log_x``.
    """
    log_x = float(log_x)
    if math.isnan(log_x) or log_x == math.inf:
        raise ValueError(f"log-argument must be finite, got {log_x!r}")
    if log_x <= 1.0:
        return lambert_w0(math.exp(log_x))
    w = log_x - math.log(log_x)
    for _ in range(_HALLEY_MAX_ITER):
        g = w + math.log(w) - log_x
        g1 = 1.0 + 1.0 / w
        g2 = -1.0 / (w * w)
        step = 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2)
        w -= step
        if abs(step) <= 4e-16 * max(1.0, abs(w)):
            break
    return w


def lambert_w0_log_array(log_x) -> np.ndarray:
    """Elementwise :func:`lambert_w0_log`; ``-inf`` maps to 0.

    Word widths are small, so a scalar loop beats vectorized Halley steps.
    """
    flat = np.asarray(log_x, dtype=float)
    out = [0.0 if v == -math.inf else lambert_w0_log(v) for v in flat.ravel().tolist()]
    return np.array(out, dtype=float).reshape(flat.shape)


def bisect_monotone(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    cfg: BisectionConfig = BisectionConfig(),
    increasing: bool = True,
    fprime: Callable[[float], float] | None = None,
) -> float:
    """Find ``x`` with ``|f(x) - target| <= cfg.abs_tol`` for monotone ``f``.

    ``[lo, hi]`` is the initial bracket. If it does not straddle the target
    it is widened geometrically, on the side that is short, up to
    ``cfg.max_expansions`` times.

    With ``fprime`` the bracket is shrunk by Newton steps whenever they land
    inside it and at least halve the residual, and by plain halving
    otherwise, so the bracketing guarantee of bisection is kept.

    Raises
    ------
    BracketError
        If no straddling bracket was found.
    ConvergenceError
        If ``cfg.max_iter`` steps did not meet the tolerance.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    sign = 1.0 if increasing else -1.0

    def resid(x):
        return sign * (f(x) - target)

    r_lo, r_hi = resid(lo), resid(hi)
    width = hi - lo
    expansions = 0
    while r_lo > 0 or r_hi < 0:
        if expansions >= cfg.max_expansions:
            raise BracketError(
                f"no bracket for target {target!r} after {expansions} expansions "
                f"(last [{lo!r}, {hi!r}])"
            )
        width *= cfg.bracket_growth
        if r_lo > 0:
            hi, r_hi = lo, r_lo
            lo -= width
            r_lo = resid(lo)
        else:
            lo, r_lo = hi, r_hi
            hi += width
            r_hi = resid(hi)
        expansions += 1

    if abs(r_lo) <= cfg.abs_tol:
        return lo
    if abs(r_hi) <= cfg.abs_tol:
        return hi

    x = 0.5 * (lo + hi)
    r_prev = math.inf
    last_newton = False
    for _ in range(cfg.max_iter):
        r = resid(x)
        if abs(r) <= cfg.abs_tol:
            return x
        if r < 0:
            lo = x
        else:
            hi = x
        nxt = 0.5 * (lo + hi)
        stalled = last_newton and abs(r) > 0.5 * abs(r_prev)
        last_newton = False
        if fprime is not None and not stalled:
            d = sign * fprime(x)
            if d > 0 and lo < x - r / d < hi:
                nxt = x - r / d
                last_newton = True
        r_prev = r
        if nxt <= lo or nxt >= hi:
            break
        x = nxt
    raise ConvergenceError(
        f"bisection stalled at [{lo!r}, {hi!r}] without meeting tolerance {cfg.abs_tol!r}"
    )
