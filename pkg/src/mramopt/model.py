"""Write-error model of a spin-transfer-torque MRAM cell and word-level metrics.

All quantities are normalized: the current ``i`` is in units of the critical
current and the duration ``t`` in units of the relaxation time.  Logarithms
and exponentials are natural throughout.

Bit positions are indexed LSB-first: ``b = 0`` is the least significant bit
and carries MSE weight ``4**0``; bit ``B - 1`` carries ``4**(B - 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DeviceParams",
    "WritePulse",
    "PulseSchedule",
    "write_failure_exact",
    "write_failure_proxy",
    "bit_error_probability",
    "failure_probabilities",
    "energy",
    "latency",
    "mse",
    "mse_terms",
    "psnr",
    "to_physical",
]

DEFAULT_DELTA = 60.0


@dataclass(frozen=True)
class DeviceParams:
    """Fabrication constants of the MTJ device.

    Parameters
    ----------
    delta : float
        Thermal stability factor (dimensionless, > 0).
    i_c : float, optional
        Critical current in amperes. Only used to report physical units.
    t_c : float, optional
        Characteristic relaxation time in seconds. Only used to report
        physical units.
    """

    delta: float = DEFAULT_DELTA
    i_c: float | None = None
    t_c: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"thermal stability must be positive, got {self.delta!r}")
        for name in ("i_c", "t_c"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive when given, got {value!r}")

    @property
    def c(self) -> float:
        """Proxy prefactor ``(pi**2 / 4) * delta``."""
        return (math.pi ** 2 / 4.0) * self.delta

    @property
    def c_prime(self) -> float:
        """MSE prefactor, half of :attr:`c` (random data flips half the failures)."""
        return self.c / 2.0


@dataclass(frozen=True)
class WritePulse:
    """Normalized write pulse for a single cell."""

    current: float
    duration: float

    def __post_init__(self):
        _check_pulse(self.current, self.duration)


@dataclass(frozen=True)
class PulseSchedule:
    """Per-bit write pulses of a B-bit word, LSB first."""

    pulses: tuple[WritePulse, ...]

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise ValueError("a schedule needs at least one bit")
        for p in self.pulses:
            if not isinstance(p, WritePulse):
                raise TypeError(f"expected WritePulse, got {type(p).__name__}")

    @classmethod
    def from_arrays(cls, currents: Iterable[float], durations: Iterable[float]) -> "PulseSchedule":
        currents = [float(x) for x in currents]
        durations = [float(x) for x in durations]
        if len(currents) != len(durations):
            raise ValueError("currents and durations differ in length")
        return cls(tuple(WritePulse(i, t) for i, t in zip(currents, durations)))

    @property
    def bits(self) -> int:
        return len(self.pulses)

    @property
    def currents(self) -> np.ndarray:
        return np.array([p.current for p in self.pulses], dtype=float)

    @property
    def durations(self) -> np.ndarray:
        return np.array([p.duration for p in self.pulses], dtype=float)

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    def __getitem__(self, b: int) -> WritePulse:
        return self.pulses[b]


def _check_pulse(current, duration):
    current = np.asarray(current, dtype=float)
    duration = np.asarray(duration, dtype=float)
    if np.any(~np.isfinite(current)) or np.any(current <= 1.0):
        raise ValueError("write current must be finite and strictly greater than 1")
    if np.any(np.isnan(duration)) or np.any(duration < 0.0):
        raise ValueError("write duration must be nonnegative")
    return current, duration


def _exact(current, duration, delta):
    i, t = _check_pulse(current, duration)
    # Rewritten with exp(-a) so large durations cannot overflow; i - exp(-a) >= i - 1 > 0.
    decay = np.exp(-2.0 * (i - 1.0) * t)
    x = (math.pi ** 2 / 4.0) * delta * (i - 1.0) * decay / (i - decay)
    return -np.expm1(-x)


def _proxy(current, duration, c):
    i, t = _check_pulse(current, duration)
    return c * np.exp(-2.0 * (i - 1.0) * t)


def write_failure_exact(pulse: WritePulse, dev: DeviceParams) -> float:
    """Probability that ``pulse`` fails to switch the cell.

    ``1 - exp(-delta*pi**2*(i-1) / (4*(i*exp(2*(i-1)*t) - 1)))``
    """
    return float(_exact(pulse.current, pulse.duration, dev.delta))


def write_failure_proxy(pulse: WritePulse, dev: DeviceParams) -> float:
    """Exponential proxy ``c * exp(-2*(i-1)*t)`` of the write-failure probability.

    Not clamped: values above 1 occur for short pulses.
    """
    return float(_proxy(pulse.current, pulse.duration, dev.c))


def bit_error_probability(pulse: WritePulse, dev: DeviceParams, clamp: bool = False) -> float:
    """Bit-error probability for random data, half the proxy failure probability.

    With ``clamp=True`` the value is capped at 1/2, which is what a simulator
    may actually draw from; analytic MSE paths use the unclamped value.
    """
    p = 0.5 * write_failure_proxy(pulse, dev)
    return min(p, 0.5) if clamp else p


def failure_probabilities(currents, durations, dev: DeviceParams, source: str = "exact") -> np.ndarray:
    """Vectorized per-bit write-failure probabilities.

    ``source`` is ``"exact"`` or ``"proxy"``; the proxy is returned unclamped.
    """
    if source == "exact":
        return np.asarray(_exact(currents, durations, dev.delta), dtype=float)
    if source == "proxy":
        return np.asarray(_proxy(currents, durations, dev.c), dtype=float)
    raise ValueError(f"unknown probability source {source!r}")


def energy(schedule: PulseSchedule) -> float:
    i, t = schedule.currents, schedule.durations
    return float(np.sum(i * i * t))


def latency(schedule: PulseSchedule) -> float:
    return float(np.max(schedule.durations))


def mse_terms(currents: Sequence[float], durations: Sequence[float], dev: DeviceParams) -> np.ndarray:
    """Per-bit contributions ``4**b * p(i_b, t_b)`` to the word MSE."""
    p = 0.5 * failure_probabilities(currents, durations, dev, source="proxy")
    weights = 4.0 ** np.arange(p.size)
    return weights * p


def mse(schedule: PulseSchedule, dev: DeviceParams) -> float:
    """Proxy MSE ``c' * sum_b 4**b * exp(-2*(i_b-1)*t_b)`` of a word write."""
    return float(np.sum(mse_terms(schedule.currents, schedule.durations, dev)))


def psnr(mse_value: float, bits: int) -> float:
    """Peak signal-to-noise ratio in dB for ``bits``-bit words; ``inf`` at zero MSE."""
    if mse_value < 0:
        raise ValueError("MSE must be nonnegative")
    if mse_value == 0:
        return math.inf
    peak = (2 ** bits - 1) ** 2
    return 10.0 * math.log10(peak / mse_value)


def to_physical(schedule: PulseSchedule, dev: DeviceParams) -> list[tuple[float, float]]:
    """Convert normalized pulses to (amperes, seconds) using ``dev.i_c`` and ``dev.t_c``."""
    if dev.i_c is None or dev.t_c is None:
        raise ValueError("physical units need both i_c and t_c")
    return [(p.current * dev.i_c, p.duration * dev.t_c) for p in schedule]
