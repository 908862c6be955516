"""Optimal write pulse for a single bit under an energy budget."""
from __future__ import annotations

from .model import WritePulse


def optimize_single_bit(energy_budget: float) -> WritePulse:
    """Pulse minimizing the failure proxy subject to ``i**2 * t <= energy_budget``.

    On the energy shell ``t = E / i**2`` the exponent ``(i - 1) * t`` equals
    ``E * (i - 1) / i**2``, which peaks at ``i = 2``. Hence ``(2, E / 4)`` and a
    proxy of ``c * exp(-E / 2)``.
    """
    energy_budget = float(energy_budget)
    if not energy_budget > 0:
        raise ValueError(f"energy budget must be positive, got {energy_budget!r}")
    return WritePulse(2.0, energy_budget / 4.0)
