"""Energy sweeps comparing uniform and optimized allocations."""
from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields

import numpy as np

from .duration_opt import DEFAULT_EPSILON, Budget
from .iwf import IwfConfig, optimize_word
from .model import DeviceParams, psnr

__all__ = ["SweepRow", "energy_sweep", "energy_at_psnr", "psnr_energy_saving", "write_csv"]


@dataclass(frozen=True)
class SweepRow:
    energy: float
    mse_uniform: float
    mse_opt: float
    psnr_uniform: float
    psnr_opt: float
    gamma: float
    iterations: int


def energy_sweep(
    bits: int,
    energies,
    dev: DeviceParams | None = None,
    epsilon: float = DEFAULT_EPSILON,
    latency_cap: float | None = None,
    cfg: IwfConfig | None = None,
) -> list[SweepRow]:
    """One optimized-vs-uniform comparison per budget, in the order given."""
    dev = dev or DeviceParams()
    rows = []
    for e in energies:
        rep = optimize_word(bits, Budget(float(e), latency_cap, epsilon), dev, cfg)
        rows.append(
            SweepRow(
                energy=float(e),
                mse_uniform=rep.uniform_mse,
                mse_opt=rep.mse,
                psnr_uniform=psnr(rep.uniform_mse, bits),
                psnr_opt=psnr(rep.mse, bits),
                gamma=rep.reduction_ratio,
                iterations=rep.iterations,
            )
        )
    return rows


def energy_at_psnr(energies, psnrs, target: float) -> float:
    """Budget at which a PSNR curve crosses ``target`` dB, by linear interpolation.

    PSNR must increase with energy and the sweep must bracket the target.
    """
    e = np.asarray(energies, dtype=float)
    q = np.asarray(psnrs, dtype=float)
    if np.any(np.diff(q) <= 0):
        raise ValueError("PSNR must increase strictly with energy")
    if not q[0] <= target <= q[-1]:
        raise ValueError(f"sweep PSNR range [{q[0]:.3f}, {q[-1]:.3f}] dB does not bracket {target} dB")
    return float(np.interp(target, q, e))


def psnr_energy_saving(rows: list[SweepRow], target_db: float = 40.0):
    """Energies needed by the uniform and optimized allocations to reach ``target_db``.

    Returns ``(energy_uniform, energy_opt, saving)`` with
    ``saving = 1 - energy_opt / energy_uniform``.
    """
    energies = [r.energy for r in rows]
    e_uni = energy_at_psnr(energies, [r.psnr_uniform for r in rows], target_db)
    e_opt = energy_at_psnr(energies, [r.psnr_opt for r in rows], target_db)
    return e_uni, e_opt, 1.0 - e_opt / e_uni


def write_csv(rows: list[SweepRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f.name for f in fields(SweepRow)])
    for row in rows:
        writer.writerow([repr(v) for v in astuple(row)])
