"""Monte Carlo write-fidelity simulation.

Every bit of a written value is flipped independently with probability
``p_b = min(p_WF(i_b, t_b) / 2, 1/2)``, the bit-error probability for random
data. Squared errors of the integer values are accumulated exactly in
Python integers, so results do not depend on batching or merge order.

Randomness comes from Philox, a counter-based generator: batch ``j`` uses
key ``seed`` and a counter starting at ``j``, so any batch can be
regenerated on its own.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import DeviceParams, PulseSchedule, failure_probabilities, mse, psnr

__all__ = [
    "SimConfig",
    "FidelityStats",
    "bit_error_probabilities",
    "simulate_words",
    "simulate_image",
    "load_raw_image",
]

BATCH_SIZE = 1 << 16
MAX_BITS = 16


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings.

    ``samples`` counts words for :func:`simulate_words` and passes over the
    whole image for :func:`simulate_image`. ``probability_source`` selects
    the exact write-failure formula or its exponential proxy.
    """

    samples: int
    seed: int = 0
    probability_source: str = "exact"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.probability_source not in ("exact", "proxy"):
            raise ValueError(f"unknown probability source {self.probability_source!r}")


@dataclass(frozen=True)
class FidelityStats:
    empirical_mse: float
    analytic_mse: float
    std_error: float
    psnr_empirical: float
    psnr_analytic: float
    samples_used: int
    model_mse: float
    bits: int
    probability_source: str

    def to_dict(self) -> dict:
        # JSON has no infinity; PSNR of an error-free channel is written as "inf".
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, float) and math.isinf(v):
                d[k] = "inf" if v > 0 else "-inf"
        return d


def bit_error_probabilities(schedule: PulseSchedule, dev: DeviceParams, source: str = "exact") -> np.ndarray:
    """Per-bit flip probabilities used by the simulator, capped at 1/2."""
    p = 0.5 * failure_probabilities(schedule.currents, schedule.durations, dev, source)
    return np.minimum(p, 0.5)


class _Accumulator:
    """Exact running (count, sum, sum of squares) of integer squared errors."""

    def __init__(self):
        self.count = 0
        self.total = 0
        self.total_sq = 0

    def add(self, sq_err: np.ndarray):
        self.count += int(sq_err.size)
        values, counts = np.unique(sq_err, return_counts=True)
        for v, c in zip(values.tolist(), counts.tolist()):
            self.total += c * v
            self.total_sq += c * v * v

    def mean(self) -> float:
        return self.total / self.count

    def std_error(self) -> float:
        n = self.count
        if n < 2:
            return math.nan
        var = (n * self.total_sq - self.total * self.total) / (n * (n - 1))
        return math.sqrt(var / n)


def _rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, batch, 0]))


def _flip_masks(rng, n, p):
    weights = np.left_shift(np.int64(1), np.arange(p.size, dtype=np.int64))
    flips = rng.random((n, p.size)) < p
    return flips.astype(np.int64) @ weights


def _stats(acc, schedule, dev, p, source):
    bits = schedule.bits
    analytic = mse(schedule, dev)
    emp = acc.mean()
    return FidelityStats(
        empirical_mse=emp,
        analytic_mse=analytic,
        std_error=acc.std_error(),
        psnr_empirical=psnr(emp, bits),
        psnr_analytic=psnr(analytic, bits),
        samples_used=acc.count,
        model_mse=float(np.sum(4.0 ** np.arange(bits) * p)),
        bits=bits,
        probability_source=source,
    )


def simulate_words(schedule: PulseSchedule, dev: DeviceParams, cfg: SimConfig) -> FidelityStats:
    """Write ``cfg.samples`` uniformly random words through the noisy channel.

    ``analytic_mse`` is the proxy MSE of ``schedule``; ``model_mse`` is
    ``sum_b 4**b * p_b`` with the probabilities actually simulated, which the
    empirical MSE estimates without bias for uniform data.
    """
    bits = schedule.bits
    if bits > MAX_BITS:
        raise ValueError(f"at most {MAX_BITS} bits are supported, got {bits}")
    p = bit_error_probabilities(schedule, dev, cfg.probability_source)
    acc = _Accumulator()
    n_batches = -(-cfg.samples // BATCH_SIZE)
    for j in range(n_batches):
        n = min(BATCH_SIZE, cfg.samples - j * BATCH_SIZE)
        rng = _rng(cfg.seed, j)
        words = rng.integers(0, 1 << bits, size=n, dtype=np.int64)
        err = (words ^ _flip_masks(rng, n, p)) - words
        acc.add(err * err)
    return _stats(acc, schedule, dev, p, cfg.probability_source)


def simulate_image(schedule: PulseSchedule, dev: DeviceParams, image, cfg: SimConfig) -> FidelityStats:
    """Write every pixel of an 8-bit grayscale image ``cfg.samples`` times.

    ``image`` is a bytes-like object or a ``uint8`` array. Note that the
    analytic MSE assumes uniform random data; image statistics make the
    cross terms between bit positions nonzero.
    """
    if schedule.bits != 8:
        raise ValueError(f"images hold 8-bit pixels, schedule has {schedule.bits} bits")
    if isinstance(image, (bytes, bytearray, memoryview)):
        pixels = np.frombuffer(image, dtype=np.uint8)
    else:
        pixels = np.asarray(image)
        if pixels.dtype != np.uint8:
            raise ValueError(f"image must be uint8, got {pixels.dtype}")
    pixels = pixels.ravel().astype(np.int64)
    if pixels.size == 0:
        raise ValueError("image is empty")
    p = bit_error_probabilities(schedule, dev, cfg.probability_source)
    acc = _Accumulator()
    per_pass = -(-pixels.size // BATCH_SIZE)
    for s in range(cfg.samples):
        for k in range(per_pass):
            chunk = pixels[k * BATCH_SIZE:(k + 1) * BATCH_SIZE]
            rng = _rng(cfg.seed, s * per_pass + k)
            err = (chunk ^ _flip_masks(rng, chunk.size, p)) - chunk
            acc.add(err * err)
    return _stats(acc, schedule, dev, p, cfg.probability_source)


def load_raw_image(path, width: int, height: int) -> np.ndarray:
    """Read a headerless 8-bit grayscale file of ``width * height`` bytes."""
    data = np.fromfile(path, dtype=np.uint8)
    if data.size != width * height:
        raise ValueError(f"{path}: expected {width * height} bytes, found {data.size}")
    return data.reshape(height, width)
