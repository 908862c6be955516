"""Optimal per-bit write pulses for MRAM words under energy and latency budgets."""
from .current_opt import optimize_currents, stationarity_report
from .duration_opt import (
    Budget,
    cavefill_durations,
    water_level_report,
    waterfill_durations,
)
from .iwf import IwfConfig, OptimizationReport, optimize_word, uniform_baseline
from .model import (
    DeviceParams,
    PulseSchedule,
    WritePulse,
    energy,
    latency,
    mse,
    psnr,
    write_failure_exact,
    write_failure_proxy,
)
from .oracle import grid_search_single_bit, grid_search_word
from .simulate import FidelityStats, SimConfig, simulate_image, simulate_words
from .singlebit import optimize_single_bit

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "DeviceParams",
    "FidelityStats",
    "IwfConfig",
    "OptimizationReport",
    "PulseSchedule",
    "SimConfig",
    "WritePulse",
    "cavefill_durations",
    "energy",
    "grid_search_single_bit",
    "grid_search_word",
    "latency",
    "mse",
    "optimize_currents",
    "optimize_single_bit",
    "optimize_word",
    "psnr",
    "simulate_image",
    "simulate_words",
    "stationarity_report",
    "uniform_baseline",
    "water_level_report",
    "waterfill_durations",
    "write_failure_exact",
    "write_failure_proxy",
]
