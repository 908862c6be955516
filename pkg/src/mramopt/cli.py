"""Command-line interface.

    mramopt optimize --bits 8 --energy 160
    mramopt sweep --bits 8 --energy-min 100 --energy-max 260 --energy-step 2
    mramopt simulate --schedule sched.json --samples 10000000 --seed 1
    mramopt oracle --bits 2 --energy 8

Exit codes: 0 on success, 1 on invalid input, 2 when ``optimize`` did not
converge (the report is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .duration_opt import DEFAULT_EPSILON, Budget
from .iwf import IwfConfig, OptimizationReport, optimize_word
from .model import DEFAULT_DELTA, DeviceParams, PulseSchedule, to_physical
from .numerics import SolverError
from .oracle import MAX_ORACLE_BITS, grid_search_word
from .simulate import SimConfig, load_raw_image, simulate_image, simulate_words
from .sweep import energy_sweep, psnr_energy_saving, write_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for non-convergence here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def report_to_dict(rep: OptimizationReport) -> dict:
    b = rep.budget
    d = {
        "bits": rep.schedule.bits,
        "energy_budget": b.energy,
        "latency_cap": b.latency_cap,
        "delta": rep.device.delta,
        "epsilon": b.epsilon,
        "pulses": [
            {"bit": k, "current": float(p.current), "duration": float(p.duration)}
            for k, p in enumerate(rep.schedule)
        ],
        "mse_analytic": rep.mse,
        "duals": {"nu_prime": rep.nu_prime, "mu": rep.mu},
        "iterations": rep.iterations,
        "converged": rep.converged,
        "mse_uniform": rep.uniform_mse,
        "reduction_ratio": rep.reduction_ratio,
        "mse_trace": list(rep.mse_trace),
    }
    dev = rep.device
    if dev.i_c is not None and dev.t_c is not None:
        d["physical"] = {
            "i_c": dev.i_c,
            "t_c": dev.t_c,
            "pulses": [
                {"bit": k, "current_amperes": amps, "duration_seconds": secs}
                for k, (amps, secs) in enumerate(to_physical(rep.schedule, dev))
            ],
        }
    return d


def schedule_from_dict(d: dict) -> tuple[PulseSchedule, DeviceParams]:
    """Rebuild the schedule and device of a report written by ``optimize``."""
    try:
        pulses = sorted(d["pulses"], key=lambda p: p["bit"])
        if [p["bit"] for p in pulses] != list(range(int(d["bits"]))):
            raise UsageError("schedule bits do not match the pulse list")
        sched = PulseSchedule.from_arrays(
            [p["current"] for p in pulses], [p["duration"] for p in pulses]
        )
        dev = DeviceParams(delta=float(d.get("delta", DEFAULT_DELTA)))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed schedule JSON: {exc!r}") from exc
    return sched, dev


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _start_current(text: str):
    parts = [float(x) for x in text.split(",")]
    return parts[0] if len(parts) == 1 else parts


def _budget(args) -> Budget:
    return Budget(args.energy, args.latency, args.epsilon)


def cmd_optimize(args) -> int:
    dev = DeviceParams(args.delta, args.ic, args.tc)
    cfg = IwfConfig(
        start_current=_start_current(args.start_current),
        rel_mse_tol=args.tol,
        max_iters=args.max_iters,
    )
    rep = optimize_word(args.bits, _budget(args), dev, cfg)
    if args.format == "json":
        text = _dump_json(report_to_dict(rep))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bit", "current", "duration"])
        for k, p in enumerate(rep.schedule):
            writer.writerow([k, repr(float(p.current)), repr(float(p.duration))])
        text = buf.getvalue()
    _emit(text, args.out)
    if not rep.converged:
        print(f"optimize: no convergence after {rep.iterations} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.energy_step <= 0 or args.energy_max < args.energy_min:
        raise UsageError("need energy-step > 0 and energy-max >= energy-min")
    n = int(math.floor((args.energy_max - args.energy_min) / args.energy_step + 1e-9)) + 1
    energies = args.energy_min + args.energy_step * np.arange(n)
    rows = energy_sweep(
        args.bits, energies, DeviceParams(args.delta), args.epsilon, args.latency
    )
    buf = io.StringIO()
    write_csv(rows, buf)
    _emit(buf.getvalue(), args.out)
    if args.psnr_target is not None:
        e_uni, e_opt, saving = psnr_energy_saving(rows, args.psnr_target)
        print(
            f"{args.psnr_target} dB reached at energy {e_uni:.4f} (uniform) and "
            f"{e_opt:.4f} (optimized): {100 * saving:.2f}% less energy",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    with open(args.schedule, encoding="utf-8") as fh:
        sched, dev = schedule_from_dict(json.load(fh))
    cfg = SimConfig(samples=args.samples, seed=args.seed, probability_source=args.source)
    if args.image:
        if args.width is None or args.height is None:
            raise UsageError("--image needs --width and --height")
        image = load_raw_image(args.image, args.width, args.height)
        stats = simulate_image(sched, dev, image, cfg)
    else:
        stats = simulate_words(sched, dev, cfg)
    _emit(_dump_json(stats.to_dict()), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if not 1 <= args.bits <= MAX_ORACLE_BITS:
        raise UsageError(
            f"oracle grid search supports 1..{MAX_ORACLE_BITS} bits, got {args.bits}"
        )
    dev = DeviceParams(args.delta)
    budget = _budget(args)
    found = grid_search_word(args.bits, budget, dev, args.resolution, args.refinements)
    rep = optimize_word(args.bits, budget, dev)
    out = {
        "bits": args.bits,
        "energy_budget": budget.energy,
        "latency_cap": budget.latency_cap,
        "oracle_mse": found.mse,
        "algorithm_mse": rep.mse,
        "relative_gap": (found.mse - rep.mse) / rep.mse,
        "oracle_coarse": found.coarse,
        "oracle_evaluations": found.evaluations,
        "oracle_pulses": [
            {"bit": k, "current": float(p.current), "duration": float(p.duration)}
            for k, p in enumerate(found.schedule)
        ],
        "algorithm_pulses": [
            {"bit": k, "current": float(p.current), "duration": float(p.duration)}
            for k, p in enumerate(rep.schedule)
        ],
    }
    _emit(_dump_json(out), args.out)
    return EXIT_OK


def _add_device_args(p, budget=True):
    if budget:
        p.add_argument("--bits", type=int, required=True, help="word width B")
        p.add_argument("--energy", type=float, required=True, help="normalized energy budget")
        p.add_argument("--latency", type=float, default=None, help="latency cap on every duration")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="thermal stability factor")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="current margin above 1")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mramopt", description="MRAM write-pulse optimization")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", help="optimize the write pulses of one word")
    _add_device_args(p)
    p.add_argument("--start-current", default="2", help="scalar or comma-separated per-bit list")
    p.add_argument("--tol", type=float, default=1e-10, help="relative MSE change to stop at")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--ic", type=float, default=None, help="critical current [A]")
    p.add_argument("--tc", type=float, default=None, help="relaxation time [s]")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="uniform vs optimized MSE/PSNR over a range of budgets")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--energy-min", type=float, required=True)
    p.add_argument("--energy-max", type=float, required=True)
    p.add_argument("--energy-step", type=float, required=True)
    p.add_argument("--latency", type=float, default=None)
    p.add_argument("--psnr-target", type=float, default=None,
                   help="also report the energies reaching this PSNR (on stderr)")
    _add_device_args(p, budget=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo fidelity of a saved schedule")
    p.add_argument("--schedule", required=True, help="JSON report written by optimize")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", choices=("exact", "proxy"), default="exact")
    p.add_argument("--image", default=None, help="headerless 8-bit grayscale file")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="compare the optimizer with a brute-force grid search")
    _add_device_args(p)
    p.add_argument("--resolution", type=int, default=15)
    p.add_argument("--refinements", type=int, default=8)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError, SolverError) as exc:
        print(f"mramopt {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
