"""Benchmark the RTT sampling kernel backends.

Times the numba-compiled loop against the pure-numpy fallback on the
same inputs and checks that both return bit-identical samples.  Run:

    python3 benchmarks/bench_kernels.py [--samples N] [--repeats R]
"""
import argparse
import time

import numpy as np

from minislot._kernels import available_backends, rtt_samples_backend
from minislot.rttmodel import connected_intervals
from minislot.schedule import DutyCycleSet, derive_slot_plan
from minislot.allocation import minmax_allocate


def build_inputs(n_samples: int, seed: int = 12345):
    """Kernel inputs for the busiest VSTA of a three-VSTA plan."""
    plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.375]), 12.5)
    schedule = minmax_allocate(plan).schedule
    intervals = connected_intervals(schedule, 1)
    starts = np.array([s for s, _ in intervals])
    ends = np.array([e for _, e in intervals])
    cum = np.cumsum(ends - starts)
    rng = np.random.default_rng(seed)
    offsets = rng.exponential(0.25 * float(cum[-1]), n_samples) % float(cum[-1])
    return starts, ends, cum, offsets, 35.0, schedule.period_ms


def time_backend(backend: str, inputs, repeats: int) -> float:
    starts, ends, cum, offsets, delay, period = inputs
    # warm up (triggers numba compilation on the first call)
    rtt_samples_backend(backend, starts, ends, cum, offsets, delay, period)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        rtt_samples_backend(backend, starts, ends, cum, offsets, delay, period)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    inputs = build_inputs(args.samples)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; {args.samples} samples, "
          f"best of {args.repeats} runs")

    timings = {}
    results = {}
    for backend in backends:
        timings[backend] = time_backend(backend, inputs, args.repeats)
        results[backend] = rtt_samples_backend(backend, *inputs)
        rate = args.samples / timings[backend] / 1e6
        print(f"  {backend:>6}: {timings[backend] * 1e3:8.2f} ms  ({rate:6.1f} Msamples/s)")

    if len(backends) == 2:
        a, b = (results[bk] for bk in backends)
        identical = bool(np.array_equal(a, b))
        speedup = timings["numpy"] / timings["numba"]
        print(f"  numba speedup over numpy: {speedup:.2f}x; bit-identical: {identical}")
        if not identical:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
