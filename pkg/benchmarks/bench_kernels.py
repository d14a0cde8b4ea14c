"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--curve 21A4] [--primes 200000] [--coeffs 500000]

Each kernel runs on both backends with identical inputs; the outputs must
agree before any timing is reported.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import time

import numpy as np

from falsetate import kernels
from falsetate.elliptic import frobenius_traces, parse_curve
from falsetate.lseries import _series_sum, curve_series, kernel_table
from falsetate.numerics import primes_upto


def _timed(fn, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--curve", default="21A4")
    parser.add_argument("--primes", type=int, default=200_000, help="trace primes below this bound")
    parser.add_argument("--coeffs", type=int, default=500_000, help="number of Dirichlet coefficients")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    E = parse_curve(args.curve)
    primes = primes_upto(args.primes)
    series = curve_series(E, 1)
    table = kernel_table("W", series.d)

    def traces():
        return frobenius_traces(E, primes)

    def coeffs():
        return dataclasses.replace(series, _cache={}).coefficients(args.coeffs)

    # the sum reuses one coefficient array so only the kernel is timed; the scale
    # puts the last coefficient at the end of the kernel's range, as for a
    # conductor large enough to need all of them
    a = coeffs()
    scale = math.exp(table.u0 + table.h * table.cheb.shape[0]) / args.coeffs

    def ksum():
        return _series_sum(a, scale, 1, table)

    cases = [("traces", traces), ("coefficients", coeffs), ("kernel_sum", ksum)]
    available = ["python"]
    try:
        kernels.backend_module("cython")
        available.insert(0, "cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    original = kernels.BACKEND
    results: dict[str, dict[str, tuple[float, object]]] = {}
    try:
        for name in available:
            kernels.set_backend(name)
            # the coefficient builder calls the trace kernel, so both are switched together
            results[name] = {case: _timed(fn, args.repeat) for case, fn in cases}
    finally:
        kernels.set_backend(original)

    print(f"{args.curve}: {len(primes)} primes, {args.coeffs} coefficients, best of {args.repeat}")
    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in available) + ("     speedup" if len(available) == 2 else ""))
    for case, _ in cases:
        row = f"{case:<14}" + "".join(f"{results[b][case][0]:>11.3f}s" for b in available)
        if len(available) == 2:
            outs = [results[b][case][1] for b in available]
            if case == "kernel_sum":
                agree = abs(outs[0][0] - outs[1][0]) <= 1e-12 * max(1.0, abs(outs[1][0]))
            else:
                agree = np.array_equal(outs[0], outs[1])
            if not agree:
                raise SystemExit(f"backends disagree on {case}")
            row += f"{results['python'][case][0] / results['cython'][case][0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
