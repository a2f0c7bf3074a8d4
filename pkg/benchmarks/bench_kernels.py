"""Time each dispatched kernel under both backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json results.json]

The numba column excludes compilation: every kernel is called once before
timing. Results are checked for agreement between backends before timing.
"""

import argparse
import json
import timeit

import numpy as np

from ncrand import _accel, kernels


def cases():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, 1 << 16).astype(np.uint8)
    a = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    b = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    cdf = np.sort(rng.random(200_000))
    values = rng.standard_normal(500_000)
    return {
        "lz78_parse (65536 bits)": (kernels.lz78_parse, (bits,)),
        "tensor_power_weights (n=20)": (kernels.tensor_power_weights, (np.array([0.9, 0.1]), 20)),
        "ks_statistic (2e5 points)": (kernels.ks_statistic, (cdf,)),
        "histogram_counts (5e5 values)": (kernels.histogram_counts, (values, -3.0, 3.0, 60)),
        "trace_of_product (256x256)": (kernels.trace_of_product, (a, b)),
        "low_weight_codes (n=24, w<=6)": (kernels.low_weight_codes, (24, 6)),
    }


def _same(x, y):
    if isinstance(x, tuple):
        return all(_same(p, q) for p, q in zip(x, y))
    return np.shape(x) == np.shape(y) and np.allclose(x, y)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="also write results here")
    args = p.parse_args(argv)

    rows = []
    for name, (fn, fargs) in cases().items():
        ref = fn.numpy_impl(*fargs)
        row = {"kernel": name, "numpy_s": min(timeit.repeat(lambda: fn.numpy_impl(*fargs), number=1, repeat=args.repeat))}
        if _accel.HAVE_NUMBA:
            got = fn.numba_impl(*fargs)  # compiles (or loads the cache)
            if not _same(got, ref):
                raise SystemExit(f"{name}: backends disagree")
            row["numba_s"] = min(timeit.repeat(lambda: fn.numba_impl(*fargs), number=1, repeat=args.repeat))
            row["speedup"] = row["numpy_s"] / row["numba_s"]
        rows.append(row)

    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'speedup':>8}")
    for r in rows:
        nb = f"{1e3 * r['numba_s']:11.3f}" if "numba_s" in r else f"{'n/a':>11}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'n/a':>8}"
        print(f"{r['kernel']:<{width}}  {1e3 * r['numpy_s']:11.3f}  {nb}  {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
