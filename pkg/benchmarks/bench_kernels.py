"""Time the numba and numpy kernel flavours on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N] [--minutes M] [--json]

Each case checks that both flavours agree before timing.  Numba timings
exclude the first (compiling) call.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from vadwindow import _kernels
from vadwindow.hysteresis import candidate_pairs


def cases(minutes, seed=0):
    rng = np.random.default_rng(seed)
    n = int(minutes * 60 * 16000)
    samples = rng.integers(-32768, 32768, n, dtype=np.int16)
    native = 800  # 50 ms at 16 kHz
    starts = np.arange(0, n - native + 1, native, dtype=np.int64)

    windows = len(starts)
    scores = rng.random(windows)
    labels = rng.random(windows) < 0.3
    offsets = np.linspace(0, windows, 11).astype(np.int64)  # ten clips
    pairs = candidate_pairs(0.05)
    lows = np.array([p[0] for p in pairs])
    highs = np.array([p[1] for p in pairs])

    yield "block_mean_square", (samples, starts, native)
    yield "hysteresis_scan", (scores, 0.3, 0.7)
    yield "hysteresis_confusion", (scores, labels, offsets, lows, highs)


def bench(minutes, repeat):
    rows = []
    for name, args in cases(minutes):
        fn_np = getattr(_kernels, f"{name}_numpy")
        fn_nb = getattr(_kernels, f"{name}_numba", None) if _kernels.HAVE_NUMBA else None
        ref = fn_np(*args)
        row = {"kernel": name, "numpy_s": min(timeit.repeat(lambda: fn_np(*args), number=1, repeat=repeat))}
        if fn_nb is not None:
            if not np.array_equal(fn_nb(*args), ref):
                raise SystemExit(f"{name}: numba and numpy flavours disagree")
            row["numba_s"] = min(timeit.repeat(lambda: fn_nb(*args), number=1, repeat=repeat))
            row["speedup"] = row["numpy_s"] / row["numba_s"]
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--minutes", type=float, default=10.0, help="audio length the inputs represent")
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args(argv)
    rows = bench(args.minutes, args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'kernel':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for r in rows:
        nb = f"{r['numba_s'] * 1e3:12.2f}" if "numba_s" in r else f"{'n/a':>12}"
        sp = f"{r['speedup']:9.1f}x" if "speedup" in r else f"{'':>10}"
        print(f"{r['kernel']:<22}{r['numpy_s'] * 1e3:12.2f}{nb}{sp}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
