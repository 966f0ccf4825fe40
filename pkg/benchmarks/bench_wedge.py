"""Time the wedge-invariant kernels: numba, pure numpy, and the dense Kronecker route.

    python3 benchmarks/bench_wedge.py [--repeat 5] [--json out.json]

The numba kernel is compiled once before timing. Setting ``WEDGEPROB_NUMBA=0``
only changes the library default; this script always times every path
explicitly (numba is skipped if it is not installed).
"""

import argparse
import json
import time

import numpy as np

from wedgeprob._accel import HAVE_NUMBA, USE_NUMBA
from wedgeprob.sampling import SeededRng, sample_haar_tuple
from wedgeprob.wedge import DENSE_MAX_SIDE, wedge_restricted

CASES = [(4, 4, 2), (6, 6, 3), (5, 5, 4), (8, 8, 3), (6, 6, 5), (10, 10, 4)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_case(n, m, r, repeat):
    comps = sample_haar_tuple(n, m, r, SeededRng(0)).components
    row = {"n": n, "m": m, "r": r}
    ref = wedge_restricted(comps, use_numba=False)
    row["shape"] = list(ref.shape)
    row["numpy_s"] = best_of(lambda: wedge_restricted(comps, use_numba=False), repeat)
    if HAVE_NUMBA:
        got = wedge_restricted(comps, use_numba=True)
        row["numba_max_diff"] = float(np.max(np.abs(got - ref))) if ref.size else 0.0
        row["numba_s"] = best_of(lambda: wedge_restricted(comps, use_numba=True), repeat)
    if max(m, n) ** r <= DENSE_MAX_SIDE:
        row["dense_s"] = best_of(lambda: wedge_restricted(comps, method="dense"), max(1, repeat // 2))
    return row


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json")
    args = p.parse_args(argv)
    if HAVE_NUMBA:
        warm = sample_haar_tuple(2, 2, 2, SeededRng(1)).components
        wedge_restricted(warm, use_numba=True)
    rows = [bench_case(n, m, r, args.repeat) for n, m, r in CASES]
    print(f"numba installed: {HAVE_NUMBA}, library default uses numba: {USE_NUMBA}")
    print(f"{'(n,m,r)':>12} {'shape':>10} {'numba ms':>10} {'numpy ms':>10} {'dense ms':>10} {'speedup':>8}")
    for row in rows:
        def ms(key):
            return f"{1e3 * row[key]:10.3f}" if key in row else f"{'-':>10}"

        speed = f"{row['numpy_s'] / row['numba_s']:8.1f}" if "numba_s" in row else f"{'-':>8}"
        label = f"({row['n']},{row['m']},{row['r']})"
        shape = "x".join(map(str, row["shape"]))
        print(f"{label:>12} {shape:>10} {ms('numba_s')} {ms('numpy_s')} {ms('dense_s')} {speed}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
