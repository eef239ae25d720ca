"""Time the compiled and NumPy Mamdani table kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--resolution R ...]
"""

import argparse
import timeit

import numpy as np

from pixfuse import _pykernels
from pixfuse.fuzzy import default_system

try:
    from pixfuse import _ckernels
except ImportError:
    _ckernels = None


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--resolution", type=int, nargs="+", default=[257, 1001, 2001])
    args = parser.parse_args()

    backends = {"numpy": _pykernels.mamdani_table}
    if _ckernels is not None:
        backends["cython"] = _ckernels.mamdani_table
    else:
        print("compiled kernels not available; timing the NumPy fallback only")

    levels = np.arange(256.0)
    print(f"{'resolution':>10} {'backend':>8} {'best [s]':>10} {'speedup':>8}")
    for res in args.resolution:
        sys = default_system(res)
        call = (sys.input1.degrees(levels), sys.input2.degrees(levels), sys.encoded_rules,
                sys.output_samples, sys.grid, levels, levels)
        times = {}
        for name, fn in backends.items():
            times[name] = min(timeit.repeat(lambda: fn(*call), number=1, repeat=args.repeat))
        for name, t in times.items():
            print(f"{res:>10} {name:>8} {t:>10.4f} {times['numpy'] / t:>7.1f}x")
        if len(backends) == 2:
            diff = np.max(np.abs(backends["cython"](*call) - backends["numpy"](*call)))
            print(f"{'':>10} max |cython - numpy| = {diff:.2e}")


if __name__ == "__main__":
    main()
