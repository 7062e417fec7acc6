"""Compiled versus pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Times the generic permanent and a full symmetric-power sector with both
backends and prints the speed-up.  The compiled module must be built
(``pip install -e . --no-build-isolation``).
"""

import argparse
import timeit

import numpy as np

from passive_purify import _kernels_py
from passive_purify.fock import enumerate_sector
from passive_purify.interferometer import haar_unitary

try:
    from passive_purify import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    for n in (8, 12, 14):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        yield f"permanent {n}x{n}", lambda k, a=a: k.permanent(a)
    for modes, photons in ((4, 4), (2, 16), (6, 3)):
        u = haar_unitary(modes, 1)
        occ = np.array(enumerate_sector(modes, photons).states, dtype=np.int64)
        yield (f"sym_power m={modes} N={photons} ({len(occ)}x{len(occ)})",
               lambda k, u=u, occ=occ: k.sym_power_matrix(u, occ, occ))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built")
    print(f"{'case':<36}{'cython [s]':>12}{'python [s]':>12}{'speed-up':>10}")
    for name, fn in cases():
        tc = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        print(f"{name:<36}{tc:>12.4g}{tp:>12.4g}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
