"""Time the sector-matrix kernel with the compiled and pure-Python backends.

Usage: ``python3 benchmarks/bench_sector.py [--repeat N]``
"""
import argparse
import timeit

import numpy as np

from vertex33 import _sector_py
from vertex33.hamiltonian import PATTERN, SectorBasis

try:
    from vertex33 import _sector_ext
except ImportError:
    _sector_ext = None

CASES = ((8, 2), (8, 3), (10, 2), (10, 3), (12, 2))


def inputs(L, M, rng):
    basis = SectorBasis.build(L, M)
    codes = basis.codes()
    order = np.argsort(codes, kind="stable")
    h = np.where(PATTERN, rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)), 0)
    return basis.configs, codes[order], order.astype(np.int64), h


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'L':>3} {'M':>2} {'dim':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for L, M in CASES:
        data = inputs(L, M, rng)
        t_py = min(timeit.repeat(lambda: _sector_py.build_sector_matrix(*data), number=1, repeat=args.repeat))
        if _sector_ext is None:
            print(f"{L:>3} {M:>2} {len(data[0]):>6} {1e3 * t_py:>10.2f} {'n/a':>10} {'n/a':>8}")
            continue
        assert np.array_equal(_sector_ext.build_sector_matrix(*data), _sector_py.build_sector_matrix(*data))
        t_cy = min(timeit.repeat(lambda: _sector_ext.build_sector_matrix(*data), number=1, repeat=args.repeat))
        print(f"{L:>3} {M:>2} {len(data[0]):>6} {1e3 * t_py:>10.2f} {1e3 * t_cy:>10.2f} {t_py / t_cy:>8.1f}")


if __name__ == "__main__":
    main()
