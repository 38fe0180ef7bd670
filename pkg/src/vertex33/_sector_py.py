"""Pure-Python sector Hamiltonian builder (fallback for ``_sector_ext``)."""
import numpy as np


def build_sector_matrix(configs, codes_sorted, order, h):
    """Matrix of the periodic chain built from ``h`` on a particle sector.

    ``configs`` holds one row of site labels (0, 1, 2) per basis state,
    ``codes_sorted`` the base-3 codes of the states in ascending order and
    ``order[k]`` the basis index of the state with the k-th smallest code.
    """
    n, L = configs.shape
    out = np.zeros((n, n), dtype=np.complex128)
    powers = [3 ** (L - 1 - k) for k in range(L)]
    columns = []
    for p in range(9):
        rows = np.nonzero(h[:, p])[0]
        columns.append([(int(q), complex(h[q, p])) for q in rows])
    codes = codes_sorted.tolist()
    order = order.tolist()
    for j in range(n):
        c = configs[j].tolist()
        code = sum(ci * pw for ci, pw in zip(c, powers))
        for left in range(L):
            right = (left + 1) % L
            a, b = c[left], c[right]
            for q, val in columns[3 * a + b]:
                qa, qb = divmod(q, 3)
                new = code + (qa - a) * powers[left] + (qb - b) * powers[right]
                out[order[_bisect(codes, new)], j] += val
    return out


def _bisect(codes, key):
    lo, hi = 0, len(codes)
    while lo < hi:
        mid = (lo + hi) // 2
        if codes[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo == len(codes) or codes[lo] != key:
        raise KeyError(f"state code {key} leaves the sector")
    return lo
