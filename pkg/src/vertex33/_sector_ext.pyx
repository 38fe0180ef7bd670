# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sector Hamiltonian builder."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _bisect(const cnp.int64_t[::1] codes, cnp.int64_t key) nogil:
    cdef Py_ssize_t lo = 0, hi = codes.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if codes[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo == codes.shape[0] or codes[lo] != key:
        return -1
    return lo


def build_sector_matrix(configs, codes_sorted, order, h):
    """Matrix of the periodic chain built from ``h`` on a particle sector.

    Same contract as the pure-Python version in ``_sector_py``.
    """
    cdef cnp.int8_t[:, ::1] cfg = np.ascontiguousarray(configs, dtype=np.int8)
    cdef const cnp.int64_t[::1] codes = np.ascontiguousarray(codes_sorted, dtype=np.int64)
    cdef const cnp.int64_t[::1] idx = np.ascontiguousarray(order, dtype=np.int64)
    hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef Py_ssize_t n = cfg.shape[0], L = cfg.shape[1]
    out_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    # column-compressed nonzeros of h
    cdef cnp.int64_t[::1] ptr = np.zeros(10, dtype=np.int64)
    rows_l, vals_l = [], []
    for col in range(9):
        nz = np.nonzero(hh[:, col])[0]
        rows_l.extend(nz.tolist())
        vals_l.extend(hh[nz, col].tolist())
        ptr[col + 1] = len(rows_l)
    cdef cnp.int64_t[::1] rows = np.asarray(rows_l, dtype=np.int64).reshape(-1)
    cdef double complex[::1] vals = np.asarray(vals_l, dtype=np.complex128).reshape(-1)
    cdef cnp.int64_t[::1] powers = np.array([3 ** (L - 1 - k) for k in range(L)], dtype=np.int64)

    cdef Py_ssize_t j, left, right, k, pos
    cdef int a, b, q, qa, qb, p
    cdef cnp.int64_t code, new
    with nogil:
        for j in range(n):
            code = 0
            for k in range(L):
                code = code + cfg[j, k] * powers[k]
            for left in range(L):
                right = left + 1
                if right == L:
                    right = 0
                a = cfg[j, left]
                b = cfg[j, right]
                p = 3 * a + b
                for k in range(ptr[p], ptr[p + 1]):
                    q = <int>rows[k]
                    qa = q // 3
                    qb = q - 3 * qa
                    new = code + (qa - a) * powers[left] + (qb - b) * powers[right]
                    pos = _bisect(codes, new)
                    if pos < 0:
                        with gil:
                            raise KeyError(f"state code {new} leaves the sector")
                    out[idx[pos], j] += vals[k]
    return out_arr
