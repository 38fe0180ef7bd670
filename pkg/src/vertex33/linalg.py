"""Dense complex linear algebra sized for 3-state chains.

Matrices are plain ``numpy`` complex arrays; LAPACK does the heavy lifting
(``zgeev`` for eigenvalues, ``zgelsd`` for least squares).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionCapExceeded, EigenNonConvergence

DEFAULT_EMBED_CAP = 3**10
DEFAULT_EIG_CAP = 2048

TOL_IDENTITY = 1e-10
TOL_EIGEN = 1e-8


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    rel: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel <= self.tol

    def as_dict(self) -> dict:
        return {"max_abs": self.max_abs, "rel": self.rel, "tol": self.tol, "passed": self.passed}


def _maxnorm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def residual(lhs, rhs, tol: float = TOL_IDENTITY, scale: float | None = None) -> ResidualReport:
    """Compare two arrays entrywise.

    ``rel`` divides the largest absolute difference by ``scale`` when given,
    otherwise by the larger max-entry norm of the operands.
    """
    diff = _maxnorm(np.asarray(lhs) - np.asarray(rhs))
    if scale is None:
        scale = max(_maxnorm(lhs), _maxnorm(rhs))
    rel = diff / scale if scale >= 1e-300 else diff
    return ResidualReport(diff, rel, tol)


def as_cmatrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(*factors) -> np.ndarray:
    return reduce(kron, factors)


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def cyclic_shift(L: int, d: int) -> np.ndarray:
    """Translation moving the content of site k+1 to site k (periodically).

    ``shift @ |s1 s2 ... sL> = |s2 ... sL s1>``.
    """
    n = d**L
    digits = np.indices((d,) * L).reshape(L, n)
    rolled = np.roll(digits, -1, axis=0)
    weights = d ** np.arange(L - 1, -1, -1)
    target = weights @ rolled
    shift = np.zeros((n, n), dtype=np.complex128)
    shift[target, np.arange(n)] = 1.0
    return shift


def embed_pair(op, site: int, L: int, d: int, cap: int = DEFAULT_EMBED_CAP) -> np.ndarray:
    """Embed a two-site operator on sites (site, site+1) of a periodic chain.

    Sites are numbered 1..L; ``site == L`` couples site L (first factor of
    ``op``) to site 1.
    """
    op = as_cmatrix(op)
    if op.shape != (d * d, d * d):
        raise ValueError(f"operator must be {d * d}x{d * d}, got {op.shape}")
    if not 1 <= site <= L or L < 2:
        raise ValueError(f"site {site} out of range for L={L}")
    if d**L > cap:
        raise DimensionCapExceeded(f"{d}^{L} = {d**L} exceeds cap {cap}")
    if site < L:
        return kron_all(np.eye(d ** (site - 1)), op, np.eye(d ** (L - site - 1)))
    shift = cyclic_shift(L, d)
    first = kron(op, np.eye(d ** (L - 2)))
    return shift @ first @ shift.conj().T


def embed_two(op, i: int, j: int, n: int, d: int = 2) -> np.ndarray:
    """Embed a two-factor operator on factors ``i`` and ``j`` (0-based) of ``n``.

    The first tensor factor of ``op`` acts on factor ``i``; ``i`` and ``j``
    need not be adjacent or ordered.
    """
    if i == j:
        raise ValueError("factors must differ")
    op = np.asarray(op, dtype=np.complex128).reshape(d, d, d, d)
    dim = d**n
    eye = np.eye(dim, dtype=np.complex128).reshape((d,) * n + (dim,))
    # contract op's input legs with factors i, j of the identity
    moved = np.moveaxis(eye, (i, j), (0, 1))
    out = np.tensordot(op, moved, axes=([2, 3], [0, 1]))
    out = np.moveaxis(out, (0, 1), (i, j))
    return out.reshape(dim, dim)


def sort_eigenvalues(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def eig_general(a, cap: int = DEFAULT_EIG_CAP) -> np.ndarray:
    """Eigenvalues of a general complex matrix, sorted by (real, imag)."""
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] > cap:
        raise DimensionCapExceeded(f"dimension {a.shape[0]} exceeds eigenvalue cap {cap}")
    try:
        values = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenNonConvergence(str(exc)) from exc
    return sort_eigenvalues(values)


def lstsq(a, b):
    """Minimum-norm least-squares solution and the 2-norm of its residual."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = float(np.linalg.norm(a @ x - b))
    return x, res


def pair_multisets(a, b):
    """Greedy nearest-neighbour pairing of ``a`` into ``b``.

    Returns a list of ``(i, j, distance)`` in order of increasing distance;
    each index is used at most once. Elements left over are unpaired.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.size == 0 or b.size == 0:
        return []
    dist = np.abs(a[:, None] - b[None, :])
    order = np.argsort(dist, axis=None, kind="stable")
    used_a = np.zeros(a.size, bool)
    used_b = np.zeros(b.size, bool)
    pairs = []
    for flat in order:
        i, j = divmod(int(flat), b.size)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        pairs.append((i, j, float(dist[i, j])))
        if len(pairs) == min(a.size, b.size):
            break
    return pairs


def multiset_distance(a, b) -> float:
    """Largest pairing distance between equal-size multisets (inf if sizes differ)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size != b.size:
        return float("inf")
    pairs = pair_multisets(a, b)
    return max((p[2] for p in pairs), default=0.0)
