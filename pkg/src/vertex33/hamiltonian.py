"""33-vertex local Hamiltonians, solvability constraints and chain operators.

Local basis ordering is |11>, |12>, |13>, |21>, ..., |33> with the first site
as the major index, so ``m[i, j]`` with 1-based ``i, j`` addresses the same
entry as the usual ``m_ij`` labels. Label 1 is an empty site, labels 2 and 3
are a particle in one of its two internal states.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConstraintsNotSatisfied, DimensionCapExceeded, PatternViolation
from .linalg import DEFAULT_EIG_CAP, DEFAULT_EMBED_CAP, embed_pair, kron

log = logging.getLogger(__name__)

Q_LOCAL = np.diag([0.0, 1.0, 1.0]).astype(np.complex128)

ONE_PARTICLE = (2, 3, 4, 7)
TWO_PARTICLE = (5, 6, 8, 9)

PATTERN = np.zeros((9, 9), dtype=bool)
PATTERN[0, 0] = True
for _block in (ONE_PARTICLE, TWO_PARTICLE):
    for _i in _block:
        for _j in _block:
            PATTERN[_i - 1, _j - 1] = True

STRICT_THRESHOLD = 1e-14
CONSTRAINT_TOL = 1e-12

# the nine relations, each as (name, coefficients on m_ij) summing to zero
RELATIONS = (
    ("m23+m47", {(2, 3): 1, (4, 7): 1}),
    ("m32+m74", {(3, 2): 1, (7, 4): 1}),
    ("m27", {(2, 7): 1}),
    ("m34", {(3, 4): 1}),
    ("m43", {(4, 3): 1}),
    ("m72", {(7, 2): 1}),
    ("m24-m37", {(2, 4): 1, (3, 7): -1}),
    ("m42-m73", {(4, 2): 1, (7, 3): -1}),
    ("(m22+m44)-(m33+m77)", {(2, 2): 1, (4, 4): 1, (3, 3): -1, (7, 7): -1}),
)

FREE_KEYS = ("m11", "m22", "m33", "m44", "m23", "m32", "m24", "m42")


@dataclass(frozen=True)
class LocalHamiltonian33:
    matrix: np.ndarray

    def m(self, i: int, j: int) -> complex:
        return complex(self.matrix[i - 1, j - 1])

    def __getitem__(self, key: str) -> complex:
        return self.m(int(key[1]), int(key[2]))

    def free_params(self) -> dict:
        return {k: self[k] for k in FREE_KEYS}

    def transpose(self) -> "LocalHamiltonian33":
        return LocalHamiltonian33(self.matrix.T.copy())


@dataclass(frozen=True)
class ConstraintReport:
    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(abs(v) <= self.tol for v in self.residuals.values())

    def failed_relations(self) -> list:
        return [k for k, v in self.residuals.items() if abs(v) > self.tol]

    def as_dict(self) -> dict:
        return {
            "residuals": {k: [v.real, v.imag] for k, v in self.residuals.items()},
            "tol": self.tol,
            "passed": self.passed,
            "failed": self.failed_relations(),
        }


@dataclass(frozen=True)
class TMatrix:
    """4x4 matrix on the two-particle block, rows/cols labelled 5, 6, 8, 9."""

    t: np.ndarray
    m24: complex = 0j
    m42: complex = 0j

    def with_matrix(self, t) -> "TMatrix":
        return TMatrix(np.asarray(t, dtype=np.complex128), self.m24, self.m42)

    def entry(self, i: int, j: int) -> complex:
        return complex(self.t[TWO_PARTICLE.index(i), TWO_PARTICLE.index(j)])


@dataclass(frozen=True)
class SectorBasis:
    L: int
    M: int
    configs: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, L: int, M: int) -> "SectorBasis":
        """Configurations ordered lexicographically by (positions, labels)."""
        if not 0 <= M <= L:
            raise ValueError(f"need 0 <= M <= L, got M={M}, L={L}")
        rows = []
        for xs in itertools.combinations(range(L), M):
            for ns in itertools.product((1, 2), repeat=M):
                row = [0] * L
                for x, n in zip(xs, ns):
                    row[x] = n
                rows.append(row)
        configs = np.array(rows, dtype=np.int8).reshape(len(rows), L)
        return cls(L, M, configs)

    def __len__(self) -> int:
        return self.configs.shape[0]

    def states(self):
        """Yield ``((x_1..x_M), (n_1..n_M))`` with 1-based positions and labels 2/3."""
        for row in self.configs:
            xs = tuple(int(k) + 1 for k in np.nonzero(row)[0])
            ns = tuple(int(row[x - 1]) + 1 for x in xs)
            yield xs, ns

    def codes(self) -> np.ndarray:
        powers = 3 ** np.arange(self.L - 1, -1, -1, dtype=np.int64)
        return self.configs.astype(np.int64) @ powers


def validate_pattern(raw) -> LocalHamiltonian33:
    raw = np.asarray(raw, dtype=np.complex128)
    if raw.shape != (9, 9):
        raise ValueError(f"local Hamiltonian must be 9x9, got {raw.shape}")
    off = np.abs(np.where(PATTERN, 0, raw))
    bad = np.argwhere(off > STRICT_THRESHOLD)
    if bad.size:
        raise PatternViolation([(int(i) + 1, int(j) + 1) for i, j in bad])
    if off.any():
        log.warning("off-pattern entries below %.0e set to zero", STRICT_THRESHOLD)
    return LocalHamiltonian33(np.where(PATTERN, raw, 0))


def check_cba_constraints(h: LocalHamiltonian33, tol: float = CONSTRAINT_TOL) -> ConstraintReport:
    res = {}
    for name, coeffs in RELATIONS:
        res[name] = sum(c * h.m(i, j) for (i, j), c in coeffs.items())
    return ConstraintReport(res, tol)


def _require_constraints(h, tol):
    report = check_cba_constraints(h, tol)
    if not report.passed:
        raise ConstraintsNotSatisfied(report)


def _t_offsets(m):
    """Shift between h and T on the two-particle block, as a 4x4 array.

    ``t = h_block - offsets``; the offsets collect every term of the
    extraction formulas that is not the h entry itself.
    """
    m11, m22, m33, m44, m77 = m(1, 1), m(2, 2), m(3, 3), m(4, 4), m(7, 7)
    m23, m32 = m(2, 3), m(3, 2)
    return np.array(
        [
            [m22 + m44 - m11, m23, -m23, 0],
            [m32, m33 + m44 - m11, 0, -m23],
            [-m32, 0, m22 + m77 - m11, m23],
            [0, -m32, m32, m33 + m77 - m11],
        ],
        dtype=np.complex128,
    )


def extract_T(h: LocalHamiltonian33, tol: float = CONSTRAINT_TOL) -> TMatrix:
    _require_constraints(h, tol)
    idx = [i - 1 for i in TWO_PARTICLE]
    block = h.matrix[np.ix_(idx, idx)]
    return TMatrix(block - _t_offsets(h.m), h.m(2, 4), h.m(4, 2))


def decompose(h: LocalHamiltonian33, tol: float = CONSTRAINT_TOL):
    """Split ``h`` into ``(h_tilde, T9, m11)`` with ``h = h_tilde + T9 + m11*I``."""
    T = extract_T(h, tol)
    m11 = h.m(1, 1)
    t9 = np.zeros((9, 9), dtype=np.complex128)
    idx = [i - 1 for i in TWO_PARTICLE]
    t9[np.ix_(idx, idx)] = T.t
    h_tilde = h.matrix - t9 - m11 * np.eye(9)
    return h_tilde, t9, m11


def build_from_T(T, free: dict) -> LocalHamiltonian33:
    """Assemble the local Hamiltonian from ``T`` and the free entries.

    ``free`` supplies any of m11, m22, m33, m44, m23, m32, m24, m42 (missing
    keys are zero). When ``T`` is a :class:`TMatrix` its hopping amplitudes
    are the defaults for m24/m42. m77 is always derived.
    """
    unknown = set(free) - set(FREE_KEYS)
    if unknown:
        raise KeyError(f"unknown free parameters {sorted(unknown)}")
    t = T.t if isinstance(T, TMatrix) else np.asarray(T, dtype=np.complex128)
    vals = {k: 0j for k in FREE_KEYS}
    if isinstance(T, TMatrix):
        vals["m24"], vals["m42"] = T.m24, T.m42
    vals.update({k: complex(v) for k, v in free.items()})
    m11, m22, m33, m44 = vals["m11"], vals["m22"], vals["m33"], vals["m44"]
    m23, m32, m24, m42 = vals["m23"], vals["m32"], vals["m24"], vals["m42"]
    m77 = m22 + m44 - m33

    h = np.zeros((9, 9), dtype=np.complex128)

    def put(i, j, v):
        h[i - 1, j - 1] = v

    put(1, 1, m11)
    put(2, 2, m22), put(2, 3, m23), put(2, 4, m24)
    put(3, 2, m32), put(3, 3, m33), put(3, 7, m24)
    put(4, 2, m42), put(4, 4, m44), put(4, 7, -m23)
    put(7, 3, m42), put(7, 4, -m32), put(7, 7, m77)

    def m(i, j):
        return h[i - 1, j - 1]

    idx = [i - 1 for i in TWO_PARTICLE]
    h[np.ix_(idx, idx)] = t + _t_offsets(m)
    return LocalHamiltonian33(h)


def build_charge(L: int, cap: int = DEFAULT_EMBED_CAP) -> np.ndarray:
    if 3**L > cap:
        raise DimensionCapExceeded(f"3^{L} exceeds cap {cap}")
    labels = np.zeros(1)
    for _ in range(L):
        labels = np.add.outer(labels, np.diag(Q_LOCAL).real).ravel()
    return np.diag(labels).astype(np.complex128)


def build_chain(h, L: int, cap: int = DEFAULT_EMBED_CAP) -> np.ndarray:
    """Full periodic-chain Hamiltonian on (C^3)^L."""
    mat = h.matrix if isinstance(h, LocalHamiltonian33) else np.asarray(h, dtype=np.complex128)
    if L == 1:
        raise ValueError("a periodic chain needs at least two sites")
    return sum(embed_pair(mat, site, L, 3, cap) for site in range(1, L + 1))


def apply_chain(h, L: int, psi) -> np.ndarray:
    """Act with the periodic-chain Hamiltonian on a state vector without building it."""
    mat = h.matrix if isinstance(h, LocalHamiltonian33) else np.asarray(h, dtype=np.complex128)
    op = mat.reshape(3, 3, 3, 3)
    psi = np.asarray(psi, dtype=np.complex128).reshape((3,) * L)
    out = np.zeros_like(psi)
    for left in range(L):
        right = (left + 1) % L
        moved = np.moveaxis(psi, (left, right), (0, 1))
        acted = np.tensordot(op, moved, axes=([2, 3], [0, 1]))
        out += np.moveaxis(acted, (0, 1), (left, right))
    return out.reshape(-1)


def product_state(labels) -> np.ndarray:
    """Tensor product of local basis vectors; ``labels`` uses 1, 2, 3."""
    vec = np.ones(1, dtype=np.complex128)
    for lab in labels:
        e = np.zeros(3, dtype=np.complex128)
        e[lab - 1] = 1
        vec = np.kron(vec, e)
    return vec


def sector_dimension(L: int, M: int) -> int:
    return math.comb(L, M) * 2**M


def sector_hamiltonian(h: LocalHamiltonian33, L: int, M: int, cap: int = DEFAULT_EIG_CAP):
    """Basis and matrix of the chain Hamiltonian restricted to M particles."""
    dim = sector_dimension(L, M)
    if dim > cap:
        raise DimensionCapExceeded(f"sector (L={L}, M={M}) has dimension {dim} > cap {cap}")
    basis = SectorBasis.build(L, M)
    codes = basis.codes()
    order = np.argsort(codes, kind="stable")
    mat = kernels.build_sector_matrix(basis.configs, codes[order], order.astype(np.int64), h.matrix)
    return basis, mat


def pair_charge() -> np.ndarray:
    """Two-site charge ``q x 1 + 1 x q``; every pattern-valid ``h`` commutes with it."""
    return kron(Q_LOCAL, np.eye(3)) + kron(np.eye(3), Q_LOCAL)
