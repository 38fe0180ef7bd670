"""Reshetikhin criterion ``[h12 + h23, [h12, h23]] = A23 - A12`` by least squares."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .catalog import PERM4
from .hamiltonian import LocalHamiltonian33, build_from_T
from .linalg import commutator, lstsq

log = logging.getLogger(__name__)

I3 = np.eye(3, dtype=np.complex128)

HOLDS_TOL = 1e-10
FAILS_TOL = 1e-6


@lru_cache(maxsize=1)
def _difference_map() -> np.ndarray:
    """729 x 81 matrix of ``vec(A) -> vec(1 x A - A x 1)`` (row-major vec)."""
    cols = []
    for k in range(81):
        e = np.zeros(81, dtype=np.complex128)
        e[k] = 1
        a = e.reshape(9, 9)
        cols.append((np.kron(I3, a) - np.kron(a, I3)).ravel())
    return np.array(cols).T


@dataclass(frozen=True)
class ReshetikhinResult:
    residual: float
    a_matrix: np.ndarray = field(repr=False)
    lhs_norm: float = 0.0

    @property
    def holds(self) -> bool:
        return self.residual <= HOLDS_TOL

    @property
    def verdict(self) -> str:
        if self.residual <= HOLDS_TOL:
            return "holds"
        if self.residual <= FAILS_TOL:
            return "inconclusive"
        return "fails"

    def as_dict(self) -> dict:
        return {"residual": self.residual, "holds": self.holds, "verdict": self.verdict, "lhs_norm": self.lhs_norm}


def reshetikhin_lhs(h) -> np.ndarray:
    mat = h.matrix if isinstance(h, LocalHamiltonian33) else np.asarray(h, dtype=np.complex128)
    h12 = np.kron(mat, I3)
    h23 = np.kron(I3, mat)
    return commutator(h12 + h23, commutator(h12, h23))


def check_reshetikhin(h) -> ReshetikhinResult:
    """Best 9x9 ``A`` in the least-squares sense and the normalized residual."""
    lhs = reshetikhin_lhs(h)
    norm = float(np.linalg.norm(lhs))
    x, res = lstsq(_difference_map(), lhs.ravel())
    rel = res / norm if norm >= 1e-12 else res
    return ReshetikhinResult(float(rel), x.reshape(9, 9), norm)


def dilatation_scan(T, free: dict, lambdas) -> list:
    """Criterion for ``h`` rebuilt from ``lam * T`` over a grid of dilatations."""
    out = []
    t = T.t if hasattr(T, "t") else np.asarray(T)
    base = dict(free)
    if hasattr(T, "m24"):
        base.setdefault("m24", T.m24)
        base.setdefault("m42", T.m42)
    for lam in lambdas:
        h = build_from_T(lam * t, base)
        out.append((complex(lam), check_reshetikhin(h)))
    return out


ORBIT = {
    "T": lambda t: t,
    "P T P": lambda t: PERM4 @ t @ PERM4,
    "T^t1t2": lambda t: t.T,
    "P T^t1t2 P": lambda t: PERM4 @ t.T @ PERM4,
}


def orbit_scan(T, free: dict) -> dict:
    """Criterion for ``h`` rebuilt from each image of ``T`` under flip and transposition.

    Transposing T swaps the roles of m24 and m42, so the hoppings follow.
    A verdict other than "fails" is logged for inspection.
    """
    out = {}
    for name, move in ORBIT.items():
        base = dict(free)
        base["m24"], base["m42"] = (T.m42, T.m24) if "t1t2" in name else (T.m24, T.m42)
        res = check_reshetikhin(build_from_T(move(T.t), base))
        if res.verdict != "fails":
            log.warning("Reshetikhin criterion %s for %s (free %s)", res.verdict, name, free)
        out[name] = res
    return out
