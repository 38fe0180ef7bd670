"""Hecke, S_n and T_n relation checks for 4x4 T-matrices.

``T12 = T x 1`` and ``T23 = 1 x T`` act on (C^2)^{x3}. Relation residuals are
divided by ``max(1, |T|^3)`` (max-entry norm) so rescaled inputs compare
on the same footing.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import BothHoppingsZero, DegenerateTau, NotProportional, ZeroHopping
from .hamiltonian import TMatrix
from .linalg import TOL_IDENTITY, ResidualReport, residual

I2 = np.eye(2, dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)

HOPPING_ZERO = 1e-12
DOUBLE_ROOT_ULPS = 64

HECKE = "Hecke"
TN = "Tn"
SN = "Sn"
UNCLASSIFIED = "Unclassified"


def _mat(T):
    return T.t if isinstance(T, TMatrix) else np.asarray(T, dtype=np.complex128)


def _hops(T):
    if isinstance(T, TMatrix):
        return complex(T.m24), complex(T.m42)
    return 0j, 0j


def is_zero(value: complex) -> bool:
    return abs(value) <= HOPPING_ZERO


def _pair(t):
    return np.kron(t, I2), np.kron(I2, t)


def _scale(t, extra: float = 0.0) -> float:
    n = float(np.max(np.abs(t))) if t.size else 0.0
    return max(1.0, n**3, extra * n)


def check_hecke_system(T, tol: float = TOL_IDENTITY) -> dict:
    """Residuals of the three cubic relations that encode the braided YBE.

    Returns ``{"braid": ..., "left": ..., "right": ...}`` where ``braid`` is
    ``T12 T23 T12 - k T12 = T23 T12 T23 - k T23`` with ``k = m24 m42`` and
    ``left``/``right`` are ``T12^2 T23 = T12 T23^2`` and its mirror.
    """
    t = _mat(T)
    m24, m42 = _hops(T)
    k = m24 * m42
    if is_zero(k):
        raise ZeroHopping("the Hecke system needs m24*m42 != 0")
    a, b = _pair(t)
    s = _scale(t, abs(k))
    return {
        "braid": residual(a @ b @ a - k * a, b @ a @ b - k * b, tol, s),
        "left": residual(a @ a @ b, a @ b @ b, tol, s),
        "right": residual(b @ b @ a, b @ a @ a, tol, s),
    }


def check_Tn(T, tol: float = TOL_IDENTITY) -> ResidualReport:
    t = _mat(T)
    a, b = _pair(t)
    return residual(a @ b @ a + a @ b @ b, b @ a @ b + a @ a @ b, tol, _scale(t))


def check_Sn(T, tol: float = TOL_IDENTITY) -> ResidualReport:
    t = _mat(T)
    a, b = _pair(t)
    return residual(a @ b @ a + b @ b @ a, b @ a @ b + b @ a @ a, tol, _scale(t))


def check_braid(T, tol: float = TOL_IDENTITY) -> ResidualReport:
    """Constant braid relation ``X12 X23 X12 = X23 X12 X23``."""
    t = _mat(T)
    a, b = _pair(t)
    return residual(a @ b @ a, b @ a @ b, tol, _scale(t))


def compute_mu(T, tol: float = TOL_IDENTITY) -> complex:
    """The coefficient ``mu`` with ``T^2 = mu T``."""
    t = _mat(T)
    norm = float(np.max(np.abs(t)))
    if norm == 0.0:
        return 0j
    t2 = t @ t
    tr = np.trace(t)
    if abs(tr) > 1e-8 * norm:
        mu = complex(np.trace(t2) / tr)
    else:
        k = np.unravel_index(np.argmax(np.abs(t)), t.shape)
        mu = complex(t2[k] / t[k])
    rep = residual(t2, mu * t, tol, max(norm**2, abs(mu) * norm))
    if not rep.passed:
        raise NotProportional(f"T^2 is not proportional to T (rel residual {rep.rel:.3e})")
    return mu


@dataclass(frozen=True)
class HeckeNormalization:
    """``T = tau * T_tilde + rho`` with ``T_tilde^2 = mu_tilde T_tilde + 1``."""

    mu: complex
    rho: complex
    tau: complex
    mu_tilde: complex
    t_tilde: np.ndarray = field(repr=False)
    m24m42: complex = 0j

    def invariants(self, tol: float = TOL_IDENTITY) -> dict:
        rho, mu, tau, k = self.rho, self.mu, self.tau, self.m24m42
        scale = max(1.0, abs(rho) ** 2, abs(mu * rho), abs(k))
        tt = self.t_tilde
        return {
            "rho_quadratic": residual(rho * rho - mu * rho + k, 0, tol, scale),
            "tau_squared": residual(tau * tau, k, tol, scale),
            "hecke_quadratic": residual(tt @ tt - self.mu_tilde * tt, I4, tol),
        }

    def as_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]  # noqa: E731
        return {"mu": c(self.mu), "rho": c(self.rho), "tau": c(self.tau), "mu_tilde": c(self.mu_tilde)}


def hecke_normalizations(T, tol: float = TOL_IDENTITY) -> list:
    """Both rho-root normalizations, canonical one first.

    The canonical root has the larger modulus (ties: larger real part);
    ``tau`` is the principal square root of ``m24 m42``.
    """
    t = _mat(T)
    m24, m42 = _hops(T)
    k = m24 * m42
    if is_zero(k):
        raise ZeroHopping("Hecke normalization needs m24*m42 != 0")
    mu = compute_mu(t, tol)
    tau = cmath.sqrt(k)
    if abs(tau) <= HOPPING_ZERO:
        raise DegenerateTau(f"tau vanishes for m24*m42 = {k}")
    # mu^2 - 4k vanishes quadratically in mu_tilde, so a discriminant within
    # rounding of zero cannot be told apart from a double root
    d2 = (mu - 2 * tau) * (mu + 2 * tau)
    if abs(d2) <= DOUBLE_ROOT_ULPS * np.finfo(float).eps * max(abs(mu) ** 2, 4 * abs(k)):
        d2 = 0j
    disc = cmath.sqrt(d2)
    roots = sorted({(mu + disc) / 2, (mu - disc) / 2}, key=lambda r: (abs(r), r.real), reverse=True)
    if len(roots) == 1:
        roots = roots * 2
    out = []
    for rho in roots:
        mu_t = (mu - 2 * rho) / tau
        out.append(HeckeNormalization(mu, rho, tau, mu_t, (t - rho * I4) / tau, k))
    return out


def hecke_normalize(T, tol: float = TOL_IDENTITY) -> HeckeNormalization:
    return hecke_normalizations(T, tol)[0]


@dataclass(frozen=True)
class AlgebraClassification:
    case: str
    residuals: dict
    normalization: HeckeNormalization | None = None

    def as_dict(self) -> dict:
        out = {"case": self.case, "residuals": {k: v.as_dict() for k, v in self.residuals.items()}}
        if self.normalization is not None:
            out["normalization"] = self.normalization.as_dict()
        return out


def classify(T: TMatrix, tol: float = TOL_IDENTITY) -> AlgebraClassification:
    """Assign the algebra class according to which hopping amplitudes vanish."""
    t = _mat(T)
    m24, m42 = _hops(T)
    z24, z42 = is_zero(m24), is_zero(m42)
    if z24 and z42:
        raise BothHoppingsZero("m24 = m42 = 0: the energy does not depend on the rapidities")
    if not z24 and not z42:
        res = check_hecke_system(T, tol)
        try:
            mu = compute_mu(t, tol)
        except NotProportional:
            mu = None
        if mu is not None:
            res["T^2=mu*T"] = residual(t @ t, mu * t, tol, max(1.0, float(np.max(np.abs(t))) ** 2))
        if mu is None or not all(r.passed for r in res.values()):
            return AlgebraClassification(UNCLASSIFIED, res)
        return AlgebraClassification(HECKE, res, hecke_normalize(T, tol))
    if z24:
        rep = check_Tn(t, tol)
        return AlgebraClassification(TN if rep.passed else UNCLASSIFIED, {"Tn": rep})
    rep = check_Sn(t, tol)
    return AlgebraClassification(SN if rep.passed else UNCLASSIFIED, {"Sn": rep})
