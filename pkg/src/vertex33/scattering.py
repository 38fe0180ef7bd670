"""Two-parameter S-matrix, braided Yang-Baxter checks and transfer matrices.

``Lambda(z1, z2) = T - (m42 z1 + m24 / z2)``,
``S_check(z1, z2) = -(z2/z1) Lambda(z1, z2) Lambda(z2, z1)^{-1}`` and
``S = P S_check``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .algebras import compute_mu, is_zero
from .catalog import PERM4
from .errors import DegenerateChangeOfVariable, InvalidParameters, NotProportional, SingularLambda, ZeroRapidity
from .hamiltonian import TMatrix
from .linalg import TOL_IDENTITY, ResidualReport, embed_two, residual

I2 = np.eye(2, dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)

RCOND_MIN = 1e-12
DET_MIN = 1e-10


@dataclass(frozen=True)
class ScatteringContext:
    t: np.ndarray
    m24: complex
    m42: complex

    @classmethod
    def from_T(cls, T: TMatrix) -> "ScatteringContext":
        return cls(np.asarray(T.t, dtype=np.complex128), complex(T.m24), complex(T.m42))

    def lam(self, z1, z2) -> np.ndarray:
        return self.t - (self.m42 * z1 + self.m24 / z2) * I4

    def lambda_det(self, z1, z2) -> complex:
        return complex(np.linalg.det(self.lam(z1, z2)))


def _check_z(*zs):
    for z in zs:
        if z == 0:
            raise ZeroRapidity("rapidities must be nonzero")


def s_check(ctx: ScatteringContext, z1, z2) -> np.ndarray:
    _check_z(z1, z2)
    num = ctx.lam(z1, z2)
    den = ctx.lam(z2, z1)
    rcond = 1.0 / np.linalg.cond(den)
    if not np.isfinite(rcond) or rcond < RCOND_MIN:
        raise SingularLambda(
            f"Lambda({z2}, {z1}) is singular (rcond {rcond:.2e})", complex(np.linalg.det(den)), rcond
        )
    return -(z2 / z1) * np.linalg.solve(den.T, num.T).T


def s_matrix(ctx: ScatteringContext, z1, z2) -> np.ndarray:
    return PERM4 @ s_check(ctx, z1, z2)


def check_unitarity(ctx, z1, z2, tol: float = TOL_IDENTITY) -> ResidualReport:
    return residual(s_check(ctx, z1, z2) @ s_check(ctx, z2, z1), I4, tol)


def check_regularity(ctx, z, tol: float = 1e-13) -> ResidualReport:
    return residual(s_matrix(ctx, z, z), -PERM4, tol)


def check_ybe(ctx, z1, z2, z3, tol: float = 1e-9) -> ResidualReport:
    def a(m):
        return np.kron(m, I2)

    def b(m):
        return np.kron(I2, m)

    lhs = a(s_check(ctx, z1, z2)) @ b(s_check(ctx, z1, z3)) @ a(s_check(ctx, z2, z3))
    rhs = b(s_check(ctx, z2, z3)) @ a(s_check(ctx, z1, z3)) @ b(s_check(ctx, z1, z2))
    return residual(lhs, rhs, tol)


def is_regular_point(ctx, zs, det_min: float = DET_MIN) -> bool:
    """True when every Lambda(zi, zj), i != j, is safely invertible."""
    for i, zi in enumerate(zs):
        if zi == 0:
            return False
        for j, zj in enumerate(zs):
            if i != j and abs(ctx.lambda_det(zi, zj)) < det_min:
                return False
    return True


def random_rapidities(ctx, rng, n: int, max_tries: int = 100):
    """Draw ``n`` rapidities (modulus in [0.5, 2]) away from the singular set of Lambda."""
    for _ in range(max_tries):
        r = rng.uniform(0.5, 2.0, n)
        zs = r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        zs = [complex(z) for z in zs]
        if is_regular_point(ctx, zs):
            return zs
    raise SingularLambda("could not sample regular rapidities")


def embed_s(ctx, x, y, a: int, b: int, n: int) -> np.ndarray:
    """``S_ab(x, y)`` on ``n`` factors.

    The first tensor factor of ``S = P S_check`` acts on space ``b``, so
    ``S_ab = S_check_ab P_ab`` with ``S_check``'s first factor on ``a``.
    This is the placement for which the braided Yang-Baxter equation of
    ``S_check`` implies the ordinary one for ``S_ab``; the other placement
    only agrees with it when ``P T P = T``.
    """
    return embed_two(s_matrix(ctx, x, y), b, a, n)


def transfer_matrix(ctx, z, zs) -> np.ndarray:
    """``tr_0 (S_10(z_1, z) ... S_M0(z_M, z))`` on (C^2)^M.

    The auxiliary space is stored as the last tensor factor.
    """
    M = len(zs)
    if M < 1:
        raise ValueError("need at least one rapidity")
    n = M + 1
    prod = np.eye(2**n, dtype=np.complex128)
    for j, zj in enumerate(zs):
        prod = prod @ embed_s(ctx, zj, z, j, M, n)
    dim = 2**M
    return np.einsum("iaja->ij", prod.reshape(dim, 2, dim, 2))


def bethe_product(ctx, zs, j: int) -> np.ndarray:
    """Ordered product ``S_{j+1,j} ... S_{M,j} S_{1,j} ... S_{j-1,j}`` (``j`` 0-based)."""
    M = len(zs)
    order = list(range(j + 1, M)) + list(range(0, j))
    out = np.eye(2**M, dtype=np.complex128)
    for k in order:
        out = out @ embed_s(ctx, zs[k], zs[j], k, j, M)
    return out


def check_transfer_commutes(ctx, x, y, zs, tol: float = 1e-9) -> ResidualReport:
    tx = transfer_matrix(ctx, x, zs)
    ty = transfer_matrix(ctx, y, zs)
    return residual(tx @ ty, ty @ tx, tol)


def change_of_variable(ctx, x, mu=None, delta_sign: int = 1, tol: float = 1e-12) -> complex:
    """``z = [mu (1 - x) + delta (1 + x)] / [2 m42 (1 - x)]`` with ``delta^2 = mu^2 - 4 m24 m42``."""
    if is_zero(ctx.m24) or is_zero(ctx.m42):
        raise InvalidParameters("the change of variable needs m24*m42 != 0")
    if mu is None:
        mu = compute_mu(ctx.t)
    d2 = mu * mu - 4 * ctx.m24 * ctx.m42
    if abs(d2) <= tol * max(abs(mu * mu), abs(4 * ctx.m24 * ctx.m42)):
        raise DegenerateChangeOfVariable(f"delta = 0 (mu = {mu}, m24 m42 = {ctx.m24 * ctx.m42})")
    if abs(1 - x) <= 1e-12:
        raise DegenerateChangeOfVariable("x = 1")
    delta = delta_sign * cmath.sqrt(d2)
    return (mu * (1 - x) + delta * (1 + x)) / (2 * ctx.m42 * (1 - x))


def _pivot(m):
    mag = np.abs(m).ravel()
    return int(np.flatnonzero(mag >= (1 - 1e-9) * mag.max())[0])


def check_ratio_dependence(ctx, x1, x2, c, delta_sign: int = 1, tol: float = 1e-9) -> ResidualReport:
    """Compare ``S_check(z(x1), z(x2))`` with ``S_check(z(c x1), z(c x2))`` up to normalisation.

    Only Hecke-type T (``T^2 = mu T``) admit the change of variable.
    """
    try:
        mu = compute_mu(ctx.t)
    except NotProportional as exc:
        raise InvalidParameters("ratio dependence needs T^2 = mu T") from exc
    za = [change_of_variable(ctx, x, mu, delta_sign) for x in (x1, x2)]
    zb = [change_of_variable(ctx, c * x, mu, delta_sign) for x in (x1, x2)]
    a = s_check(ctx, *za)
    b = s_check(ctx, *zb)
    k = _pivot(a)
    return residual(a / a.ravel()[k], b / b.ravel()[k], tol)


def dualize(ctx: ScatteringContext) -> ScatteringContext:
    """Context whose S_check is ``S_check^{t1 t2}(1/z2, 1/z1)`` of the original."""
    return ScatteringContext(ctx.t.T.copy(), ctx.m42, ctx.m24)


def sigma_check(ctx, z1, z2) -> np.ndarray:
    """Dual S-matrix evaluated directly from the original context."""
    return s_check(ctx, 1 / z2, 1 / z1).T
