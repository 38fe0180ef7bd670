"""Catalog of solvable T-matrices and their gauge transformations.

Hecke families are stored through their normalized form ``T_tilde``
(``T_tilde^2 = mu_tilde T_tilde + 1``) and mapped to ``T = tau T_tilde + rho``
for given hopping amplitudes. S_n families are stored verbatim; the T_n
families are their transposes.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebras import HECKE, SN, TN, is_zero
from .errors import DegenerateX, InvalidParameters, SingularG
from .hamiltonian import TMatrix

PERM4 = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)


def _nonzero(params, *names):
    for n in names:
        if abs(params[n]) < 1e-300:
            raise InvalidParameters(f"parameter {n} must be nonzero")


def _eps(params):
    eps = params.get("eps", 1)
    if eps not in (1, -1):
        raise InvalidParameters(f"eps must be +1 or -1, got {eps!r}")
    return eps


def _h11(p):
    th, e = p["theta"], _eps(p)
    s, c = cmath.sinh(th), cmath.cosh(th)
    return [[s + e, 0, 0, s], [0, s, c, 0], [0, c, s, 0], [s, 0, 0, s - e]]


def _h12(p):
    _nonzero(p, "a")
    a, b = p["a"], p["b"]
    return [[a, 0, 0, b], [0, 0, 1 / a, 0], [0, a, a - 1 / a, 0], [0, 0, 0, -1 / a]]


def _h13(p):
    a, b, e = p["a"], p["b"], _eps(p)
    m = np.array([[1, b, -b, a * b], [0, 0, 1, -a], [0, 1, 0, a], [0, 0, 0, 1]], dtype=np.complex128)
    return e * m


def _h21(p):
    _nonzero(p, "a", "b")
    a, b, e = p["a"], p["b"], _eps(p)
    return [[a, 0, 0, 0], [0, 0, 1 / b, 0], [0, b, a - 1 / a, 0], [0, 0, 0, e * a**e]]


def _h14(p):
    _nonzero(p, "a")
    a, e = p["a"], _eps(p)
    anti = np.array([[0, 0, 0, a], [0, 0, e, 0], [0, e, 0, 0], [1 / a, 0, 0, 0]], dtype=np.complex128)
    # braided form: the bare antidiagonal matrix does not satisfy the braid relation
    return PERM4 @ anti


def _h03(p):
    return I4


def _t1(p):
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    return [[0, 0, 0, 0], [b, c, 0, 0], [d, 0, 0, 0], [0, a, 0, 0]]


def _t2(p):
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    return [[0, b, c, d], [0, 0, 0, a], [0, 0, 0, b + c - a], [0, 0, 0, 0]]


def _t3(p):
    _nonzero(p, "c")
    a, b, c = p["a"], p["b"], p["c"]
    return [[0, 0, 0, 0], [b, a * b / c, 0, 0], [c, 0, a, 0], [0, 0, 0, 0]]


def _t4(p):
    a, b, c = p["a"], p["b"], p["c"]
    return [[0, 0, 0, 0], [0, b, 0, 0], [0, c, 0, 0], [0, 0, 0, a]]


def _t5(p):
    a, b, c = p["a"], p["b"], p["c"]
    return [[a, 0, 0, 0], [0, b, 0, 0], [0, 0, c, 0], [0, 0, 0, 0]]


def _t6(p):
    a, b, c = p["a"], p["b"], p["c"]
    return [[0, 0, 0, 0], [b, c, 0, a], [0, 0, 0, 0], [0, -b, b, 0]]


def _t7(p):
    a, b = p["a"], p["b"]
    return [[-a, 0, 0, 0], [b, 0, a, 0], [0, 0, -a, 0], [0, 0, 0, 0]]


def _mu_h11(p):
    # exp(theta) = 2 p^2, q = eps / (2 p); mu_tilde = 2 (p^2 - q^2)
    pp = cmath.sqrt(cmath.exp(p["theta"]) / 2)
    qq = _eps(p) / (2 * pp)
    return 2 * (pp * pp - qq * qq)


def _mu_h12(p):
    # a = p, q = 1/a; mu_tilde = p - q
    pp = p["a"]
    return pp - 1 / pp


def _mu_h21(p):
    # a = k^2, k p = b, k^2 p q = 1; mu_tilde = k^2 - p q
    k = cmath.sqrt(p["a"])
    pp = p["b"] / k
    qq = 1 / (k * k * pp)
    return k * k - pp * qq


def _mu_zero(p):
    return 0j


@dataclass(frozen=True)
class Family:
    family_id: str
    case: str
    params: tuple
    form: Callable = field(repr=False)
    table_mu_tilde: Callable | None = field(default=None, repr=False)
    discrete: tuple = ()

    def matrix(self, params: dict) -> np.ndarray:
        missing = [n for n in self.params if n not in params]
        if missing:
            raise InvalidParameters(f"{self.family_id}: missing parameters {missing}")
        return np.asarray(self.form(params), dtype=np.complex128)


HECKE_FAMILIES = (
    Family("T_H11", HECKE, ("theta", "eps"), _h11, _mu_h11, ("eps",)),
    Family("T_H12", HECKE, ("a", "b"), _h12, _mu_h12),
    Family("T_H13", HECKE, ("a", "b", "eps"), _h13, _mu_zero, ("eps",)),
    Family("T_H21_H22", HECKE, ("a", "b", "eps"), _h21, _mu_h21, ("eps",)),
    Family("T_H14", HECKE, ("a", "eps"), _h14, _mu_zero, ("eps",)),
    Family("T_H03", HECKE, (), _h03, _mu_zero),
)

SN_FAMILIES = (
    Family("T_1", SN, ("a", "b", "c", "d"), _t1),
    Family("T_2", SN, ("a", "b", "c", "d"), _t2),
    Family("T_3", SN, ("a", "b", "c"), _t3),
    Family("T_4", SN, ("a", "b", "c"), _t4),
    Family("T_5", SN, ("a", "b", "c"), _t5),
    Family("T_6", SN, ("a", "b", "c"), _t6),
    Family("T_7", SN, ("a", "b"), _t7),
)

TN_FAMILIES = tuple(
    Family(f.family_id + "t", TN, f.params, (lambda g: lambda p: np.asarray(g(p)).T)(f.form))
    for f in SN_FAMILIES
)

FAMILIES = {f.family_id: f for f in HECKE_FAMILIES + SN_FAMILIES + TN_FAMILIES}


def family(family_id: str) -> Family:
    try:
        return FAMILIES[family_id]
    except KeyError:
        raise InvalidParameters(f"unknown family {family_id!r}") from None


@dataclass(frozen=True)
class HeckeBranch:
    """Branch data for ``T = tau T_tilde + rho``.

    ``x`` solves ``x^2 + mu_tilde x - 1 = 0`` and ``-x`` is the eigenvalue of
    ``T_tilde`` on the kernel of ``T``; ``tau^2 = m24 m42``, ``rho = tau x``
    and ``mu = tau (x + 1/x)``.
    """

    x: complex
    mu: complex
    rho: complex
    tau: complex
    x_branch: int
    tau_sign: int


def solve_x_mu(mu_tilde: complex, m24: complex, m42: complex) -> list:
    """All four (x, mu, rho, tau) quadruples, ordered by (x_branch, tau_sign)."""
    k = complex(m24) * complex(m42)
    if is_zero(k):
        raise DegenerateX("m24*m42 must be nonzero")
    disc = cmath.sqrt(mu_tilde * mu_tilde + 4)
    tau0 = cmath.sqrt(k)
    out = []
    for xb, x in enumerate(((-mu_tilde + disc) / 2, (-mu_tilde - disc) / 2)):
        if abs(x) < 1e-13:
            raise DegenerateX(f"x = {x} for mu_tilde = {mu_tilde}")
        for sign in (1, -1):
            tau = sign * tau0
            out.append(HeckeBranch(x, tau * (x + 1 / x), tau * x, tau, xb, sign))
    return out


def pick_branch(mu_tilde, m24, m42, x_branch: int = 0, tau_sign: int = 1) -> HeckeBranch:
    if x_branch not in (0, 1) or tau_sign not in (1, -1):
        raise InvalidParameters(f"bad branch x={x_branch}, tau_sign={tau_sign}")
    for br in solve_x_mu(mu_tilde, m24, m42):
        if br.x_branch == x_branch and br.tau_sign == tau_sign:
            return br
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class CatalogEntry:
    family_id: str
    params: dict = field(default_factory=dict)
    x_branch: int = 0
    tau_sign: int = 1

    @property
    def family(self) -> Family:
        return family(self.family_id)

    @property
    def case(self) -> str:
        return self.family.case


def instantiate(entry: CatalogEntry, m24: complex, m42: complex) -> TMatrix:
    fam = entry.family
    m24, m42 = complex(m24), complex(m42)
    tt = fam.matrix(entry.params)
    if not np.all(np.isfinite(tt)):
        raise InvalidParameters(f"{fam.family_id}: non-finite entries for {entry.params}")
    if fam.case == HECKE:
        if is_zero(m24) or is_zero(m42):
            raise InvalidParameters(f"{fam.family_id} needs m24*m42 != 0")
        br = pick_branch(fam.table_mu_tilde(entry.params), m24, m42, entry.x_branch, entry.tau_sign)
        t = br.tau * tt + br.rho * I4
        if np.max(np.abs(t)) <= 1e-12 * max(1.0, abs(br.tau)):
            raise DegenerateX(f"{fam.family_id}: branch x={br.x} collapses T to zero")
        return TMatrix(t, m24, m42)
    if fam.case == SN and not (is_zero(m42) and not is_zero(m24)):
        raise InvalidParameters(f"{fam.family_id} (S_n) needs m42 = 0 and m24 != 0")
    if fam.case == TN and not (is_zero(m24) and not is_zero(m42)):
        raise InvalidParameters(f"{fam.family_id} (T_n) needs m24 = 0 and m42 != 0")
    return TMatrix(tt, m24, m42)


def hecke_branch(entry: CatalogEntry, m24, m42) -> HeckeBranch:
    fam = entry.family
    if fam.case != HECKE:
        raise InvalidParameters(f"{fam.family_id} is not a Hecke family")
    return pick_branch(fam.table_mu_tilde(entry.params), m24, m42, entry.x_branch, entry.tau_sign)


def _check_g(g):
    g = np.asarray(g, dtype=np.complex128)
    if g.shape != (2, 2):
        raise ValueError("g must be 2x2")
    det = np.linalg.det(g)
    if abs(det) < 1e-12 * max(1.0, float(np.max(np.abs(g))) ** 2):
        raise SingularG(f"det g = {det}")
    return g


def _conjugate(t, g):
    gg = np.kron(g, g)
    return gg @ t @ np.linalg.inv(gg)


def _replace(T, t):
    return T.with_matrix(t) if isinstance(T, TMatrix) else t


def gauge_hecke(T, g=np.eye(2), lam: complex = 1.0, which: str = "conjugate"):
    """One move of the Hecke gauge group, followed by rescaling with ``lam``."""
    t = T.t if isinstance(T, TMatrix) else np.asarray(T, dtype=np.complex128)
    g = _check_g(g)
    if which == "conjugate":
        out = _conjugate(t, g)
    elif which == "transpose":
        out = t.T
    elif which == "permute":
        out = PERM4 @ t @ PERM4
    else:
        raise ValueError(f"unknown move {which!r}")
    return _replace(T, lam * out)


def gauge_tn_sn(T, g=np.eye(2), lam: complex = 1.0, which: str = "conjugate"):
    """One move of the S_n / T_n gauge group, followed by rescaling with ``lam``."""
    t = T.t if isinstance(T, TMatrix) else np.asarray(T, dtype=np.complex128)
    g = _check_g(g)
    if which == "conjugate":
        out = _conjugate(t, g)
    elif which == "dual":
        out = PERM4 @ t.T @ PERM4
    else:
        raise ValueError(f"unknown move {which!r}")
    return _replace(T, lam * out)


def dual_to_Tn(T):
    """Transpose mapping S_n representations to T_n representations and back."""
    if isinstance(T, TMatrix):
        return TMatrix(T.t.T.copy(), T.m42, T.m24)
    return np.asarray(T, dtype=np.complex128).T.copy()


def random_complex(rng, size=None):
    """Modulus uniform in [0.5, 2], argument uniform."""
    r = rng.uniform(0.5, 2.0, size)
    phi = rng.uniform(0.0, 2 * np.pi, size)
    return r * np.exp(1j * phi)


def random_entry(family_id: str, rng) -> CatalogEntry:
    """Generic parameter draw for a family, resampling away from singular sets."""
    fam = family(family_id)
    for _ in range(100):
        params = {}
        for name in fam.params:
            params[name] = int(rng.choice([1, -1])) if name in fam.discrete else complex(random_complex(rng))
        if fam.family_id == "T_H11":
            # keep sinh/cosh of order one
            params["theta"] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if fam.family_id.startswith("T_2") and abs(params["b"] + params["c"] - params["a"]) < 0.3:
            continue
        mt = fam.table_mu_tilde(params) if fam.table_mu_tilde else 0
        if fam.case == HECKE and abs(mt * mt + 4) < 0.1:
            continue
        return CatalogEntry(family_id, params, int(rng.integers(2)), int(rng.choice([1, -1])))
    raise InvalidParameters(f"could not draw regular parameters for {family_id}")


def random_hoppings(case: str, rng):
    if case == HECKE:
        return complex(random_complex(rng)), complex(random_complex(rng))
    if case == SN:
        return complex(random_complex(rng)), 0j
    return 0j, complex(random_complex(rng))


def random_instance(family_id: str, rng):
    """Draw ``(entry, T)`` with generic parameters and hoppings for the family's case."""
    for _ in range(20):
        entry = random_entry(family_id, rng)
        m24, m42 = random_hoppings(entry.case, rng)
        try:
            return entry, instantiate(entry, m24, m42)
        except DegenerateX:
            entry = CatalogEntry(entry.family_id, entry.params, 1 - entry.x_branch, entry.tau_sign)
            try:
                return entry, instantiate(entry, m24, m42)
            except DegenerateX:
                continue
    raise InvalidParameters(f"no regular instance for {family_id}")


def catalog_listing() -> list:
    return [
        {"family": f.family_id, "case": f.case, "params": list(f.params)}
        for f in HECKE_FAMILIES + SN_FAMILIES + TN_FAMILIES
    ]
