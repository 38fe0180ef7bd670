"""Bethe-ansatz energies, Bethe-equation residuals and the M = 2 solver."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .algebras import is_zero
from .errors import BranchCollision, ConstraintsNotSatisfied, InvalidParameters, NoConvergence, NumericalDegeneracy, ZeroRapidity
from .hamiltonian import LocalHamiltonian33, check_cba_constraints, sector_dimension, sector_hamiltonian
from .linalg import eig_general, pair_multisets
from .scattering import ScatteringContext, transfer_matrix

log = logging.getLogger(__name__)

ROOT_TOL = 1e-8
COINCIDENT_TOL = 1e-8
OVERLAP_MIN = 0.7


def epsilon(z, h: LocalHamiltonian33) -> complex:
    if z == 0:
        raise ZeroRapidity("rapidity must be nonzero")
    return h["m22"] + h["m44"] - 2 * h["m11"] + h["m24"] / z + h["m42"] * z


def energy(zs, h: LocalHamiltonian33, L: int) -> complex:
    return L * h["m11"] + sum(epsilon(z, h) for z in zs)


def _require_solvable(h):
    report = check_cba_constraints(h)
    if not report.passed:
        raise ConstraintsNotSatisfied(report)
    if is_zero(h["m24"]) and is_zero(h["m42"]):
        raise InvalidParameters("m24 = m42 = 0: the energy does not depend on the rapidities")


def one_magnon_prediction(h: LocalHamiltonian33, L: int) -> np.ndarray:
    """``L m11 + eps(w^k)`` for the L-th roots of unity, each twice."""
    _require_solvable(h)
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    values = [energy([z], h, L) for z in roots]
    return np.sort_complex(np.repeat(np.array(values), 2))


@dataclass(frozen=True)
class SectorSpectrum:
    L: int
    M: int
    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.eigenvalues) != sector_dimension(self.L, self.M):
            raise ValueError("eigenvalue count does not match the sector dimension")


def sector_spectrum(h, L: int, M: int) -> SectorSpectrum:
    _, mat = sector_hamiltonian(h, L, M)
    return SectorSpectrum(L, M, eig_general(mat))


@dataclass
class MatchReport:
    matched: int
    unmatched_predicted: int
    unmatched_exact: int
    max_distance: float
    tol: float
    containment: bool

    @property
    def passed(self) -> bool:
        if self.containment:
            return self.unmatched_predicted == 0
        return self.unmatched_predicted == 0 and self.unmatched_exact == 0

    def as_dict(self) -> dict:
        return {
            "matched": self.matched,
            "unmatched_predicted": self.unmatched_predicted,
            "unmatched_exact": self.unmatched_exact,
            "max_distance": self.max_distance,
            "tol": self.tol,
            "containment": self.containment,
            "passed": self.passed,
        }


def compare_spectra(predicted, exact, tol: float = 1e-8, containment: bool = False) -> MatchReport:
    """Greedy nearest pairing of predicted values with the exact spectrum.

    In containment mode every predicted value only has to lie within ``tol``
    of some exact eigenvalue (values may share an eigenvalue).
    """
    pred = np.asarray(predicted, dtype=np.complex128)
    ex = np.asarray(exact.eigenvalues if isinstance(exact, SectorSpectrum) else exact, dtype=np.complex128)
    if containment:
        if pred.size == 0:
            return MatchReport(0, 0, ex.size, 0.0, tol, True)
        if ex.size == 0:
            return MatchReport(0, pred.size, 0, float("inf"), tol, True)
        dist = np.min(np.abs(pred[:, None] - ex[None, :]), axis=1)
        ok = dist <= tol
        return MatchReport(int(ok.sum()), int((~ok).sum()), 0, float(dist.max()), tol, True)
    pairs = [p for p in pair_multisets(pred, ex) if p[2] <= tol]
    dmax = max((p[2] for p in pair_multisets(pred, ex)), default=0.0)
    return MatchReport(len(pairs), pred.size - len(pairs), ex.size - len(pairs), dmax, tol, False)


@dataclass
class BetheRootSet:
    L: int
    M: int
    zs: tuple
    amplitude: np.ndarray = field(repr=False)
    branch: tuple = ()
    residuals: tuple = ()

    def energy(self, h) -> complex:
        return energy(self.zs, h, self.L)

    def as_dict(self, h=None) -> dict:
        out = {
            "L": self.L,
            "M": self.M,
            "zs": [[z.real, z.imag] for z in self.zs],
            "branch": list(self.branch),
            "residuals": list(self.residuals),
        }
        if h is not None:
            e = self.energy(h)
            out["energy"] = [e.real, e.imag]
        return out


def bethe_residual(roots: BetheRootSet, ctx: ScatteringContext, h=None, L: int | None = None) -> list:
    """``|z_j^L A + t(z_j) A| / |A|`` for each rapidity."""
    L = roots.L if L is None else L
    a = np.asarray(roots.amplitude, dtype=np.complex128)
    na = np.linalg.norm(a)
    out = []
    for z in roots.zs:
        t = transfer_matrix(ctx, z, list(roots.zs))
        out.append(float(np.linalg.norm(z**L * a + t @ a) / na))
    return out


def _eig_sorted(mat):
    vals, vecs = np.linalg.eig(mat)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order], vecs[:, order]


def _follow(mat, v, cluster_tol=1e-8):
    """Eigenvalue and eigenvector of ``mat`` continuing the branch through ``v``."""
    vals, vecs = _eig_sorted(mat)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    overlaps = np.abs(vecs.conj().T @ v)
    k = int(np.argmax(overlaps))
    cluster = np.flatnonzero(np.abs(vals - vals[k]) <= cluster_tol * max(1.0, abs(vals[k])))
    if cluster.size > 1:
        q, _ = np.linalg.qr(vecs[:, cluster])
        proj = q @ (q.conj().T @ v)
        ov = np.linalg.norm(proj)
        w = proj / ov if ov > 0 else vecs[:, k]
    else:
        ov = overlaps[k]
        w = vecs[:, k]
    if ov < OVERLAP_MIN:
        raise BranchCollision(f"eigenvector overlap {ov:.3f} below {OVERLAP_MIN}")
    w = w * np.exp(-1j * np.angle(np.vdot(v, w)))
    return vals[k], w


def _system(ctx, L, z1, z2, v):
    """Bethe equations for M = 2 along the eigenvector branch through ``v``."""
    zs = [z1, z2]
    k1, w = _follow(-transfer_matrix(ctx, z1, zs), v)
    t2 = -transfer_matrix(ctx, z2, zs)
    k2 = complex(np.vdot(w, t2 @ w) / np.vdot(w, w))
    return np.array([z1**L - k1, z2**L - k2]), w


def _newton(ctx, L, z, v, max_iter=60, step=1e-7):
    z = np.array(z, dtype=np.complex128)
    for _ in range(max_iter):
        f, v = _system(ctx, L, z[0], z[1], v)
        if np.max(np.abs(f)) <= 1e-12 * max(1.0, np.max(np.abs(z)) ** L):
            return z, v
        jac = np.empty((2, 2), dtype=np.complex128)
        for c in range(2):
            dz = np.zeros(2, dtype=np.complex128)
            dz[c] = step * max(1.0, abs(z[c]))
            fp, _ = _system(ctx, L, *(z + dz), v)
            fm, _ = _system(ctx, L, *(z - dz), v)
            jac[:, c] = (fp - fm) / (2 * dz[c])
        try:
            delta = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian") from exc
        # damp steps that would cross the origin
        lim = 0.5 * np.min(np.abs(z))
        big = np.max(np.abs(delta))
        if big > lim:
            delta *= lim / big
        z = z - delta
        if not np.all(np.isfinite(z)):
            raise NoConvergence("iteration diverged")
    raise NoConvergence("maximum number of Newton steps reached")


@dataclass
class SeedGrid:
    """Seeds ``(w^k1 (1+d1), w^k2 (1+d2))`` from perturbed L-th roots of unity."""

    perturbations: int = 2
    spread: float = 0.15
    branches: tuple = (0, 1, 2, 3)
    seed: int = 0

    def seeds(self, L: int):
        rng = np.random.default_rng(self.seed)
        w = np.exp(2j * np.pi * np.arange(L) / L)
        for k1 in range(L):
            for k2 in range(L):
                if k1 == k2:
                    continue
                for _ in range(self.perturbations):
                    d = self.spread * (rng.normal(size=2) + 1j * rng.normal(size=2))
                    for b in self.branches:
                        yield (complex(w[k1] * (1 + d[0])), complex(w[k2] * (1 + d[1]))), b


@dataclass
class BetheSolveReport:
    roots: list
    failures: dict

    def energies(self, h) -> np.ndarray:
        return np.array([r.energy(h) for r in self.roots], dtype=np.complex128)


def _canonical(ctx, L, zs):
    """Order a converged pair canonically and recompute its amplitude.

    The amplitude is the right singular vector of the stacked Bethe
    operators with the smallest singular value.
    """
    zs = sorted(zs, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    stacked = np.vstack([z**L * np.eye(4) + transfer_matrix(ctx, z, zs) for z in zs])
    _, sv, vh = np.linalg.svd(stacked)
    return tuple(complex(z) for z in zs), vh[-1].conj(), float(sv[-1])


def solve_bethe_two(ctx, h, L: int, seeds: SeedGrid | None = None, tol: float = ROOT_TOL) -> BetheSolveReport:
    """Newton search for M = 2 Bethe root sets from a grid of seeds."""
    if L > 12:
        raise InvalidParameters("solve_bethe_two is limited to L <= 12")
    if is_zero(ctx.m24) and is_zero(ctx.m42):
        raise InvalidParameters("m24 = m42 = 0")
    seeds = seeds or SeedGrid()
    found: list[BetheRootSet] = []
    failures: dict = {}
    for (z0, b) in seeds.seeds(L):
        try:
            t0 = -transfer_matrix(ctx, z0[0], list(z0))
            _, vecs = _eig_sorted(t0)
            v = vecs[:, b % vecs.shape[1]]
            z, _ = _newton(ctx, L, z0, v / np.linalg.norm(v))
            if abs(z[0] - z[1]) <= COINCIDENT_TOL:
                raise NoConvergence("coincident rapidities")
            zs, amp, _ = _canonical(ctx, L, [complex(z[0]), complex(z[1])])
            cand = BetheRootSet(L, 2, zs, amp, (b,))
            res = bethe_residual(cand, ctx)
            if max(res) > tol:
                raise NoConvergence(f"residual {max(res):.2e} above {tol:.0e}")
            cand.residuals = tuple(res)
        except NumericalDegeneracy as exc:
            name = type(exc).__name__
            failures[name] = failures.get(name, 0) + 1
            continue
        if any(np.allclose(cand.zs, r.zs, rtol=0, atol=1e-7) for r in found):
            continue
        found.append(cand)
    log.info("M=2 solver: %d root sets, failures %s", len(found), failures)
    return BetheSolveReport(found, failures)
