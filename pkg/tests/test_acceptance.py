"""Acceptance criteria 1 to 9.

Each test prints one ``criterion N: PASS|FAIL ...`` line and the lines are
repeated in the terminal summary. Run as a script for the lines alone:
``python3 tests/test_acceptance.py``.
"""
import json
import sys
import time

import numpy as np
import pytest

from vertex33 import cli
from vertex33.algebras import check_hecke_system, check_Sn, check_Tn, compute_mu, hecke_normalizations
from vertex33.bethe import SeedGrid, compare_spectra, one_magnon_prediction, sector_spectrum, solve_bethe_two
from vertex33.catalog import FAMILIES, HECKE_FAMILIES, SN_FAMILIES, TN_FAMILIES, family, random_complex, random_instance
from vertex33.errors import NumericalDegeneracy
from vertex33.hamiltonian import PATTERN, RELATIONS, LocalHamiltonian33, build_from_T, check_cba_constraints
from vertex33.linalg import residual
from vertex33.reshetikhin import check_reshetikhin, orbit_scan
from vertex33.scattering import (
    ScatteringContext,
    bethe_product,
    check_ratio_dependence,
    check_regularity,
    check_transfer_commutes,
    check_unitarity,
    check_ybe,
    dualize,
    random_rapidities,
    transfer_matrix,
)

LINES = {}

TOL_GATE = 1e-14
TOL_ALGEBRA = 1e-10
TOL_MU_TILDE = 1e-9
TOL_REGULARITY = 1e-13
TOL_UNITARITY = 1e-10
TOL_YBE = 1e-9
TOL_RANDOM_YBE = 1e-3
TOL_BETHE_FORM = 1e-10
TOL_EMPTY = 1e-12
TOL_ONE_MAGNON = 1e-8
TOL_ROOT = 1e-8
TOL_CONTAINMENT = 1e-6
TOL_RATIO = 1e-9
TOL_HOLDS = 1e-10
TOL_FAILS = 1e-6

# one entry per relation that appears in no other relation
SOLE_ENTRY = {
    "m23+m47": (2, 3),
    "m32+m74": (3, 2),
    "m27": (2, 7),
    "m34": (3, 4),
    "m43": (4, 3),
    "m72": (7, 2),
    "m24-m37": (3, 7),
    "m42-m73": (7, 3),
    "(m22+m44)-(m33+m77)": (3, 3),
}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    LINES[n] = line
    print(line)
    return ok


def free_entries(rng):
    return {k: complex(random_complex(rng)) for k in ("m11", "m22", "m33", "m44", "m23", "m32")}


def catalog_h(fid, rng):
    entry, T = random_instance(fid, rng)
    return build_from_T(T, free_entries(rng)), T


def test_criterion_1_constraint_gate():
    rng = np.random.default_rng(101)
    fids = sorted(FAMILIES)
    names = [name for name, _ in RELATIONS]
    wrong = []
    for i in range(100):
        h, _ = catalog_h(fids[i % len(fids)], rng)
        name = names[i % len(names)]
        i0, j0 = SOLE_ENTRY[name]
        m = h.matrix.copy()
        m[i0 - 1, j0 - 1] += random_complex(rng)
        failed = check_cba_constraints(LocalHamiltonian33(m)).failed_relations()
        if failed != [name]:
            wrong.append((name, failed))
    worst = 0.0
    rejected = 0
    for i in range(100):
        h, _ = catalog_h(fids[i % len(fids)], rng)
        rep = check_cba_constraints(h, TOL_GATE)
        worst = max(worst, max(abs(v) for v in rep.residuals.values()))
        rejected += not rep.passed
    ok = not wrong and rejected == 0 and worst <= TOL_GATE
    assert record(1, ok, f"single violations named {100 - len(wrong)}/100; catalog h max residual {worst:.1e} <= {TOL_GATE:.0e}")


def _mu_tilde_error(T, entry):
    table = family(entry.family_id).table_mu_tilde(entry.params)
    got = [n.mu_tilde for n in hecke_normalizations(T)]
    return min(abs(g - s * table) for g in got for s in (1, -1))


def test_criterion_2_algebra_certification():
    rng = np.random.default_rng(202)
    worst_rel, worst_mu = 0.0, 0.0
    for fam in HECKE_FAMILIES:
        for _ in range(20):
            entry, T = random_instance(fam.family_id, rng)
            rels = check_hecke_system(T, TOL_ALGEBRA)
            mu = compute_mu(T, TOL_ALGEBRA)
            rels["square"] = residual(T.t @ T.t, mu * T.t, TOL_ALGEBRA, max(1.0, np.abs(T.t).max() ** 2))
            worst_rel = max(worst_rel, max(r.rel for r in rels.values()))
            worst_mu = max(worst_mu, _mu_tilde_error(T, entry))
    for fams, check in ((SN_FAMILIES, check_Sn), (TN_FAMILIES, check_Tn)):
        for fam in fams:
            for _ in range(20):
                _, T = random_instance(fam.family_id, rng)
                worst_rel = max(worst_rel, check(T, TOL_ALGEBRA).rel)
    ok = worst_rel <= TOL_ALGEBRA and worst_mu <= TOL_MU_TILDE
    assert record(2, ok, f"max relation residual {worst_rel:.1e} <= {TOL_ALGEBRA:.0e}; max mu_tilde error {worst_mu:.1e} <= {TOL_MU_TILDE:.0e}")


def _random_t_ybe(seed):
    rng = np.random.default_rng(seed)
    t = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    ctx = ScatteringContext(t, complex(random_complex(rng)), complex(random_complex(rng)))
    return check_ybe(ctx, *random_rapidities(ctx, rng, 3)).rel


def test_criterion_3_s_matrix_laws():
    rng = np.random.default_rng(303)
    reg = uni = ybe = 0.0
    for fid in FAMILIES:
        _, T = random_instance(fid, rng)
        ctx = ScatteringContext.from_T(T)
        for _ in range(50):
            z1, z2, z3 = random_rapidities(ctx, rng, 3)
            reg = max(reg, check_regularity(ctx, z1, TOL_REGULARITY).rel)
            uni = max(uni, check_unitarity(ctx, z1, z2, TOL_UNITARITY).rel)
            ybe = max(ybe, check_ybe(ctx, z1, z2, z3, TOL_YBE).rel)
    # reseeding guard: a draw that lands near a solution by accident is redrawn
    rand = max(_random_t_ybe(seed) for seed in range(3))
    ok = reg <= TOL_REGULARITY and uni <= TOL_UNITARITY and ybe <= TOL_YBE and rand > TOL_RANDOM_YBE
    assert record(
        3, ok,
        f"regularity {reg:.1e}, unitarity {uni:.1e}, YBE {ybe:.1e} over {len(FAMILIES)} families; random T YBE {rand:.1e} > {TOL_RANDOM_YBE:.0e}",
    )


def test_criterion_4_transfer_matrix():
    rng = np.random.default_rng(404)
    comm = form = 0.0
    for fid in FAMILIES:
        _, T = random_instance(fid, rng)
        ctx = ScatteringContext.from_T(T)
        for M in (2, 3, 4):
            for _ in range(20):
                x, y, *zs = random_rapidities(ctx, rng, 2 + M)
                comm = max(comm, check_transfer_commutes(ctx, x, y, zs, TOL_YBE).rel)
        for _ in range(20):
            zs = random_rapidities(ctx, rng, 2)
            for j in range(2):
                form = max(form, residual(-transfer_matrix(ctx, zs[j], zs), bethe_product(ctx, zs, j), TOL_BETHE_FORM).rel)
    ok = comm <= TOL_YBE and form <= TOL_BETHE_FORM
    assert record(4, ok, f"commutator {comm:.1e} <= {TOL_YBE:.0e} for M=2,3,4; Bethe form {form:.1e} <= {TOL_BETHE_FORM:.0e}")


def test_criterion_5_spectrum_m0_m1():
    rng = np.random.default_rng(505)
    empty = one = 0.0
    bad = []
    for fid in FAMILIES:
        h, _ = catalog_h(fid, rng)
        for L in range(3, 9):
            e0 = sector_spectrum(h, L, 0).eigenvalues[0]
            empty = max(empty, abs(e0 - L * h["m11"]))
            match = compare_spectra(one_magnon_prediction(h, L), sector_spectrum(h, L, 1), TOL_ONE_MAGNON)
            one = max(one, match.max_distance)
            if not match.passed:
                bad.append((fid, L))
    ok = empty <= TOL_EMPTY and not bad
    assert record(5, ok, f"empty state {empty:.1e} <= {TOL_EMPTY:.0e}; one magnon max distance {one:.1e}, {len(bad)} mismatches, L=3..8")


M2_FAMILIES = ("T_H12", "T_4", "T_H21_H22")


def test_criterion_6_spectrum_m2():
    start = time.perf_counter()
    summary = []
    ok = True
    for k, fid in enumerate(M2_FAMILIES):
        rng = np.random.default_rng([606, k])
        h, T = catalog_h(fid, rng)
        ctx = ScatteringContext.from_T(T)
        solved = solve_bethe_two(ctx, h, 6, SeedGrid(seed=k), TOL_ROOT)
        exact = sector_spectrum(h, 6, 2)
        assert len(exact.eigenvalues) == 60
        match = compare_spectra(solved.energies(h), exact, TOL_CONTAINMENT, containment=True)
        n = len(solved.roots)
        ok &= match.passed and n >= 5
        summary.append(f"{fid} {match.matched}/{n} (max {match.max_distance:.1e})")
    elapsed = time.perf_counter() - start
    ok &= elapsed <= 300
    assert record(6, ok, f"L=6 roots contained within {TOL_CONTAINMENT:.0e}: " + ", ".join(summary) + f"; {elapsed:.0f} s")


def test_criterion_7_baxterisation():
    rng = np.random.default_rng(707)
    worst = 0.0
    refused = []
    for fam in HECKE_FAMILIES:
        _, T = random_instance(fam.family_id, rng)
        ctx = ScatteringContext.from_T(T)
        try:
            for _ in range(20):
                x1, x2, c = (complex(random_complex(rng)) * 0.5 for _ in range(3))
                worst = max(worst, check_ratio_dependence(ctx, x1, x2, c, tol=TOL_RATIO).rel)
        except NumericalDegeneracy as exc:
            refused.append(f"{fam.family_id} ({type(exc).__name__})")
    dual = 0.0
    for fid in FAMILIES:
        _, T = random_instance(fid, rng)
        d = dualize(ScatteringContext.from_T(T))
        for _ in range(20):
            dual = max(dual, check_ybe(d, *random_rapidities(d, rng, 3), TOL_YBE).rel)
    ok = worst <= TOL_RATIO and not refused and dual <= TOL_YBE
    detail = f"ratio residual {worst:.1e} <= {TOL_RATIO:.0e}"
    if refused:
        detail += "; delta = 0 reported for " + ", ".join(refused)
    detail += f"; dual YBE {dual:.1e} <= {TOL_YBE:.0e}"
    assert record(7, ok, detail)


def _p9():
    p = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            p[3 * j + i, 3 * i + j] = 1
    return p


def test_criterion_8_reshetikhin():
    rng = np.random.default_rng(808)
    perm = check_reshetikhin(_p9())
    diag = check_reshetikhin(np.diag(random_complex(rng, 9)))
    least = np.inf
    holding = []
    hs = []
    for fid in FAMILIES:
        for _ in range(5):
            h, T = catalog_h(fid, rng)
            # the h of the draw itself plus the flip/transpose images of its T
            for name, res in orbit_scan(T, h.free_params()).items():
                least = min(least, res.residual)
                if res.verdict != "fails":
                    holding.append(f"{fid} {name}")
            hs.append(h.matrix)
    flips = 0
    for i in range(10):
        m = hs[int(rng.integers(len(hs)))]
        base = check_reshetikhin(m).verdict
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        gg = np.kron(g, g)
        for moved in (m + complex(random_complex(rng)) * np.eye(9), gg @ m @ np.linalg.inv(gg), m.T):
            flips += check_reshetikhin(moved).verdict != base
    ok = perm.residual <= TOL_HOLDS and diag.holds and not holding and least > TOL_FAILS and flips == 0
    assert record(
        8, ok,
        f"permutation {perm.residual:.1e} <= {TOL_HOLDS:.0e}; diagonal {diag.verdict}; "
        f"catalog min residual {least:.2f} > {TOL_FAILS:.0e} over {len(hs)} draws x 4 orbit images; {flips} verdict flips in 30 transforms",
    )


def test_criterion_9_determinism(tmp_path, capsys):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    argv = ["verify", "random:T_H11", "--suite", "all", "--L", "5", "--draws", "5", "--seed", "9"]
    codes = [cli.main(argv + ["--report", str(p)]) for p in paths]
    capsys.readouterr()
    same = paths[0].read_bytes() == paths[1].read_bytes()
    n = len(json.loads(paths[0].read_text())["checks"])
    ok = same and codes[0] == codes[1]
    assert record(9, ok, f"two verify runs byte-identical ({n} checks, {paths[0].stat().st_size} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
