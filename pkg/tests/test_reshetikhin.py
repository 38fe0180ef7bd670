import itertools

import numpy as np

from conftest import random_catalog_h
from vertex33.reshetikhin import check_reshetikhin, dilatation_scan, reshetikhin_lhs

P9 = np.zeros((9, 9))
for i, j in itertools.product(range(3), repeat=2):
    P9[3 * j + i, 3 * i + j] = 1


def test_diagonal_holds():
    h = np.diag(np.arange(9.0))
    assert not reshetikhin_lhs(h).any()
    res = check_reshetikhin(h)
    assert res.holds and res.verdict == "holds"
    assert np.abs(res.a_matrix).max() == 0


def test_permutation_holds():
    res = check_reshetikhin(P9)
    assert res.residual <= 1e-10 and res.holds
    # A = 2P solves the permutation case
    a = res.a_matrix
    lhs = reshetikhin_lhs(P9)
    assert np.allclose(np.kron(np.eye(3), a) - np.kron(a, np.eye(3)), lhs)


def test_t1_fails(rng):
    h, _, _ = random_catalog_h("T_1", rng)
    res = check_reshetikhin(h)
    assert res.residual > 1e-6 and res.verdict == "fails"


def test_invariances(rng):
    h, _, _ = random_catalog_h("T_H12", rng)
    base = check_reshetikhin(h)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    gg = np.kron(g, g)
    moved = [
        h.matrix + (0.3 - 1.2j) * np.eye(9),
        gg @ h.matrix @ np.linalg.inv(gg),
        h.matrix.T,
    ]
    for m in moved:
        assert check_reshetikhin(m).verdict == base.verdict
    assert check_reshetikhin(P9 + 2 * np.eye(9)).holds


def test_dilatation_scan(rng):
    _, T, _ = random_catalog_h("T_H21_H22", rng)
    rows = dilatation_scan(T, {"m11": 0.2}, [0.5, 1.0, 2.0])
    assert len(rows) == 3
    assert all(r.verdict == "fails" for _, r in rows)


def test_orbit_scan(rng):
    from vertex33.reshetikhin import ORBIT, orbit_scan

    for fid in ("T_H12", "T_7", "T_2t"):
        h, T, _ = random_catalog_h(fid, rng)
        out = orbit_scan(T, h.free_params())
        assert set(out) == set(ORBIT)
        assert all(r.verdict == "fails" for r in out.values())
        assert out["T"].residual == check_reshetikhin(h).residual
