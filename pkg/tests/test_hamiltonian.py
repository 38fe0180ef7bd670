import itertools

import numpy as np
import pytest

from conftest import random_catalog_h, random_free, random_pattern_matrix
from vertex33.catalog import PERM4
from vertex33.errors import ConstraintsNotSatisfied, DimensionCapExceeded, PatternViolation
from vertex33.hamiltonian import (
    PATTERN,
    RELATIONS,
    LocalHamiltonian33,
    SectorBasis,
    TMatrix,
    apply_chain,
    build_chain,
    build_charge,
    build_from_T,
    check_cba_constraints,
    decompose,
    extract_T,
    pair_charge,
    product_state,
    sector_dimension,
    sector_hamiltonian,
    validate_pattern,
)
from vertex33.linalg import commutator, eig_general, multiset_distance, residual

P9 = np.zeros((9, 9))
for i, j in itertools.product(range(3), repeat=2):
    P9[3 * j + i, 3 * i + j] = 1


def constrained_h(rng):
    T = TMatrix(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)), 0.7 + 0.2j, -0.4 + 1.1j)
    return build_from_T(T, random_free(rng)), T


def test_pattern_has_33_entries():
    assert PATTERN.sum() == 33


def test_validate_zero():
    h = validate_pattern(np.zeros((9, 9)))
    assert not h.matrix.any()


def test_validate_rejects_row_one():
    raw = np.zeros((9, 9))
    raw[0, 1] = 1
    with pytest.raises(PatternViolation) as err:
        validate_pattern(raw)
    assert err.value.positions == [(1, 2)]


def test_validate_permutation_inside_pattern():
    h = validate_pattern(P9)
    nz = sorted((int(i) + 1, int(j) + 1) for i, j in np.argwhere(h.matrix))
    assert nz == [(1, 1), (2, 4), (3, 7), (4, 2), (5, 5), (6, 8), (7, 3), (8, 6), (9, 9)]


def test_validate_tiny_offpattern_is_zeroed(caplog):
    raw = np.zeros((9, 9), dtype=complex)
    raw[0, 1] = 1e-16
    h = validate_pattern(raw)
    assert h.matrix[0, 1] == 0
    assert "off-pattern" in caplog.text


def test_pattern_commutes_with_pair_charge(rng):
    for _ in range(5):
        h = random_pattern_matrix(rng)
        assert np.abs(commutator(h, pair_charge())).max() <= 1e-14


def test_constraints_zero():
    rep = check_cba_constraints(LocalHamiltonian33(np.zeros((9, 9), complex)))
    assert rep.passed and all(v == 0 for v in rep.residuals.values())


def test_constraints_m27():
    raw = np.zeros((9, 9), complex)
    raw[1, 6] = 1
    rep = check_cba_constraints(LocalHamiltonian33(raw))
    assert not rep.passed
    assert rep.failed_relations() == ["m27"]
    assert rep.residuals["m27"] == 1


def test_constraints_catalog(rng):
    h, _, _ = random_catalog_h("T_H12", rng)
    rep = check_cba_constraints(h)
    assert rep.passed
    assert max(abs(v) for v in rep.residuals.values()) <= 1e-14


def test_nine_named_relations():
    assert [name for name, _ in RELATIONS] == [
        "m23+m47", "m32+m74", "m27", "m34", "m43", "m72", "m24-m37", "m42-m73", "(m22+m44)-(m33+m77)",
    ]


def test_extract_t55():
    raw = np.zeros((9, 9), complex)
    raw[4, 4], raw[0, 0], raw[1, 1], raw[3, 3] = 5, 1, 2, 3
    raw[6, 6] = 2 + 3  # m77 = m22 + m44 - m33
    T = extract_T(LocalHamiltonian33(raw))
    assert T.entry(5, 5) == 1


def test_extract_t58_and_t56():
    raw = np.zeros((9, 9), complex)
    raw[4, 7] = 2  # m58
    raw[4, 5] = 0.5  # m56
    raw[1, 2] = 3  # m23
    raw[3, 6] = -3  # m47 = -m23
    T = extract_T(LocalHamiltonian33(raw))
    assert T.entry(5, 8) == 5
    assert T.entry(5, 6) == 0.5 - 3


def test_extract_requires_constraints():
    raw = np.zeros((9, 9), complex)
    raw[1, 6] = 1
    with pytest.raises(ConstraintsNotSatisfied):
        extract_T(LocalHamiltonian33(raw))


def test_round_trip(rng):
    for _ in range(10):
        h, T = constrained_h(rng)
        back = extract_T(h)
        assert np.abs(back.t - T.t).max() <= 1e-14
        assert back.m24 == T.m24 and back.m42 == T.m42
        rebuilt = build_from_T(back, {k: v for k, v in h.free_params().items()})
        assert np.abs(rebuilt.matrix - h.matrix).max() <= 1e-14


def test_build_from_zero():
    assert not build_from_T(np.zeros((4, 4)), {}).matrix.any()


def test_m77_derived():
    h = build_from_T(np.zeros((4, 4)), {"m22": 0, "m44": 0, "m33": 0, "m11": 2})
    assert h.m(7, 7) == 0
    h = build_from_T(np.zeros((4, 4)), {"m22": 1, "m44": 2, "m33": 0.5})
    assert h.m(7, 7) == 2.5


def test_build_from_unknown_key():
    with pytest.raises(KeyError):
        build_from_T(np.zeros((4, 4)), {"m77": 1})


def test_decompose_reconstructs(rng):
    h, _ = constrained_h(rng)
    ht, t9, m11 = decompose(h)
    assert np.abs(ht + t9 + m11 * np.eye(9) - h.matrix).max() <= 1e-13
    outside = np.ones((9, 9), bool)
    idx = [4, 5, 7, 8]
    outside[np.ix_(idx, idx)] = False
    assert not t9[outside].any()


def test_decompose_homogeneous():
    h = LocalHamiltonian33(np.where(PATTERN, np.eye(9) * 1.5, 0).astype(complex))
    ht, t9, m11 = decompose(h)
    assert m11 == 1.5
    assert not t9.any() and not ht.any()


def test_decompose_h_tilde_last_diagonal(rng):
    # with m'_ii = m_ii - m11, the (9,9) entry of h_tilde is m'22 + m'44
    h, _ = constrained_h(rng)
    ht, _, m11 = decompose(h)
    expected = (h.m(2, 2) - m11) + (h.m(4, 4) - m11)
    assert abs(ht[8, 8] - expected) <= 1e-13


def test_charge_small():
    assert np.array_equal(build_charge(1), np.diag([0, 1, 1]))
    assert np.array_equal(np.diag(build_charge(2)).real, [0, 1, 1, 1, 2, 2, 1, 2, 2])


def test_chain_conserves_charge(rng):
    for L in (2, 3, 4):
        h = random_pattern_matrix(rng)
        H = build_chain(h, L)
        Q = build_charge(L)
        assert residual(commutator(H, Q), 0, 1e-12, scale=np.abs(H).max()).passed


def test_chain_identity():
    assert np.allclose(build_chain(np.eye(9), 3), 3 * np.eye(27))


def test_chain_two_sites(rng):
    h = random_pattern_matrix(rng)
    swap = P9
    assert np.allclose(build_chain(h, 2), h + swap @ h @ swap)


def test_chain_empty_state(rng):
    h, _, _ = random_catalog_h("T_5", rng)
    L = 5
    psi = product_state([1] * L)
    out = build_chain(h, L) @ psi
    assert np.abs(out - L * h.m(1, 1) * psi).max() <= 1e-12


def test_apply_chain_matches_matrix(rng):
    h = random_pattern_matrix(rng)
    psi = rng.normal(size=3**4) + 0j
    assert np.allclose(apply_chain(h, 4, psi), build_chain(h, 4) @ psi)


def test_chain_cap():
    with pytest.raises(DimensionCapExceeded):
        build_chain(np.eye(9), 4, cap=80)


def test_sector_basis_order():
    basis = SectorBasis.build(3, 1)
    assert list(basis.states()) == [((1,), (2,)), ((1,), (3,)), ((2,), (2,)), ((2,), (3,)), ((3,), (2,)), ((3,), (3,))]
    assert len(SectorBasis.build(4, 2)) == 24 == sector_dimension(4, 2)


def test_sector_empty(rng):
    h, _, _ = random_catalog_h("T_H11", rng)
    basis, mat = sector_hamiltonian(h, 5, 0)
    assert mat.shape == (1, 1) and abs(mat[0, 0] - 5 * h.m(1, 1)) <= 1e-12


def test_sector_matches_projection(rng):
    h = LocalHamiltonian33(random_pattern_matrix(rng))
    L, M = 4, 2
    basis, mat = sector_hamiltonian(h, L, M)
    full = build_chain(h, L)
    idx = [int(c) for c in basis.codes()]
    assert np.abs(full[np.ix_(idx, idx)] - mat).max() <= 1e-13


def test_sector_spectra_union(rng):
    h = LocalHamiltonian33(random_pattern_matrix(rng))
    L = 4
    union = np.concatenate([eig_general(sector_hamiltonian(h, L, M)[1]) for M in range(L + 1)])
    full = eig_general(build_chain(h, L))
    assert multiset_distance(union, full) <= 1e-8


def test_sector_cap(rng):
    h = LocalHamiltonian33(random_pattern_matrix(rng))
    with pytest.raises(DimensionCapExceeded):
        sector_hamiltonian(h, 10, 5, cap=100)
