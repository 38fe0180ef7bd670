import numpy as np
import pytest

from conftest import random_pattern_matrix
from vertex33 import _sector_py, kernels
from vertex33.hamiltonian import SectorBasis


def _inputs(L, M):
    basis = SectorBasis.build(L, M)
    codes = basis.codes()
    order = np.argsort(codes, kind="stable")
    return basis.configs, codes[order], order.astype(np.int64)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")
def test_cython_matches_python(rng):
    from vertex33 import _sector_ext

    for L, M in ((3, 1), (4, 2), (5, 3), (6, 2)):
        h = random_pattern_matrix(rng)
        args = _inputs(L, M)
        a = _sector_ext.build_sector_matrix(*args, h)
        b = _sector_py.build_sector_matrix(*args, h)
        assert np.array_equal(a, b)


def test_python_kernel_empty_sector(rng):
    h = random_pattern_matrix(rng)
    out = _sector_py.build_sector_matrix(*_inputs(4, 0), h)
    assert out.shape == (1, 1) and out[0, 0] == 4 * h[0, 0]
