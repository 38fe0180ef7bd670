import sys

import numpy as np
import pytest

from vertex33.catalog import random_complex, random_instance
from vertex33.hamiltonian import PATTERN, build_from_T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_free(rng):
    return {k: complex(random_complex(rng)) for k in ("m11", "m22", "m33", "m44", "m23", "m32")}


def random_catalog_h(family_id, rng):
    """A catalog local Hamiltonian with random free entries, plus its T."""
    entry, T = random_instance(family_id, rng)
    return build_from_T(T, random_free(rng)), T, entry


def random_pattern_matrix(rng):
    raw = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    return np.where(PATTERN, raw, 0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
