"""Verification toolkit for 3-state, 33-vertex chain Hamiltonians solvable by nested coordinate Bethe ansatz."""
from .algebras import classify, compute_mu, hecke_normalize
from .catalog import CatalogEntry, instantiate
from .hamiltonian import (
    LocalHamiltonian33,
    TMatrix,
    build_chain,
    build_from_T,
    check_cba_constraints,
    extract_T,
    sector_hamiltonian,
    validate_pattern,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CatalogEntry",
    "LocalHamiltonian33",
    "TMatrix",
    "build_chain",
    "build_from_T",
    "check_cba_constraints",
    "classify",
    "compute_mu",
    "extract_T",
    "hecke_normalize",
    "instantiate",
    "sector_hamiltonian",
    "validate_pattern",
]
