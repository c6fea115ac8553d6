"""Molecular integrals over Cartesian Gaussian basis functions."""

from .basis_core import (
    ContractedShell,
    Molecule,
    build_basis,
    load_basis,
    load_builtin,
    parse_xyz,
)
from .eri import compute_all, eri_tensor
from .one_electron import build_matrices

__version__ = "0.1.0"

__all__ = [
    "ContractedShell",
    "Molecule",
    "build_basis",
    "build_matrices",
    "compute_all",
    "eri_tensor",
    "load_basis",
    "load_builtin",
    "parse_xyz",
]
