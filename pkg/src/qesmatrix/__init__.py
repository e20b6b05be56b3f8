"""Hermitian quasi-exactly solvable 2x2 matrix Schroedinger operators.

Modules
-------
opalg      exact matrix differential operators over the Gaussian rationals
liealg     the sl(2) + sl(2) generators and their exact identities
invariant  the invariant polynomial space and restriction matrices
hermitize  similarity transforms that make Pauli vectors real
gauge      gauge transformation to Schroedinger form and the potential
families   constrained cases with Hermitian potentials
examples   the four worked models and their checks
numerics   quadrature, inversion, finite differences and grid spectra
cli        command-line front end
"""
from .gauge import QESParams, build_hamiltonian, solve_gauge
from .invariant import build_basis, restrict, spectrum

__all__ = ["QESParams", "build_hamiltonian", "solve_gauge", "build_basis", "restrict", "spectrum"]
__version__ = "0.1.0"
