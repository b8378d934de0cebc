"""Dirac electrons in graphene under crossed magnetic and electric fields.

Eigenstates, matrix ladder operators, coherent states and their observables,
in natural units hbar = v_F = c = e = 1.
"""
from .coherent import CoherentSpec, render_coherent
from .eigensystem import FieldConfig, energy, phi_n, psi_spinor
from .numerics import DEFAULT_POLICY, GridProfile, TruncationPolicy

__all__ = [
    "CoherentSpec",
    "DEFAULT_POLICY",
    "FieldConfig",
    "GridProfile",
    "TruncationPolicy",
    "energy",
    "phi_n",
    "psi_spinor",
    "render_coherent",
]
