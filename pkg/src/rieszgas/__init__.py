"""Radial compressible gas dynamics with Riesz/logarithmic interactions.

A numerical laboratory for spherically symmetric Euler and Navier-Stokes
flows coupled to nonlocal power-law interaction potentials: angular-reduced
kernel evaluation, a free-boundary Lagrangian solver, free-energy
minimizing steady states, and stability/viscosity-sweep experiments.
"""

__version__ = "0.1.0"

from .radial_kernel import (  # noqa: F401
    PotentialSpec,
    RadialField,
    RadialGrid,
    kernel_K,
    kernel_omega,
    phi_kernel,
    potential,
    potential_derivative,
    surface_area,
)
