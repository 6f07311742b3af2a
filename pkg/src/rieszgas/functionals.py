"""Scalar functionals and constants: energies, free energy, distance,
sharp-constant surrogates, critical masses, phase-diagram boundaries, and
entropy-pair diagnostics.

All radial integrals are composite trapezoid on the field's grid; the
quadrature model error is O(dr^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, VacuumConventionError
from .radial_kernel import (
    PotentialSpec,
    RadialField,
    _trapezoid_weights,
    moment_kalpha,
    potential,
    surface_area,
)

__all__ = [
    "EnergyBreakdown", "CriticalMassReport",
    "radial_integral", "lp_norm", "total_mass",
    "internal_energy", "kinetic_energy", "interaction_energy", "free_energy",
    "distance_d", "hls_constant", "riesz_composition_constant",
    "fractional_laplacian_constant", "b_constant", "critical_mass",
    "critical_alpha_band", "entropy_pair", "entropy_bounds_check",
    "energy_breakdown",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy ledger at one instant; total is the exact float sum of parts."""

    kinetic: float
    internal: float
    interaction: float
    total: float
    moment: float | None = None
    bd_entropy: float | None = None


@dataclass(frozen=True)
class CriticalMassReport:
    n: int
    alpha: float
    gamma: float
    E0: float | None
    B: float
    Mc: float
    constant_used: str

    def __post_init__(self):
        if not self.Mc > 0.0:
            raise DomainError("critical mass must be positive")


# ---------------------------------------------------------------------------
# radial quadrature helpers
# ---------------------------------------------------------------------------

def radial_integral(n: int, grid_nodes: np.ndarray, values: np.ndarray) -> float:
    """omega_n int values(r) r^{n-1} dr by composite trapezoid."""
    w = _trapezoid_weights(grid_nodes)
    return surface_area(n) * float(np.sum(w * values * grid_nodes ** (n - 1)))


def total_mass(n: int, rho: RadialField) -> float:
    return radial_integral(n, rho.grid.nodes, rho.values)


def lp_norm(n: int, field: RadialField, p: float) -> float:
    """L^p norm on R^n of a radial function, by radial quadrature."""
    if p <= 0:
        raise DomainError("p must be positive")
    return radial_integral(n, field.grid.nodes, np.abs(field.values) ** p) ** (1.0 / p)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def internal_energy(spec: PotentialSpec, rho: RadialField) -> float:
    """omega_n int rho e(rho) r^{n-1} dr with e(rho) = a0 rho^{gamma-1}/(gamma-1)."""
    if np.any(rho.values < 0):
        raise DomainError("density must be nonnegative")
    dens = spec.a0 / (spec.gamma - 1.0) * rho.values ** spec.gamma
    return radial_integral(spec.n, rho.grid.nodes, dens)


def kinetic_energy(n: int, rho: RadialField, m: RadialField) -> float:
    """omega_n int m^2/(2 rho) r^{n-1} dr with the vacuum convention 0/0 = 0."""
    if rho.grid is not m.grid and not np.array_equal(rho.grid.nodes, m.grid.nodes):
        raise DomainError("rho and m must share a grid")
    vac = rho.values == 0.0
    if np.any(m.values[vac] != 0.0):
        raise VacuumConventionError("momentum must vanish on vacuum cells")
    dens = np.zeros_like(rho.values)
    live = ~vac
    dens[live] = 0.5 * m.values[live] ** 2 / rho.values[live]
    return radial_integral(n, rho.grid.nodes, dens)


def interaction_energy(spec: PotentialSpec, rho: RadialField,
                       pot: RadialField | None = None) -> float:
    """(kappa/2) omega_n int rho (Phi_alpha * rho) r^{n-1} dr."""
    if pot is None:
        pot = potential(spec, rho)
    dens = rho.values * pot.values
    return 0.5 * spec.kappa * radial_integral(spec.n, rho.grid.nodes, dens)


def free_energy(spec: PotentialSpec, rho: RadialField,
                pot: RadialField | None = None) -> float:
    """Free energy: internal + (1/2) int rho (Phi_alpha * rho), attractive sign."""
    if pot is None:
        pot = potential(spec, rho)
    inter = 0.5 * radial_integral(spec.n, rho.grid.nodes, rho.values * pot.values)
    return internal_energy(spec, rho) + inter


def distance_d(spec: PotentialSpec, rho: RadialField, rho_tilde: RadialField,
               pot_tilde: RadialField | None = None) -> float:
    """Relative-entropy distance to a reference profile of the same mass.

    d = int ((rho e(rho) - rt e(rt)) + (Phi_alpha * rt)(rho - rt)); this is
    >= 0 against a minimizer by convexity of rho e(rho).
    """
    if not np.array_equal(rho.grid.nodes, rho_tilde.grid.nodes):
        raise DomainError("fields must share a grid")
    m1 = total_mass(spec.n, rho)
    m2 = total_mass(spec.n, rho_tilde)
    if abs(m1 - m2) > 1e-8 * max(abs(m2), 1.0):
        raise DomainError(f"mass mismatch: {m1} vs {m2}")
    if pot_tilde is None:
        pot_tilde = potential(spec, rho_tilde)
    c = spec.a0 / (spec.gamma - 1.0)
    dens = (
        c * (rho.values ** spec.gamma - rho_tilde.values ** spec.gamma)
        + pot_tilde.values * (rho.values - rho_tilde.values)
    )
    return radial_integral(spec.n, rho.grid.nodes, dens)


def energy_breakdown(spec: PotentialSpec, rho: RadialField, m: RadialField,
                     pot: RadialField | None = None,
                     bd_entropy: float | None = None) -> EnergyBreakdown:
    kin = kinetic_energy(spec.n, rho, m)
    internal = internal_energy(spec, rho)
    inter = interaction_energy(spec, rho, pot=pot)
    moment = moment_kalpha(spec, rho) if spec.alpha <= 0.0 else None
    return EnergyBreakdown(
        kinetic=kin, internal=internal, interaction=inter,
        total=kin + internal + inter, moment=moment, bd_entropy=bd_entropy,
    )


# ---------------------------------------------------------------------------
# sharp constants and critical mass
# ---------------------------------------------------------------------------

def hls_constant(n: int, alpha: float) -> float:
    """Hardy-Littlewood-Sobolev constant

    C_{n,alpha} = pi^{alpha/2} Gamma((n-alpha)/2)/Gamma(n-alpha/2)
                  * (Gamma(n/2)/Gamma(n))^{(alpha-n)/n}.
    """
    if not 0.0 < alpha < n:
        raise DomainError("hls_constant requires alpha in (0, n)")
    return (
        math.pi ** (alpha / 2.0)
        * math.gamma((n - alpha) / 2.0) / math.gamma(n - alpha / 2.0)
        * (math.gamma(n / 2.0) / math.gamma(n)) ** ((alpha - n) / n)
    )


def riesz_composition_constant(n: int, alpha: float, beta: float) -> float:
    """kappa_{alpha,beta} in int |x-z|^{alpha-n} |z-y|^{beta-n} dz =
    kappa |x-y|^{alpha+beta-n}."""
    if not (0 < alpha < n and 0 < beta < n and 0 < alpha + beta < n):
        raise DomainError("composition needs 0 < alpha, beta, alpha+beta < n")
    return (
        math.pi ** (n / 2.0)
        * math.gamma(alpha / 2.0) * math.gamma(beta / 2.0)
        * math.gamma((n - alpha - beta) / 2.0)
        / (math.gamma((n - alpha) / 2.0) * math.gamma((n - beta) / 2.0)
           * math.gamma((alpha + beta) / 2.0))
    )


def fractional_laplacian_constant(n: int, alpha: float) -> float:
    """c_{n,alpha} = 2^{n-alpha} pi^{n/2} Gamma((n-alpha)/2)/(alpha Gamma(alpha/2));
    2 pi at (n, alpha) = (2, 0)."""
    if alpha == 0.0 and n == 2:
        return 2.0 * math.pi
    if not alpha > max(0, n - 2):
        raise DomainError("fractional-Laplacian constant needs alpha > max{0, n-2}")
    return (
        2.0 ** (n - alpha) * math.pi ** (n / 2.0)
        * math.gamma((n - alpha) / 2.0) / (alpha * math.gamma(alpha / 2.0))
    )


def _critical_gamma_window(n: int, alpha: float):
    return 2.0 * n / (2.0 * n - alpha), (n + alpha) / n


def b_constant(n: int, gamma: float, alpha: float, sharp_constant: float) -> float:
    """B = C/(2 alpha) omega_n^{alpha/(n(gamma-1)) - 1}
    ((gamma-1)/a0)^{alpha/(n(gamma-1))} with a0 = (gamma-1)^2/(4 gamma)."""
    lo, hi = _critical_gamma_window(n, alpha)
    if not (lo < gamma <= hi):
        raise DomainError(
            f"gamma must lie in ({lo}, {hi}] for the critical-mass bound"
        )
    if not sharp_constant > 0.0:
        raise DomainError("sharp constant must be positive")
    a0 = (gamma - 1.0) ** 2 / (4.0 * gamma)
    expo = alpha / (n * (gamma - 1.0))
    return (
        sharp_constant / (2.0 * alpha)
        * surface_area(n) ** (expo - 1.0)
        * ((gamma - 1.0) / a0) ** expo
    )


def critical_mass(n: int, gamma: float, alpha: float, E0: float | None = None,
                  sharp_constant: float | None = None) -> CriticalMassReport:
    """Critical mass below which internal energy dominates the attraction.

    Uses the closed-form HLS constant as a surrogate for the (unpublished)
    sharp constant; since the true constant is strictly smaller, the
    returned Mc is a conservative lower bound.
    """
    if not alpha > 0.0:
        raise DomainError("critical mass is defined for alpha > 0")
    lo, hi = _critical_gamma_window(n, alpha)
    if not (lo < gamma <= hi):
        raise DomainError(f"gamma must lie in ({lo}, {hi}]")
    used = "hls_surrogate"
    if sharp_constant is None:
        sharp_constant = hls_constant(n, alpha)
    else:
        used = "caller_supplied"
    B = b_constant(n, gamma, alpha, sharp_constant)
    if gamma == hi:
        Mc = B ** (-n / (n - alpha))
        E0 = None
    else:
        if E0 is None or E0 <= 0.0:
            raise DomainError("the gamma < (n+alpha)/n branch needs E0 > 0")
        ngm = n * (gamma - 1.0)
        denom = 2.0 * n - gamma * (2.0 * n - alpha)
        Mc = (
            (alpha * B / ngm) ** (ngm / denom)
            * (alpha * E0 / (alpha - ngm)) ** ((alpha - ngm) / denom)
        )
    return CriticalMassReport(n=n, alpha=alpha, gamma=gamma, E0=E0, B=B,
                              Mc=Mc, constant_used=used)


def critical_alpha_band(n: int):
    """(alpha_-, alpha_+) with alpha_pm = (n-2 +- sqrt(n^2-20n+4))/4, or None.

    Real only when n^2 - 20n + 4 >= 0, i.e. n >= 20 among integers; this is
    the band where the critical-mass condition is the binding constraint.
    """
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    disc = n * n - 20 * n + 4
    if disc < 0:
        return None
    root = math.sqrt(disc)
    return ((n - 2 - root) / 4.0, (n - 2 + root) / 4.0)


# ---------------------------------------------------------------------------
# entropy pairs
# ---------------------------------------------------------------------------

def _entropy_quad(fn, b: float, kink: float | None = None,
                  order: int = 64) -> float:
    """int_{-1}^1 fn(s) (1-s^2)^b ds via the substitution s = sin(phi).

    The weight becomes cos^{2b+1}(phi), and 2b+1 > 0 for every gamma > 1,
    so the endpoint singularity is fully absorbed.  An interior kink (the
    |u + rho^theta s| corner) splits the quadrature interval.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    edges = [-math.pi / 2, math.pi / 2]
    if kink is not None and -1.0 < kink < 1.0:
        edges.insert(1, math.asin(kink))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        phi = lo + (hi - lo) * x
        s = np.sin(phi)
        total += (hi - lo) * float(
            np.sum(w * fn(s) * np.cos(phi) ** (2.0 * b + 1.0)))
    return total


def entropy_pair(rho: float, u: float, gamma: float):
    """Weak entropy pair (eta#, q#) generated by psi(s) = s|s|/2.

    theta = (gamma-1)/2 and the kernel exponent b = (3-gamma)/(2(gamma-1)).
    Vanishes at vacuum for any fixed u.
    """
    if gamma <= 1.0:
        raise DomainError("entropy pair needs gamma > 1")
    if rho < 0.0:
        raise DomainError("density must be nonnegative")
    if rho == 0.0:
        return 0.0, 0.0
    theta = (gamma - 1.0) / 2.0
    b = (3.0 - gamma) / (2.0 * (gamma - 1.0))
    rt = rho ** theta
    kink = -u / rt   # corner of |u + rho^theta s|

    def eta_fn(s):
        v = u + rt * s
        return v * np.abs(v)

    def q_fn(s):
        v = u + rt * s
        return (u + theta * rt * s) * v * np.abs(v)

    eta = 0.5 * rho * _entropy_quad(eta_fn, b, kink=kink)
    q = 0.5 * rho * _entropy_quad(q_fn, b, kink=kink)
    return eta, q


def entropy_bounds_check(rho, u, gamma: float):
    """Verify |eta#| <= C (rho u^2 + rho^gamma) and
    q# >= C^{-1} (rho |u|^3 + rho^{gamma+theta}) with one fitted C over the
    sample lattice; returns True when a single finite C works.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    theta = (gamma - 1.0) / 2.0
    c_eta = 0.0
    c_q = 0.0
    for rr in rho:
        for uu in u:
            eta, q = entropy_pair(rr, uu, gamma)
            if rr == 0.0:
                continue
            upper = rr * uu ** 2 + rr ** gamma
            lower = rr * abs(uu) ** 3 + rr ** (gamma + theta)
            if q <= 0.0:
                return False
            c_eta = max(c_eta, abs(eta) / upper)
            c_q = max(c_q, lower / q)
    c = max(c_eta, c_q, 1.0)
    return bool(np.isfinite(c))
