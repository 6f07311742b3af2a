"""Free-boundary viscous gas solver in Lagrangian mass coordinates.

The annulus [a, b(t)] maps to the fixed mass interval [0, M/omega_n].
State layout is staggered: velocities and particle radii live on the
mass-cell edges, densities at cell centers.  Cell masses are fixed, so the
density is defined by the cell volume,

    rho_{j+1/2} = dx_{j+1/2} / ((r_{j+1}^n - r_j^n)/n),

which conserves mass to machine precision and satisfies the discrete
continuity equation exactly.  Time stepping is a two-stage midpoint
predictor-corrector with the viscous flux treated implicitly by a
tridiagonal solve each stage.  Boundary conditions: u = 0 at the fixed
inner edge, zero total stress (p - eps rho^2 (r^{n-1} u)_x = 0) imposed
through a ghost state at the outer edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import BlowupError, DomainError
from .functionals import EnergyBreakdown
from .radial_kernel import (
    K_matrix,
    PotentialSpec,
    RadialField,
    RadialGrid,
    coulomb_K,
    convolve_radial,
    kalpha_weight,
    omega_matrix,
    surface_area,
)

__all__ = [
    "SolverConfig", "FluidState", "DiagnosticsRow",
    "build_initial_data", "state_from_profile", "step", "run",
    "diagnostics", "eulerian_map", "vanishing_viscosity_sweep",
    "force_at_edges", "potential_at_centers",
    "DIAGNOSTICS_HEADER",
]

DIAGNOSTICS_HEADER = ("t,mass,E_kin,E_int,E_pot,E_tot,bd_entropy,"
                      "boundary_pressure,b_t,min_rho,dissipation_rate")


@dataclass(frozen=True)
class SolverConfig:
    spec: PotentialSpec
    epsilon: float
    b: float
    N: int
    T: float
    cfl: float = 0.4
    dt_max: float = math.inf
    force_refresh_every: int = 1
    output_every: int = 10
    density_floor: float = 1e-14
    force_method: str = "auto"   # "auto" | "local" | "quadrature"

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise DomainError("viscosity epsilon must be positive")
        if not self.b > 1.0:
            raise DomainError("outer radius b must exceed 1")
        if self.N < 16:
            raise DomainError("need at least 16 mass cells")
        if not 0.0 < self.cfl <= 1.0:
            raise DomainError("cfl must lie in (0, 1]")
        if self.force_method not in ("auto", "local", "quadrature"):
            raise DomainError(f"unknown force method {self.force_method!r}")
        if self.force_method == "local" and not self.spec.is_coulomb:
            raise DomainError("local force path only exists at alpha = n-2")


@dataclass(frozen=True)
class FluidState:
    """Lagrangian snapshot; x and r at edges, rho at centers, u at edges."""

    x: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    t: float
    profile: RadialField | None = None   # continuum initial profile, if built

    def __post_init__(self):
        for name in ("x", "r", "rho", "u"):
            object.__setattr__(self, name,
                               np.ascontiguousarray(getattr(self, name), float))
        N = self.rho.size
        if self.x.size != N + 1 or self.r.size != N + 1 or self.u.size != N + 1:
            raise DomainError("edge arrays must have one more entry than rho")
        if np.any(self.rho <= 0.0):
            raise DomainError("free-boundary states are vacuum-free (rho > 0)")
        if self.u[0] != 0.0:
            raise DomainError("inner boundary velocity must vanish")
        if np.any(np.diff(self.r) <= 0.0):
            raise DomainError("particle radii must be strictly increasing")

    @property
    def b_t(self) -> float:
        return float(self.r[-1])

    @property
    def n_cells(self) -> int:
        return self.rho.size


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    mass: float
    energy: EnergyBreakdown
    bd_entropy: float
    boundary_pressure: float
    b_t: float
    min_rho: float
    dissipation_rate: float

    def as_csv_row(self) -> str:
        vals = [self.t, self.mass, self.energy.kinetic, self.energy.internal,
                self.energy.interaction, self.energy.total, self.bd_entropy,
                self.boundary_pressure, self.b_t, self.min_rho,
                self.dissipation_rate]
        return ",".join(f"{v:.17g}" for v in vals)


# ---------------------------------------------------------------------------
# geometric helpers
# ---------------------------------------------------------------------------

def _cell_volumes(n: int, r: np.ndarray) -> np.ndarray:
    return (r[1:] ** n - r[:-1] ** n) / n


def _density_from_radii(n: int, x: np.ndarray, r: np.ndarray) -> np.ndarray:
    return np.diff(x) / _cell_volumes(n, r)


def _mass_centers(n: int, r: np.ndarray) -> np.ndarray:
    """Radius enclosing half the cell volume (midpoint in mass coordinate)."""
    return (0.5 * (r[:-1] ** n + r[1:] ** n)) ** (1.0 / n)


def discrete_mass(n: int, state: FluidState) -> float:
    return surface_area(n) * float(np.sum(state.rho * _cell_volumes(n, state.r)))


# ---------------------------------------------------------------------------
# nonlocal force
# ---------------------------------------------------------------------------

def make_force_fn(config: SolverConfig, fresh: bool = True,
                  frozen_matrix: np.ndarray | None = None):
    """Force evaluator (x, r) -> (Phi_alpha * rho)_r at the cell edges.

    Local path (alpha = n-2): omega_n x_j / r_j^{n-1}, exact because the
    mass coordinate x_j IS the enclosed-mass integral.  Quadrature path:
    midpoint rule in mass coordinate against the angular kernel matrix;
    with fresh=False the supplied matrix is reused until the next refresh
    (documented staleness, force_refresh_every).
    """
    spec = config.spec
    if spec.is_coulomb and config.force_method in ("auto", "local"):
        wn = surface_area(spec.n)

        def local_fn(x, r):
            return wn * x / r ** (spec.n - 1)

        return local_fn

    if fresh:
        def fresh_fn(x, r):
            centers = _mass_centers(spec.n, r)
            return omega_matrix(spec, r, centers) @ np.diff(x)

        return fresh_fn

    def stale_fn(x, r):
        return frozen_matrix @ np.diff(x)

    return stale_fn


def force_at_edges(config: SolverConfig, state: FluidState) -> np.ndarray:
    """(Phi_alpha * rho)_r at the cell edges of a state (always fresh)."""
    return make_force_fn(config)(state.x, state.r)


def force_matrix(config: SolverConfig, state: FluidState) -> np.ndarray:
    """omega(r_edge, r_center) for the midpoint mass-coordinate rule."""
    centers = _mass_centers(config.spec.n, state.r)
    return omega_matrix(config.spec, state.r, centers)


def potential_at_centers(spec: PotentialSpec, state: FluidState) -> np.ndarray:
    """(Phi_alpha * rho) at the cell centers via the mass-coordinate rule.

    The self-cell is integrated by interior Gauss nodes in eta (the kernel
    is integrable but pointwise singular for alpha >= n-2).
    """
    n = spec.n
    centers = _mass_centers(n, state.r)
    dx = np.diff(state.x)
    if spec.is_coulomb:
        K = coulomb_K(n, centers[:, None], centers[None, :])
        return K @ dx
    K = K_matrix(spec, centers, centers)
    np.fill_diagonal(K, 0.0)
    out = K @ dx

    # self-cell by GL nodes on the two half-cells, density cellwise constant
    xs, ws = np.polynomial.legendre.leggauss(8)
    xs = 0.5 * (xs + 1.0)
    ws = 0.5 * ws
    for i, c in enumerate(centers):
        acc = 0.0
        for lo, hi in ((state.r[i], c), (c, state.r[i + 1])):
            nodes = lo + (hi - lo) * xs
            vals = K_matrix(spec, np.array([c]), nodes)[0]
            acc += (hi - lo) * np.sum(ws * vals * nodes ** (n - 1))
        out[i] += state.rho[i] * acc
    return out


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------

def stable_dt(config: SolverConfig, state: FluidState) -> float:
    """Acoustic CFL limit in mass coordinates (viscosity is implicit)."""
    spec = config.spec
    dx = np.diff(state.x)
    rbar = _mass_centers(spec.n, state.r)
    ubar = 0.5 * (state.u[:-1] + state.u[1:])
    cs = spec.sound_speed(state.rho)
    speed = state.rho * rbar ** (spec.n - 1) * (np.abs(ubar) + cs)
    dt = config.cfl * float(np.min(dx / np.maximum(speed, 1e-300)))
    return min(dt, config.dt_max)


def _explicit_accel(config: SolverConfig, x, r, rho, force) -> np.ndarray:
    """Pressure gradient + nonlocal force at the edges (u-independent part)."""
    spec = config.spec
    n = spec.n
    p = spec.pressure(rho)
    dx = np.diff(x)
    acc = np.zeros_like(r)
    # interior edges
    dxc = 0.5 * (dx[:-1] + dx[1:])
    acc[1:-1] = -r[1:-1] ** (n - 1) * (p[1:] - p[:-1]) / dxc
    # outer edge: stress-free ghost sigma = 0; pressure part of
    # -(sigma_ghost - sigma_{N-1/2})/(dx/2)
    acc[-1] = r[-1] ** (n - 1) * p[-1] / (0.5 * dx[-1])
    acc -= spec.kappa * force
    acc[0] = 0.0
    return acc


def _viscous_solve(config: SolverConfig, x, r, rho, rhs, dt) -> np.ndarray:
    """Solve (I - dt L) u = rhs for the implicit viscous update.

    L u = eps r^{n-1} (rho^2 (r^{n-1} u)_x)_x - (n-1) eps r^{n-2} rho_x u,
    with u_0 = 0 and the ghost-stress outer closure.
    """
    spec = config.spec
    n = spec.n
    eps = config.epsilon
    N = rho.size
    dx = np.diff(x)
    rn = r ** (n - 1)

    # flux coefficient per cell: sigma_v = c_cell (r^{n-1}u)_x
    c_cell = rho ** 2 / dx

    lower = np.zeros(N + 1)
    diag = np.ones(N + 1)
    upper = np.zeros(N + 1)
    rhs = rhs.copy()

    dxc = np.empty(N + 1)
    dxc[1:-1] = 0.5 * (dx[:-1] + dx[1:])
    dxc[0] = 0.5 * dx[0]
    dxc[-1] = 0.5 * dx[-1]

    # rho_x at edges for the geometric viscosity term
    rho_x = np.zeros(N + 1)
    rho_x[1:-1] = (rho[1:] - rho[:-1]) / dxc[1:-1]
    rho_x[-1] = (rho[-1] - rho[-2]) / dx[-1] if N > 1 else 0.0

    a = eps * rn / dxc
    # right flux, cells 1..N-1 feed edges 1..N-1; at edge N the right flux
    # is the ghost (total stress zero; its viscous part is folded into the
    # explicit pressure term)
    diag[1:N] += dt * a[1:N] * c_cell[1:] * rn[1:N]
    upper[1:N] = -dt * a[1:N] * c_cell[1:] * rn[2:]
    # left flux, cells 0..N-1 feed edges 1..N
    diag[1:] += dt * a[1:] * c_cell * rn[1:]
    lower[1:] = -dt * a[1:] * c_cell * rn[:-1]
    # lower-order geometric term, implicit on the diagonal
    diag[1:] += dt * (n - 1) * eps * r[1:] ** (n - 2) * rho_x[1:]

    # Dirichlet at the inner edge
    diag[0] = 1.0
    upper[0] = 0.0
    rhs[0] = 0.0

    ab = np.zeros((3, N + 1))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs)


def _stage(config: SolverConfig, state0: FluidState, x, r, rho, force, dt):
    acc = _explicit_accel(config, x, r, rho, force)
    rhs = state0.u + dt * acc
    rhs[0] = 0.0
    u_new = _viscous_solve(config, x, r, rho, rhs, dt)
    u_new[0] = 0.0
    return u_new


def step(config: SolverConfig, state: FluidState, dt: float,
         force_fn=None) -> FluidState:
    """Advance one time step (midpoint predictor-corrector)."""
    spec = config.spec
    x = state.x
    if force_fn is None:
        force_fn = make_force_fn(config)

    force0 = force_fn(x, state.r)
    u_half = _stage(config, state, x, state.r, state.rho, force0, 0.5 * dt)
    r_half = state.r + 0.5 * dt * u_half
    if np.any(np.diff(r_half) <= 0.0):
        raise BlowupError("cell inversion in predictor", state=state)
    rho_half = _density_from_radii(spec.n, x, r_half)

    force_h = force_fn(x, r_half)
    u_new = _stage(config, state, x, r_half, rho_half, force_h, dt)
    r_new = state.r + dt * 0.5 * (u_half + u_new)
    r_new[0] = state.r[0]
    if np.any(np.diff(r_new) <= 0.0):
        raise BlowupError("cell inversion in corrector", state=state)
    rho_new = _density_from_radii(spec.n, x, r_new)
    if np.min(rho_new) < config.density_floor or not np.all(np.isfinite(rho_new)):
        raise BlowupError("density floor reached (under-resolution)",
                          state=state)
    if not np.all(np.isfinite(u_new)):
        raise BlowupError("non-finite velocity", state=state)
    return FluidState(x, r_new, rho_new, u_new, state.t + dt,
                      profile=state.profile)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def diagnostics(config: SolverConfig, state: FluidState,
                pot_centers: np.ndarray | None = None) -> DiagnosticsRow:
    spec = config.spec
    n = spec.n
    wn = surface_area(n)
    dx = np.diff(state.x)
    rbar = _mass_centers(n, state.r)
    ubar = 0.5 * (state.u[:-1] + state.u[1:])

    # trapezoid weights on the mass grid for edge-valued integrands
    wx = np.zeros_like(state.x)
    wx[:-1] += 0.5 * dx
    wx[1:] += 0.5 * dx

    kin = wn * float(np.sum(wx * 0.5 * state.u ** 2))
    internal = wn * float(np.sum(dx * spec.internal_energy_density(state.rho)))
    if pot_centers is None:
        pot_centers = potential_at_centers(spec, state)
    inter = 0.5 * spec.kappa * wn * float(np.sum(dx * pot_centers))

    moment = None
    if spec.alpha <= 0.0:
        moment = wn * float(np.sum(dx * kalpha_weight(spec, rbar)))

    # BD functional eps^2 int |(sqrt rho)_r|^2 r^{n-1} dr, centered differences
    sq = np.sqrt(state.rho)
    dc = rbar[1:] - rbar[:-1]
    dsq = (sq[1:] - sq[:-1]) / dc
    redge = state.r[1:-1]
    bd = config.epsilon ** 2 * float(np.sum(dsq ** 2 * redge ** (n - 1) * dc))

    energy = EnergyBreakdown(kinetic=kin, internal=internal, interaction=inter,
                             total=kin + internal + inter, moment=moment,
                             bd_entropy=bd)

    # outer stress residual with the scheme's own operators
    p_last = float(spec.pressure(state.rho[-1]))
    div_last = (state.r[-1] ** (n - 1) * state.u[-1]
                - state.r[-2] ** (n - 1) * state.u[-2]) / dx[-1]
    sigma = p_last - config.epsilon * state.rho[-1] ** 2 * div_last

    dr = np.diff(state.r)
    du = np.diff(state.u) / dr
    diss = config.epsilon * wn * float(
        np.sum(state.rho * (du ** 2 + (n - 1) * (ubar / rbar) ** 2)
               * rbar ** (n - 1) * dr))

    return DiagnosticsRow(
        t=state.t, mass=discrete_mass(n, state), energy=energy, bd_entropy=bd,
        boundary_pressure=sigma, b_t=state.b_t,
        min_rho=float(np.min(state.rho)), dissipation_rate=diss,
    )


def eulerian_map(state: FluidState):
    """Snapshot as radial fields: rho at cell-center radii, u at edge radii."""
    centers = 0.5 * (state.r[:-1] + state.r[1:])
    rho = RadialField(RadialGrid(centers), state.rho)
    u = RadialField(RadialGrid(state.r), state.u)
    return rho, u


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def _cutoff_S(z):
    """Smooth monotone cutoff: 0 for z <= 0, 1 for z >= 1."""
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(z > 0.0, np.exp(-1.0 / np.maximum(z, 1e-300)), 0.0)
        g = np.where(z < 1.0, np.exp(-1.0 / np.maximum(1.0 - z, 1e-300)), 0.0)
    return f / (f + g)


def _mollifier_profile(n: int):
    """Bump mollifier J(s) = c exp(1/(s^2-1)) on |s| < 1, unit n-D mass."""
    xs, ws = np.polynomial.legendre.leggauss(64)
    s = 0.5 * (xs + 1.0)
    w = 0.5 * ws
    vals = np.exp(1.0 / (s ** 2 - 1.0)) * s ** (n - 1)
    c = 1.0 / (surface_area(n) * float(np.sum(w * vals)))

    def J(d):
        d = np.asarray(d, dtype=float)
        inside = d < 1.0
        out = np.zeros_like(d)
        out[inside] = c * np.exp(1.0 / (d[inside] ** 2 - 1.0))
        return out

    return J


def beta_exponent(spec: PotentialSpec) -> float:
    """Boundary decay exponent beta = min{1/2, (1 - 1/gamma) n}."""
    return min(0.5, (1.0 - 1.0 / spec.gamma) * spec.n)


def build_initial_data(spec: PotentialSpec, rho0: RadialField,
                       m0: RadialField | None, epsilon: float, b: float,
                       N: int, fine: int = 4096) -> FluidState:
    """Approximate initial data on the annulus [1/b, b].

    Construction: mollify sqrt(rho0) with the n-D bump mollifier at scale
    sqrt(eps), add the eps-Gaussian vacuum lift, square; blend to the
    boundary profile b^{-(n-beta)} with a smooth cutoff; normalize the bulk
    amplitude so the annulus mass is exactly M; build equal-mass cells by
    inverting the cumulative mass; add the boundary-layer velocity so the
    discrete outer stress vanishes identically at t = 0.
    """
    if epsilon <= 0.0 or b <= 1.0:
        raise DomainError("need epsilon > 0 and b > 1")
    n = spec.n
    M = surface_area(n) * float(np.trapezoid(
        rho0.values * rho0.grid.nodes ** (n - 1), rho0.grid.nodes))
    if M <= 0.0:
        raise DomainError("initial data must carry positive mass")

    a = 1.0 / b
    r_fine = np.linspace(a, b, fine)
    grid_fine = RadialGrid(r_fine)

    # bulk: (sqrt(rho0) * J_sqrt(eps) + eps exp(-r^2))^2, before normalization
    sq = np.sqrt(np.clip(np.interp(r_fine, rho0.grid.nodes, rho0.values,
                                   left=0.0, right=0.0), 0.0, None))
    delta = math.sqrt(epsilon)
    J = _mollifier_profile(n)
    moll = convolve_radial(n, lambda d: J(d / delta) / delta ** n,
                           RadialField(grid_fine, sq), support=delta)
    amp = moll.values + epsilon * np.exp(-r_fine ** 2)

    # boundary blend: rho = (c A (1-S) + tail S)^2 keeps rho(b) exact for any c
    beta = beta_exponent(spec)
    tail = b ** (-(n - beta) / 2.0)
    S = _cutoff_S(2.0 * (r_fine - (b - 1.0)))
    A = amp * (1.0 - S)
    B = tail * S

    w = np.zeros_like(r_fine)
    h = np.diff(r_fine)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    w *= surface_area(n) * r_fine ** (n - 1)
    # mass(c) = int (cA + B)^2 = c^2 <A,A> + 2c <A,B> + <B,B> = M
    aa = float(np.sum(w * A * A))
    ab_ = float(np.sum(w * A * B))
    bb = float(np.sum(w * B * B))
    if bb >= M:
        raise DomainError("boundary tail alone exceeds the target mass; "
                          "increase b")
    c = (-ab_ + math.sqrt(ab_ ** 2 + aa * (M - bb))) / aa
    rho_prof = (c * A + B) ** 2
    profile = RadialField(grid_fine, rho_prof)

    # equal-mass cells by inverting the cumulative mass
    integrand = rho_prof * r_fine ** (n - 1)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (integrand[:-1]
                                                      + integrand[1:]))))
    x_edges = np.linspace(0.0, cum[-1], N + 1)
    r_edges = np.interp(x_edges, cum, r_fine)
    r_edges[0], r_edges[-1] = a, b
    rho_cells = _density_from_radii(n, x_edges, r_edges)

    # bulk velocity: mollified momentum ratio, supported away from both edges
    u_edges = np.zeros(N + 1)
    if m0 is not None and np.any(m0.values != 0.0):
        ratio = np.interp(r_fine, m0.grid.nodes,
                          np.where(rho0.values > 0,
                                   m0.values / np.sqrt(np.maximum(rho0.values,
                                                                  1e-300)), 0.0),
                          left=0.0, right=0.0)
        ratio *= (r_fine >= 4.0 * a) & (r_fine <= b - 2.0)
        mollv = convolve_radial(n, lambda d: J(d * b) * b ** n,
                                RadialField(grid_fine, ratio), support=1.0 / b)
        u_bulk = mollv.values / np.sqrt(np.maximum(rho_prof, 1e-300))
        u_edges += np.interp(r_edges, r_fine, u_bulk, left=0.0, right=0.0)

    # boundary layer: discrete recursion making the outer stress vanish
    # exactly: rho^2 (r^{n-1} v)_x = p / eps on cells inside the cutoff band
    p_cells = spec.pressure(rho_cells)
    dx = np.diff(x_edges)
    v = np.zeros(N + 1)
    Sedge = _cutoff_S(4.0 * (r_edges - (b - 0.5)))
    for j in range(N - 1, -1, -1):
        if r_edges[j] < b - 0.75:
            break
        rhs = dx[j] * p_cells[j] / (epsilon * rho_cells[j] ** 2)
        v[j] = (r_edges[j + 1] ** (n - 1) * v[j + 1] - rhs) / r_edges[j] ** (n - 1)
    u_edges += Sedge * v
    u_edges[0] = 0.0

    return FluidState(x_edges, r_edges, rho_cells, u_edges, 0.0,
                      profile=profile)


def state_from_profile(spec: PotentialSpec, rho0: RadialField,
                       u0: RadialField | None, N: int,
                       r_inner: float | None = None) -> FluidState:
    """Discretize a strictly positive (on its support) profile directly.

    Used by the stability experiments, which must start from the perturbed
    steady profile without the Appendix-B mollification machinery.
    """
    r = rho0.grid.nodes
    vals = rho0.values
    pos = vals > 0.0
    if not np.any(pos):
        raise DomainError("profile carries no mass")
    hi = int(np.nonzero(pos)[0][-1])
    r_hi = r[hi]
    lo = r_inner if r_inner is not None else max(r[0], 1e-3 * r_hi)

    mask = (r >= lo) & (r <= r_hi)
    rr = r[mask]
    vv = np.maximum(vals[mask], 0.0)
    integrand = vv * rr ** (spec.n - 1)
    h = np.diff(rr)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (integrand[:-1]
                                                      + integrand[1:]))))
    # strictly increasing cumulative needed for inversion
    cum = np.maximum.accumulate(cum)
    x_edges = np.linspace(0.0, cum[-1], N + 1)
    r_edges = np.interp(x_edges, cum, rr)
    r_edges[0], r_edges[-1] = rr[0], rr[-1]
    r_edges = np.maximum.accumulate(r_edges)
    if np.any(np.diff(r_edges) <= 0.0):
        raise DomainError("profile too degenerate to build equal-mass cells")
    rho_cells = _density_from_radii(spec.n, x_edges, r_edges)
    u_edges = np.zeros(N + 1)
    if u0 is not None:
        u_edges = np.interp(r_edges, u0.grid.nodes, u0.values,
                            left=0.0, right=0.0)
        u_edges[0] = 0.0
    return FluidState(x_edges, r_edges, rho_cells, u_edges, 0.0, profile=rho0)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def run(config: SolverConfig, initial: FluidState,
        sample_times: np.ndarray | None = None):
    """Integrate to T; returns the list of sampled (state, DiagnosticsRow).

    Diagnostics are captured every output_every steps, or exactly at
    sample_times when given (dt is clipped to land on them).  Terminates at
    T or raises BlowupError with the last valid state attached.
    """
    state = initial
    samples = [(state, diagnostics(config, state))]
    schedule = None
    if sample_times is not None:
        schedule = [t for t in np.sort(np.asarray(sample_times, float))
                    if t > state.t]

    steps = 0
    needs_matrix = (config.force_method == "quadrature"
                    or not config.spec.is_coulomb)
    refresh = config.force_refresh_every
    force_fn = make_force_fn(config)
    while state.t < config.T - 1e-14:
        dt = min(stable_dt(config, state), config.T - state.t)
        if schedule:
            dt = min(dt, schedule[0] - state.t)
        if needs_matrix and refresh > 1 and steps % refresh == 0:
            force_fn = make_force_fn(config, fresh=False,
                                     frozen_matrix=force_matrix(config, state))
        state = step(config, state, dt, force_fn=force_fn)
        steps += 1
        hit_sample = bool(schedule) and state.t >= schedule[0] - 1e-14
        if hit_sample:
            schedule.pop(0)
        if (schedule is None and steps % config.output_every == 0) or hit_sample:
            samples.append((state, diagnostics(config, state)))
    if samples[-1][0] is not state:
        samples.append((state, diagnostics(config, state)))
    return samples


def _interp_profile(state: FluidState, targets: np.ndarray) -> np.ndarray:
    centers = 0.5 * (state.r[:-1] + state.r[1:])
    return np.interp(targets, centers, state.rho, left=0.0, right=0.0)


def vanishing_viscosity_sweep(config: SolverConfig, eps_list,
                              initial_builder, n_samples: int = 5,
                              threads: int = 1):
    """Identical initial data across viscosities; pairwise L^q distances.

    The initial state is built once, at the smallest viscosity (sharpest
    mollification), and shared by every run so that the sweep isolates the
    viscous term.  Trajectories are independent and run in a thread pool
    when threads > 1.  Returns rows (t, eps_i, eps_j, L1, Lgamma) at
    matched sample times plus a Cauchy indicator (distances at the final
    time monotone along the eps sequence).  No rate or monotonicity is
    asserted here; the report is empirical.
    """
    eps_list = list(eps_list)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise DomainError("eps_list must be strictly decreasing")
    times = np.linspace(config.T / n_samples, config.T, n_samples)
    init = initial_builder(replace(config, epsilon=eps_list[-1]))

    def one(eps):
        return run(replace(config, epsilon=eps), init, sample_times=times)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, eps_list))
        trajectories = dict(zip(eps_list, results))
    else:
        trajectories = {eps: one(eps) for eps in eps_list}

    spec = config.spec
    rows = []
    final_l1 = []
    for e1, e2 in zip(eps_list, eps_list[1:]):
        for k, t in enumerate(times):
            s1 = _closest_sample(trajectories[e1], t)
            s2 = _closest_sample(trajectories[e2], t)
            rmax = max(s1.b_t, s2.b_t)
            targets = np.linspace(min(s1.r[0], s2.r[0]), rmax, 2048)
            p1 = _interp_profile(s1, targets)
            p2 = _interp_profile(s2, targets)
            w = np.gradient(targets) * targets ** (spec.n - 1) * surface_area(spec.n)
            l1 = float(np.sum(w * np.abs(p1 - p2)))
            lg = float(np.sum(w * np.abs(p1 - p2) ** spec.gamma)) ** (1 / spec.gamma)
            rows.append((t, e1, e2, l1, lg))
            if k == len(times) - 1:
                final_l1.append(l1)
    cauchy = all(b < a for a, b in zip(final_l1, final_l1[1:]))
    return rows, cauchy, final_l1


def _closest_sample(samples, t: float) -> FluidState:
    best = min(samples, key=lambda sd: abs(sd[0].t - t))
    return best[0]
