"""Steady states as minimizers of the free energy over the mass class.

The minimizer solves the Euler-Lagrange fixed point

    rho = [ (gamma-1)/(a0 gamma) (lambda - Phi_alpha * rho) ]_+^{1/(gamma-1)},

with the multiplier lambda pinned by the mass constraint each sweep.  An
aggregation-diffusion gradient flow on the same functional provides an
independent cross-validation oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IterationError
from .functionals import free_energy, total_mass
from .radial_kernel import (
    PotentialSpec,
    RadialField,
    RadialGrid,
    _trapezoid_weights,
    coulomb_K,
    K_matrix,
    omega_matrix,
    surface_area,
)

__all__ = ["SteadyState", "solve_minimizer", "gradient_flow_oracle",
           "euler_lagrange_residual", "sub_critical_steady_residual",
           "steady_state_to_json", "steady_state_from_json"]

SUPPORT_THRESHOLD = 1e-12


@dataclass(frozen=True)
class SteadyState:
    profile: RadialField
    lam: float
    support_radius: float
    free_energy: float
    mass: float
    iterations: int

    def __post_init__(self):
        if self.mass <= 0.0:
            raise DomainError("steady state must carry positive mass")


def _check_regime(spec: PotentialSpec, subcritical_ok: bool = False):
    if spec.kappa != 1:
        raise DomainError("steady states are computed for the attractive case")
    log_2d = spec.n == 2 and spec.alpha == 0.0   # logarithmic end point
    if not (0.0 < spec.alpha < spec.n - 1 or log_2d):
        raise DomainError("steady states need alpha in (0, n-1) "
                          "(or the 2-D logarithmic end point)")
    lo = (2.0 * spec.n / (2.0 * spec.n - spec.alpha) if subcritical_ok
          else (spec.n + spec.alpha) / spec.n)
    if not spec.gamma > lo:
        raise DomainError(f"steady-state regime requires gamma > {lo}")


def _coulomb_potential_op(spec: PotentialSpec, r: np.ndarray):
    """O(N) application of the trapezoid-weighted Coulomb kernel matrix.

    Identical values to coulomb_K(r_i, r_j) * w_j r_j^{n-1} @ rho without
    materializing the N x N matrix.
    """
    n = spec.n
    w = _trapezoid_weights(r) * r ** (n - 1)
    wn = surface_area(n)

    def apply(rho):
        s = w * rho
        csum = np.cumsum(s)
        if n == 2:
            tail = np.concatenate((np.cumsum((s * np.log(r))[::-1])[::-1][1:],
                                   [0.0]))
            return wn * (np.log(r) * csum + tail)
        g = r ** (2 - n)
        tail = np.concatenate((np.cumsum((s * g)[::-1])[::-1][1:], [0.0]))
        return -wn / (n - 2) * (g * csum + tail)

    return apply


def _potential_op(spec: PotentialSpec, r: np.ndarray):
    """Callable rho -> Phi_alpha * rho on the nodes (matrix-free at Coulomb)."""
    if spec.is_coulomb:
        return _coulomb_potential_op(spec, r)
    Kw = _kernel_matrix_weighted(spec, r)
    return lambda rho: Kw @ rho


def _cumtrapz_force(spec: PotentialSpec, r: np.ndarray):
    """Exact local Coulomb force omega_n r^{1-n} cumtrapz(rho r^{n-1})."""
    n = spec.n
    wn = surface_area(n)
    dr = np.diff(r)

    def apply(rho):
        f = rho * r ** (n - 1)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * dr * (f[:-1] + f[1:]))))
        return wn * cum / r ** (n - 1)

    return apply


def _kernel_matrix_weighted(spec: PotentialSpec, r: np.ndarray) -> np.ndarray:
    """Symmetric weighted matrix: (Phi*rho)_i = M @ rho.

    Uses the exact Coulomb closed form when available; the generic
    quadrature diagonal defers to the neighbor average (the kernel is
    integrable there), adequate at the grid tolerances used here.
    """
    if spec.is_coulomb:
        K = coulomb_K(spec.n, r[:, None], r[None, :])
    else:
        K = K_matrix(spec, r, r)
        if spec.alpha >= spec.n - 2:
            i = np.arange(r.size)
            K[i, i] = 0.0
            K[i[1:-1], i[1:-1]] = 0.5 * (K[i[1:-1], i[1:-1] - 1]
                                         + K[i[1:-1], i[1:-1] + 1])
            K[0, 0] = K[0, 1]
            K[-1, -1] = K[-1, -2]
    w = _trapezoid_weights(r) * r ** (spec.n - 1)
    M = K * w[None, :]
    # enforce exact symmetry of the quadratic form (K itself is symmetric)
    return M


def _mass_of(spec: PotentialSpec, r, w, rho) -> float:
    return surface_area(spec.n) * float(np.sum(w * rho * r ** (spec.n - 1)))


def _el_density(spec: PotentialSpec, lam: float, pot: np.ndarray) -> np.ndarray:
    base = (spec.gamma - 1.0) / (spec.a0 * spec.gamma) * (lam - pot)
    return np.clip(base, 0.0, None) ** (1.0 / (spec.gamma - 1.0))


def _solve_lambda(spec: PotentialSpec, r, w, pot, M: float) -> float:
    """Bisection for the multiplier fixing the mass of the EL density."""
    lo = float(np.min(pot)) - 1.0
    hi = 0.0
    for _ in range(200):
        if _mass_of(spec, r, w, _el_density(spec, hi, pot)) >= M:
            break
        hi = max(1.0, 2.0 * hi + 1.0)
    else:
        raise IterationError("lambda bracket failed to enclose the mass")
    for _ in range(200):
        if _mass_of(spec, r, w, _el_density(spec, lo, pot)) <= M:
            break
        lo = 2.0 * lo - 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _mass_of(spec, r, w, _el_density(spec, mid, pot)) < M:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * (1.0 + abs(hi)):
            break
    return 0.5 * (lo + hi)


def _support_radius(r: np.ndarray, rho: np.ndarray) -> float:
    """Edge of the support, extrapolating the incoming slope to zero.

    Compactly supported minimizers vanish linearly at the edge, so the
    back-slope crossing locates it to O(h^2).
    """
    thresh = SUPPORT_THRESHOLD * float(np.max(rho))
    pos = rho > thresh
    if not np.any(pos):
        raise DomainError("profile has no support")
    i = int(np.nonzero(pos)[0][-1])
    if 0 < i:
        slope = (rho[i - 1] - rho[i]) / (r[i] - r[i - 1])
        if slope > 0.0:
            return float(min(r[i] + rho[i] / slope,
                             r[min(i + 1, r.size - 1)]))
    return float(r[i])


def solve_minimizer(spec: PotentialSpec, M: float, grid: RadialGrid,
                    tol: float = 1e-9, max_iter: int = 2000,
                    damping: float = 0.5) -> SteadyState:
    """Damped Euler-Lagrange fixed point with mass-pinning bisection.

    Converged when the L1 change between sweeps and the on-support EL
    residual both fall below tol.  The grid is auto-expanded by 1.5x
    whenever the support touches its last decile.
    """
    _check_regime(spec)
    if M <= 0.0:
        raise DomainError("mass must be positive")

    r = grid.nodes.copy()
    for _expand in range(6):
        state = _fixed_point_on_grid(spec, M, r, tol, max_iter, damping)
        if state.support_radius <= 0.9 * r[-1]:
            return state
        r = np.linspace(r[0], 1.5 * r[-1], r.size)
    raise IterationError("support kept touching the grid edge", best=state)


def _fixed_point_on_grid(spec, M, r, tol, max_iter, damping) -> SteadyState:
    n = spec.n
    w = _trapezoid_weights(r)
    pot_op = _potential_op(spec, r)
    wn = surface_area(n)

    # uniform-ball start of the right mass
    R0 = 0.5 * r[-1]
    rho = np.where(r <= R0, 1.0, 0.0)
    rho *= M / _mass_of(spec, r, w, rho)

    lam = 0.0
    for it in range(1, max_iter + 1):
        pot = pot_op(rho)
        lam = _solve_lambda(spec, r, w, pot, M)
        new = _el_density(spec, lam, pot)
        new *= M / _mass_of(spec, r, w, new)
        delta = wn * float(np.sum(w * np.abs(new - rho) * r ** (n - 1)))
        rho = damping * new + (1.0 - damping) * rho
        if delta < tol * M:
            pot = pot_op(rho)
            lam = _solve_lambda(spec, r, w, pot, M)
            res_on, _ = _el_residuals(spec, r, rho, pot, lam)
            if res_on < max(tol, 1e-10) * max(abs(lam), 1.0):
                break
    else:
        field = RadialField(RadialGrid(r), rho)
        raise IterationError(
            f"fixed point did not converge in {max_iter} sweeps",
            best=SteadyState(field, lam, _support_radius(r, rho),
                             float("nan"), M, max_iter))

    field = RadialField(RadialGrid(r), rho)
    pot_field = RadialField(RadialGrid(r), pot_op(rho))
    g = free_energy(spec, field, pot=pot_field)
    return SteadyState(profile=field, lam=lam,
                       support_radius=_support_radius(r, rho),
                       free_energy=g, mass=total_mass(n, field), iterations=it)


def _el_residuals(spec, r, rho, pot, lam):
    """(sup residual on support, max inequality violation off support)."""
    on = rho > SUPPORT_THRESHOLD * float(np.max(rho))
    enth = spec.a0 * spec.gamma / (spec.gamma - 1.0) * rho ** (spec.gamma - 1.0)
    res_on = float(np.max(np.abs(enth[on] + pot[on] - lam))) if np.any(on) else 0.0
    off = ~on
    res_off = float(np.max(lam - pot[off])) if np.any(off) else 0.0
    return res_on, res_off


def euler_lagrange_residual(spec: PotentialSpec, state: SteadyState):
    """Residuals of the minimizer conditions.

    Returns (on_support, off_support): the sup-norm of
    (rho e(rho))_rho + Phi*rho - lambda over the support, and the largest
    violation of Phi*rho >= lambda outside it.
    """
    rho = state.profile.values
    if np.all(rho == 0.0):
        raise DomainError("zero field has no support")
    r = state.profile.grid.nodes
    pot = _potential_op(spec, r)(rho)
    return _el_residuals(spec, r, rho, pot, state.lam)


def gradient_flow_oracle(spec: PotentialSpec, M: float, grid: RadialGrid,
                         dt_safety: float = 0.4, max_steps: int = 200000,
                         stat_tol: float = 1e-8) -> SteadyState:
    """Aggregation-diffusion flow rho_t = div(grad p + kappa rho grad W).

    Finite volumes on the fixed radial grid: diffusion flux implicit
    (tridiagonal solve with p'(rho) frozen per step), aggregation flux
    explicit, run to near-stationarity.  The discretization is independent
    of the Euler-Lagrange fixed point, so the terminal profile serves as a
    cross-validation oracle.  Mass is conserved by the flux form; the free
    energy decreases along the flow within scheme error (asserted in the
    test suite).  Also admitted in the subcritical window
    gamma in (2n/(2n-alpha), (n+alpha)/n), where the terminal profile is a
    steady state rather than a global minimizer.
    """
    _check_regime(spec, subcritical_ok=True)
    from scipy.linalg import solve_banded

    r = grid.nodes
    n = spec.n
    N = r.size
    w = _trapezoid_weights(r)
    pot_op = _potential_op(spec, r)
    if spec.is_coulomb:
        force_op = _cumtrapz_force(spec, r)
    else:
        Om = omega_matrix(spec, r, r)
        if spec.alpha >= n - 2:
            np.fill_diagonal(Om, 0.0)
        Omw = Om * (w * r ** (n - 1))[None, :]
        force_op = lambda rho: Omw @ rho

    faces = 0.5 * (r[:-1] + r[1:])
    dr = np.diff(r)
    cv = np.zeros_like(r)
    cv[:-1] += 0.5 * dr
    cv[1:] += 0.5 * dr
    vol = cv * r ** (n - 1)
    fgeo = faces ** (n - 1)

    rho = np.where(r <= 0.5 * r[-1], 1.0, 0.0)
    rho *= M / _mass_of(spec, r, w, rho)

    steps = 0
    while steps < max_steps:
        force = force_op(rho)
        force_face = 0.5 * (force[:-1] + force[1:])
        # centered advective flux (second order; positivity kept by the clip)
        vel = -spec.kappa * force_face
        rho_face = 0.5 * (rho[:-1] + rho[1:])
        H_adv = spec.kappa * rho_face * force_face * fgeo   # advective r^{n-1}G

        div = np.zeros_like(rho)
        div[:-1] += H_adv
        div[1:] -= H_adv
        dt = dt_safety * float(np.min(dr / (np.abs(vel) + 1e-30)))
        dt = min(dt, 1e-2)

        # implicit diffusion: (vol - dt A) rho^{k+1} = vol rho^k + dt div
        D_face = 0.5 * (spec.pressure_derivative(rho[:-1])
                        + spec.pressure_derivative(rho[1:]))
        cface = dt * D_face * fgeo / dr
        diag = vol + np.concatenate(([0.0], cface)) + np.concatenate((cface, [0.0]))
        lower = -cface
        upper = -cface
        ab = np.zeros((3, N))
        ab[0, 1:] = upper
        ab[1, :] = diag
        ab[2, :-1] = lower
        rhs = vol * rho + dt * div
        rho_new = solve_banded((1, 1), ab, rhs)
        rho_new = np.clip(rho_new, 0.0, None)
        rho_new *= M / _mass_of(spec, r, w, rho_new)

        rate = float(np.max(np.abs(rho_new - rho))) / (dt * float(np.max(rho)) + 1e-300)
        rho = rho_new
        steps += 1
        if rate < stat_tol:
            break
    else:
        raise IterationError("gradient flow did not reach stationarity")

    field = RadialField(RadialGrid(r), rho)
    pot_vals = pot_op(rho)
    pot_field = RadialField(RadialGrid(r), pot_vals)
    lam = _solve_lambda(spec, r, w, pot_vals, M)
    return SteadyState(profile=field, lam=lam,
                       support_radius=_support_radius(r, rho),
                       free_energy=free_energy(spec, field, pot=pot_field),
                       mass=total_mass(n, field), iterations=steps)


def sub_critical_steady_residual(spec: PotentialSpec, state: SteadyState):
    """Residual of the pointwise steady-state identity in the subcritical
    window gamma in (2n/(2n-alpha), (n+alpha)/n), alpha in [n-2, n-1).

    The identity reads  a0 rho^{gamma-1} = (-(gamma-1)/gamma Phi*rho - K)_+
    with some K >= 0 (the pressure-to-density ratio p/rho on the left);
    K is fitted by least squares over the support.  Returns
    (sup residual / scale, fitted K).
    """
    n, alpha, g = spec.n, spec.alpha, spec.gamma
    lo = 2.0 * n / (2.0 * n - alpha)
    hi = (n + alpha) / n
    if not (lo < g < hi):
        raise DomainError(f"subcritical identity needs gamma in ({lo}, {hi})")
    if not (n - 2 <= alpha < n - 1):
        raise DomainError("subcritical identity needs alpha in [n-2, n-1)")
    r = state.profile.grid.nodes
    rho = state.profile.values
    pot = _potential_op(spec, r)(rho)
    on = rho > SUPPORT_THRESHOLD * float(np.max(rho))
    lhs = spec.a0 * rho[on] ** (g - 1.0)
    rhs_nok = -(g - 1.0) / g * pot[on]
    K = max(float(np.mean(rhs_nok - lhs)), 0.0)
    resid = lhs - np.clip(rhs_nok - K, 0.0, None)
    scale = float(np.max(lhs)) + 1e-300
    return float(np.max(np.abs(resid))) / scale, K


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def steady_state_to_json(state: SteadyState) -> str:
    payload = {
        "r": [f"{v:.17g}" for v in state.profile.grid.nodes],
        "rho": [f"{v:.17g}" for v in state.profile.values],
        "lambda": f"{state.lam:.17g}",
        "support_radius": f"{state.support_radius:.17g}",
        "free_energy": f"{state.free_energy:.17g}",
        "mass": f"{state.mass:.17g}",
        "iterations": state.iterations,
    }
    return json.dumps(payload, indent=1, sort_keys=True)


def steady_state_from_json(text: str) -> SteadyState:
    obj = json.loads(text)
    grid = RadialGrid(np.array([float(v) for v in obj["r"]]))
    field = RadialField(grid, np.array([float(v) for v in obj["rho"]]))
    return SteadyState(
        profile=field, lam=float(obj["lambda"]),
        support_radius=float(obj["support_radius"]),
        free_energy=float(obj["free_energy"]), mass=float(obj["mass"]),
        iterations=int(obj["iterations"]),
    )
