"""Angular-reduced interaction kernels for radial densities.

For a radial density rho the interaction potential and its radial
derivative reduce to one-dimensional integrals against the shell kernels

    K(r, eta)     = A_n * int_0^pi  Phi(d(theta)) sin^{n-2}(theta) dtheta,
    omega(r, eta) = A_n * int_0^pi  (r - eta cos(theta)) d(theta)^{-(alpha+2)}
                                    sin^{n-2}(theta) dtheta,

with d(theta)^2 = (r - eta)^2 + 4 r eta sin^2(theta/2) and Phi the
power-law kernel -s^{-alpha}/alpha (log s at alpha = 0).  The angular
prefactor A_n is the surface area of the unit sphere in R^{n-1}; it is
pinned by requiring the exact closed form
omega(r, eta) = omega_n 1_{eta<r} / r^{n-1} in the Coulomb case
alpha = n-2 (verified in the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, SingularityError

# Seed angle for the geometric panel ladder when r == eta.
_THETA_SEED = 1e-7
# Geometric growth factor of the panel ladder.
_PANEL_RATIO = 4.0


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    """Interaction configuration: dimension, exponent, sign, pressure law.

    kappa = +1 is attractive (gravitational type), -1 repulsive (plasma
    type).  alpha = 0 denotes the logarithmic kernel.  The pressure
    constant a0 = (gamma-1)^2/(4 gamma) is always recomputed, never stored.
    """

    n: int
    alpha: float
    kappa: int = 1
    gamma: float = 2.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n}")
        if not (-1.0 < self.alpha < self.n - 1):
            raise DomainError(
                f"alpha must lie in (-1, n-1) = (-1, {self.n - 1}), got {self.alpha}"
            )
        if self.kappa not in (-1, 1):
            raise DomainError(f"kappa must be -1 or +1, got {self.kappa}")
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def a0(self) -> float:
        return (self.gamma - 1.0) ** 2 / (4.0 * self.gamma)

    @property
    def is_coulomb(self) -> bool:
        return self.alpha == self.n - 2

    def pressure(self, rho):
        return self.a0 * np.asarray(rho) ** self.gamma

    def pressure_derivative(self, rho):
        return self.a0 * self.gamma * np.asarray(rho) ** (self.gamma - 1.0)

    def sound_speed(self, rho):
        return np.sqrt(self.a0 * self.gamma * np.asarray(rho) ** (self.gamma - 1.0))

    def internal_energy_density(self, rho):
        """e(rho) = a0 rho^{gamma-1} / (gamma-1), energy per unit mass."""
        return self.a0 / (self.gamma - 1.0) * np.asarray(rho) ** (self.gamma - 1.0)


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing positive radii; origin excluded (r0 >= 1e-12)."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("grid needs at least two nodes")
        if nodes[0] < 1e-12:
            raise DomainError("grid must stay away from the origin (r0 >= 1e-12)")
        if not np.all(np.diff(nodes) > 0.0):
            raise DomainError("grid nodes must be strictly increasing")

    def __len__(self):
        return self.nodes.size


@dataclass(frozen=True)
class RadialField:
    """Samples of a radial function on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise DomainError("field values must match the grid length")
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes


def uniform_grid(r_min: float, r_max: float, num: int) -> RadialGrid:
    return RadialGrid(np.linspace(r_min, r_max, num))


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------

def surface_area(n: int) -> float:
    """Surface area of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    if int(n) != n or n < 1:
        raise DomainError(f"surface_area needs an integer n >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def phi_kernel(spec: PotentialSpec, s):
    """Pointwise kernel: -s^{-alpha}/alpha, or log s at alpha = 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise DomainError("phi_kernel requires s > 0")
    if spec.alpha == 0.0:
        out = np.log(s)
    else:
        out = -(s ** (-spec.alpha)) / spec.alpha
    return out if out.ndim else float(out)


def _check_pointwise(spec: PotentialSpec, r: float, eta: float):
    if r <= 0.0 or eta <= 0.0:
        raise DomainError("kernel arguments must be positive")
    if spec.alpha >= spec.n - 2 and r == eta:
        raise SingularityError(
            f"kernel is pointwise singular at r = eta for alpha >= n-2 "
            f"(alpha={spec.alpha}, n={spec.n})"
        )


@lru_cache(maxsize=32)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    # map from [-1, 1] to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_edges(r: float, eta: float) -> np.ndarray:
    """Geometric theta panels concentrated at the near-singular scale.

    The first panel [0, theta*] with theta* = |r-eta|/sqrt(r eta) realizes
    the regularizing substitution theta = |r-eta| tau / sqrt(r eta).
    """
    tstar = abs(r - eta) / math.sqrt(r * eta)
    tstar = min(max(tstar, _THETA_SEED), math.pi)
    edges = [0.0, tstar]
    while edges[-1] < math.pi:
        edges.append(min(edges[-1] * _PANEL_RATIO, math.pi))
    return np.array(edges)


def _omega_integrand(n, alpha, r, eta, theta):
    half = np.sin(0.5 * theta)
    d2 = (r - eta) ** 2 + 4.0 * r * eta * half * half
    radial = (r - eta) + 2.0 * eta * half * half   # r - eta*cos(theta), stable
    return radial * d2 ** (-(alpha + 2.0) / 2.0) * np.sin(theta) ** (n - 2)


def _K_integrand(n, alpha, r, eta, theta):
    half = np.sin(0.5 * theta)
    d2 = (r - eta) ** 2 + 4.0 * r * eta * half * half
    if alpha == 0.0:
        phi = 0.5 * np.log(d2)
    else:
        phi = -(d2 ** (-alpha / 2.0)) / alpha
    return phi * np.sin(theta) ** (n - 2)


def _adaptive_theta(fn, r, eta, rtol=1e-12, max_level=20):
    """Panel-wise Gauss-Legendre with doubling refinement (spec tolerance)."""
    edges = _panel_edges(r, eta)
    xs, ws = _leggauss(10)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        prev = None
        val = 0.0
        for level in range(max_level):
            m = 2 ** level
            sub = a + (b - a) / m * np.arange(m)[:, None]
            theta = sub + (b - a) / m * xs[None, :]
            val = float(np.sum(fn(theta) * ws[None, :]) * (b - a) / m)
            if prev is not None and abs(val - prev) <= rtol * abs(val) + 1e-300:
                break
            prev = val
        total += val
    return total


def kernel_K(spec: PotentialSpec, r: float, eta: float) -> float:
    """Angular shell kernel K(r, eta) of the interaction potential."""
    _check_pointwise(spec, r, eta)
    prefactor = surface_area(spec.n - 1) if spec.n >= 2 else 2.0
    return prefactor * _adaptive_theta(
        lambda th: _K_integrand(spec.n, spec.alpha, r, eta, th), r, eta
    )


def kernel_omega(spec: PotentialSpec, r: float, eta: float) -> float:
    """Angular force kernel omega(r, eta) = d/dr of the shell potential.

    For alpha = n-2 the exact indicator closed form is returned, bypassing
    quadrature.
    """
    _check_pointwise(spec, r, eta)
    if spec.is_coulomb:
        return coulomb_omega(spec.n, r, eta)
    prefactor = surface_area(spec.n - 1)
    return prefactor * _adaptive_theta(
        lambda th: _omega_integrand(spec.n, spec.alpha, r, eta, th), r, eta
    )


def coulomb_omega(n: int, r, eta):
    """Closed form omega_n 1_{(0,r)}(eta) / r^{n-1} at alpha = n-2."""
    r = np.asarray(r, dtype=float)
    eta = np.asarray(eta, dtype=float)
    out = np.where(eta < r, surface_area(n) / r ** (n - 1), 0.0)
    return out if out.ndim else float(out)


def coulomb_K(n: int, r, eta):
    """Closed form K = omega_n Phi_{n-2}(max(r, eta)) at alpha = n-2."""
    m = np.maximum(np.asarray(r, dtype=float), np.asarray(eta, dtype=float))
    if n == 2:
        out = surface_area(2) * np.log(m)
    else:
        out = -surface_area(n) * m ** (-(n - 2)) / (n - 2)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# vectorized kernel matrices
# ---------------------------------------------------------------------------

def _matrix_quadrature(n, alpha, targets, sources, integrand, gl_order=24):
    """Evaluate the theta-integral for every (target, source) pair at once.

    Same geometric panel ladder as the scalar path but with a fixed
    Gauss-Legendre order per panel; accuracy is checked against the
    adaptive scalar kernels in the test suite.
    """
    R = np.asarray(targets, dtype=float)[:, None]
    H = np.asarray(sources, dtype=float)[None, :]
    xs, ws = _leggauss(gl_order)

    tstar = np.abs(R - H) / np.sqrt(R * H)
    tstar = np.clip(tstar, _THETA_SEED, math.pi)
    n_panels = int(math.ceil(math.log(math.pi / _THETA_SEED) / math.log(_PANEL_RATIO)))

    total = np.zeros(np.broadcast_shapes(R.shape, H.shape))
    lo = np.zeros_like(total)
    hi = np.minimum(tstar, math.pi)
    for _ in range(n_panels + 1):
        width = hi - lo
        live = width > 0.0
        if np.any(live):
            theta = lo[..., None] + width[..., None] * xs
            vals = integrand(n, alpha, R[..., None], H[..., None], theta)
            total += np.where(live, width * (vals @ ws), 0.0)
        lo = hi
        hi = np.minimum(hi * _PANEL_RATIO, math.pi)
    return surface_area(n - 1) * total


def omega_matrix(spec: PotentialSpec, targets, sources) -> np.ndarray:
    """Force-kernel matrix omega(r_i, eta_j) by vectorized quadrature.

    Entries with r_i == eta_j are pointwise singular for alpha >= n-2 and
    must be absent from (targets, sources); callers handle the diagonal.
    """
    return _matrix_quadrature(spec.n, spec.alpha, targets, sources, _omega_integrand)


def K_matrix(spec: PotentialSpec, targets, sources) -> np.ndarray:
    """Potential-kernel matrix K(r_i, eta_j) by vectorized quadrature."""
    return _matrix_quadrature(spec.n, spec.alpha, targets, sources, _K_integrand)


# ---------------------------------------------------------------------------
# field-level operations
# ---------------------------------------------------------------------------

def _require_density(rho: RadialField):
    if np.any(rho.values < 0.0):
        raise DomainError("density must be nonnegative")


def _trapezoid_weights(r: np.ndarray) -> np.ndarray:
    w = np.zeros_like(r)
    h = np.diff(r)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def _singular_model_coefficient(n: int, alpha: float) -> float:
    """Leading odd coefficient of omega near eta = r.

    omega(r, eta) ~ c(r) sign(r-eta) |r-eta|^{n-2-alpha} with
    c(r) = A_n I_inf r^{1-n} and
    I_inf = Gamma((n-1)/2) Gamma((alpha+3-n)/2) / (2 Gamma((alpha+2)/2)).
    At alpha = n-2 this reduces to half the Coulomb jump omega_n/(2 r^{n-1}).
    """
    i_inf = (
        math.gamma((n - 1) / 2.0)
        * math.gamma((alpha + 3.0 - n) / 2.0)
        / (2.0 * math.gamma((alpha + 2.0) / 2.0))
    )
    return surface_area(n - 1) * i_inf


def potential(spec: PotentialSpec, rho: RadialField, method: str = "auto") -> RadialField:
    """Interaction potential (Phi_alpha * rho) sampled on rho's grid.

    method: "auto" (Coulomb closed form when alpha = n-2, else quadrature),
    "local" (Coulomb closed form; requires alpha = n-2), or "quadrature".
    """
    _require_density(rho)
    r = rho.grid.nodes
    n = spec.n
    f = rho.values * r ** (n - 1)
    w = _trapezoid_weights(r)

    if method not in ("auto", "local", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    use_local = spec.is_coulomb and method in ("auto", "local")
    if method == "local" and not spec.is_coulomb:
        raise DomainError("local potential formula only exists at alpha = n-2")

    if use_local:
        K = coulomb_K(n, r[:, None], r[None, :])
        return RadialField(rho.grid, K @ (w * f))

    K = K_matrix(spec, r, r)
    if spec.alpha >= n - 2:
        np.fill_diagonal(K, 0.0)  # pointwise singular; panel re-added below
    out = _mask_window(K, r, 1) @ f
    # the two panels adjacent to each node go through sub-panel quadrature:
    # K is continuous there but kinked (alpha > n-2), and the endpoint value
    # K(r, r) is not evaluable for alpha >= n-2; interior GL nodes avoid it.
    out += _diagonal_panels_K(spec, r, rho.values)
    return RadialField(rho.grid, out)


# panels on each side of the diagonal treated by the singular-model rule;
# trapezoid error from the cusp decays like (width * h)^{n-3-alpha} h^2
_NEAR_WIDTH = 6


def _mask_window(K: np.ndarray, r: np.ndarray, width: int) -> np.ndarray:
    """Trapezoid weights folded into K, excluding +-width panels around the
    diagonal (those integrate through the near-singular rule)."""
    N = r.size
    h = np.diff(r)
    W = np.zeros((N, N))
    for j in range(N - 1):
        W[:, j] += 0.5 * h[j]
        W[:, j + 1] += 0.5 * h[j]
    for i in range(N):
        for p in range(max(i - width, 0), min(i + width - 1, N - 2) + 1):
            W[i, p] -= 0.5 * h[p]
            W[i, p + 1] -= 0.5 * h[p]
    return K * W


def _diagonal_panels_K(spec: PotentialSpec, r: np.ndarray, rho: np.ndarray,
                       gl_order: int = 8) -> np.ndarray:
    """Sub-panel GL quadrature of K rho eta^{n-1} over panels touching r_i."""
    N = r.size
    n = spec.n
    xs, ws = _leggauss(gl_order)
    out = np.zeros(N)
    for i in range(N):
        for side in (-1, +1):
            j = i + side
            if not (0 <= j < N):
                continue
            a, b = (r[j], r[i]) if side < 0 else (r[i], r[j])
            nodes = a + (b - a) * xs
            vals = K_matrix(spec, np.array([r[i]]), nodes)[0]
            # linear density interpolant across the panel
            t = (nodes - r[min(i, j)]) / (r[max(i, j)] - r[min(i, j)])
            rho_line = rho[min(i, j)] * (1 - t) + rho[max(i, j)] * t
            out[i] += (b - a) * np.sum(ws * vals * rho_line * nodes ** (n - 1))
    return out


def potential_derivative(spec: PotentialSpec, rho: RadialField,
                         method: str = "auto") -> RadialField:
    """Radial derivative (Phi_alpha * rho)_r sampled on rho's grid.

    At alpha = n-2 the exact local formula
    omega_n r^{1-n} int_0^r rho eta^{n-1} d eta is used unless
    method="quadrature" forces the generic angular-quadrature path.
    """
    _require_density(rho)
    r = rho.grid.nodes
    n = spec.n
    if method not in ("auto", "local", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    if method == "local" and not spec.is_coulomb:
        raise DomainError("local force formula only exists at alpha = n-2")

    if spec.is_coulomb and method in ("auto", "local"):
        return RadialField(rho.grid, local_coulomb_force(n, r, rho.values))

    f = rho.values * r ** (n - 1)
    if spec.alpha < n - 2:
        # omega is continuous across eta = r: plain trapezoid, exact diagonal
        Om = omega_matrix(spec, r, r)
        w = _trapezoid_weights(r)
        return RadialField(rho.grid, Om @ (w * f))

    # alpha in [n-2, n-1): integrable odd singularity at eta = r.  The
    # matrix diagonal is the finite even limit of omega across the
    # singularity (the seeded theta-quadrature delivers it directly; at
    # alpha = n-2 it equals omega_n/(2 r^{n-1}), the jump midpoint).
    Om = omega_matrix(spec, r, r)
    out = _mask_window(Om, r, _NEAR_WIDTH) @ f
    out += _near_diagonal_omega(spec, r, f, Om)
    return RadialField(rho.grid, out)


def _near_diagonal_omega(spec: PotentialSpec, r: np.ndarray, f: np.ndarray,
                         Om: np.ndarray) -> np.ndarray:
    """Near-singular panels via the odd power-law model.

    Around eta = r_i write omega = c sign(r_i-eta)|r_i-eta|^q + remainder
    with q = n-2-alpha.  The model integrates in closed form against the
    linear interpolant of f; the remainder is O(|r-eta|^{q+1}), continuous,
    and trapezoidal.  Plain trapezoid across the cusp would only converge
    like h^{q+1}, which the model subtraction repairs to ~h^2.
    """
    n, alpha = spec.n, spec.alpha
    q = n - 2.0 - alpha
    c_dimless = _singular_model_coefficient(n, alpha)
    # the cusp coefficient varies like (r eta)^{-(n-1)/2}; folding the eta
    # dependence into the density sharpens the odd remainder by one power
    # of |r-eta|.  At alpha = n-2 the indicator's odd part is exactly
    # constant, so the flat model is kept (makes the Coulomb route exact).
    zeta = 0.0 if alpha == n - 2 else (n - 1) / 2.0
    N = r.size
    out = np.zeros(N)
    for i in range(N):
        c = c_dimless * r[i] ** (1 - n)

        def model(eta):
            d = r[i] - eta
            return (c * (eta / r[i]) ** (-zeta)
                    * np.sign(d) * np.abs(d) ** q)

        # the even part of omega also has an integrable cusp ~ |r-eta|^{q+1};
        # fit its coefficient from the already-computed neighbor entries and
        # subtract it analytically as well (zero exactly at alpha = n-2)
        c_even = 0.0
        if alpha != n - 2 and 0 < i < N - 1:
            h1 = r[i] - r[i - 1]
            h2 = r[i + 1] - r[i]
            rem_m = Om[i, i - 1] - model(r[i - 1])
            rem_p = Om[i, i + 1] - model(r[i + 1])
            e0 = Om[i, i]
            c_even = 0.5 * ((rem_m - e0) / h1 ** (q + 1.0)
                            + (rem_p - e0) / h2 ** (q + 1.0))

        def model_even(eta):
            return c_even * np.abs(r[i] - eta) ** (q + 1.0)

        for j in range(max(i - _NEAR_WIDTH, 0),
                       min(i + _NEAR_WIDTH - 1, N - 2) + 1):
            a, b = r[j], r[j + 1]
            ga = f[j] * (r[j] / r[i]) ** (-zeta)
            gb = f[j + 1] * (r[j + 1] / r[i]) ** (-zeta)
            # analytic: int c sign|r_i-eta|^q g_lin(eta) d eta
            out[i] += _model_integral(c, q, r[i], a, b, ga, gb)
            out[i] += _even_model_integral(c_even, q + 1.0, r[i], a, b,
                                           f[j], f[j + 1])
            # remainder at panel endpoints; at the singular node the odd
            # model vanishes by symmetry and Om[i, i] is the even limit
            rem_a = Om[i, j] - model_even(a) - (0.0 if j == i else model(a))
            rem_b = (Om[i, j + 1] - model_even(b)
                     - (0.0 if j + 1 == i else model(b)))
            out[i] += 0.5 * (b - a) * (rem_a * f[j] + rem_b * f[j + 1])
    return out


def _even_model_integral(c, p, r0, a, b, fa, fb):
    """int_a^b c |r0-eta|^p f_lin(eta) d eta, exactly."""
    if c == 0.0:
        return 0.0
    slope = (fb - fa) / (b - a)

    def one_side(lo, hi, left):
        if hi <= lo:
            return 0.0
        s1, s2 = sorted((abs(r0 - lo), abs(r0 - hi)))
        A = fa + slope * (r0 - a)
        B = -slope if left else slope
        return c * (A * (s2 ** (p + 1) - s1 ** (p + 1)) / (p + 1)
                    + B * (s2 ** (p + 2) - s1 ** (p + 2)) / (p + 2))

    return one_side(a, min(b, r0), True) + one_side(max(a, r0), b, False)


def _model_integral(c, q, r0, a, b, fa, fb):
    """int_a^b c sign(r0-eta)|r0-eta|^q f_lin(eta) d eta, exactly."""
    slope = (fb - fa) / (b - a)

    def one_side(lo, hi, sign):
        # integrate over eta in [lo, hi] on one side of r0, s = |r0 - eta|
        if hi <= lo:
            return 0.0
        s1, s2 = sorted((abs(r0 - lo), abs(r0 - hi)))
        # f(eta) = A + B s with s measured from r0 on this side
        A = fa + slope * (r0 - a)
        B = -slope if sign > 0 else slope
        p = q + 1.0
        return c * sign * (A * (s2 ** p - s1 ** p) / p
                           + B * (s2 ** (p + 1) - s1 ** (p + 1)) / (p + 1))

    left = one_side(a, min(b, r0), +1.0)
    right = one_side(max(a, r0), b, -1.0)
    return left + right


def local_coulomb_force(n: int, r: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """omega_n r^{1-n} int_{r_0}^r rho eta^{n-1} d eta (trapezoid cumulative).

    The density is taken to vanish below the first grid node.
    """
    integrand = rho * r ** (n - 1)
    cum = np.concatenate(
        ([0.0], np.cumsum(0.5 * np.diff(r) * (integrand[:-1] + integrand[1:])))
    )
    return surface_area(n) * cum / r ** (n - 1)


def moment_kalpha(spec: PotentialSpec, rho: RadialField) -> float:
    """Confinement moment omega_n int rho k_alpha(1 + r^2) r^{n-1} dr.

    Only defined for alpha in (-1, 0]: k_alpha(s) = s^{-alpha/2}, log s at
    alpha = 0.
    """
    if spec.alpha > 0.0:
        raise DomainError("the k_alpha moment is only defined for alpha in (-1, 0]")
    _require_density(rho)
    r = rho.grid.nodes
    s = 1.0 + r ** 2
    k = np.log(s) if spec.alpha == 0.0 else s ** (-spec.alpha / 2.0)
    w = _trapezoid_weights(r)
    return surface_area(spec.n) * float(np.sum(w * rho.values * k * r ** (spec.n - 1)))


def kalpha_weight(spec: PotentialSpec, r):
    """k_alpha(1 + r^2) for diagnostics; alpha in (-1, 0]."""
    if spec.alpha > 0.0:
        raise DomainError("k_alpha is only defined for alpha in (-1, 0]")
    s = 1.0 + np.asarray(r, dtype=float) ** 2
    return np.log(s) if spec.alpha == 0.0 else s ** (-spec.alpha / 2.0)


def convolve_radial(n: int, kernel_profile, rho: RadialField,
                    support: float | None = None) -> RadialField:
    """n-D convolution of a radial kernel with a radial density.

    kernel_profile(s) is evaluated at the pairwise distance; support, when
    given, restricts sources to |r - eta| < support (compactly supported
    mollifiers).  Used for the initial-data mollification.
    """
    r = rho.grid.nodes
    f = rho.values * r ** (n - 1)
    w = _trapezoid_weights(r)
    xs, ws = _leggauss(24)
    pref = surface_area(n - 1)
    out = np.zeros_like(r)
    for i, ri in enumerate(r):
        if support is None:
            mask = np.ones_like(r, dtype=bool)
        else:
            mask = np.abs(r - ri) < support
        if not np.any(mask):
            continue
        eta = r[mask]
        # restrict theta to distances inside the kernel support
        if support is None:
            tmax = np.full_like(eta, math.pi)
        else:
            cosmax = (ri ** 2 + eta ** 2 - support ** 2) / (2.0 * ri * eta)
            tmax = np.arccos(np.clip(cosmax, -1.0, 1.0))
        theta = tmax[:, None] * xs[None, :]
        half = np.sin(0.5 * theta)
        d = np.sqrt((ri - eta[:, None]) ** 2 + 4.0 * ri * eta[:, None] * half ** 2)
        vals = kernel_profile(d) * np.sin(theta) ** (n - 2)
        Krow = pref * tmax * (vals @ ws)
        out[i] = np.sum(w[mask] * f[mask] * Krow)
    return RadialField(rho.grid, out)
