"""Command-line orchestration: config ingestion, experiment dispatch, and
deterministic CSV/JSON emission with optional figures.

Config files are flat key=value text (diff-friendly); arrays are comma
lists.  Every output file carries the manifest hash and version stamp in a
header comment.  Exit codes: 0 success, 2 validation error, 3 numerical
abort, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import BlowupError, ConfigError, DomainError, IterationError
from .functionals import (
    critical_alpha_band,
    critical_mass,
    entropy_bounds_check,
    entropy_pair,
    hls_constant,
    lp_norm,
    radial_integral,
    riesz_composition_constant,
    surface_area,
)
from .radial_kernel import (
    PotentialSpec,
    RadialField,
    RadialGrid,
    kernel_K,
    kernel_omega,
    phi_kernel,
    potential,
)
from .nsr_solver import (
    SolverConfig,
    build_initial_data,
    diagnostics,
    discrete_mass,
    run,
    vanishing_viscosity_sweep,
    DIAGNOSTICS_HEADER,
)
from .steady_states import (
    gradient_flow_oracle,
    solve_minimizer,
    steady_state_to_json,
)
from .stability import stability_run

SUBCOMMANDS = ("simulate", "steady", "stability", "critical-mass",
               "phase-diagram", "kernel-table", "sweep-epsilon", "verify")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_NONCONVERGENCE = 4


# ---------------------------------------------------------------------------
# manifest and config
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    subcommand: str
    config_path: str | None
    out_dir: str
    seed: int
    threads: int
    config: dict = field(default_factory=dict)

    @property
    def hash(self) -> str:
        payload = json.dumps(
            {"subcommand": self.subcommand, "seed": self.seed,
             "config": self.config},
            sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def stamp(self) -> str:
        return (f"rieszgas {__version__} subcommand={self.subcommand} "
                f"manifest={self.hash} seed={self.seed}")


def parse_config(text: str) -> dict:
    """Flat key=value lines; '#' starts a comment; arrays are comma lists."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


class Config:
    def __init__(self, values: dict):
        self.values = dict(values)

    def get_float(self, key, default=None):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return default
        try:
            return float(self.values[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a number") from exc

    def get_int(self, key, default=None):
        v = self.get_float(key, default)
        if v != int(v):
            raise ConfigError(f"key {key!r}: expected an integer")
        return int(v)

    def get_str(self, key, default=None):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return default
        return self.values[key]

    def get_floats(self, key, default=None):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return list(default)
        try:
            return [float(v) for v in self.values[key].split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a comma list of numbers") from exc

    def spec(self) -> PotentialSpec:
        return PotentialSpec(
            n=self.get_int("n", 3),
            alpha=self.get_float("alpha", 1.0),
            kappa=self.get_int("kappa", 1),
            gamma=self.get_float("gamma", 2.0),
        )


# ---------------------------------------------------------------------------
# regime classification
# ---------------------------------------------------------------------------

@dataclass
class RegimeReport:
    existence_case: str
    energy_case: str
    bd_entropy: list
    stability_ok: bool
    warnings: list

    def as_dict(self):
        return {
            "existence_case": self.existence_case,
            "energy_case": self.energy_case,
            "bd_entropy": self.bd_entropy,
            "stability_ok": self.stability_ok,
            "warnings": self.warnings,
        }


def validate_regime(spec: PotentialSpec, M: float | None = None,
                    E0: float | None = None) -> RegimeReport:
    """Classify a configuration against the existence/energy/BD/stability
    regime tables; configurations outside every case produce warnings, not
    refusals (exploration allowed, flagged)."""
    n, a, k, g = spec.n, spec.alpha, spec.kappa, spec.gamma
    warnings = []
    if n - 1 - a < 0.05:
        warnings.append("alpha close to n-1: hypothesis gamma > 1/(n-1-alpha) "
                        "blows up at the edge")
    if n - 1 - a > 0.0 and not g > 1.0 / (n - 1 - a):
        warnings.append("gamma <= 1/(n-1-alpha): outside the main existence "
                        "hypotheses")

    bd_gamma_ok = g >= 3.0 * n / (3.0 * n - 2.0 * (1.0 + a))

    existence = "none"
    if k == -1:
        if -1.0 < a <= n - 2 and g > 1.0:
            existence = "a"
        elif n - 2 < a < n - 1 and bd_gamma_ok:
            existence = "b"
    else:
        if -1.0 < a <= 0.0 and g > 1.0:
            existence = "c"
        elif 0.0 < a < n - 1 and g > (n + a) / n:
            existence = "d"
        elif 0.0 < a < n - 1 and 2.0 * n / (2.0 * n - a) < g <= (n + a) / n:
            existence = "e"
            if M is not None:
                try:
                    rep = critical_mass(n, g, a, E0=E0)
                    if M >= rep.Mc:
                        warnings.append(
                            f"mass {M:g} >= critical-mass bound {rep.Mc:g} "
                            "(surrogate constant): case (e) not certified")
                except DomainError as exc:
                    warnings.append(f"critical-mass check unavailable: {exc}")
        if k == 1 and a != n - 2 and existence != "none" and not bd_gamma_ok:
            warnings.append("kappa=+1 with alpha != n-2 also needs "
                            "gamma >= 3n/(3n-2(1+alpha)) for global "
                            "existence")

    if 0.0 < a < n - 1 and k == -1 and g > 1.0:
        energy = "1"
    elif (0.0 < a < n - 1 and k == 1
          and 2.0 * n / (2.0 * n - a) < g <= (n + a) / n):
        energy = "2 (needs M < Mc)"
    elif 0.0 < a < n - 1 and k == 1 and g > (n + a) / n:
        energy = "3"
    elif -1.0 < a <= 0.0 and g > 1.0:
        energy = "4"
    else:
        energy = "none"
        warnings.append("no energy-estimate case applies")

    bd = []
    if (k == -1 and a <= n - 2) or (k == 1 and a == n - 2):
        bd.append("integration-by-parts")
    if bd_gamma_ok:
        bd.append("gronwall")
    if not bd:
        warnings.append("no BD-entropy estimate applies")

    stability_ok = (k == 1 and 0.0 < a < n - 1 and g > (n + a) / n)
    return RegimeReport(existence, energy, bd, stability_ok, warnings)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path, manifest, header: str, rows):
    with open(path, "w") as fh:
        fh.write(f"# {manifest.stamp()}\n")
        fh.write(header + "\n")
        for row in rows:
            if isinstance(row, str):
                fh.write(row + "\n")
            else:
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, manifest, payload: dict):
    doc = {"_meta": manifest.stamp(), **payload}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _initial_profile(cfg: Config, spec: PotentialSpec):
    kind = cfg.get_str("ic", "gaussian")
    mass = cfg.get_float("mass", 1.0)
    radius = cfg.get_float("ic_radius", 0.8)
    r = np.linspace(1e-4, 4.0 * radius, cfg.get_int("ic_samples", 2048))
    if kind == "gaussian":
        vals = np.exp(-((r / radius) ** 2))
    elif kind == "uniform_ball":
        vals = np.where(r <= radius, 1.0, 0.0)
    else:
        raise ConfigError(f"unknown ic {kind!r}")
    grid = RadialGrid(r)
    fld = RadialField(grid, vals)
    vals = vals * mass / radial_integral(spec.n, r, vals)
    return RadialField(grid, vals)


def _solver_config(cfg: Config, spec: PotentialSpec) -> SolverConfig:
    return SolverConfig(
        spec=spec,
        epsilon=cfg.get_float("epsilon", 1e-2),
        b=cfg.get_float("b", 4.0),
        N=cfg.get_int("N", 128),
        T=cfg.get_float("T", 0.5),
        cfl=cfg.get_float("cfl", 0.4),
        dt_max=cfg.get_float("dt_max", 1e-3),
        force_refresh_every=cfg.get_int("force_refresh_every", 1),
        output_every=cfg.get_int("output_every", 20),
        force_method=cfg.get_str("force_method", "auto"),
    )


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_simulate(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    solver_cfg = _solver_config(cfg, spec)
    regime = validate_regime(spec, M=cfg.get_float("mass", 1.0))
    profile = _initial_profile(cfg, spec)
    state = build_initial_data(spec, profile, None, solver_cfg.epsilon,
                               solver_cfg.b, solver_cfg.N)
    samples = run(solver_cfg, state)
    rows = [d.as_csv_row() for _, d in samples]
    write_csv(os.path.join(out, "simulate.csv"), manifest,
              DIAGNOSTICS_HEADER, rows)
    final = samples[-1][0]
    write_json(os.path.join(out, "simulate.json"), manifest, {
        "regime": regime.as_dict(),
        "mass": _fmt(discrete_mass(spec.n, final)),
        "t_final": _fmt(final.t),
        "b_final": _fmt(final.b_t),
        "snapshot": {
            "x": [_fmt(v) for v in final.x],
            "r": [_fmt(v) for v in final.r],
            "rho": [_fmt(v) for v in final.rho],
            "u": [_fmt(v) for v in final.u],
        },
    })
    if plots:
        from .plots import plot_diagnostics, plot_profile
        plot_diagnostics([d for _, d in samples],
                         os.path.join(out, "simulate_diagnostics.png"))
        centers = 0.5 * (final.r[:-1] + final.r[1:])
        plot_profile(centers, final.rho,
                     os.path.join(out, "simulate_profile.png"))
    return EXIT_OK


def cmd_steady(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    M = cfg.get_float("mass", 1.0)
    grid = RadialGrid(np.linspace(cfg.get_float("grid_rmin", 1e-4),
                                  cfg.get_float("grid_rmax", 1.0),
                                  cfg.get_int("grid_n", 1024)))
    state = solve_minimizer(spec, M, grid, tol=cfg.get_float("tol", 1e-9))
    with open(os.path.join(out, "steady.json"), "w") as fh:
        fh.write(f'{{"_meta": "{manifest.stamp()}",\n')
        fh.write(steady_state_to_json(state)[1:])
        fh.write("\n")
    rows = list(zip(state.profile.grid.nodes, state.profile.values))
    write_csv(os.path.join(out, "steady.csv"), manifest, "r,rho", rows)
    if cfg.get_int("oracle", 0):
        oracle = gradient_flow_oracle(spec, M, state.profile.grid)
        r = state.profile.grid.nodes
        l1 = radial_integral(spec.n, r,
                             np.abs(oracle.profile.values
                                    - state.profile.values))
        write_json(os.path.join(out, "steady_oracle.json"), manifest, {
            "l1_disagreement": _fmt(l1),
            "oracle_support_radius": _fmt(oracle.support_radius),
            "oracle_free_energy": _fmt(oracle.free_energy),
        })
    if plots:
        from .plots import plot_profile
        plot_profile(state.profile.grid.nodes, state.profile.values,
                     os.path.join(out, "steady_profile.png"))
    return EXIT_OK


def cmd_stability(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    M = cfg.get_float("mass", 1.0)
    grid = RadialGrid(np.linspace(cfg.get_float("grid_rmin", 1e-4),
                                  cfg.get_float("grid_rmax", 1.0),
                                  cfg.get_int("grid_n", 1024)))
    steady = solve_minimizer(spec, M, grid, tol=cfg.get_float("tol", 1e-9))
    solver_cfg = _solver_config(cfg, spec)
    mode = cfg.get_str("mode", "bump")
    amplitude = cfg.get_float("amplitude", 1e-2)
    report = stability_run(spec, steady, (mode, amplitude), solver_cfg)
    write_csv(os.path.join(out, "stability.csv"), manifest, "t,functional",
              zip(report.times.tolist(), report.functional.tolist()))
    baseline = cfg.get_float("baseline_ratio", -1.0)
    write_json(os.path.join(out, "stability.json"), manifest, {
        "mode": mode,
        "amplitude": _fmt(amplitude),
        "initial_value": _fmt(report.initial_value),
        "max_value": _fmt(report.max_value),
        "ratio": _fmt(report.ratio),
        "baseline_ratio": _fmt(baseline) if baseline > 0 else None,
        "within_baseline": (bool(report.ratio <= 2.0 * baseline)
                            if baseline > 0 else None),
    })
    if plots:
        from .plots import plot_stability
        plot_stability(report, os.path.join(out, "stability.png"))
    return EXIT_OK


def cmd_critical_mass(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    E0 = cfg.get_float("E0", -1.0)
    rep = critical_mass(spec.n, spec.gamma, spec.alpha,
                        E0=E0 if E0 > 0 else None)
    write_json(os.path.join(out, "critical_mass.json"), manifest, {
        "n": rep.n, "alpha": _fmt(rep.alpha), "gamma": _fmt(rep.gamma),
        "E0": _fmt(rep.E0) if rep.E0 is not None else None,
        "B": _fmt(rep.B), "Mc": _fmt(rep.Mc),
        "constant_used": rep.constant_used,
        "note": "Mc is a conservative lower bound (closed-form HLS constant "
                "substitutes the unpublished sharp constant)",
    })
    write_csv(os.path.join(out, "critical_mass.csv"), manifest,
              "n,alpha,gamma,B,Mc",
              [(rep.n, rep.alpha, rep.gamma, rep.B, rep.Mc)])
    return EXIT_OK


def cmd_phase_diagram(cfg: Config, manifest: RunManifest, out, plots: bool):
    n_min = cfg.get_int("n_min", 2)
    n_max = cfg.get_int("n_max", 200)
    rows = []
    for n in range(n_min, n_max + 1):
        band = critical_alpha_band(n)
        if band is None:
            rows.append((n, "", ""))
        else:
            rows.append((n, band[0], band[1]))
    write_csv(os.path.join(out, "phase_diagram.csv"), manifest,
              "n,alpha_minus,alpha_plus", rows)
    if plots:
        from .plots import plot_phase_diagram
        plot_phase_diagram(
            [(r[0], r[1] if r[1] != "" else None,
              r[2] if r[2] != "" else None) for r in rows],
            os.path.join(out, "phase_diagram.png"))
    return EXIT_OK


def cmd_kernel_table(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    r_vals = cfg.get_floats("r_list", [0.5, 1.0, 1.5, 2.0])
    eta_vals = cfg.get_floats("eta_list", [0.25, 0.75, 1.25, 1.75])
    rows = []
    K = np.zeros((len(r_vals), len(eta_vals)))
    Om = np.zeros_like(K)
    for i, r in enumerate(r_vals):
        for j, eta in enumerate(eta_vals):
            K[i, j] = kernel_K(spec, r, eta)
            Om[i, j] = kernel_omega(spec, r, eta)
            rows.append((r, eta, K[i, j], Om[i, j]))
    write_csv(os.path.join(out, "kernel_table.csv"), manifest,
              "r,eta,K,omega", rows)
    if plots:
        from .plots import plot_kernel_table
        plot_kernel_table(r_vals, eta_vals, K, Om,
                          os.path.join(out, "kernel_table.png"))
    return EXIT_OK


def cmd_sweep_epsilon(cfg: Config, manifest: RunManifest, out, plots: bool):
    spec = cfg.spec()
    solver_cfg = _solver_config(cfg, spec)
    eps_list = cfg.get_floats("eps_list", [1e-1, 3e-2, 1e-2])
    profile = _initial_profile(cfg, spec)

    def builder(c):
        return build_initial_data(spec, profile, None, c.epsilon, c.b, c.N)

    rows, cauchy, final_l1 = vanishing_viscosity_sweep(
        solver_cfg, eps_list, builder,
        n_samples=cfg.get_int("n_samples", 5), threads=manifest.threads)
    write_csv(os.path.join(out, "sweep_epsilon.csv"), manifest,
              "t,eps_hi,eps_lo,L1,Lgamma", rows)
    write_json(os.path.join(out, "sweep_epsilon.json"), manifest, {
        "eps_list": [_fmt(e) for e in eps_list],
        "final_L1": [_fmt(v) for v in final_l1],
        "cauchy_decreasing": bool(cauchy),
    })
    if plots:
        from .plots import plot_sweep
        plot_sweep(rows, os.path.join(out, "sweep_epsilon.png"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_checks(seed: int):
    """The invariant battery: (name, value, tolerance, passed) rows."""
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, value, tol, ok=None):
        if ok is None:
            ok = abs(value) <= tol
        checks.append((name, float(value), float(tol), bool(ok)))

    add("surface_area_2_minus_2pi", surface_area(2) - 2 * math.pi, 1e-14)
    add("surface_area_3_minus_4pi", surface_area(3) - 4 * math.pi, 1e-14)
    add("surface_area_4_minus_2pi2", surface_area(4) - 2 * math.pi ** 2, 1e-13)

    spec31 = PotentialSpec(3, 1.0)
    add("coulomb_K_shell", kernel_K(spec31, 2.0, 1.0) + 2 * math.pi, 1e-11)
    add("coulomb_omega_inside", kernel_omega(spec31, 2.0, 1.0) - math.pi, 1e-12)
    add("coulomb_omega_outside", kernel_omega(spec31, 1.0, 2.0), 1e-12)

    spec_half = PotentialSpec(3, 0.5)
    asym = 0.0
    for r in (0.5, 1.0, 2.0):
        for eta in (0.7, 1.3):
            asym = max(asym, abs(kernel_K(spec_half, r, eta)
                                 - kernel_K(spec_half, eta, r)))
    add("kernel_K_symmetry", asym, 1e-9)

    for s in (0.5, 1.0, 2.0):
        spec_log = PotentialSpec(3, 1e-4)
        val = phi_kernel(spec_log, s) + 1.0 / 1e-4 - math.log(s)
        add(f"log_limit_s{s:g}", val, 1e-3)

    add("composition_kappa11_minus_pi3",
        riesz_composition_constant(3, 1.0, 1.0) - math.pi ** 3, 1e-10)

    band = critical_alpha_band(20)
    add("alpha_band_20", (band[0] - 4.0) + (band[1] - 5.0), 1e-13)
    add("alpha_band_19_none", 0.0 if critical_alpha_band(19) is None else 1.0,
        0.5)
    C31 = hls_constant(3, 1.0)
    rep = critical_mass(3, 4.0 / 3.0, 1.0)
    add("critical_B_equals_8C", rep.B - 8.0 * C31, 1e-12)

    # HLS witness: random radial densities, diagonal pairing
    worst = -1.0
    for _ in range(20):
        r = np.linspace(1e-3, 3.0, 256)
        width = rng.uniform(0.2, 0.8)
        center = rng.uniform(0.3, 1.5)
        vals = rng.uniform(0.1, 2.0) * np.exp(-(((r - center) / width) ** 2))
        fld = RadialField(RadialGrid(r), vals)
        conv = potential(spec31, fld)
        lhs = lp_norm(3, RadialField(conv.grid, -1.0 * conv.values), 6.0)
        rhs = C31 * lp_norm(3, fld, 6.0 / 5.0)
        worst = max(worst, lhs / rhs)
    add("hls_witness_max_ratio", worst, 1.0, ok=worst <= 1.0)

    eta3, q3 = entropy_pair(1.0, 0.0, 3.0)
    add("entropy_q_quarter", q3 - 0.25, 1e-12)
    add("entropy_eta_odd", eta3, 1e-14)
    ok = entropy_bounds_check([0.0, 0.1, 1.0, 10.0], [-2.0, 0.0, 2.0], 2.0)
    add("entropy_bounds_gamma2", 0.0 if ok else 1.0, 0.5)

    # initial-data contract and a short solver run
    spec_run = PotentialSpec(3, 1.0, kappa=1, gamma=2.0)
    g = RadialGrid(np.linspace(1e-3, 2.5, 1024))
    prof = RadialField(g, np.exp(-((g.nodes / 0.8) ** 2)))
    M = radial_integral(3, g.nodes, prof.values)
    prof = RadialField(g, prof.values * 5.0 / M)
    st = build_initial_data(spec_run, prof, None, 1e-2, 4.0, 64)
    add("initial_mass", discrete_mass(3, st) / 5.0 - 1.0, 1e-12)
    add("initial_rho_b", st.profile.values[-1] - 4.0 ** -2.5, 1e-12)
    cfg_run = SolverConfig(spec_run, epsilon=1e-2, b=4.0, N=64, T=0.02,
                           cfl=0.4, dt_max=1e-3, output_every=10)
    add("initial_stress_residual",
        diagnostics(cfg_run, st).boundary_pressure, 1e-8)
    samples = run(cfg_run, st)
    m0 = samples[0][1].mass
    add("solver_mass_drift",
        max(abs(d.mass - m0) / m0 for _, d in samples), 1e-10)
    add("solver_dissipation_sign",
        min(d.dissipation_rate for _, d in samples), 1e-12,
        ok=min(d.dissipation_rate for _, d in samples) >= -1e-12)

    # steady state quick check (Lane-Emden support radius)
    grid = RadialGrid(np.linspace(1e-4, 0.7, 512))
    steady = solve_minimizer(spec_run, 1.0, grid, tol=1e-9)
    add("steady_support_radius",
        steady.support_radius - math.sqrt(math.pi) / 4.0, 1e-3)
    add("steady_free_energy_negative", steady.free_energy, 0.0,
        ok=steady.free_energy < 0.0)
    return checks


def cmd_verify(cfg: Config, manifest: RunManifest, out, plots: bool):
    checks = _verify_checks(manifest.seed)
    rows = [(name, val, tol, "pass" if ok else "FAIL")
            for name, val, tol, ok in checks]
    write_csv(os.path.join(out, "verify.csv"), manifest,
              "check,value,tolerance,status", rows)
    n_fail = sum(0 if ok else 1 for *_, ok in checks)
    write_json(os.path.join(out, "verify.json"), manifest, {
        "checks": len(checks),
        "failures": n_fail,
        "status": "pass" if n_fail == 0 else "fail",
    })
    for name, val, tol, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name} value={val:.3e} tol={tol:g}")
    return EXIT_OK if n_fail == 0 else EXIT_VALIDATION


HANDLERS = {
    "simulate": cmd_simulate,
    "steady": cmd_steady,
    "stability": cmd_stability,
    "critical-mass": cmd_critical_mass,
    "phase-diagram": cmd_phase_diagram,
    "kernel-table": cmd_kernel_table,
    "sweep-epsilon": cmd_sweep_epsilon,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rieszgas",
        description="Radial compressible gas dynamics with Riesz and "
                    "logarithmic interaction forces")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--no-plots", action="store_true",
                        help="suppress figure rendering")
    args = parser.parse_args(argv)

    threads = int(os.environ.get("RIESZ_GAS_THREADS", args.threads))

    try:
        values = {}
        if args.config is not None:
            with open(args.config) as fh:
                values = parse_config(fh.read())
        cfg = Config(values)
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            raise ConfigError(f"output directory {args.out!r} not writable")
        manifest = RunManifest(subcommand=args.subcommand,
                               config_path=args.config, out_dir=args.out,
                               seed=args.seed, threads=threads, config=values)
        spec_keys = {"n", "alpha", "kappa", "gamma"}
        if spec_keys & set(values):
            report = validate_regime(cfg.spec(),
                                     M=cfg.get_float("mass", 0.0) or None)
            for w in report.warnings:
                print(f"warning: {w}", file=sys.stderr)
        handler = HANDLERS[args.subcommand]
        return handler(cfg, manifest, args.out,
                       plots=not args.no_plots and args.subcommand != "verify")
    except (ConfigError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BlowupError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IterationError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
