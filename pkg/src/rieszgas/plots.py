"""Figure rendering for the CLI report paths.

Every report-producing subcommand can render PNG figures next to its
delimited output; figures are presentation-only and never read back.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def plot_diagnostics(rows, path):
    """Energy/entropy time series from DiagnosticsRow records."""
    t = [r.t for r in rows]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    ax = axes[0, 0]
    ax.plot(t, [r.energy.kinetic for r in rows], label="kinetic")
    ax.plot(t, [r.energy.internal for r in rows], label="internal")
    ax.plot(t, [r.energy.interaction for r in rows], label="interaction")
    ax.plot(t, [r.energy.total for r in rows], "k--", label="total")
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    ax = axes[0, 1]
    ax.semilogy(t, np.maximum([r.bd_entropy for r in rows], 1e-300))
    ax.set_ylabel("BD entropy")
    ax = axes[1, 0]
    ax.plot(t, [r.b_t for r in rows])
    ax.set_ylabel("outer radius b(t)")
    ax.set_xlabel("t")
    ax = axes[1, 1]
    ax.semilogy(t, np.maximum([r.min_rho for r in rows], 1e-300))
    ax.set_ylabel("min density")
    ax.set_xlabel("t")
    _save(fig, path)


def plot_profile(r, rho, path, label="density"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(r, rho)
    ax.set_xlabel("r")
    ax.set_ylabel(label)
    _save(fig, path)


def plot_phase_diagram(rows, path):
    """alpha_- / alpha_+ band against the dimension (real branch only)."""
    ns = [r[0] for r in rows if r[1] is not None]
    lo = [r[1] for r in rows if r[1] is not None]
    hi = [r[2] for r in rows if r[1] is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if ns:
        ax.fill_between(ns, lo, hi, alpha=0.3, label="critical-mass band")
        ax.plot(ns, lo, label="alpha_-")
        ax.plot(ns, hi, label="alpha_+")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("alpha")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_sweep(rows, path):
    """Pairwise distances between viscosity levels over time."""
    fig, ax = plt.subplots(figsize=(6, 4))
    pairs = sorted({(r[1], r[2]) for r in rows})
    for e1, e2 in pairs:
        pts = [(r[0], r[3]) for r in rows if (r[1], r[2]) == (e1, e2)]
        ax.semilogy([p[0] for p in pts], [max(p[1], 1e-300) for p in pts],
                    marker="o", label=f"eps {e1:g} vs {e2:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("L1 distance")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_stability(report, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(report.times, np.maximum(report.functional, 1e-300))
    ax.set_xlabel("t")
    ax.set_ylabel("stability functional")
    _save(fig, path)


def plot_kernel_table(r_vals, eta_vals, K, Om, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, M, name in ((axes[0], K, "K"), (axes[1], Om, "omega")):
        im = ax.imshow(M, origin="lower", aspect="auto",
                       extent=[eta_vals[0], eta_vals[-1], r_vals[0], r_vals[-1]])
        ax.set_xlabel("eta")
        ax.set_ylabel("r")
        ax.set_title(name)
        fig.colorbar(im, ax=ax)
    _save(fig, path)
