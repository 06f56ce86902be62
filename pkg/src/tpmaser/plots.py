"""Figure rendering for the report path: PNG files next to the CSV output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_series_plot(series, path):
    """Linear entropy, mean photon number and g2(0) against atoms crossed."""
    atoms = np.arange(len(series.zeta))
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.5))
    axes[0].plot(atoms, series.zeta, color="C0")
    axes[0].set_ylabel(r"linear entropy $\zeta$")
    axes[1].plot(atoms, series.mean_n, color="C1")
    axes[1].set_ylabel(r"$\langle n \rangle$")
    axes[2].plot(atoms, series.g2, color="C2")
    axes[2].axhline(1.0, color="0.6", lw=0.8, ls="--")
    axes[2].set_ylabel(r"$g^{(2)}(0)$")
    axes[2].set_xlabel("atoms crossed")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_pn_plot(snapshot, path):
    p = snapshot.pn.p
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.bar(np.arange(len(p)), p, width=0.85, color="C0")
    ax.set_xlabel("photon number $n$")
    ax.set_ylabel("$P_n$")
    ax.set_title(f"number distribution after {snapshot.index} atoms")
    ax.set_xlim(-0.5, min(len(p), 40) - 0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_qgrid_plot(snapshot, path):
    grid = snapshot.qgrid
    x, y = grid.spec.axes()
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    # values[i, j] = Q(x_i, y_j); pcolormesh wants the y axis first
    mesh = ax.pcolormesh(x, y, grid.values.T, cmap="viridis", shading="auto")
    ax.contour(x, y, grid.values.T, levels=8, colors="w", linewidths=0.5, alpha=0.6)
    ax.set_xlabel(r"$\mathrm{Re}\,\beta$")
    ax.set_ylabel(r"$\mathrm{Im}\,\beta$")
    ax.set_title(f"Husimi Q after {snapshot.index} atoms")
    ax.set_aspect("equal")
    fig.colorbar(mesh, ax=ax, label="Q")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tau_scan_plot(scan, tau_star, path):
    taus = [row.tau for row in scan]
    zetas = [row.zeta_min for row in scan]
    fig, ax = plt.subplots(figsize=(6.4, 3.8))
    ax.plot(taus, zetas, color="C0", lw=1.0)
    ax.axvline(tau_star, color="C3", lw=1.0, ls="--",
               label=rf"$\tau^* = {tau_star:.3f}$")
    ax.set_xlabel(r"interaction time $\tau$")
    ax.set_ylabel(r"min $\zeta$ over run")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
