"""Figures written next to the CSV reports. Uses the non-interactive Agg backend."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .export import map_image  # noqa: E402

plt.rcParams["font.size"] = 9
plt.rcParams["legend.fontsize"] = 8
plt.rcParams["axes.linewidth"] = 0.8

PRESCRIBED = dict(color="k", lw=1.2, ls="--")
NUMERIC = dict(color="tab:blue", lw=0.8)


def save_fig(fig, path):
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def tracking_figure(traj, population, phase, coherence, field, path, n_field=20_000):
    """Four panels: population, phase, coherence modulus, control field."""
    fig, ax = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    t = traj.times
    ax[0, 0].plot(t, traj.rho00, label=r"$\rho_{00}$", **NUMERIC)
    ax[0, 0].plot(t, population.value(t), label="P(t)", **PRESCRIBED)
    ax[0, 0].set_ylabel("population")
    ax[0, 1].plot(t, traj.Phi_num, label="numerical", **NUMERIC)
    ax[0, 1].plot(t, phase.value(t), label=r"$\Phi(t)$", **PRESCRIBED)
    ax[0, 1].set_ylabel("coherence phase")
    ax[1, 0].plot(t, traj.C_num, label=r"$|\rho_{01}|$", **NUMERIC)
    ax[1, 0].plot(t, coherence.c(t), label="C(t)", **PRESCRIBED)
    ax[1, 0].set_ylabel("coherence modulus")
    tf = np.linspace(0.0, field.t_f, n_field)
    ax[1, 1].plot(tf, field.field(tf), color="tab:red", lw=0.4)
    ax[1, 1].plot(tf, np.abs(field.envelope(tf)), color="k", lw=0.8)
    ax[1, 1].set_ylabel("E(t)")
    for a in ax.flat:
        a.legend(loc="best", frameon=False) if a.get_legend_handles_labels()[0] else None
    for a in ax[1]:
        a.set_xlabel("t (a.u.)")
    return save_fig(fig, path)


def waveform_figure(rows, path):
    fig, ax = plt.subplots(2, 1, figsize=(7, 4.5), sharex=True)
    t, E, A, L = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    ax[0].plot(t, E, color="tab:red", lw=0.4)
    ax[0].plot(t, np.abs(A), color="k", lw=0.8)
    ax[0].set_ylabel("E(t), |A(t)|")
    ax[1].plot(t, L, color="tab:green", lw=0.8)
    ax[1].set_ylabel(r"$\Lambda(t)$")
    ax[1].set_xlabel("t (a.u.)")
    return save_fig(fig, path)


def map_figure(grid, path, title=None):
    img = map_image(grid)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(img, cmap="gray", vmin=0, vmax=255, extent=(0, 1, 0, 1), interpolation="nearest")
    ax.set_xlabel(r"$P_i$")
    ax.set_ylabel(r"$P_f$")
    if title:
        ax.set_title(title)
    return save_fig(fig, path)


def asymptotic_figure(curves, path):
    """``curves`` is a list of ``(label, AsymptoticCurve)``."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, c in curves:
        ax.plot(c.P, c.C_inf, label=label, lw=1)
    ax.set_xlabel("P")
    ax.set_ylabel(r"Re $C_\infty$")
    ax.legend(frameon=False)
    return save_fig(fig, path)


def coherence_figure(t, curves, path):
    """``curves`` is a list of ``(label, C(t) array)``."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, c in curves:
        ax.plot(t, c, label=label, lw=1)
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("C(t)")
    ax.legend(frameon=False)
    return save_fig(fig, path)
