"""Accessible population transitions ``Pi -> Pf`` for sine-squared prescriptions."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .coherence import FEAS_TOL, asymptotic_coherence, csq_sine_squared, steady_state_coherence
from .model import NoiseRates


class Access(IntEnum):
    INVALID_INITIAL = 0
    UNITARY_INACCESSIBLE = 1
    UNITARY_ONLY = 2
    NOISE_ACCESSIBLE = 3


GRAY_LEVELS = {
    Access.INVALID_INITIAL: 0,
    Access.UNITARY_INACCESSIBLE: 255,
    Access.UNITARY_ONLY: 170,
    Access.NOISE_ACCESSIBLE: 85,
}


def _min_csq(Pi, Pf, C0, rates, t_f, n_t):
    """Unitary and noisy min C**2 over the time grid; ``Pf`` may be an array."""
    Pf = np.atleast_1d(np.asarray(Pf, dtype=float))
    k = Pi * (1 - Pi) - C0 * C0
    t = np.linspace(0.0, t_f, n_t)
    s2 = np.sin(np.pi * t / (2 * t_f)) ** 2
    P = (Pf[:, None] - Pi) * s2[None, :] + Pi
    Q = (1.0 - Pi) - (Pf[:, None] - Pi) * s2[None, :]
    unitary = (P * Q).min(axis=1) - k
    if rates.Gamma_tilde == 0:
        noisy = unitary
    else:
        noisy = np.asarray(csq_sine_squared(Pi, Pf[:, None], t_f, rates, k, t[None, :])).min(axis=1)
    return k, unitary, noisy


def _classify_row(Pi, Pf, rates, C0, t_f, n_t, feas_tol=FEAS_TOL):
    k, unitary, noisy = _min_csq(Pi, Pf, C0, rates, t_f, n_t)
    n = len(unitary)
    if k < -feas_tol:
        return (np.full(n, Access.INVALID_INITIAL, dtype=np.int8),
                np.zeros(n, bool), np.zeros(n, bool))
    u_ok = unitary >= -feas_tol
    n_ok = noisy >= -feas_tol
    cls = np.where(n_ok, Access.NOISE_ACCESSIBLE,
                   np.where(u_ok, Access.UNITARY_ONLY, Access.UNITARY_INACCESSIBLE))
    return cls.astype(np.int8), u_ok, n_ok


def classify_transition(Pi, Pf, rates: NoiseRates, C0, t_f, n_t=400) -> Access:
    """Colour class of one transition (see :class:`Access`)."""
    if n_t < 100:
        raise ValueError("n_t must be >= 100")
    if not (0 <= Pi <= 1 and 0 <= Pf <= 1) or C0 < 0:
        return Access.INVALID_INITIAL
    cls, _, _ = _classify_row(float(Pi), [float(Pf)], rates, float(C0), float(t_f), int(n_t))
    return Access(int(cls[0]))


@dataclass
class ReachabilityGrid:
    Pi_axis: np.ndarray
    Pf_axis: np.ndarray
    cells: np.ndarray  # cells[i, j] for (Pi_axis[i], Pf_axis[j])
    unitary_ok: np.ndarray
    noise_ok: np.ndarray
    metadata: dict = field(default_factory=dict)

    def count(self, cls: Access) -> int:
        return int(np.count_nonzero(self.cells == cls))

    @property
    def dark_outside_light(self) -> int:
        return int(np.count_nonzero(self.noise_ok & ~self.unitary_ok))


def _row_task(args):
    Pi, Pf_axis, rates, C0, t_f, n_t = args
    return _classify_row(Pi, Pf_axis, rates, C0, t_f, n_t)


def accessibility_map(rates: NoiseRates, C0, t_f, n_grid=201, n_t=400, workers=None,
                      family="sine_squared") -> ReachabilityGrid:
    """Classify every ``(Pi, Pf)`` on a uniform ``n_grid x n_grid`` grid.

    Rows are farmed out to ``workers`` processes and gathered in index order,
    so the result does not depend on scheduling.
    """
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    if family != "sine_squared":
        raise ValueError(f"unsupported profile family {family!r}")
    axis = np.linspace(0.0, 1.0, n_grid)
    tasks = [(float(Pi), axis, rates, float(C0), float(t_f), int(n_t)) for Pi in axis]
    workers = workers or os.cpu_count() or 1
    if workers > 1 and n_grid >= 16:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row_task, tasks, chunksize=max(1, n_grid // (4 * workers))))
    else:
        rows = [_row_task(a) for a in tasks]
    cells = np.stack([r[0] for r in rows])
    u_ok = np.stack([r[1] for r in rows])
    n_ok = np.stack([r[2] for r in rows])
    meta = dict(gamma=rates.gamma, Gamma=rates.Gamma, nbar=rates.nbar, C0=float(C0),
                t_f=float(t_f), n_grid=int(n_grid), n_t=int(n_t), family=family,
                feas_tol=FEAS_TOL, min_C2="sampled on uniform time grid incl. endpoints")
    return ReachabilityGrid(axis, axis.copy(), cells, u_ok, n_ok, meta)


@dataclass
class AsymptoticCurve:
    P: np.ndarray
    C_inf: np.ndarray  # real part; 0 where C_inf**2 < 0
    C_inf_sq: np.ndarray
    clamped: np.ndarray


def asymptotic_curve(rates: NoiseRates, n_points=201) -> AsymptoticCurve:
    """``Re C_inf`` against a constant population on ``[0, 1]``."""
    P = np.linspace(0.0, 1.0, n_points)
    csq = np.array([asymptotic_coherence(p, rates).C_inf_sq for p in P])
    clamped = csq < 0
    return AsymptoticCurve(P, np.sqrt(np.where(clamped, 0.0, csq)), csq, clamped)


def steady_table(rates: NoiseRates, n_points=201):
    """Rows ``(P, C_inf, C_inf_sq, C0_required, k, feasible)`` over a P grid."""
    rows = []
    for p in np.linspace(0.0, 1.0, n_points):
        s = steady_state_coherence(float(p), rates)
        a = asymptotic_coherence(float(p), rates)
        rows.append((s.P, a.C_inf, a.C_inf_sq, s.C0, s.k, int(s.feasible)))
    return np.array(rows, dtype=float)
