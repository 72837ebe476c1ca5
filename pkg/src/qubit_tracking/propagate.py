"""Fixed-step RK4 propagation of the driven, damped two-level system.

The state is ``(rho00, c)`` with ``c = rho01 exp(-i omega t)`` the
rotating-frame coherence. The lab-frame equations::

    d rho00/dt = 2 mu E Im(rho01) + Gamma1 - Gamma2 rho00
    d rho01/dt = i omega rho01 - i mu E (2 rho00 - 1) - Gamma_tilde rho01

become, with ``D(t) = E(t) exp(-i omega t)``::

    d rho00/dt = 2 mu Im(c conj(D)) + Gamma1 - Gamma2 rho00
    dc/dt      = -i mu (2 rho00 - 1) D - Gamma_tilde c

This is an exact change of variables (counter-rotating terms included).
Replacing ``D`` by its resonant part ``conj(eps)`` gives the RWA equations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, IntegrationError
from .model import NoiseRates, QubitState, SystemParams

POSITIVITY_TOL = 1e-9
PHASE_UNDEFINED = 1e-6


def default_dt(omega, t_f):
    return min((2 * math.pi / omega) / 100, t_f / 1e5)


def _grid(t_f, dt):
    if not 0 < dt <= t_f:
        raise DomainError("dt", f"must satisfy 0 < dt <= t_f, got {dt!r}")
    n = int(math.ceil(t_f / dt - 1e-9))
    return n, t_f / n


@dataclass
class Trajectory:
    times: np.ndarray
    rho00: np.ndarray
    c: np.ndarray  # rotating-frame coherence
    omega: float
    dt: float
    frame: str

    @property
    def rho01(self):
        """Lab-frame coherence."""
        return self.c * np.exp(1j * self.omega * self.times)

    @property
    def P_num(self):
        return self.rho00

    @property
    def C_num(self):
        return np.abs(self.c)

    @property
    def Phi_num(self):
        return extract_phase(self, self.omega)

    @property
    def purity(self):
        p = self.rho00
        return p * p + (1 - p) ** 2 + 2 * np.abs(self.c) ** 2

    def states(self):
        r = self.rho01
        return [QubitState(float(p), float(z.real), float(z.imag)) for p, z in zip(self.rho00, r)]

    def thinned(self, stride):
        s = slice(None, None, max(1, int(stride)))
        keep = np.zeros(len(self.times), dtype=bool)
        keep[s] = True
        keep[-1] = True
        return Trajectory(self.times[keep], self.rho00[keep], self.c[keep], self.omega,
                          self.dt, self.frame)


def _integrate(p, c, drive, dt, n, mu, rates: NoiseRates):
    """Classic RK4; ``drive`` holds D at the 2n+1 half-step times."""
    G1, G2, Gt = rates.Gamma1, rates.Gamma2, rates.Gamma_tilde
    D = drive.tolist()
    P = [0.0] * (n + 1)
    Cc = [0j] * (n + 1)
    P[0], Cc[0] = p, c
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for i in range(n):
        d0, d1, d2 = D[2 * i], D[2 * i + 1], D[2 * i + 2]
        d0c, d1c, d2c = d0.conjugate(), d1.conjugate(), d2.conjugate()

        k1p = 2 * mu * (c * d0c).imag + G1 - G2 * p
        k1c = -1j * mu * (2 * p - 1) * d0 - Gt * c
        p2, c2 = p + h2 * k1p, c + h2 * k1c
        k2p = 2 * mu * (c2 * d1c).imag + G1 - G2 * p2
        k2c = -1j * mu * (2 * p2 - 1) * d1 - Gt * c2
        p3, c3 = p + h2 * k2p, c + h2 * k2c
        k3p = 2 * mu * (c3 * d1c).imag + G1 - G2 * p3
        k3c = -1j * mu * (2 * p3 - 1) * d1 - Gt * c3
        p4, c4 = p + dt * k3p, c + dt * k3c
        k4p = 2 * mu * (c4 * d2c).imag + G1 - G2 * p4
        k4c = -1j * mu * (2 * p4 - 1) * d2 - Gt * c4

        p = p + h6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        c = c + h6 * (k1c + 2 * k2c + 2 * k3c + k4c)
        P[i + 1] = p
        Cc[i + 1] = c
    return np.array(P), np.array(Cc, dtype=complex)


def _check_positivity(traj: Trajectory, tol=POSITIVITY_TOL):
    p = traj.rho00
    viol = np.maximum.reduce([-p, p - 1, np.abs(traj.c) ** 2 - p * (1 - p)])
    bad = np.flatnonzero(~(viol <= tol))
    if bad.size:
        i = bad[0]
        raise IntegrationError(f"state left the physical region (excess {viol[i]:.3g})",
                               float(traj.times[i]))
    return traj


def _initial(rho0: QubitState):
    return float(rho0.rho00), complex(rho0.rho01)


def propagate_drive(params: SystemParams, rates: NoiseRates, drive: Callable, rho0: QubitState,
                    t_f: float, dt: float, frame: str = "lab") -> Trajectory:
    """Integrate with an arbitrary rotating-frame drive ``D(t)`` (vectorized callable)."""
    n, h = _grid(t_f, dt)
    half = np.linspace(0.0, t_f, 2 * n + 1)
    D = np.asarray(drive(half), dtype=complex)
    if D.shape != half.shape:
        D = np.broadcast_to(D, half.shape).copy()
    p0, c0 = _initial(rho0)
    P, C = _integrate(p0, c0, D, h, n, params.mu, rates)
    traj = Trajectory(half[::2].copy(), P, C, params.omega, h, frame)
    return _check_positivity(traj)


def propagate_lab(params: SystemParams, rates: NoiseRates, field, rho0: QubitState,
                  t_f: float, dt: float | None = None) -> Trajectory:
    """Exact (non-RWA) propagation under the real field ``field(t)``.

    ``field`` is a :class:`ControlField` or any vectorized callable ``E(t)``;
    ``None`` means no field.
    """
    if dt is None:
        dt = default_dt(params.omega, t_f)
    if dt > (2 * math.pi / params.omega) / 40:
        raise DomainError("dt", "must resolve the carrier: dt <= (2 pi/omega)/40")
    omega = params.omega

    if field is None:
        def drive(t):
            return np.zeros_like(t, dtype=complex)
    else:
        def drive(t):
            return np.asarray(field(t), dtype=float) * np.exp(-1j * omega * t)
    return propagate_drive(params, rates, drive, rho0, t_f, dt, "lab")


def propagate_rwa(params: SystemParams, rates: NoiseRates, envelope, rho0: QubitState,
                  t_f: float, dt: float | None = None) -> Trajectory:
    """Rotating-wave propagation under the complex envelope ``eps(t)``.

    ``envelope`` is a :class:`ControlField` (its ``rwa_envelope`` is used), a
    vectorized callable returning ``eps(t)``, or ``None``.
    """
    if dt is None:
        dt = t_f / 1e5
    if dt > t_f / 1000:
        raise DomainError("dt", "must satisfy dt <= t_f/1000")
    if params.omega_p != params.omega:
        raise DomainError("omega_p", "RWA propagation assumes resonance")
    if envelope is None:
        def drive(t):
            return np.zeros_like(t, dtype=complex)
    else:
        eps = getattr(envelope, "rwa_envelope", envelope)

        def drive(t):
            return np.conj(np.asarray(eps(t), dtype=complex))
    return propagate_drive(params, rates, drive, rho0, t_f, dt, "rwa")


def extract_phase(traj: Trajectory, omega: float | None = None):
    """Unwrapped rotating-frame phase ``arg(rho01 exp(-i omega t))``.

    Samples with ``|rho01| < 1e-6`` are undefined (NaN) and skipped by the
    unwrapping.
    """
    if omega is None or omega == traj.omega:
        c = traj.c
    else:
        c = traj.rho01 * np.exp(-1j * omega * traj.times)
    phase = np.full(len(c), np.nan)
    ok = np.abs(c) >= PHASE_UNDEFINED
    if ok.any():
        phase[ok] = np.unwrap(np.angle(c[ok]))
    return phase


class TrackingErrors(NamedTuple):
    max_P_error: float
    max_phase_error: float
    max_C_error: float
    final_P_error: float
    final_phase_error: float
    n_phase_samples: int


def circular_distance(a, b):
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


def tracking_errors(traj: Trajectory, population, phase, coherence=None) -> TrackingErrors:
    """Compare a trajectory with the prescription it was designed for."""
    t = traj.times
    dP = np.abs(traj.rho00 - np.asarray(population.value(t)))
    phi_num = extract_phase(traj)
    ok = ~np.isnan(phi_num)
    dphi = circular_distance(phi_num[ok], np.asarray(phase.value(t[ok])))
    if coherence is not None:
        dC = np.abs(traj.C_num - np.asarray(coherence.c(t)))
        maxC = float(dC.max())
    else:
        maxC = float("nan")
    return TrackingErrors(
        float(dP.max()),
        float(dphi.max()) if dphi.size else float("nan"),
        maxC,
        float(dP[-1]),
        float(dphi[-1]) if ok[-1] else float("nan"),
        int(ok.sum()),
    )


class ConvergenceResult(NamedTuple):
    order: float
    orders: tuple
    errors: tuple
    reliable: bool


def convergence_check(run: Callable[[float], np.ndarray], dt: float, levels: int = 4,
                      floor: float = 1e-13) -> ConvergenceResult:
    """Observed global order from ``levels`` successive halvings of ``dt``.

    ``run(dt)`` returns the final state as a real vector. The estimate is
    flagged unreliable when differences sit at round-off, the per-level
    orders have not settled, or the coarsest step leaves the physical region.
    """
    if levels < 3:
        raise DomainError("levels", "need at least 3 levels")
    try:
        finals = [np.asarray(run(dt / 2**j), dtype=float) for j in range(levels)]
    except IntegrationError:
        nan = float("nan")
        return ConvergenceResult(nan, (), (), False)
    errs = [float(np.max(np.abs(finals[j] - finals[j + 1]))) for j in range(levels - 1)]
    orders = []
    for j in range(len(errs) - 1):
        if errs[j] > 0 and errs[j + 1] > 0:
            orders.append(math.log2(errs[j] / errs[j + 1]))
        else:
            orders.append(float("nan"))
    order = orders[-1]
    settled = all(math.isfinite(o) for o in orders)
    if len(orders) >= 2 and settled:
        settled = abs(orders[-1] - orders[-2]) < 0.3
    reliable = settled and min(errs) > floor and abs(order - 4.0) < 0.5
    return ConvergenceResult(order, tuple(orders), tuple(errs), bool(reliable))


TRAJECTORY_COLUMNS = ("t", "P_num", "C_num", "Phi_num", "rho01_re", "rho01_im")


def trajectory_rows(traj: Trajectory):
    r = traj.rho01
    return np.column_stack([traj.times, traj.rho00, traj.C_num, traj.Phi_num, r.real, r.imag])
