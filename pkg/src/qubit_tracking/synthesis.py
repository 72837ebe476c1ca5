"""Control-field synthesis by inverting the equations of motion.

The field is carried as the quadrature pair::

    X = (dP/dt + Gamma2 P - Gamma1) / (2C)
    Y = C dPhi/dt / (2P - 1)

with ``E(t) = (2/mu) [X sin(omega t + Phi) - Y cos(omega t + Phi)]``.
The amplitude/chirp form ``E = A sin(omega t + Phi + Lambda)`` is derived
from it for reporting.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coherence import CoherenceSolution, require_feasible
from .errors import PrescriptionError, SingularityError
from .model import NoiseRates, SystemParams
from .profiles import (DEFAULT_PHASE_TOL, PhaseProfile, PopulationProfile,
                       validate_prescription)
from .model import MixednessConstant

C_FLOOR = 1e-9
NUM_FLOOR = 1e-9
REMOVABLE_STEP = 1e-3  # fraction of t_f used to bridge a 0/0 point
CHECK_SAMPLES = 20_001


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class ControlField:
    population: PopulationProfile
    phase: PhaseProfile
    coherence: CoherenceSolution
    params: SystemParams
    rates: NoiseRates
    forced: bool = False
    printed_order: bool = False
    n_samples: int = CHECK_SAMPLES
    warnings: tuple = field(default=(), compare=False)

    @property
    def t_f(self):
        return self.population.t_f

    # quadrature coefficients --------------------------------------------

    def _x_numerator(self, t):
        P = np.asarray(self.population.value(t))
        Pd = np.asarray(self.population.derivative(t))
        r = self.rates
        if self.printed_order:
            return Pd + r.Gamma1 * P - r.Gamma2
        return Pd + r.Gamma2 * P - r.Gamma1

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        C = np.asarray(self.coherence.c(t))
        num_x = self._x_numerator(t)
        num_y = C * np.asarray(self.phase.derivative(t))
        den_y = 2 * np.asarray(self.population.value(t)) - 1
        with np.errstate(divide="ignore", invalid="ignore"):
            X = num_x / (2 * C)
            Y = num_y / den_y
        bad_x = C < C_FLOOR
        bad_y = np.abs(den_y) < C_FLOOR
        return X, Y, bad_x, bad_y, num_x, num_y

    def _bridge(self, fn, t):
        """Value of a removable 0/0 at ``t`` from neighbours ``h = 1e-3 t_f`` away."""
        h = REMOVABLE_STEP * self.t_f
        if t - h < 0:
            return 2 * fn(t + h) - fn(t + 2 * h)
        if t + h > self.t_f:
            return 2 * fn(t - h) - fn(t - 2 * h)
        return 0.5 * (fn(t - h) + fn(t + h))

    def quadrature(self, t):
        """Return ``(X, Y)`` at ``t``; removable singularities are bridged."""
        X, Y, bad_x, bad_y, num_x, num_y = self._raw(t)
        X = np.atleast_1d(np.array(X, dtype=float))
        Y = np.atleast_1d(np.array(Y, dtype=float))
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        for i in np.flatnonzero(np.atleast_1d(bad_x)):
            if abs(np.atleast_1d(num_x)[i]) > NUM_FLOOR:
                raise SingularityError("C(t) vanishes while the population drive does not",
                                       (tt[i], tt[i]))
            X[i] = self._bridge(lambda s: float(self._raw(s)[0]), tt[i])
        for i in np.flatnonzero(np.atleast_1d(bad_y)):
            if abs(np.atleast_1d(num_y)[i]) > NUM_FLOOR:
                raise SingularityError("P = 1/2 while C dPhi/dt does not vanish",
                                       (tt[i], tt[i]))
            Y[i] = self._bridge(lambda s: float(self._raw(s)[1]), tt[i])
        if np.ndim(t) == 0:
            return float(X[0]), float(Y[0])
        return X, Y

    # representations -----------------------------------------------------

    def carrier_phase(self, t):
        """``omega t + Phi(t)``."""
        return _out(self.params.omega * np.asarray(t, dtype=float)
                    + np.asarray(self.phase.value(t)))

    def field(self, t):
        X, Y = self.quadrature(t)
        th = self.carrier_phase(t)
        return _out((2 / self.params.mu) * (np.asarray(X) * np.sin(th) - np.asarray(Y) * np.cos(th)))

    __call__ = field

    def envelope(self, t):
        """Signed amplitude ``A = (2/mu) xi sqrt(X**2 + Y**2)`` with ``xi = sgn(X)``."""
        X, Y = (np.asarray(v) for v in self.quadrature(t))
        xi = np.where(X < 0, -1.0, 1.0)
        return _out((2 / self.params.mu) * xi * np.hypot(X, Y))

    def chirp(self, t):
        """``Lambda`` on the branch that pairs with ``xi = sgn(X)``.

        ``tan(Lambda) = C dPhi/dt / (dC/dt + Gamma_tilde C)`` holds on every branch.
        """
        X, Y = (np.asarray(v) for v in self.quadrature(t))
        xi = np.where(X < 0, -1.0, 1.0)
        return _out(np.arctan2(-xi * Y, xi * X))

    def total_phase(self, t):
        return _out(np.asarray(self.carrier_phase(t)) + np.asarray(self.chirp(t)))

    def rwa_envelope(self, t):
        """Complex envelope ``eps`` with ``E = eps exp(-i omega t) + c.c.``."""
        X, Y = (np.asarray(v) for v in self.quadrature(t))
        Phi = np.asarray(self.phase.value(t))
        return (1j * X - Y) * np.exp(-1j * Phi) / self.params.mu

    def interaction_drive(self, t):
        """``E(t) exp(-i omega t)``, the exact (non-RWA) drive in the rotating frame."""
        t = np.asarray(t, dtype=float)
        return np.asarray(self.field(t)) * np.exp(-1j * self.params.omega * t)


def synthesize(P: PopulationProfile, Phi: PhaseProfile, C: CoherenceSolution,
               params: SystemParams, rates: NoiseRates, *, force: bool = False,
               phase_tol: float = DEFAULT_PHASE_TOL, printed_order: bool = False,
               n_samples: int = CHECK_SAMPLES) -> ControlField:
    """Build the tracking field for the prescription ``(P, Phi)``.

    Refuses infeasible coherence and prescriptions failing the phase-slope
    condition (unless ``force``) and scans ``n_samples`` times for true
    singularities.
    """
    require_feasible(C)
    warnings = []
    report = validate_prescription(P, Phi, MixednessConstant(C.k), rates, phase_tol)
    if not report.ok:
        msg = "; ".join(f"t={t:.6g}: {d}" for t, d in report.violations)
        if not force:
            raise PrescriptionError(msg)
        warnings.append(f"forced past validation: {msg}")
    if params.omega_p != params.omega:
        warnings.append("omega_p ignored: the field is synthesized on resonance")
    fld = ControlField(P, Phi, C, params, rates, force, printed_order, n_samples, tuple(warnings))
    grid = np.linspace(0.0, P.t_f, n_samples)
    X, Y, bad_x, bad_y, num_x, num_y = fld._raw(grid)
    sing = (bad_x & (np.abs(num_x) > NUM_FLOOR)) | (bad_y & (np.abs(num_y) > NUM_FLOOR))
    if sing.any() and not force:
        idx = np.flatnonzero(sing)
        raise SingularityError("field diverges", (float(grid[idx[0]]), float(grid[idx[-1]])))
    return fld


def envelope(field: ControlField, t):
    return field.envelope(t)


WAVEFORM_COLUMNS = ("t", "E", "A", "Lambda", "X", "Y")


def sample_waveform(field: ControlField, n: int):
    """Rows ``(t, E, A, Lambda, X, Y)`` on ``n`` uniform times including both ends."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    t = np.linspace(0.0, field.t_f, n)
    X, Y = field.quadrature(t)
    E = field.field(t)
    A = field.envelope(t)
    L = field.chirp(t)
    return np.column_stack([t, E, A, L, X, Y])
