"""Coherence modulus implied by a population prescription.

Eliminating the field from the equations of motion leaves a linear ODE for
``G = C**2``::

    dG/dt = (1 - 2P)(dP/dt + Gamma2 P - Gamma1) - 2 Gamma_tilde G

whose solution with ``G(0) = C0**2`` is evaluated here in closed form (constant
and sine-squared populations) or by adaptive quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import CapabilityError, DomainError, InfeasiblePrescriptionError
from .model import MixednessConstant, NoiseRates, mixedness_constant
from .profiles import PopulationProfile

FEAS_TOL = 1e-12
SERIES_THRESHOLD = 1e-6
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 10_000


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# --- auxiliary integrals ----------------------------------------------------

def f1(Gt, t):
    """``int_0^t exp(2 Gt s) ds``."""
    t = np.asarray(t, dtype=float)
    x = 2 * Gt * t
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.expm1(x) / (2 * Gt) if Gt > 0 else t
    series = t * (1 + x / 2 + x * x / 6 + x**3 / 24)
    return _out(np.where(np.abs(x) < SERIES_THRESHOLD, series, direct))


def f_cos(Gt, a, t):
    """``int_0^t cos(a s) exp(2 Gt s) ds`` for angular frequency ``a > 0``."""
    t = np.asarray(t, dtype=float)
    b = 2 * Gt
    e = np.exp(b * t)
    return _out((e * (b * np.cos(a * t) + a * np.sin(a * t)) - b) / (b * b + a * a))


def f2(Gt, t_f, t):
    return f_cos(Gt, np.pi / t_f, t)


def f3(Gt, t_f, t):
    return f_cos(Gt, 2 * np.pi / t_f, t)


def integral_I1_sine_squared(rates: NoiseRates, Pi, Pf, t_f, t):
    """``int_0^t P(s) exp(2 Gamma_tilde s) ds`` for the sine-squared population."""
    Gt = rates.Gamma_tilde
    F1 = f1(Gt, t)
    return Pi * F1 + 0.5 * (Pf - Pi) * (F1 - f2(Gt, t_f, t))


def integral_I2_sine_squared(rates: NoiseRates, Pi, Pf, t_f, t):
    """``int_0^t P(s)**2 exp(2 Gamma_tilde s) ds`` for the sine-squared population."""
    Gt = rates.Gamma_tilde
    F1, F2, F3 = f1(Gt, t), f2(Gt, t_f, t), f3(Gt, t_f, t)
    d = Pf - Pi
    h1 = d * d * (0.375 * F1 - 0.5 * F2 + 0.125 * F3)
    h2 = Pi * d * (F1 - F2)
    return Pi * Pi * F1 + h1 + h2


def quadrature_integrals(P, Gt, t):
    """``I1`` and ``I2`` for an arbitrary callable ``P`` by adaptive quadrature.

    Times are visited in increasing order and the integral is accumulated
    piecewise, so a dense grid costs one pass over ``[0, max(t)]``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    order = np.argsort(t)
    I1 = np.empty_like(t)
    I2 = np.empty_like(t)
    acc1 = acc2 = 0.0
    prev = 0.0
    for idx in order:
        ti = t[idx]
        if ti > prev:
            kw = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
            acc1 += integrate.quad(lambda s: float(P(s)) * math.exp(2 * Gt * s), prev, ti, **kw)[0]
            acc2 += integrate.quad(lambda s: float(P(s)) ** 2 * math.exp(2 * Gt * s), prev, ti, **kw)[0]
            prev = ti
        I1[idx] = acc1
        I2[idx] = acc2
    return I1, I2


# --- coherence formulas -----------------------------------------------------

def lam(P, rates: NoiseRates):
    """Mixedness value ``lambda(P)`` that keeps a constant population stationary."""
    Gt = rates.Gamma_tilde
    if Gt <= 0:
        raise DomainError("Gamma_tilde", "lambda(P) needs Gamma_tilde > 0")
    P = np.asarray(P, dtype=float)
    return _out(rates.gamma_tilde - P * (rates.Gamma_tilde1 + P * rates.Gamma_tilde2) / (2 * Gt))


def _noisy_csq(variance, k, rates, I1, I2, t):
    decay = np.exp(-2 * rates.Gamma_tilde * np.asarray(t, dtype=float))
    gtil = rates.gamma_tilde
    return (variance + decay * (gtil - k) - gtil
            + decay * (rates.Gamma_tilde1 * I1 + rates.Gamma_tilde2 * I2))


def csq_sine_squared(Pi, Pf, t_f, rates: NoiseRates, k, t):
    """Closed-form ``C**2`` for the sine-squared population; broadcasts over all arguments."""
    Pi = np.asarray(Pi, dtype=float)
    Pf = np.asarray(Pf, dtype=float)
    t = np.asarray(t, dtype=float)
    s2 = np.sin(np.pi * t / (2 * t_f)) ** 2
    P = (Pf - Pi) * s2 + Pi
    Q = (1.0 - Pi) - (Pf - Pi) * s2
    if rates.Gamma_tilde == 0:
        return _out(P * Q - k)
    I1 = integral_I1_sine_squared(rates, Pi, Pf, t_f, t)
    I2 = integral_I2_sine_squared(rates, Pi, Pf, t_f, t)
    return _out(_noisy_csq(P * Q, k, rates, I1, I2, t))


def coherence_unitary(P, k: MixednessConstant | float):
    """``C**2 = P - P**2 - k`` (zero noise)."""
    k = getattr(k, "k", k)
    P = np.asarray(P, dtype=float)
    return _out(P * (1 - P) - k)


def coherence_constant_population(P, rates: NoiseRates, k: MixednessConstant | float, t):
    """``C**2(t)`` for a population held at ``P``; relaxes to ``C_inf**2`` at rate ``2 Gamma_tilde``."""
    k = getattr(k, "k", k)
    t = np.asarray(t, dtype=float)
    if rates.Gamma_tilde == 0:
        return _out(np.full_like(t, P * (1 - P) - k))
    lm = lam(P, rates)
    return _out(P * (1 - P) - lm + (lm - k) * np.exp(-2 * rates.Gamma_tilde * t))


def coherence_general(P: PopulationProfile, rates: NoiseRates, C0: float, t,
                      method: str | None = None):
    """``C**2(t)`` from the integral solution of the coherence ODE.

    ``method`` is ``None`` (closed form when available), ``"closed"`` or
    ``"quadrature"``.
    """
    k = mixedness_constant(float(P.value(0.0)), C0).k
    t = np.asarray(t, dtype=float)
    var = np.asarray(P.variance(t))
    if rates.Gamma_tilde == 0:
        return _out(var - k)
    Gt = rates.Gamma_tilde
    if method == "quadrature":
        I1, I2 = quadrature_integrals(P.value, Gt, np.atleast_1d(t))
        I1 = I1.reshape(t.shape)
        I2 = I2.reshape(t.shape)
    elif P.is_constant:
        I1 = P.Pi * np.asarray(f1(Gt, t))
        I2 = P.Pi**2 * np.asarray(f1(Gt, t))
    elif P.kind == "sine_squared":
        I1 = integral_I1_sine_squared(rates, P.Pi, P.Pf, P.t_f, t)
        I2 = integral_I2_sine_squared(rates, P.Pi, P.Pf, P.t_f, t)
    elif method == "closed":
        raise CapabilityError(f"no closed form for population kind {P.kind!r}")
    else:
        I1, I2 = quadrature_integrals(P.value, Gt, np.atleast_1d(t))
        I1 = I1.reshape(t.shape)
        I2 = I2.reshape(t.shape)
    return _out(_noisy_csq(var, k, rates, I1, I2, t))


def coherence_ode_rhs(P, Pdot, rates: NoiseRates, Csq):
    """Right-hand side of the ``C**2`` equation of motion."""
    return (1 - 2 * P) * (Pdot + rates.Gamma2 * P - rates.Gamma1) - 2 * rates.Gamma_tilde * Csq


class AsymptoticCoherence(NamedTuple):
    C_inf: float
    C_inf_sq: float
    feasible: bool


def _c_inf_sq(P, rates: NoiseRates) -> float:
    # factored form of P(1-P) - lambda(P): exact zeros at P = 1/2 and P = Gamma1/Gamma2
    Gt = rates.Gamma_tilde
    if Gt <= 0:
        raise DomainError("Gamma_tilde", "lambda(P) needs Gamma_tilde > 0")
    return (2 * P - 1) * (rates.Gamma1 - rates.Gamma2 * P) / (2 * Gt)


def asymptotic_coherence(P, rates: NoiseRates) -> AsymptoticCoherence:
    """Long-time coherence modulus at constant population ``P``.

    When ``C_inf**2 < 0`` the population cannot be held; ``C_inf`` is then
    reported as 0 (the real part) and ``feasible`` is False.
    """
    csq = _c_inf_sq(P, rates)
    if csq >= 0:
        return AsymptoticCoherence(math.sqrt(csq), csq, True)
    return AsymptoticCoherence(0.0, csq, False)


class SteadyState(NamedTuple):
    P: float
    C0: float
    k: float
    C_inf_sq: float
    feasible: bool


def steady_state_coherence(P, rates: NoiseRates, feas_tol: float = FEAS_TOL) -> SteadyState:
    """Initial coherence that makes ``C(t)`` constant at population ``P``.

    Choosing ``C0 = C_inf`` sets ``k = lambda(P)``. The state is reported
    feasible only when a strictly positive coherence can be sustained; the
    ``C_inf = 0`` edge (``P = 1/2``, ``P = Gamma1/Gamma2``, pure dephasing)
    leaves the field undefined and is flagged infeasible.
    """
    lm = lam(P, rates)
    csq = _c_inf_sq(P, rates)
    feasible = csq > feas_tol and 0 <= lm <= 0.25
    return SteadyState(float(P), math.sqrt(max(csq, 0.0)), float(lm), float(csq), bool(feasible))


# --- solution object --------------------------------------------------------

@dataclass(frozen=True)
class CoherenceSolution:
    profile: PopulationProfile
    rates: NoiseRates
    C0: float
    k: float
    method: str
    min_Csq: float
    t_min: float
    feasible: bool
    feas_tol: float = FEAS_TOL

    def csq(self, t):
        if self.method == "unitary":
            return _out(np.asarray(self.profile.variance(t)) - self.k)
        if self.method == "closed_constant":
            return coherence_constant_population(self.profile.Pi, self.rates, self.k, t)
        return coherence_general(self.profile, self.rates, self.C0, t,
                                 method="quadrature" if self.method == "quadrature" else None)

    def c(self, t):
        return _out(np.sqrt(np.maximum(np.asarray(self.csq(t)), 0.0)))


def solve_coherence(profile: PopulationProfile, rates: NoiseRates, C0: float,
                    n_grid: int = 4001, feas_tol: float = FEAS_TOL,
                    method: str | None = None) -> CoherenceSolution:
    """Coherence solution for ``profile`` with its feasibility scan on ``n_grid`` times."""
    k = mixedness_constant(float(profile.value(0.0)), C0).k
    if method is None:
        if rates.is_unitary:
            method = "unitary"
        elif profile.is_constant:
            method = "closed_constant"
        elif profile.kind == "sine_squared":
            method = "closed_sine_squared"
        else:
            method = "quadrature"
    sol = CoherenceSolution(profile, rates, float(C0), k, method, 0.0, 0.0, True, feas_tol)
    grid = np.linspace(0.0, profile.t_f, n_grid)
    g = np.asarray(sol.csq(grid))
    i = int(np.argmin(g))
    return CoherenceSolution(profile, rates, float(C0), k, method, float(g[i]),
                             float(grid[i]), bool(g[i] >= -feas_tol), feas_tol)


def require_feasible(sol: CoherenceSolution):
    if not sol.feasible:
        raise InfeasiblePrescriptionError(
            f"C(t)**2 reaches {sol.min_Csq:.3g} < 0 at t = {sol.t_min:.6g}"
        )
    return sol
