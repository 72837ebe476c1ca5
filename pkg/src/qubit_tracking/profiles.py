"""Prescribed population and coherence-phase trajectories.

Population profiles evaluate ``P(t)`` and ``dP/dt``; phase profiles evaluate
``Phi(t)``, ``dPhi/dt`` and ``d2Phi/dt2``. All evaluators accept scalars or
numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ProfileError
from .model import MixednessConstant, NoiseRates

DEFAULT_PHASE_TOL = 1e-4
BISECTION_GRID = 10_000


class _WholeInterval:
    """Marker: the population sits at 1/2 for every t."""

    def __repr__(self):
        return "WHOLE_INTERVAL"


WHOLE_INTERVAL = _WholeInterval()


def _check_time(t, t_f):
    t = np.asarray(t, dtype=float)
    # one ulp of slack so grids built with linspace stay in range
    slack = 4 * np.finfo(float).eps * t_f
    if np.any(t < -slack) or np.any(t > t_f + slack):
        raise DomainError("t", f"outside [0, {t_f}]")
    return np.clip(t, 0.0, t_f)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class PopulationProfile:
    kind: str
    t_f: float
    Pi: float
    Pf: float

    def __post_init__(self):
        if self.kind not in ("constant", "sine_squared"):
            raise ProfileError(f"unknown population kind {self.kind!r}")
        if not self.t_f > 0:
            raise DomainError("t_f", f"must be > 0, got {self.t_f!r}")
        for name in ("Pi", "Pf"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise DomainError(name, f"must lie in [0, 1], got {v!r}")
        if self.kind == "constant" and self.Pi != self.Pf:
            raise ProfileError("constant profile needs Pi == Pf")

    @classmethod
    def constant(cls, P, t_f):
        return cls("constant", float(t_f), float(P), float(P))

    @classmethod
    def sine_squared(cls, Pi, Pf, t_f):
        return cls("sine_squared", float(t_f), float(Pi), float(Pf))

    @property
    def is_constant(self):
        return self.kind == "constant" or self.Pi == self.Pf

    def _parts(self, t):
        """``(band, cos x, sin(x/2)**2)`` with ``x = pi t / t_f``.

        Near the ends the sin**2 form keeps relative precision; around t_f/2 the
        cosine form makes P(t_f/2) the exact midpoint.
        """
        x = np.pi * t / self.t_f
        return np.abs(x - np.pi / 2) < 0.5, np.cos(x), np.sin(0.5 * x) ** 2

    def value(self, t):
        t = _check_time(t, self.t_f)
        if self.is_constant:
            return _out(np.full_like(t, self.Pi))
        band, cx, s2 = self._parts(t)
        d = self.Pf - self.Pi
        mid = 0.5 * (self.Pi + self.Pf)
        return _out(np.where(band, mid - 0.5 * d * cx, d * s2 + self.Pi))

    def complement(self, t):
        """``1 - P(t)`` without cancellation when P is close to 1."""
        t = _check_time(t, self.t_f)
        if self.is_constant:
            return _out(np.full_like(t, 1.0 - self.Pi))
        band, cx, s2 = self._parts(t)
        d = self.Pf - self.Pi
        mid = 0.5 * (self.Pi + self.Pf)
        return _out(np.where(band, (1.0 - mid) + 0.5 * d * cx, (1.0 - self.Pi) - d * s2))

    def derivative(self, t):
        t = _check_time(t, self.t_f)
        if self.is_constant:
            return _out(np.zeros_like(t))
        w = np.pi / (2 * self.t_f)
        return _out((self.Pf - self.Pi) * w * np.sin(np.pi * t / self.t_f))

    def variance(self, t):
        """``P - P**2`` evaluated as ``P * (1 - P)``."""
        return _out(np.asarray(self.value(t)) * np.asarray(self.complement(t)))


def eval_population(profile: PopulationProfile, t):
    """Return ``(P, Pdot)`` at ``t``."""
    return profile.value(t), profile.derivative(t)


def crossing_times(profile: PopulationProfile, tol: float = 1e-12):
    """Times in ``[0, t_f]`` where ``P(t) = 1/2``.

    Returns ``WHOLE_INTERVAL`` for a profile pinned at 1/2.
    """
    if not tol > 0:
        raise DomainError("tol", "must be > 0")
    if profile.is_constant:
        return WHOLE_INTERVAL if abs(profile.Pi - 0.5) <= tol else []
    if profile.kind == "sine_squared":
        s = (0.5 - profile.Pi) / (profile.Pf - profile.Pi)
        if -tol <= s <= 1 + tol:
            s = min(max(s, 0.0), 1.0)
            return [2 * profile.t_f / np.pi * math.asin(math.sqrt(s))]
        return []
    return bisect_crossings(profile.value, profile.t_f)


def bisect_crossings(P, t_f, n=BISECTION_GRID, xtol=1e-12):
    """Sign changes of ``P(t) - 1/2`` on an ``n``-point grid, refined by bisection."""
    t = np.linspace(0.0, t_f, n)
    g = np.asarray(P(t)) - 0.5
    roots = [float(t[i]) for i in np.flatnonzero(g == 0)]
    for i in np.flatnonzero(g[:-1] * g[1:] < 0):
        a, b = t[i], t[i + 1]
        ga = g[i]
        while b - a > xtol * t_f:
            m = 0.5 * (a + b)
            gm = float(P(m)) - 0.5
            if gm == 0:
                a = b = m
                break
            if (gm < 0) == (ga < 0):
                a, ga = m, gm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return sorted(roots)


@dataclass(frozen=True)
class PhaseProfile:
    """Coherence-phase prescription.

    ``linear``: ``Phi = alpha t``.
    ``quadratic``: ``Phi = Phi_i + c2 (t**2 - 2 t_vertex t)``, so the slope
    vanishes at ``t_vertex``; ``c2`` follows from ``Phi_f`` or, when the
    vertex sits at ``t_f/2``, from ``Phi_vertex``.
    ``tanh``: ``(Phi_f - Phi_i)/2 tanh(beta t + chi) + (Phi_f + Phi_i)/2`` with
    ``chi = atanh(sigma) - beta t_center`` and
    ``sigma = (1 - Phi_f - Phi_i)/(Phi_f - Phi_i)``.
    """

    kind: str
    t_f: float
    alpha: float = 0.0
    Phi_i: float = 0.0
    Phi_f: float = 0.0
    c2: float = 0.0
    t_vertex: float = 0.0
    beta: float = 0.0
    t_center: float = 0.0
    chi: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic", "tanh"):
            raise ProfileError(f"unknown phase kind {self.kind!r}")
        if not self.t_f > 0:
            raise DomainError("t_f", f"must be > 0, got {self.t_f!r}")

    @classmethod
    def linear(cls, alpha, t_f):
        return cls("linear", float(t_f), alpha=float(alpha))

    @classmethod
    def quadratic(cls, Phi_i, Phi_f, t_vertex, t_f, Phi_vertex=None):
        t_f = float(t_f)
        denom = t_f * (t_f - 2 * t_vertex)
        if abs(t_f - 2 * t_vertex) <= 1e-12 * t_f:
            if Phi_vertex is None:
                raise ProfileError(
                    "vertex at t_f/2 leaves the curvature free; give Phi_vertex"
                )
            if abs(Phi_f - Phi_i) > 1e-12 * max(1.0, abs(Phi_i)):
                raise ProfileError("vertex at t_f/2 requires Phi_i == Phi_f")
            c2 = (Phi_i - Phi_vertex) / t_vertex**2
        else:
            c2 = (Phi_f - Phi_i) / denom
            if Phi_vertex is not None:
                expected = Phi_i - c2 * t_vertex**2
                if abs(expected - Phi_vertex) > 1e-9 * max(1.0, abs(expected)):
                    raise ProfileError(
                        f"Phi_vertex over-determines the parabola (implied {expected:.12g})"
                    )
        return cls("quadratic", t_f, Phi_i=float(Phi_i), Phi_f=float(Phi_f),
                   c2=float(c2), t_vertex=float(t_vertex))

    @classmethod
    def tanh(cls, Phi_i, Phi_f, beta, t_center, t_f):
        if Phi_f == Phi_i:
            raise ProfileError("tanh profile needs Phi_f != Phi_i")
        sigma = (1 - Phi_f - Phi_i) / (Phi_f - Phi_i)
        if not abs(sigma) < 1:
            raise ProfileError(f"tanh offset undefined: |sigma| = {abs(sigma):.6g} >= 1")
        chi = 0.5 * math.log((1 + sigma) / (1 - sigma)) - beta * t_center
        return cls("tanh", float(t_f), Phi_i=float(Phi_i), Phi_f=float(Phi_f),
                   beta=float(beta), t_center=float(t_center), chi=chi)

    @property
    def sigma(self):
        return (1 - self.Phi_f - self.Phi_i) / (self.Phi_f - self.Phi_i)

    def value(self, t):
        t = _check_time(t, self.t_f)
        if self.kind == "linear":
            out = self.alpha * t
        elif self.kind == "quadratic":
            out = self.Phi_i + self.c2 * t * (t - 2 * self.t_vertex)
        else:
            half = 0.5 * (self.Phi_f - self.Phi_i)
            out = half * np.tanh(self.beta * t + self.chi) + 0.5 * (self.Phi_f + self.Phi_i)
        return _out(out)

    def derivative(self, t):
        t = _check_time(t, self.t_f)
        if self.kind == "linear":
            out = np.full_like(t, self.alpha)
        elif self.kind == "quadratic":
            out = 2 * self.c2 * (t - self.t_vertex)
        else:
            half = 0.5 * (self.Phi_f - self.Phi_i)
            out = half * self.beta / np.cosh(self.beta * t + self.chi) ** 2
        return _out(out)

    def second_derivative(self, t):
        t = _check_time(t, self.t_f)
        if self.kind == "linear":
            out = np.zeros_like(t)
        elif self.kind == "quadratic":
            out = np.full_like(t, 2 * self.c2)
        else:
            half = 0.5 * (self.Phi_f - self.Phi_i)
            x = self.beta * t + self.chi
            out = -2 * half * self.beta**2 * np.tanh(x) / np.cosh(x) ** 2
        return _out(out)


def eval_phase(profile: PhaseProfile, t):
    """Return ``(Phi, Phidot)`` at ``t``."""
    return profile.value(t), profile.derivative(t)


@dataclass
class PrescriptionReport:
    crossing_times: object  # list of times, or WHOLE_INTERVAL
    phase_constraint_ok: list
    unitary_band_ok: bool
    band: tuple
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def unitary_band(k: float):
    """Populations reachable under unitary evolution for mixedness ``k``."""
    r = math.sqrt(max(0.25 - k, 0.0))
    return 0.5 - r, 0.5 + r


def validate_prescription(P: PopulationProfile, Phi: PhaseProfile, k: MixednessConstant,
                          rates: NoiseRates, phase_tol: float = DEFAULT_PHASE_TOL,
                          n_grid: int = 4001) -> PrescriptionReport:
    """Check the phase-slope condition at population crossings and the unitary band.

    The band is only enforced (reported as a violation) for zero noise; with
    noise the coherence module decides feasibility.
    """
    if abs(P.t_f - Phi.t_f) > 1e-12 * P.t_f:
        raise ProfileError("population and phase profiles must share t_f")
    violations = []
    crossings = crossing_times(P)
    phase_ok = []
    if crossings is WHOLE_INTERVAL:
        grid = np.linspace(0.0, P.t_f, n_grid)
        bad = np.abs(Phi.derivative(grid)) > phase_tol
        phase_ok.append(not bad.any())
        if bad.any():
            t_bad = float(grid[np.argmax(bad)])
            violations.append((t_bad, "P = 1/2 throughout but |dPhi/dt| exceeds phase_tol"))
    else:
        for ts in crossings:
            slope = float(Phi.derivative(ts))
            ok = abs(slope) <= phase_tol
            phase_ok.append(ok)
            if not ok:
                violations.append(
                    (ts, f"P(t*) = 1/2 but |dPhi/dt| = {abs(slope):.3g} > {phase_tol:g}")
                )
    lo, hi = unitary_band(k.k)
    grid = np.linspace(0.0, P.t_f, n_grid)
    # P - P**2 >= k is the band condition without the square root
    deficit = np.asarray(P.variance(grid)) - k.k
    band_ok = bool(np.all(deficit >= -1e-12))
    if rates.is_unitary and not band_ok:
        t_bad = float(grid[np.argmin(deficit)])
        violations.append((t_bad, f"P leaves the unitary band [{lo:.6g}, {hi:.6g}]"))
    return PrescriptionReport(crossings if crossings is WHOLE_INTERVAL else list(crossings), phase_ok, band_ok, (lo, hi), violations)
