"""Physical parameters, noise rates and two-level states.

All quantities are in atomic units (hbar = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleStateError

DEFAULT_OMEGA = 0.02
DEFAULT_MU = 6.0
ROUNDING_SLACK = 1e-14


@dataclass(frozen=True)
class SystemParams:
    omega: float = DEFAULT_OMEGA
    mu: float = DEFAULT_MU
    omega_p: float | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega", f"must be > 0, got {self.omega!r}")
        if self.mu == 0 or not math.isfinite(self.mu):
            raise DomainError("mu", f"must be finite and non-zero, got {self.mu!r}")
        if self.omega_p is None:
            object.__setattr__(self, "omega_p", self.omega)
        elif not self.omega_p > 0:
            raise DomainError("omega_p", f"must be > 0, got {self.omega_p!r}")


@dataclass(frozen=True)
class NoiseRates:
    """Raw noise rates plus every decay constant derived from them.

    Build with :func:`derive_rates`; the derived fields are never set by hand.
    """

    gamma: float
    Gamma: float
    nbar: float
    Gamma_tilde: float
    Gamma1: float
    Gamma2: float
    gamma_tilde: float
    Gamma_tilde1: float
    Gamma_tilde2: float

    @property
    def is_unitary(self) -> bool:
        return self.gamma == 0 and self.Gamma == 0

    def scaled(self, s: float) -> "NoiseRates":
        return derive_rates(self.gamma * s, self.Gamma * s, self.nbar)


def derive_rates(gamma: float, Gamma: float, nbar: float) -> NoiseRates:
    """Derived decay constants for dephasing rate ``gamma`` and thermal rate ``Gamma``.

    Thermal relaxation drives the ground population towards
    ``Gamma1 / Gamma2 = (nbar + 1) / (2 nbar + 1)``.
    """
    for name, value in (("gamma", gamma), ("Gamma", Gamma), ("nbar", nbar)):
        if not (value >= 0 and math.isfinite(value)):
            raise DomainError(name, f"must be finite and >= 0, got {value!r}")
    Gamma_tilde = gamma + Gamma * (2 * nbar + 1)
    Gamma1 = 2 * Gamma * (nbar + 1)
    Gamma2 = 2 * Gamma * (2 * nbar + 1)
    gamma_tilde = Gamma1 / (2 * Gamma_tilde) if Gamma_tilde > 0 else 0.0
    return NoiseRates(
        gamma=float(gamma),
        Gamma=float(Gamma),
        nbar=float(nbar),
        Gamma_tilde=Gamma_tilde,
        Gamma1=Gamma1,
        Gamma2=Gamma2,
        gamma_tilde=gamma_tilde,
        Gamma_tilde1=2 * Gamma1 + Gamma2 - 2 * Gamma_tilde,
        Gamma_tilde2=2 * (Gamma_tilde - Gamma2),
    )


ZERO_NOISE = derive_rates(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class QubitState:
    """Ground population and coherence of a 2x2 density matrix."""

    rho00: float
    rho01_re: float = 0.0
    rho01_im: float = 0.0

    @classmethod
    def from_polar(cls, P, C, phi=0.0) -> "QubitState":
        return cls(float(P), float(C * math.cos(phi)), float(C * math.sin(phi)))

    @property
    def rho01(self) -> complex:
        return complex(self.rho01_re, self.rho01_im)

    @property
    def coherence(self) -> float:
        return math.hypot(self.rho01_re, self.rho01_im)

    @property
    def purity(self) -> float:
        p = self.rho00
        return p * p + (1 - p) ** 2 + 2 * (self.rho01_re**2 + self.rho01_im**2)

    def violation(self) -> float:
        """Largest amount by which the state breaks positivity (0 when valid)."""
        p = self.rho00
        c2 = self.rho01_re**2 + self.rho01_im**2
        return max(0.0, -p, p - 1, c2 - p * (1 - p))

    def is_valid(self, tol: float = 0.0) -> bool:
        return self.violation() <= tol


@dataclass(frozen=True)
class MixednessConstant:
    k: float

    @property
    def purity(self) -> float:
        return 1 - 2 * self.k


def mixedness_constant(P0: float, C0: float) -> MixednessConstant:
    """``k = P0 - P0**2 - C0**2``; raises when the pair is not a density matrix."""
    if not 0 <= P0 <= 1:
        raise DomainError("P0", f"must lie in [0, 1], got {P0!r}")
    if C0 < 0:
        raise DomainError("C0", f"must be >= 0, got {C0!r}")
    k = P0 * (1 - P0) - C0 * C0
    if -ROUNDING_SLACK <= k < 0:
        k = 0.0  # pure state written with rounded components
    if k < 0:
        raise InfeasibleStateError(
            f"C0**2 = {C0 * C0:.6g} exceeds P0 - P0**2 = {P0 * (1 - P0):.6g} (purity > 1)"
        )
    return MixednessConstant(k)
