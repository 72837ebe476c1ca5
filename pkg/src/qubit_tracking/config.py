"""Declarative experiment configuration (JSON, validated before any computation)."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import DomainError, ProfileError
from .model import NoiseRates, QubitState, SystemParams, derive_rates
from .profiles import WHOLE_INTERVAL, PhaseProfile, PopulationProfile, crossing_times

MATCH_TOL = 1e-6


class ConfigError(ValueError):
    """Raised for unreadable, malformed or inconsistent configuration."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


class SystemSection(_Strict):
    omega: float
    mu: float
    omega_p: Optional[float] = None


class NoiseSection(_Strict):
    gamma: float
    Gamma: float
    nbar: float


class InitialSection(_Strict):
    C0: float
    P0: Optional[float] = None
    Phi0: Optional[float] = None


class PopulationSection(_Strict):
    kind: Literal["constant", "sine_squared"]
    P: Optional[float] = None
    Pi: Optional[float] = None
    Pf: Optional[float] = None


class PhaseSection(_Strict):
    kind: Literal["linear", "quadratic", "tanh"]
    alpha: Optional[float] = None
    Phi_i: float = 0.0
    Phi_f: Optional[float] = None
    beta: Optional[float] = None
    t_vertex: Optional[float] = None
    Phi_vertex: Optional[float] = None
    t_center: Optional[float] = None


class NumericsSection(_Strict):
    dt: Optional[float] = None
    n_samples: int = 20_001
    n_grid: int = 201
    n_t: int = 400
    n_points: int = 201
    n_coherence: int = 4001
    phase_tol: float = 1e-4
    feas_tol: float = 1e-12
    tol_P: float = 0.02
    tol_Phi: float = 0.1
    force: bool = False
    frame: Literal["lab", "rwa"] = "lab"
    trajectory_stride: int = 10


class OutputsSection(_Strict):
    directory: str = "out"
    formats: List[Literal["csv", "pgm", "png", "json"]] = ["csv", "pgm", "png", "json"]


class ExperimentConfig(_Strict):
    system: SystemSection
    noise: NoiseSection
    initial: InitialSection
    t_f: float
    population: Optional[PopulationSection] = None
    phase: Optional[PhaseSection] = None
    numerics: NumericsSection = NumericsSection()
    outputs: OutputsSection = OutputsSection()
    sweep: List[NoiseSection] = []
    label: str = ""
    description: str = ""

    # --- builders -----------------------------------------------------------

    def params(self) -> SystemParams:
        return _wrap(lambda: SystemParams(self.system.omega, self.system.mu, self.system.omega_p))

    def rates(self, noise: NoiseSection | None = None) -> NoiseRates:
        n = noise or self.noise
        return _wrap(lambda: derive_rates(n.gamma, n.Gamma, n.nbar))

    def sweep_rates(self) -> list:
        return [self.rates(n) for n in (self.sweep or [self.noise])]

    def population_profile(self) -> PopulationProfile:
        p = _require(self.population, "population")
        if p.kind == "constant":
            value = _require(p.P, "population.P")
            return _wrap(lambda: PopulationProfile.constant(value, self.t_f))
        Pi = _require(p.Pi, "population.Pi")
        Pf = _require(p.Pf, "population.Pf")
        return _wrap(lambda: PopulationProfile.sine_squared(Pi, Pf, self.t_f))

    def _first_crossing(self, P: PopulationProfile, key: str) -> float:
        ts = crossing_times(P)
        if ts is WHOLE_INTERVAL or not ts:
            raise ConfigError(f"{key}: no unique population crossing, give it explicitly")
        return float(ts[0])

    def phase_profile(self, P: PopulationProfile | None = None) -> PhaseProfile:
        ph = _require(self.phase, "phase")
        if ph.kind == "linear":
            alpha = ph.alpha
            if alpha is None:
                alpha = (_require(ph.Phi_f, "phase.alpha or phase.Phi_f") - ph.Phi_i) / self.t_f
                if ph.Phi_i != 0.0:
                    raise ConfigError("phase.Phi_i: the linear profile starts at 0")
            return _wrap(lambda: PhaseProfile.linear(alpha, self.t_f))
        P = P or self.population_profile()
        if ph.kind == "quadratic":
            tv = ph.t_vertex if ph.t_vertex is not None else self._first_crossing(P, "phase.t_vertex")
            Phi_f = ph.Phi_f if ph.Phi_f is not None else ph.Phi_i
            return _wrap(lambda: PhaseProfile.quadratic(ph.Phi_i, Phi_f, tv, self.t_f, ph.Phi_vertex))
        tc = ph.t_center if ph.t_center is not None else self._first_crossing(P, "phase.t_center")
        Phi_f = _require(ph.Phi_f, "phase.Phi_f")
        beta = _require(ph.beta, "phase.beta")
        return _wrap(lambda: PhaseProfile.tanh(ph.Phi_i, Phi_f, beta, tc, self.t_f))

    def initial_state(self, P: PopulationProfile, Phi: PhaseProfile | None) -> QubitState:
        P0 = float(P.value(0.0))
        Phi0 = float(Phi.value(0.0)) if Phi is not None else (self.initial.Phi0 or 0.0)
        if self.initial.P0 is not None and abs(self.initial.P0 - P0) > MATCH_TOL:
            raise ConfigError(f"initial.P0 = {self.initial.P0} disagrees with P(0) = {P0}")
        if (Phi is not None and self.initial.Phi0 is not None
                and abs(self.initial.Phi0 - Phi0) > MATCH_TOL):
            raise ConfigError(f"initial.Phi0 = {self.initial.Phi0} disagrees with Phi(0) = {Phi0}")
        return _wrap(lambda: QubitState.from_polar(P0, self.initial.C0, Phi0))


def _require(value, key):
    if value is None:
        raise ConfigError(f"{key} is required")
    return value


def _wrap(fn):
    try:
        return fn()
    except (DomainError, ProfileError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    try:
        cfg = ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc
    if not cfg.t_f > 0:
        raise ConfigError("t_f must be > 0")
    return cfg


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"])
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


# --- bundled figure configs ---------------------------------------------------

def _config_dir():
    return resources.files("qubit_tracking") / "configs"


def bundled_figures() -> list:
    return sorted(p.name[3:-5] for p in _config_dir().iterdir()
                  if p.name.startswith("fig") and p.name.endswith(".json"))


def figure_configs(figure: str) -> list:
    """``[(name, config)]`` for ``"3b"`` (one panel) or ``"3"`` (every panel)."""
    figure = str(figure).lower()
    names = bundled_figures()
    chosen = [n for n in names if n == figure]
    if not chosen:
        chosen = [n for n in names if n.rstrip("abcdefghi") == figure]
    if not chosen:
        raise ConfigError(f"no bundled config for figure {figure!r} (have: {', '.join(names)})")
    return [(f"fig{n}", parse_config((_config_dir() / f"fig{n}.json").read_text())) for n in chosen]
