"""Scenario builders shared by the test modules."""
from __future__ import annotations

from dataclasses import dataclass

from qubit_tracking.coherence import solve_coherence
from qubit_tracking.config import figure_configs
from qubit_tracking.synthesis import synthesize


@dataclass
class Scenario:
    name: str
    cfg: object
    P: object
    Phi: object
    rho0: object
    rates: object
    params: object
    sol: object
    field: object


def scenario(figure: str, **synth_kw) -> Scenario:
    (name, cfg), = figure_configs(figure)
    P = cfg.population_profile()
    Phi = cfg.phase_profile(P)
    rho0 = cfg.initial_state(P, Phi)
    rates, params = cfg.rates(), cfg.params()
    sol = solve_coherence(P, rates, cfg.initial.C0)
    field = synthesize(P, Phi, sol, params, rates, **synth_kw)
    return Scenario(name, cfg, P, Phi, rho0, rates, params, sol, field)


TRACKING_FIGURES = ("2", "5", "6", "8")
