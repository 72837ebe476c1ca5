"""Acceptance checks. Each test records one PASS/FAIL line in the terminal summary."""
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from helpers import TRACKING_FIGURES, scenario
from qubit_tracking import (PhaseProfile, PopulationProfile, QubitState, SystemParams,
                            asymptotic_coherence, classify_transition, accessibility_map,
                            coherence_constant_population, coherence_general, derive_rates,
                            integral_I1_sine_squared, integral_I2_sine_squared, propagate_lab,
                            propagate_rwa, solve_coherence, steady_state_coherence, synthesize,
                            tracking_errors)
from qubit_tracking.coherence import coherence_ode_rhs
from qubit_tracking.propagate import convergence_check
from qubit_tracking.reachability import Access

SELF_CONSISTENCY_TOL = 1e-6
TOL_P, TOL_PHI = 0.02, 0.1
CLOSED_FORM_REL = 1e-9
ODE_RESIDUAL = 1e-6
ROOT_TOL = 1e-14
STEADY_TOL = 1e-6
RELAX_REL = 1e-8
ORDER_RANGE = (3.7, 4.3)
PURITY_DRIFT = 1e-10
ENVELOPE_VARIATION = 0.01
FREQUENCY_REL = 0.01

ALL_SYNTH_FIGURES = ("2", "5", "6", "8")


# 1 -------------------------------------------------------------------------

@pytest.mark.parametrize("fig", ALL_SYNTH_FIGURES)
def test_c1_rwa_self_consistency(fig, verdict):
    s = scenario(fig)
    start = time.perf_counter()
    traj = propagate_rwa(s.params, s.rates, s.field, s.rho0, s.P.t_f)
    elapsed = time.perf_counter() - start
    err = tracking_errors(traj, s.P, s.Phi)
    worst = max(err.max_P_error, err.max_phase_error)
    ok = verdict(f"[1] RWA self-consistency fig {fig}",
                 worst <= SELF_CONSISTENCY_TOL and elapsed < 10,
                 f"P {err.max_P_error:.2e}, Phi {err.max_phase_error:.2e}, {elapsed:.2f}s")
    assert ok


# 2 -------------------------------------------------------------------------

@pytest.mark.parametrize("fig", TRACKING_FIGURES)
def test_c2_lab_frame_tracking(fig, verdict):
    s = scenario(fig)
    assert s.params.omega == 0.02 and s.params.mu == 6.0
    start = time.perf_counter()
    traj = propagate_lab(s.params, s.rates, s.field, s.rho0, s.P.t_f)
    elapsed = time.perf_counter() - start
    err = tracking_errors(traj, s.P, s.Phi)
    ok = verdict(f"[2] lab-frame tracking fig {fig}",
                 err.max_P_error <= TOL_P and err.max_phase_error <= TOL_PHI and elapsed < 30,
                 f"P {err.max_P_error:.4f} (<= {TOL_P}), Phi {err.max_phase_error:.4f} rad "
                 f"(<= {TOL_PHI}), {elapsed:.2f}s")
    assert ok


# 3 -------------------------------------------------------------------------

def _quad(f, t):
    return quad(f, 0.0, t, epsabs=0.0, epsrel=1e-13, limit=500)[0]


def test_c3_closed_forms_vs_quadrature(verdict):
    rng = np.random.default_rng(20240611)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        gamma, Gamma = 10 ** rng.uniform(-5, -2.3), 10 ** rng.uniform(-5, -2.5)
        rates = derive_rates(gamma, Gamma, rng.uniform(0, 1))
        Pi, Pf = rng.uniform(0, 1, 2)
        t_f = rng.uniform(500, 5000)
        t = rng.uniform(0.05, 1.0) * t_f
        b = 2 * rates.Gamma_tilde
        P = PopulationProfile.sine_squared(Pi, Pf, t_f)
        I1 = _quad(lambda s: P.value(s) * math.exp(b * s), t)
        I2 = _quad(lambda s: P.value(s) ** 2 * math.exp(b * s), t)
        r1 = abs(integral_I1_sine_squared(rates, Pi, Pf, t_f, t) - I1) / abs(I1)
        r2 = abs(integral_I2_sine_squared(rates, Pi, Pf, t_f, t) - I2) / abs(I2)
        worst = max(worst, r1, r2)
    elapsed = time.perf_counter() - start
    ok = verdict("[3a] I1/I2 closed form vs quadrature",
                 worst <= CLOSED_FORM_REL and elapsed < 5, f"max rel {worst:.2e}, {elapsed:.2f}s")
    assert ok


ODE_CASES = [
    ("sine 1->0.5001 dephasing", (0.9995, 0.5001, 3500.0), (5e-3, 0.0, 0.0), 0.02, None),
    ("sine 0.2->0.6 thermal", (0.2, 0.6, 1500.0), (1e-3, 1e-4, 0.3), 0.2, None),
    ("sine 0.9->0.4 thermal", (0.9, 0.4, 1500.0), (1e-3, 1e-3, 0.3), 0.02, None),
    ("sine 0.2->0.6 quadrature path", (0.2, 0.6, 1500.0), (1e-3, 1e-4, 0.3), 0.2, "quadrature"),
    ("constant 0.8", (0.8, 0.8, 5000.0), (1e-3, 1e-4, 0.3), 0.2, None),
]


@pytest.mark.parametrize("name,prof,noise,C0,method", ODE_CASES, ids=[c[0] for c in ODE_CASES])
def test_c3_ode_residual(name, prof, noise, C0, method, verdict):
    Pi, Pf, t_f = prof
    rates = derive_rates(*noise)
    P = PopulationProfile.sine_squared(Pi, Pf, t_f)
    h = t_f * 1e-6
    n = 100 if method == "quadrature" else 1000
    t = np.linspace(2 * h, t_f - 2 * h, n)
    start = time.perf_counter()
    if method == "quadrature":
        csq = lambda x: np.array([coherence_general(P, rates, C0, xi, method="quadrature")
                                  for xi in np.atleast_1d(x)])
    else:
        csq = lambda x: coherence_general(P, rates, C0, x)
    deriv = (csq(t + h) - csq(t - h)) / (2 * h)
    rhs = coherence_ode_rhs(P.value(t), P.derivative(t), rates, csq(t))
    resid = float(np.max(np.abs(deriv - rhs)))
    elapsed = time.perf_counter() - start
    ok = verdict(f"[3b] ODE residual {name}", resid <= ODE_RESIDUAL,
                 f"max {resid:.2e} at {n} times, {elapsed:.2f}s")
    assert ok


# 4 -------------------------------------------------------------------------

def test_c4_asymptotic_roots(verdict):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        rates = derive_rates(10 ** rng.uniform(-5, -2), 10 ** rng.uniform(-5, -2),
                             rng.uniform(0, 3))
        root = (rates.nbar + 1) / (2 * rates.nbar + 1)
        worst = max(worst, abs(asymptotic_coherence(0.5, rates).C_inf_sq),
                    abs(asymptotic_coherence(root, rates).C_inf_sq))
    ok = verdict("[4a] C_inf roots at 1/2 and (n+1)/(2n+1)", worst <= ROOT_TOL,
                 f"max |C_inf^2| {worst:.1e}")
    assert ok


@pytest.mark.parametrize("P_const,noise", [(0.6, (1e-3, 1e-3, 0.3)), (0.75, (1e-3, 1e-4, 0.0))])
def test_c4_steady_state(P_const, noise, verdict):
    rates = derive_rates(*noise)
    ss = steady_state_coherence(P_const, rates)
    assert ss.feasible
    t_f = 10 / rates.Gamma_tilde
    t = np.linspace(0, t_f, 2001)
    analytic = float(np.max(np.abs(np.sqrt(coherence_constant_population(P_const, rates, ss.k, t))
                                   - ss.C0)))
    start = time.perf_counter()
    P = PopulationProfile.constant(P_const, t_f)
    Phi = PhaseProfile.linear(2 * math.pi / t_f, t_f)
    sol = solve_coherence(P, rates, ss.C0)
    field = synthesize(P, Phi, sol, SystemParams(), rates)
    traj = propagate_rwa(SystemParams(), rates, field, QubitState.from_polar(P_const, ss.C0), t_f)
    numeric = float(np.max(np.abs(traj.C_num - ss.C0)))
    elapsed = time.perf_counter() - start
    ok = verdict(f"[4b] steady state P={P_const}",
                 analytic <= STEADY_TOL and numeric <= STEADY_TOL and elapsed < 10,
                 f"analytic {analytic:.1e}, RWA {numeric:.1e}, {elapsed:.2f}s")
    assert ok


# 5 -------------------------------------------------------------------------

def test_c5_reachability_facts(verdict):
    start = time.perf_counter()
    cls = {g: classify_transition(0.9, 0.4, derive_rates(g, 0.0, 0.0), 0.02, 1500.0)
           for g in (1e-4, 1e-3, 5e-3)}
    facts = [cls[1e-4] == Access.NOISE_ACCESSIBLE, cls[1e-3] == Access.NOISE_ACCESSIBLE,
             cls[5e-3] == Access.UNITARY_ONLY]
    contained = []
    for g in (1e-4, 1e-3, 5e-3):
        grid = accessibility_map(derive_rates(g, 0.0, 0.0), 0.02, 1500.0, n_grid=101, workers=4)
        contained.append(grid.dark_outside_light == 0)
    thermal = accessibility_map(derive_rates(1e-3, 1e-3, 0.3), 0.02, 1500.0, n_grid=101, workers=4)
    facts += contained + [thermal.dark_outside_light > 0]
    elapsed = time.perf_counter() - start
    ok = verdict("[5] reachability facts", all(facts) and elapsed < 60,
                 f"0.9->0.4: {[c.name for c in cls.values()]}, contained {contained}, "
                 f"thermal dark-outside-light {thermal.dark_outside_light}, {elapsed:.1f}s")
    assert ok


# 6 -------------------------------------------------------------------------

def test_c6_thermal_relaxation(verdict):
    rates = derive_rates(0.0, 1e-3, 0.0)
    traj = propagate_lab(SystemParams(), rates, None, QubitState(0.0), 3500.0)
    exact = 1 - np.exp(-2 * rates.Gamma * traj.times)
    rel = float(np.max(np.abs(traj.rho00[1:] - exact[1:]) / exact[1:]))
    ok = verdict("[6a] field-free thermal relaxation", rel <= RELAX_REL, f"max rel {rel:.1e}")
    assert ok


def test_c6_convergence_order(verdict):
    s = scenario("8")

    def run(dt):
        tr = propagate_lab(s.params, s.rates, s.field, s.rho0, s.P.t_f, dt=dt)
        return [tr.rho00[-1], tr.c[-1].real, tr.c[-1].imag]

    res = convergence_check(run, (2 * math.pi / s.params.omega) / 40, levels=5)
    lo, hi = ORDER_RANGE
    ok = verdict("[6b] RK4 observed order", res.reliable and lo <= res.order <= hi,
                 f"order {res.order:.3f} (levels {', '.join(f'{o:.2f}' for o in res.orders)})")
    assert ok


def test_c6_unitary_purity(verdict):
    s = scenario("5")
    traj = propagate_lab(s.params, s.rates, s.field, s.rho0, 3500.0)
    drift = float(np.max(np.abs(traj.purity - traj.purity[0])))
    ok = verdict("[6c] unitary purity drift (default dt)", drift <= PURITY_DRIFT,
                 f"{drift:.1e} at dt={traj.dt:g}")
    assert ok


# 7 -------------------------------------------------------------------------

def test_c7_constant_amplitude_and_frequency(verdict):
    s = scenario("2")
    t0 = 5 / (2 * s.rates.Gamma_tilde)
    t = np.linspace(t0, s.P.t_f, 400_001)
    A = np.abs(s.field.envelope(t))
    variation = float((A.max() - A.min()) / A.mean())
    E = s.field.field(t)
    idx = np.flatnonzero(np.signbit(E[:-1]) != np.signbit(E[1:]))
    tz = t[idx] - E[idx] * (t[idx + 1] - t[idx]) / (E[idx + 1] - E[idx])
    freq = math.pi * (len(tz) - 1) / (tz[-1] - tz[0])
    target = s.params.omega + s.Phi.alpha
    rel = abs(freq - target) / target
    ok = verdict("[7] constant amplitude, frequency omega+alpha",
                 variation < ENVELOPE_VARIATION and rel < FREQUENCY_REL,
                 f"envelope variation {variation:.2e}, freq {freq:.6f} vs {target:.6f} ({rel:.1e})")
    assert ok
