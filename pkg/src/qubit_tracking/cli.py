"""Command-line entry point: ``qubit-tracking <command> [--config PATH | --figure ID]``.

Exit codes: 0 success, 2 infeasible/invalid prescription (or no steady state),
3 configuration error, 4 tracking tolerance breached.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import solve_coherence
from .config import ConfigError, ExperimentConfig, figure_configs, load_config
from .errors import (InfeasiblePrescriptionError, InfeasibleStateError, IntegrationError,
                     PrescriptionError, SingularityError)
from .export import write_csv, write_manifest, write_map_csv, write_pgm
from .profiles import WHOLE_INTERVAL, crossing_times
from .propagate import (TRAJECTORY_COLUMNS, propagate_lab, propagate_rwa, tracking_errors,
                        trajectory_rows)
from .reachability import Access, accessibility_map, asymptotic_curve, steady_table
from .synthesis import WAVEFORM_COLUMNS, sample_waveform, synthesize

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG, EXIT_TOLERANCE = 0, 2, 3, 4
STEADY_COLUMNS = ("P", "C_inf", "C_inf_sq", "C0_required", "k", "feasible")
INFEASIBLE = (InfeasiblePrescriptionError, InfeasibleStateError, PrescriptionError,
              SingularityError)


class Run:
    """Output bookkeeping for one config."""

    def __init__(self, cfg: ExperimentConfig, out: Path, command: str, args):
        self.cfg, self.out, self.command = cfg, out, command
        self.formats = set(cfg.outputs.formats)
        self.files = []
        self.summary = {}
        self.args = args

    def path(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        self.files.append(p.name)
        return p

    def csv(self, name, header, rows):
        if "csv" in self.formats:
            write_csv(self.path(name), header, rows)

    def png(self, name, fn, *a, **kw):
        if "png" in self.formats:
            from . import plotting
            getattr(plotting, fn)(*a, path=self.path(name), **kw)

    def manifest(self, status):
        if "json" not in self.formats:
            return
        write_manifest(self.out / "manifest.json", {
            "command": self.command,
            "version": __version__,
            "exit_code": status,
            "config": self.cfg.model_dump(),
            "flags": {"printed_order": bool(getattr(self.args, "printed_order", False))},
            "outputs": sorted(self.files),
            "summary": self.summary,
        })


def _say(msg):
    print(msg, flush=True)


def _prescription(cfg: ExperimentConfig):
    P = cfg.population_profile()
    Phi = cfg.phase_profile(P)
    rho0 = cfg.initial_state(P, Phi)
    return P, Phi, rho0


def _synth(run: Run):
    cfg = run.cfg
    P, Phi, rho0 = _prescription(cfg)
    rates, params = cfg.rates(), cfg.params()
    sol = solve_coherence(P, rates, cfg.initial.C0, n_grid=cfg.numerics.n_coherence,
                          feas_tol=cfg.numerics.feas_tol)
    field = synthesize(P, Phi, sol, params, rates, force=cfg.numerics.force,
                       phase_tol=cfg.numerics.phase_tol,
                       printed_order=bool(getattr(run.args, "printed_order", False)),
                       n_samples=cfg.numerics.n_samples)
    return P, Phi, rho0, rates, params, sol, field


def _crossings_text(P):
    ts = crossing_times(P)
    if ts is WHOLE_INTERVAL:
        return "whole interval (P = 1/2)"
    return ", ".join(f"{t:.10g}" for t in ts) or "none"


def cmd_synth(run: Run) -> int:
    P, Phi, rho0, rates, params, sol, field = _synth(run)
    rows = sample_waveform(field, run.cfg.numerics.n_samples)
    run.csv("waveform.csv", WAVEFORM_COLUMNS, rows)
    run.png("waveform.png", "waveform_figure", rows)
    peak = float(np.max(np.abs(rows[:, 2])))
    run.summary.update(feasible=True, min_Csq=sol.min_Csq, envelope_peak=peak,
                       crossing_times=_crossings_text(P), warnings=list(field.warnings))
    _say("feasible: yes (min C^2 = %.6g at t = %.6g)" % (sol.min_Csq, sol.t_min))
    _say(f"envelope peak |A|: {peak:.10g}")
    _say(f"crossing times: {_crossings_text(P)}")
    for w in field.warnings:
        _say(f"warning: {w}")
    return EXIT_OK


def _propagate(run: Run, params, rates, field, rho0, t_f, frame):
    dt = run.cfg.numerics.dt
    if frame == "lab":
        return propagate_lab(params, rates, field, rho0, t_f, dt)
    return propagate_rwa(params, rates, field, rho0, t_f, dt)


def cmd_track(run: Run) -> int:
    P, Phi, rho0, rates, params, sol, field = _synth(run)
    frame = run.args.frame or run.cfg.numerics.frame
    traj = _propagate(run, params, rates, field, rho0, P.t_f, frame)
    err = tracking_errors(traj, P, Phi, sol)
    num = run.cfg.numerics
    ok = err.max_P_error <= num.tol_P and err.max_phase_error <= num.tol_Phi
    run.csv("trajectory.csv", TRAJECTORY_COLUMNS, trajectory_rows(traj.thinned(num.trajectory_stride)))
    run.png("tracking.png", "tracking_figure", traj.thinned(num.trajectory_stride), P, Phi, sol, field)
    run.summary.update(frame=frame, dt=traj.dt, tol_P=num.tol_P, tol_Phi=num.tol_Phi,
                       passed=bool(ok), **err._asdict())
    _say(f"frame: {frame}, dt = {traj.dt:.6g}")
    _say(f"max |P_num - P|      = {err.max_P_error:.6g} (tol {num.tol_P:g})")
    _say(f"max |Phi_num - Phi|  = {err.max_phase_error:.6g} rad (tol {num.tol_Phi:g}, "
         f"{err.n_phase_samples} phase-defined samples)")
    _say(f"max |C_num - C|      = {err.max_C_error:.6g}")
    _say(f"final P error {err.final_P_error:.6g}, final phase error {err.final_phase_error:.6g}")
    _say("tracking: PASS" if ok else "tracking: FAIL (tolerance breached)")
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_propagate(run: Run) -> int:
    cfg = run.cfg
    params, rates = cfg.params(), cfg.rates()
    frame = run.args.frame or cfg.numerics.frame
    if run.args.zero_field or cfg.phase is None:
        field = None
        P0 = cfg.initial.P0
        if P0 is None:
            P0 = float(cfg.population_profile().value(0.0)) if cfg.population else 0.0
        from .model import QubitState
        rho0 = QubitState.from_polar(P0, cfg.initial.C0, cfg.initial.Phi0 or 0.0)
    else:
        _, _, rho0, rates, params, _, field = _synth(run)
    traj = _propagate(run, params, rates, field, rho0, cfg.t_f, frame)
    run.csv("trajectory.csv", TRAJECTORY_COLUMNS,
            trajectory_rows(traj.thinned(cfg.numerics.trajectory_stride)))
    run.summary.update(frame=frame, dt=traj.dt, zero_field=field is None,
                       final_P=float(traj.rho00[-1]), final_C=float(traj.C_num[-1]))
    _say(f"propagated {len(traj.times) - 1} steps (dt = {traj.dt:.6g}, frame {frame})")
    _say(f"final P = {traj.rho00[-1]:.10g}, |rho01| = {traj.C_num[-1]:.10g}")
    return EXIT_OK


def cmd_reach(run: Run) -> int:
    cfg = run.cfg
    grid = accessibility_map(cfg.rates(), cfg.initial.C0, cfg.t_f, n_grid=cfg.numerics.n_grid,
                             n_t=cfg.numerics.n_t, workers=run.args.workers)
    if "csv" in run.formats:
        write_map_csv(run.path("map.csv"), grid)
    if "pgm" in run.formats:
        write_pgm(run.path("map.pgm"), grid)
    run.png("map.png", "map_figure", grid, title=cfg.label or None)
    counts = {c.name.lower(): grid.count(c) for c in Access}
    run.summary.update(counts=counts, dark_outside_light=grid.dark_outside_light, **grid.metadata)
    _say(f"{cfg.numerics.n_grid}x{cfg.numerics.n_grid} map: " +
         ", ".join(f"{k}={v}" for k, v in counts.items()))
    _say(f"noise-accessible cells outside the unitary region: {grid.dark_outside_light}")
    return EXIT_OK


def cmd_steady(run: Run) -> int:
    cfg = run.cfg
    rates_list = cfg.sweep_rates()
    if any(r.Gamma_tilde == 0 for r in rates_list):
        _say("error: no nontrivial steady coherence without noise (Gamma_tilde = 0)")
        return EXIT_INFEASIBLE
    curves = []
    for i, rates in enumerate(rates_list):
        suffix = "" if len(rates_list) == 1 else f"_{i:02d}"
        run.csv(f"steady{suffix}.csv", STEADY_COLUMNS, steady_table(rates, cfg.numerics.n_points))
        label = rf"$\Gamma$={rates.Gamma:g}, $\bar n$={rates.nbar:g}"
        curves.append((label, asymptotic_curve(rates, cfg.numerics.n_points)))
        roots = sorted({0.5, (rates.nbar + 1) / (2 * rates.nbar + 1)}) if rates.Gamma > 0 else [0.5]
        _say(f"gamma={rates.gamma:g} Gamma={rates.Gamma:g} nbar={rates.nbar:g}: "
             f"C_inf = 0 at P = {', '.join(f'{r:.10g}' for r in roots)}; "
             f"peak Re C_inf = {curves[-1][1].C_inf.max():.6g}")
    run.png("c_inf.png", "asymptotic_figure", curves)
    run.summary.update(n_tables=len(rates_list))
    return EXIT_OK


def cmd_coherence(run: Run) -> int:
    cfg = run.cfg
    P = cfg.population_profile()
    t = np.linspace(0.0, cfg.t_f, cfg.numerics.n_points)
    curves, status = [], EXIT_OK
    for i, rates in enumerate(cfg.sweep_rates()):
        sol = solve_coherence(P, rates, cfg.initial.C0, n_grid=cfg.numerics.n_coherence,
                              feas_tol=cfg.numerics.feas_tol)
        csq = np.asarray(sol.csq(t))
        suffix = "" if not cfg.sweep else f"_{i:02d}"
        run.csv(f"coherence{suffix}.csv", ("t", "C", "C_sq"),
                np.column_stack([t, np.sqrt(np.maximum(csq, 0.0)), csq]))
        curves.append((rf"$\gamma$={rates.gamma:g}, $\Gamma$={rates.Gamma:g}", np.sqrt(np.maximum(csq, 0))))
        verdict = "feasible" if sol.feasible else f"INFEASIBLE (C^2 = {sol.min_Csq:.3g} at t = {sol.t_min:.6g})"
        _say(f"gamma={rates.gamma:g} Gamma={rates.Gamma:g} nbar={rates.nbar:g}: "
             f"C(t_f) = {np.sqrt(max(csq[-1], 0.0)):.10g}, {verdict}")
        if not sol.feasible:
            status = EXIT_INFEASIBLE
    run.png("coherence.png", "coherence_figure", t, curves)
    return status


COMMANDS = {
    "synth": (cmd_synth, "synthesize the control field and write its waveform"),
    "track": (cmd_track, "synthesize, propagate and compare with the prescription"),
    "propagate": (cmd_propagate, "propagate the synthesized (or a zero) field"),
    "reach": (cmd_reach, "accessibility map over (Pi, Pf)"),
    "steady": (cmd_steady, "steady-state coherence table over constant populations"),
    "coherence": (cmd_coherence, "coherence modulus C(t) for the population profile"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="experiment config (JSON)")
    src.add_argument("--figure", help="bundled figure config, e.g. 3b, or 3 for every panel")
    common.add_argument("--out", type=Path, help="output directory (overrides outputs.directory)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker processes for reach maps (default: all cores)")

    parser = argparse.ArgumentParser(prog="qubit-tracking", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name in ("synth", "track", "propagate"):
            p.add_argument("--printed-order", action="store_true",
                           help="diagnostic: swap Gamma1 and Gamma2 in the X numerator")
        if name in ("track", "propagate"):
            p.add_argument("--frame", choices=("lab", "rwa"), help="propagation frame")
        if name == "propagate":
            p.add_argument("--zero-field", action="store_true", help="free evolution")
    return parser


def _configs(args):
    if args.config is not None:
        cfg = load_config(args.config)
        return [(cfg.label or args.config.stem, cfg)]
    return figure_configs(args.figure)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers is not None and args.workers < 1:
        _say("config error: --workers must be >= 1")
        return EXIT_CONFIG
    try:
        configs = _configs(args)
    except ConfigError as exc:
        _say(f"config error: {exc}")
        return EXIT_CONFIG
    fn = COMMANDS[args.command][0]
    worst = EXIT_OK
    for name, cfg in configs:
        base = args.out if args.out is not None else Path(cfg.outputs.directory)
        out = base / name if len(configs) > 1 else base
        run = Run(cfg, out, args.command, args)
        if len(configs) > 1:
            _say(f"== {name}")
        try:
            status = fn(run)
        except ConfigError as exc:
            _say(f"config error: {exc}")
            status = EXIT_CONFIG
        except INFEASIBLE as exc:
            _say(f"infeasible: {exc}")
            status = EXIT_INFEASIBLE
        except IntegrationError as exc:
            _say(f"integration failed at t = {exc.time:.6g}: {exc}")
            status = EXIT_TOLERANCE
        run.manifest(status)
        worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(main())
