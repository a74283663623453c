"""Command-line orchestration of the wave laboratory.

Subcommands: profile, ansatz-check, structure-check, evolve, theorem1,
theorem2, analyze.  Exit status 0 means all requested checks passed, 1 a
check failed, 2 a configuration problem, 3 a numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .ansatz import MassCoefficients, TildeAnsatz, mass_decompose, tilde_residual
from .config import ConfigError, ExperimentConfig, parse_config, write_resolved
from .decay import (
    FitError,
    auto_exponential_window,
    default_perturbation,
    fit_exponential,
    fit_log_corrected,
    fit_power,
    project_zero_mass,
    rho_plus_for_delta,
    run_theorem1,
    run_theorem2,
    _initial_state,
    _setup_common,
)
from .gas import GasParams, StateError, StatePoint, solve_endstates, structural_conditions
from .modes import transformed_structural_conditions
from .profile import ProfileError, gaussian_fit_derivative, solve_selfsimilar
from .solver import LineReferenceBC, load_checkpoint, run, save_checkpoint

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _say(args, *msg, **kwargs):
    if not args.quiet:
        print(*msg, **kwargs)


def cmd_profile(cfg: ExperimentConfig, args) -> int:
    gas = GasParams(gamma=cfg.gamma, mu=cfg.mu, lam=cfg.lam, kappa=cfg.kappa)
    ends = solve_endstates(
        cfg.rho_minus, cfg.theta_minus, cfg.rho_minus * rho_plus_for_delta(cfg.delta)
    )
    profile = solve_selfsimilar(ends, gas, cfg.xi_halfwidth, cfg.profile_points)
    out = Path(args.out)
    profile.to_csv(out / "profile.csv")
    jump = np.trapezoid(profile.drho_bar, profile.xi) - (ends.rho_plus - ends.rho_minus)
    ok = True
    lines = [f"profile: residual {profile.residual_norm:.3e}, jump defect {jump:.3e}"]
    if ends.delta > 0:
        C, c0, resid = gaussian_fit_derivative(profile)
        lines.append(f"gaussian fit: C={C:.6g} c0={c0:.6g} residual={resid:.4g}")
        ok &= resid < 0.1 and c0 > 0
        diffs = np.diff(profile.rho_bar) * np.sign(ends.rho_plus - ends.rho_minus)
        ok &= bool(np.all(diffs > -1e-12 * ends.delta))
    ok &= abs(jump) < 1e-8
    lines.append("monotone profile, single-signed derivative"
                 if ok else "PROFILE CHECKS FAILED")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _say(args, *lines, sep="\n")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_ansatz_check(cfg: ExperimentConfig, args) -> int:
    gas, ends, profile, grid = _setup_common(cfg)
    pert = default_perturbation(grid, cfg.amplitude, cfg.pert_width)
    initial = _initial_state(grid, profile, ends, gas, pert)
    coeffs = mass_decompose(initial, profile, ends, gas)
    ansatz = TildeAnsatz(profile, coeffs, ends, gas)
    times = np.unique(np.geomspace(1.0, 101.0, 25) - 1.0)
    report = tilde_residual(ansatz, gas, grid.x1, times)
    sup = np.asarray(report["normalized_sup"])
    # boundedness across doublings of the time window
    stable = True
    for lo in (0.0, 25.0, 50.0):
        m1 = sup[(times >= lo) & (times < lo + 25.0)]
        m2 = sup[(times >= lo + 25.0) & (times <= lo + 50.0)]
        if m1.size and m2.size and m2.max() > 2.0 * max(m1.max(), 1e-30):
            stable = False
    out = Path(args.out)
    csvio.write_residuals_csv(out / "residuals.csv", report)
    size = ends.delta + coeffs.total_size
    lines = [
        f"ansatz residual: sup normalized {sup.max():.4g}, envelope c={report['c_envelope']:.4g}",
        f"coefficient size delta+sum|Theta| = {size:.4g}",
        f"bounded across t-doubling: {stable}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _say(args, *lines, sep="\n")
    return EXIT_OK if stable else EXIT_CHECK_FAILED


def cmd_structure_check(cfg: ExperimentConfig, args) -> int:
    gas = GasParams(gamma=cfg.gamma, mu=cfg.mu, lam=cfg.lam, kappa=cfg.kappa)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst_r2 = 0.0
    best_l2 = np.inf
    for _ in range(100):
        rho = rng.uniform(0.5, 2.0)
        u = rng.uniform(-0.5, 0.5)
        theta = rng.uniform(0.5, 2.0)
        E = rho * (theta + 0.5 * u * u)
        st = StatePoint(rho, rho * u, 0.0, 0.0, E)
        gl, gr = structural_conditions(st, gas, 2)
        worst_r2 = max(worst_r2, float(np.linalg.norm(gr)))
        best_l2 = min(best_l2, float(np.linalg.norm(gl)))
    l2_t, r2_t = transformed_structural_conditions(gas, np.linspace(0.5, 2.0, 64))
    rows.append(f"eulerian field 2: |grad r2.r2| <= {worst_r2:.3e} (right condition holds)")
    rows.append(f"eulerian field 2: |grad l2.r2| >= {best_l2:.3e} (left condition violated)")
    rows.append(f"transformed field 2: |grad l2.r2| = {l2_t:.3e}, |grad r2.r2| = {r2_t:.3e}")
    ok = worst_r2 < 1e-6 and best_l2 > 1e-3 and l2_t < 1e-10 and r2_t < 1e-10
    rows.append("structure-check " + ("passed" if ok else "FAILED"))
    out = Path(args.out)
    (out / "report.txt").write_text("\n".join(rows) + "\n")
    _say(args, *rows, sep="\n")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_evolve(cfg: ExperimentConfig, args) -> int:
    from .diagnostics import DiagnosticsRecorder

    gas, ends, profile, grid = _setup_common(cfg)
    if args.resume:
        initial = load_checkpoint(args.resume)
        grid = initial.grid
    else:
        pert = default_perturbation(grid, cfg.amplitude, cfg.pert_width)
        if cfg.mass_mode == "zero":
            pert = project_zero_mass(pert, grid)
        initial = _initial_state(grid, profile, ends, gas, pert)
    if cfg.mass_mode == "zero":
        coeffs = MassCoefficients()
    else:
        coeffs = mass_decompose(initial, profile, ends, gas)
    ansatz = TildeAnsatz(profile, coeffs, ends, gas)
    recorder = DiagnosticsRecorder(ansatz, profile, ends, gas, ends.delta,
                                   kernel_c=cfg.kernel_c,
                                   dissipation_const=cfg.dissipation_const,
                                   cross_const=cfg.cross_const)
    bc = LineReferenceBC(lambda x1, t: ansatz.at(x1, t).conserved)
    out = Path(args.out)
    observers = [(cfg.observer_dt, recorder)]
    if cfg.checkpoint_dt > 0:
        counter = [0]

        def checkpointer(state):
            save_checkpoint(out / f"checkpoint_{counter[0]:05d}.npz", state)
            counter[0] += 1

        observers.append((cfg.checkpoint_dt, checkpointer))
    result = run(initial, cfg.t_end, gas, bc, observers=observers,
                 safety=cfg.safety, collapse_transverse=cfg.collapse_transverse)
    save_checkpoint(out / "final.npz", result.state)
    csvio.write_diagnostics_csv(out / "diagnostics.csv", recorder.series)
    _say(args, f"evolved to t={result.state.t:.6g} in {result.steps} steps; "
               f"monitor {result.monitor_max:.3e}"
               + (" (domain flagged)" if result.domain_flagged else ""))
    return EXIT_OK


def _write_theorem_outputs(report, out: Path, args) -> None:
    csvio.write_diagnostics_csv(out / "diagnostics.csv", report.recorder.series)
    rows = [
        csvio.fit_row(report.name, name, fit, report.passed.get(_pass_key(name), True))
        for name, fit in report.fits.items()
    ]
    csvio.write_fits_csv(out / "fits.csv", rows)
    lines = [f"{report.name}:"]
    for name, fit in report.fits.items():
        lines.append(f"  {name} {fit}")
    for name, ok in report.passed.items():
        lines.append(f"  [{'pass' if ok else 'FAIL'}] {name}")
    for key in ("poincare_full", "poincare_drift", "channel_rates"):
        if key in report.extras:
            val = report.extras[key]
            if key == "poincare_full":
                lines.append(f"  poincare: C0={val['C0']:.4g} C1={val['C1']:.4g}")
            elif key == "poincare_drift":
                lines.append(f"  poincare C1 drift (full/half): {val:.3f}")
            else:
                lines.append(
                    f"  channel source rates: b2 {val['rate_b2']:.3f}, "
                    f"acoustic {val['rate_b13']:.3f}"
                )
    info = report.run_info
    lines.append(
        f"  run: steps={info['steps']} L={info['L']:.4g} "
        f"monitor={info['monitor_max']:.3e} collapsed_at={info['collapsed_at']}"
    )
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _say(args, *lines, sep="\n")


def _pass_key(fit_name: str) -> str:
    return {
        "linf_zero_mode": "linf_exponent_band",
        "nonzero_h1": "nonzero_rate_positive",
    }.get(fit_name, fit_name)


def cmd_theorem(cfg: ExperimentConfig, args, which: int) -> int:
    report = run_theorem1(cfg) if which == 1 else run_theorem2(cfg)
    _write_theorem_outputs(report, Path(args.out), args)
    return EXIT_OK if all(report.passed.values()) else EXIT_CHECK_FAILED


def cmd_analyze(cfg: ExperimentConfig, args) -> int:
    data = csvio.read_diagnostics_csv(args.diagnostics)
    t = data["t"]
    window = (cfg.fit_lo_frac * t[-1], cfg.fit_hi_frac * t[-1])
    rows = []
    for quantity, maker in [
        ("linf_pert_bar", fit_power),
        ("linf_pert_bar_lncorr", fit_log_corrected),
    ]:
        col = data["linf_pert_bar"]
        try:
            fit = maker(t, col, window)
            rows.append(csvio.fit_row("analyze", quantity, fit, True))
        except FitError:
            pass
    try:
        nz = data["nonzero_h1"]
        wz = auto_exponential_window(t, nz)
        fit = fit_exponential(t, nz, wz)
        rows.append(csvio.fit_row("analyze", "nonzero_h1", fit, fit.value > 0))
    except FitError:
        pass
    if not rows:
        _say(args, "no fittable series found")
        return EXIT_CHECK_FAILED
    csvio.write_fits_csv(Path(args.out) / "fits.csv", rows)
    for r in rows:
        _say(args, f"{r[1]}: {r[2]} value={r[3]} ({r[9]})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entwave", description=__doc__)
    p.add_argument("command", choices=[
        "profile", "ansatz-check", "structure-check", "evolve",
        "theorem1", "theorem2", "analyze",
    ])
    p.add_argument("--config", default=None, help="path to the INI config")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--resume", default=None, help="checkpoint to resume from (evolve)")
    p.add_argument("--diagnostics", default=None,
                   help="existing diagnostics CSV (analyze)")
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else ExperimentConfig()
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_resolved(cfg, out)
    if args.command == "analyze" and not args.diagnostics:
        print("analyze requires --diagnostics <csv>", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "profile":
            return cmd_profile(cfg, args)
        if args.command == "ansatz-check":
            return cmd_ansatz_check(cfg, args)
        if args.command == "structure-check":
            return cmd_structure_check(cfg, args)
        if args.command == "evolve":
            return cmd_evolve(cfg, args)
        if args.command == "theorem1":
            return cmd_theorem(cfg, args, 1)
        if args.command == "theorem2":
            return cmd_theorem(cfg, args, 2)
        if args.command == "analyze":
            return cmd_analyze(cfg, args)
    except (StateError, ProfileError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FitError as err:
        print(f"check failure: {err}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
