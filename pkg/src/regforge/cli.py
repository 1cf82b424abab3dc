"""Command line surface.

Subcommands:

* ``plant``       derive the turbine-generator models from a parameter file
* ``synthesize``  compute LQR / observer-based controller gains for a scenario
* ``simulate``    run a scenario and emit CSV/SVG artifacts plus a report
* ``metrics``     step-response figures for a previously written trajectory CSV
* ``reproduce``   rebuild the published figures 4-8 from scratch

Exit codes: 0 success, 1 validation error, 2 numerical failure (including
a diverged simulation), 3 I/O error. The default output directory comes
from ``--out``, then the ``REGFORGE_OUT`` environment variable, then the
working directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError
from .lti import (
    StateSpaceModel,
    char_poly,
    dc_gain,
    eigenvalues,
    feedback_interconnect,
    is_hurwitz,
    ss_to_tf,
    tf_to_ss,
)
from .observer import (
    CONVENTIONS,
    build_observer_controller,
    design_observer_gain,
    observer_error_dynamics,
)
from .output import line_chart_svg, read_timeseries_csv, write_timeseries_csv
from .plant import (
    PUBLISHED_OPEN_LOOP,
    PRESETS,
    REFERENCE_PARAMS,
    generator_tf,
    plant_tf,
    preset_tf,
    rounded_plant_tf,
    steady_state_report,
    turbine_tf,
)
from .report import RunReport, fmt, fmt_vector
from .riccati import CostWeights, solve_care
from .scenario import ControllerSpec, Scenario, load_plant_params, load_scenario
from .sim import (
    SimConfig,
    closed_loop_step,
    electrical_trace,
    observer_feedback_step,
    simulate,
    state_feedback_step,
    step_metrics,
)

REPRODUCE_INFLOW = 5.0
REPRODUCE_REFERENCE = 220.0
STABLE_OBSERVER_POLES = (-5.0, -6.0)


class _Parser(argparse.ArgumentParser):
    # Argparse normally exits(2) on usage errors; route them through the
    # validation exit code instead.
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help="output directory (default: $REGFORGE_OUT or .)")
        p.add_argument("--format", choices=("csv", "svg", "both"), default="csv",
                       help="artifact format for trajectory outputs")

    p_plant = sub.add_parser("plant", help="derive plant models from physical parameters")
    p_plant.add_argument("--params", help="parameter file (defaults to the reference set)")
    p_plant.add_argument("--inflow", type=float, default=REPRODUCE_INFLOW,
                         help="steam inflow [g/s] for the steady-state report")
    p_plant.set_defaults(func=cmd_plant)

    p_syn = sub.add_parser("synthesize", help="compute controller gains for a scenario")
    p_syn.add_argument("--scenario", required=True, help="scenario file")
    p_syn.add_argument("--convention", choices=CONVENTIONS,
                       help="override the compensator wiring convention")
    p_syn.set_defaults(func=cmd_synthesize)

    p_sim = sub.add_parser("simulate", help="run a scenario and write trajectory artifacts")
    p_sim.add_argument("--scenario", required=True, help="scenario file")
    p_sim.add_argument("--convention", choices=CONVENTIONS,
                       help="override the compensator wiring convention")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_met = sub.add_parser("metrics", help="step metrics for a written trajectory CSV")
    p_met.add_argument("csv", help="trajectory CSV produced by simulate/reproduce")
    p_met.set_defaults(func=cmd_metrics)

    p_rep = sub.add_parser("reproduce", help="rebuild a published figure from scratch")
    p_rep.add_argument("--figure", type=int, required=True, choices=(4, 5, 6, 7, 8))
    p_rep.add_argument("--preset", choices=PRESETS,
                       help="plant model preset (default: run both and report both)")
    p_rep.add_argument("--controller", choices=("lqr", "observer", "both"), default="both",
                       help="closed-loop design(s) for figure 8")
    p_rep.add_argument("--convention", choices=CONVENTIONS, default="standard-luenberger",
                       help="compensator wiring used in figure-8 reports")
    add_common(p_rep)
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def _out_dir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get("REGFORGE_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _wants(args, kind: str, scenario_outputs=()) -> bool:
    fmt_choice = getattr(args, "format", "csv")
    if kind == "csv":
        return fmt_choice in ("csv", "both") or "csv" in scenario_outputs
    if kind == "svg":
        return fmt_choice in ("svg", "both") or "svg" in scenario_outputs
    return True


def _efficiency_warnings(report: RunReport, params) -> None:
    rep = steady_state_report(params, REPRODUCE_INFLOW)
    pub = PUBLISHED_OPEN_LOOP
    if abs(rep.efficiency - pub["efficiency"]) > 0.01:
        report.warn(
            f"computed efficiency {fmt(rep.efficiency)} % (output {fmt(rep.p_out)} W / "
            f"input {fmt(rep.p_in)} W at {REPRODUCE_INFLOW:g} g/s) does not match the "
            f"published {fmt(pub['efficiency'])} % ({fmt(pub['p_out'])} W / "
            f"{fmt(pub['p_in'])} W); the published input power and efficiency are not "
            f"reproducible from the circuit equations"
        )


# --------------------------------------------------------------------------
# plant


def cmd_plant(args) -> int:
    params = load_plant_params(args.params) if args.params else REFERENCE_PARAMS
    report = RunReport(scenario="plant derivation")

    exact = plant_tf(params)
    report.add_tf("turbine", turbine_tf(params.turbine))
    report.add_tf("generator", generator_tf(params.generator))
    report.add_tf("plant (exact)", exact)
    report.add_tf("plant (exact, monic)", exact.normalized())
    report.add_tf("plant (paper-rounded reference)", rounded_plant_tf())
    report.add_ss("state space (exact, controllable canonical)", tf_to_ss(exact))
    report.add_line(f"dc gain (exact)        = {fmt(dc_gain(exact))}")
    report.add_line(f"dc gain (paper-rounded) = {fmt(dc_gain(rounded_plant_tf()))}")
    report.add_stability("plant", is_hurwitz(exact.den))

    report.add_line()
    report.add_line(f"steady state at {args.inflow:g} g/s:")
    report.add_electrical(steady_state_report(params, args.inflow))
    _efficiency_warnings(report, params)
    print(report.to_text(), end="")
    return 0


# --------------------------------------------------------------------------
# synthesize


def _synthesize_gain(scn_plant: StateSpaceModel, spec: ControllerSpec):
    weights = CostWeights.diagonal(spec.q_diag, spec.r)
    solution = solve_care(scn_plant.a, scn_plant.b, weights)
    k = np.linalg.solve(weights.r, scn_plant.b.T @ solution.p)
    return k, solution


def cmd_synthesize(args) -> int:
    scn = load_scenario(args.scenario)
    spec = scn.controller
    if spec.kind not in ("lqr", "observer"):
        raise ValidationError("synthesize needs a scenario with an lqr or observer controller")
    plant = scn.plant_model
    report = RunReport(scenario=scn.name)
    report.add_tf("plant", scn.plant_tf)
    report.add_stability("plant", is_hurwitz(char_poly(plant.a)))

    k, solution = _synthesize_gain(plant, spec)
    report.add_gain("K", k)
    report.add_line(f"CARE residual      : {solution.residual_norm:.3e} "
                    f"({solution.iterations} iterations)")
    report.add_stability("A-BK", is_hurwitz(char_poly(plant.a - plant.b @ k)))

    if spec.kind == "observer":
        convention = args.convention or spec.convention
        controller = build_observer_controller(plant, k, spec.h, convention)
        report.add_line(f"convention         : {convention}")
        report.add_ss("compensator", controller.model)
        a_err, err_ok = observer_error_dynamics(plant, spec.h)
        report.add_line(f"A-HC char poly     : {controller.audit.error_poly}")
        report.add_stability("A-HC", err_ok)
        loop = feedback_interconnect(plant, controller.model)
        eig = np.sort_complex(eigenvalues(loop.a))
        eig = np.where(np.abs(eig.imag) < 1e-9, eig.real + 0.0j, eig)
        labels = [f"{z.real:.4g}" if z.imag == 0 else f"{z.real:.4g}{z.imag:+.4g}j" for z in eig]
        report.add_line("closed-loop eigenvalues (unity feedback, reported not asserted): "
                        + "[" + ", ".join(labels) + "]")
        report.add_stability("closed loop", is_hurwitz(char_poly(loop.a)))
        if not err_ok:
            report.warn(
                "observer error dynamics A-HC are not Hurwitz with the supplied H; the "
                "standard observer architecture cannot settle and the published response "
                "is not reproducible with this gain"
            )
    print(report.to_text(), end="")
    return 0


# --------------------------------------------------------------------------
# simulate


def _write_artifacts(args, name: str, series, electrical=None, svg_series=None,
                     svg_title="", ylabel="", scenario_outputs=()):
    out = _out_dir(args)
    written = []
    if _wants(args, "csv", scenario_outputs):
        csv_path = out / f"{name}.csv"
        write_timeseries_csv(csv_path, series, electrical)
        written.append(csv_path)
    if _wants(args, "svg", scenario_outputs):
        svg_path = out / f"{name}.svg"
        data = svg_series or [("y", series.times, series.outputs)]
        svg_path.write_text(
            line_chart_svg(data, title=svg_title or name, xlabel="time [s]", ylabel=ylabel or "output"),
            encoding="utf-8",
        )
        written.append(svg_path)
    return written


def _simulate_open_loop(args, scn: Scenario, report: RunReport) -> tuple[int, list]:
    series = simulate(scn.plant_model, scn.sim)
    elec = electrical_trace(scn.plant_params, series) if scn.plant_params else None
    if series.diverged:
        report.warn(f"simulation diverged at t = {series.times[-1]:.3f} s; series truncated")
    else:
        report.add_metrics(step_metrics(series))
    if scn.plant_params is not None:
        report.add_line()
        report.add_line(f"steady-state circuit report at {scn.sim.input_amplitude:g} g/s:")
        report.add_electrical(steady_state_report(scn.plant_params, scn.sim.input_amplitude))
        _efficiency_warnings(report, scn.plant_params)
    files = _write_artifacts(
        args, scn.name, series, electrical=elec,
        svg_title=scn.name, ylabel="terminal voltage [V]",
        scenario_outputs=scn.outputs,
    )
    return (2 if series.diverged else 0), files


def _simulate_closed_loop(args, scn: Scenario, report: RunReport) -> tuple[int, list]:
    if scn.reference is None:
        raise ValidationError("closed-loop scenario needs a reference")
    plant = scn.plant_model
    spec = scn.controller
    reference = scn.reference

    if spec.kind == "lqr":
        k, solution = _synthesize_gain(plant, spec)
        report.add_gain("K", k)
        report.add_line(f"CARE residual      : {solution.residual_norm:.3e}")
        result = state_feedback_step(plant, k, reference, scn.sim)
        report.add_line(f"reference prescaler N = {fmt(result.prescaler)}")
    elif spec.kind == "observer":
        k, solution = _synthesize_gain(plant, spec)
        report.add_gain("K", k)
        report.add_gain("H", spec.h)
        convention = args.convention or spec.convention
        report.add_line(f"convention         : {convention}")
        _, err_ok = observer_error_dynamics(plant, spec.h)
        report.add_stability("A-HC", err_ok)
        if convention == "standard-luenberger":
            result = observer_feedback_step(plant, k, spec.h, reference, scn.sim)
            report.add_line(f"reference prescaler N = {fmt(result.prescaler)}")
        else:
            controller = build_observer_controller(plant, k, spec.h, convention)
            result = closed_loop_step(plant, controller.model, reference, scn.sim)
    else:  # explicit state-space controller
        result = closed_loop_step(plant, spec.model, reference, scn.sim)

    report.add_stability("closed loop", result.hurwitz)
    if result.series.diverged:
        report.warn(f"simulation diverged at t = {result.series.times[-1]:.3f} s; series truncated")
    else:
        report.add_metrics(result.metrics)
    files = _write_artifacts(
        args, scn.name, result.series,
        svg_title=scn.name, ylabel="output voltage [V]",
        scenario_outputs=scn.outputs,
    )
    return (2 if result.series.diverged else 0), files


def cmd_simulate(args) -> int:
    scn = load_scenario(args.scenario)
    report = RunReport(scenario=scn.name)
    report.add_tf("plant", scn.plant_tf)
    report.add_stability("plant", is_hurwitz(char_poly(scn.plant_model.a))
                         if scn.plant_model.n_states else True)
    if scn.controller.kind == "none":
        code, files = _simulate_open_loop(args, scn, report)
    else:
        code, files = _simulate_closed_loop(args, scn, report)
    for f in files:
        report.add_line(f"wrote {f}")
    print(report.to_text(), end="")
    return code


# --------------------------------------------------------------------------
# metrics


def cmd_metrics(args) -> int:
    series, _ = read_timeseries_csv(args.csv)
    report = RunReport(scenario=f"metrics {args.csv}")
    report.add_metrics(step_metrics(series))
    print(report.to_text(), end="")
    return 0


# --------------------------------------------------------------------------
# reproduce


def _open_loop_figure(args, figure: int, preset: str, report: RunReport) -> list:
    tf = preset_tf(preset)
    model = tf_to_ss(tf)
    cfg = SimConfig(dt=1e-3, duration=20.0, input_amplitude=REPRODUCE_INFLOW)
    series = simulate(model, cfg)
    elec = electrical_trace(REFERENCE_PARAMS, series)
    metrics = step_metrics(series)
    circuit = steady_state_report(REFERENCE_PARAMS, REPRODUCE_INFLOW)

    report.add_line()
    report.add_line(f"[{preset}] plant: {tf}")
    report.add_line(f"[{preset}] simulated steady state: {fmt(metrics.steady_state)} V "
                    f"(dc chain: {fmt(dc_gain(tf) * REPRODUCE_INFLOW)} V)")
    if figure == 5:
        report.add_line(f"[{preset}] output power at steady state: {fmt(elec.p_out[-1])} W "
                        f"(published reading {fmt(PUBLISHED_OPEN_LOOP['p_out'])} W)")
    if figure == 6:
        report.add_line(f"[{preset}] induced EMF at steady state: {fmt(elec.e_g[-1])} V "
                        f"(derived value; the published trace has no readable axis)")
    if figure == 7:
        report.add_line(f"[{preset}] input power at steady state: {fmt(elec.p_in[-1])} W "
                        f"(published reading {fmt(PUBLISHED_OPEN_LOOP['p_in'])} W)")
    report.add_line(f"[{preset}] circuit efficiency: {fmt(circuit.efficiency)} %")

    svg_pick = {
        4: ("terminal voltage [V]", [("v_out", series.times, series.outputs)]),
        5: ("output power [W]", [("p_out", elec.times, elec.p_out)]),
        6: ("induced EMF [V]", [("e_g", elec.times, elec.e_g)]),
        7: ("input power [W]", [("p_in", elec.times, elec.p_in)]),
    }
    ylabel, svg_series = svg_pick[figure]
    return _write_artifacts(
        args, f"figure{figure}-{preset}", series, electrical=elec,
        svg_series=svg_series, svg_title=f"figure {figure} ({preset})", ylabel=ylabel,
    )


def _figure8_legs(args, preset: str, report: RunReport) -> list:
    tf = preset_tf(preset)
    plant = tf_to_ss(tf)
    cfg = SimConfig(dt=1e-3, duration=15.0)
    files = []

    run_lqr = args.controller in ("lqr", "both")
    run_obs = args.controller in ("observer", "both")

    if run_lqr:
        k, _ = _synthesize_gain(plant, ControllerSpec(kind="lqr", q_diag=np.array([3.0, 3.0]), r=5.0))
        result = state_feedback_step(plant, k, REPRODUCE_REFERENCE, cfg)
        report.add_line()
        report.add_line(f"[{preset}] lqr leg: K = {fmt_vector(k)}, N = {fmt(result.prescaler)}")
        report.add_metrics(result.metrics)
        files += _write_artifacts(
            args, f"figure8-lqr-{preset}", result.series,
            svg_title=f"figure 8 lqr ({preset})", ylabel="output voltage [V]",
        )

    if run_obs:
        k, _ = _synthesize_gain(plant, ControllerSpec(kind="observer", q_diag=np.array([8.0, 8.0]), r=1.0))
        h_published = np.array([[2.0], [-0.5]])
        _, err_ok = observer_error_dynamics(plant, h_published)
        report.add_line()
        report.add_line(f"[{preset}] observer leg: K = {fmt_vector(k)}, published H = "
                        f"{fmt_vector(h_published)}")
        report.add_line(f"[{preset}] A-HC char poly: {char_poly(plant.a - h_published @ plant.c)}")
        report.add_stability("A-HC (published H)", err_ok)
        result = observer_feedback_step(plant, k, h_published, REPRODUCE_REFERENCE, cfg)
        if result.series.diverged:
            report.warn(
                f"[{preset}] published-H observer loop diverged at "
                f"t = {result.series.times[-1]:.3f} s; the published 7 s settling time is "
                f"not reproducible under the standard observer architecture"
            )
        else:
            report.add_metrics(result.metrics)
        files += _write_artifacts(
            args, f"figure8-observer-published-{preset}", result.series,
            svg_title=f"figure 8 observer, published H ({preset})", ylabel="output voltage [V]",
        )

        h_stable = design_observer_gain(plant.a, plant.c, STABLE_OBSERVER_POLES)
        result2 = observer_feedback_step(plant, k, h_stable, REPRODUCE_REFERENCE, cfg)
        report.add_line(f"[{preset}] stable replacement H = {fmt_vector(h_stable)} "
                        f"(error poles {STABLE_OBSERVER_POLES})")
        report.add_metrics(result2.metrics)
        files += _write_artifacts(
            args, f"figure8-observer-stable-{preset}", result2.series,
            svg_title=f"figure 8 observer, stable H ({preset})", ylabel="output voltage [V]",
        )
    return files


def cmd_reproduce(args) -> int:
    presets = [args.preset] if args.preset else list(PRESETS)
    report = RunReport(scenario=f"reproduce figure {args.figure}")
    files = []
    if args.figure in (4, 5, 6, 7):
        for preset in presets:
            files += _open_loop_figure(args, args.figure, preset, report)
        _efficiency_warnings(report, REFERENCE_PARAMS)
        if args.figure == 4:
            report.add_line()
            report.add_line(
                "note: the published trace reads 90 V, matching the paper-rounded gain; "
                "the exact gain 256/14 gives 91.43 V"
            )
    else:
        for preset in presets:
            files += _figure8_legs(args, preset, report)
    for f in files:
        report.add_line(f"wrote {f}")
    print(report.to_text(), end="")
    return 0


# --------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return int(args.func(args) or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
