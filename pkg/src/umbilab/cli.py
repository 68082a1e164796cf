"""Command-line entry point: ``umbilab analyze|flow|sweep|optimality|convert``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .ambient import get_ambient
from .conformal import ball_to_graph, convert_report, graph_to_ball
from .curvature import GeometryError
from .experiments import (
    SweepConfig,
    dumps,
    generic_initial,
    optimality_analysis,
    pinch_sweep,
    report_emit,
)
from .graph import make_perturbed_graph, make_sphere_graph, read_graph, write_graph
from .grid import parse_grid
from .imcf import FlowBreakdown, FlowControls, fit_decay_exponents, run_flow, sphere_flow_oracle
from .measures import analysis_report
from .profiles import PROFILE_NAMES, get_profile

log = logging.getLogger("umbilab")

PRESETS = ("sphere", "generic") + PROFILE_NAMES
SPHERE_ORACLE_RTOL = 1e-4


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from None
    if not b > a:
        raise argparse.ArgumentTypeError("window end must exceed its start")
    return a, b


def _eps_list(text: str) -> list[float]:
    """Comma list, or ``logspace:lo,hi,n`` with exponents of ten."""
    if text.startswith("logspace:"):
        lo, hi, n = text[len("logspace:") :].split(",")
        return [float(e) for e in np.logspace(float(lo), float(hi), int(n))]
    return [float(x) for x in text.split(",") if x.strip()]


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _common(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--grid", default=d("64x128"), help="grid as NxM (colatitudes x longitudes)")
    parser.add_argument("--ambient", default=d(None), choices=("euclidean", "hyperbolic", "spherecap"))
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--out-dir", default=d("."))
    parser.add_argument("--config", default=d(None), help="JSON file mirroring SweepConfig or FlowControls")
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="umbilab", description="Almost-umbilical radial graphs and IMCF.")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p, suppress=True)
        return p

    p = add("analyze", help_="curvature, norms and sphere distances of one surface")
    p.add_argument("--input", help="RadialGraph JSON; omit to use --preset")
    p.add_argument("--preset", default="harmonic2", choices=PRESETS)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--p", type=float, nargs="+", default=[3.0, 4.0, 8.0])
    p.add_argument("--report", help="JSON output (default: OUT_DIR/analysis.json)")

    p = add("flow", help_="run inverse mean curvature flow")
    p.add_argument("--initial", default="generic", help=f"RadialGraph JSON or a preset ({', '.join(PRESETS)})")
    p.add_argument("--radius", type=float, default=None, help="sphere radius / base radius for presets")
    p.add_argument("--eps", type=float, default=0.2, help="perturbation size for profile presets")
    p.add_argument("--t-end", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--sample-every", type=float)
    p.add_argument("--out", help="diagnostics CSV (default: OUT_DIR/flow.csv)")
    p.add_argument("--fit-window", type=_pair)
    p.add_argument("--report", help="JSON report with fitted slopes")

    p = add("sweep", help_="pinching sweep over eps")
    p.add_argument("--profile", choices=PROFILE_NAMES)
    p.add_argument("--eps", type=_eps_list, help="comma list or logspace:lo,hi,n")
    p.add_argument("--p", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--stem", default="sweep")

    p = add("optimality", help_="decay rates and the optimality ratio along IMCF")
    p.add_argument("--initial", default="generic", help="RadialGraph JSON or a preset")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--t-end", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--sample-every", type=float)
    p.add_argument("--fit-window", type=_pair)
    p.add_argument("--stem", default="optimality")

    p = add("convert", help_="move a graph between the hyperbolic and Poincare-ball models")
    p.add_argument("--input", required=True, help="RadialGraph JSON (hyperbolic or euclidean ball)")
    p.add_argument("--output", required=True, help="converted RadialGraph JSON")
    p.add_argument("--reference-radius", type=float, help="reference sphere about the pole, in the input model")
    p.add_argument("--report", help="JSON with psi_max and Hausdorff figures")
    return parser


def _initial_graph(args, ambient_default: str):
    grid = parse_grid(args.grid)
    ambient = args.ambient or ambient_default
    init = args.initial
    if init not in PRESETS:
        graph = read_graph(init)
        if args.ambient and graph.ambient.kind != args.ambient:
            raise ValueError(f"{init} holds a {graph.ambient.kind} graph, not {args.ambient}")
        return graph
    if init == "sphere":
        return make_sphere_graph(1.0 if args.radius is None else args.radius, grid, ambient)
    if init == "generic":
        return generic_initial(grid, args.seed, 2.0 if args.radius is None else args.radius, ambient)
    return make_perturbed_graph(2.0 if args.radius is None else args.radius, args.eps,
                                get_profile(init, args.seed), grid, ambient)


def _controls(args, config: dict, t_end_default: float) -> tuple[FlowControls, tuple | None]:
    config = dict(config)
    window = config.pop("fit_window", None)
    known = {f.name for f in fields(FlowControls)}
    unknown = set(config) - known
    if unknown:
        raise ValueError(f"unknown flow config keys: {sorted(unknown)}")
    config.setdefault("t_end", t_end_default)
    for key in ("t_end", "cfl", "sample_every"):
        val = getattr(args, key, None)
        if val is not None:
            config[key] = val
    if args.fit_window is not None:
        window = args.fit_window
    return FlowControls(**config), None if window is None else tuple(float(x) for x in window)


def _out(args, name: str, explicit=None) -> Path:
    if explicit:
        path = Path(explicit)
    else:
        path = Path(args.out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def cmd_analyze(args) -> int:
    grid = parse_grid(args.grid)
    if args.input:
        graph = read_graph(args.input)
    else:
        ambient = args.ambient or "euclidean"
        if args.preset == "sphere":
            graph = make_sphere_graph(args.radius, grid, ambient)
        elif args.preset == "generic":
            graph = generic_initial(grid, args.seed, 2.0, ambient)
        else:
            graph = make_perturbed_graph(args.radius, args.eps, get_profile(args.preset, args.seed), grid, ambient)
    report = analysis_report(graph, ps=tuple(args.p))
    report["ambient"] = graph.ambient.kind
    path = _out(args, "analysis.json", args.report)
    path.write_text(dumps(report))
    print(f"wrote {path}")
    return 0


def cmd_flow(args) -> int:
    controls, window = _controls(args, _load_config(args.config), 10.0)
    graph = _initial_graph(args, "hyperbolic")
    log.info("flowing %s graph to t = %g", graph.ambient.kind, controls.t_end)
    diag = run_flow(graph, controls, progress=lambda s: log.info("t = %.3f  H_min = %.4g", s.t, s.H_min))
    csv_path = _out(args, "flow.csv", args.out)
    diag.write_csv(csv_path)
    print(f"wrote {csv_path}")

    report = {"ambient": diag.ambient, "t_end": controls.t_end, "n_samples": len(diag.samples), "checks": {}}
    checks = report["checks"]
    if args.initial == "sphere":
        r0 = float(graph.u.mean())
        exact = sphere_flow_oracle(r0, 2, graph.ambient, controls.t_end)
        rel = float(np.max(np.abs(diag.final.graph.u - exact)) / exact)
        report["sphere_oracle"] = {"r0": r0, "exact": exact, "rel_error": rel}
        checks["sphere_oracle"] = rel <= SPHERE_ORACLE_RTOL
    if window is not None:
        quantities = ("sup_A_trfree_hyp", "sup_A_trfree_ball", "dH_ball_S2", "dH_ball_bestfit")
        if diag.ambient != "hyperbolic":
            quantities = ("sup_A_trfree_hyp",)
        fits = fit_decay_exponents(diag, window, quantities)
        report["window"] = list(window)
        report["fits"] = {k: v.to_dict() for k, v in fits.items()}
        if diag.ambient == "hyperbolic":
            rep = optimality_analysis(diag, window)
            checks.update(rep.criteria)
    if args.report:
        path = _out(args, "flow.json", args.report)
        path.write_text(dumps(report))
        print(f"wrote {path}")
    return _verdict(checks)


def cmd_sweep(args) -> int:
    data = _load_config(args.config)
    overrides = {"profile": args.profile, "eps": args.eps, "p": args.p, "radius": args.radius}
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.ambient:
        data["ambient"] = args.ambient
    data.setdefault("grid", tuple(parse_grid(args.grid).shape))
    data.setdefault("seed", args.seed)
    config = SweepConfig.from_dict(data)
    report = pinch_sweep(config)
    for path in report_emit(report, args.out_dir, args.stem):
        print(f"wrote {path}")
    if not report.records:
        return 0
    print(f"alpha_emp = {report.alpha_emp:.4f}  c_emp = {report.c_emp:.4g}  Perez C_emp = {report.perez_C_emp:.4g}")
    return _verdict(report.criteria)


def cmd_optimality(args) -> int:
    controls, window = _controls(args, _load_config(args.config), 10.0)
    window = window or (controls.t_end / 2.0, controls.t_end)
    graph = _initial_graph(args, "hyperbolic")
    if graph.ambient.kind != "hyperbolic":
        raise ValueError("the optimality experiment flows in hyperbolic space")
    diag = run_flow(graph, controls, progress=lambda s: log.info("t = %.3f", s.t))
    report = optimality_analysis(diag, window)
    for path in report_emit(report, args.out_dir, args.stem):
        print(f"wrote {path}")
    for key, fit in report.fits.items():
        print(f"slope {key:<18} {fit.slope:+.4f}")
    print(f"ratio band c = {report.ratio_band:.4f}; what in [{report.what_interval[0]:.4f}, {report.what_interval[1]:.4f}]")
    return _verdict(report.criteria)


def cmd_convert(args) -> int:
    graph = read_graph(args.input)
    if graph.ambient.kind == "hyperbolic":
        out = graph_to_ball(graph)
    elif graph.ambient.kind == "euclidean":
        out = ball_to_graph(graph)
    else:
        raise ValueError("convert handles hyperbolic graphs and their Poincare-ball images")
    write_graph(out, args.output)
    print(f"wrote {args.output}")
    if args.report or args.reference_radius is not None:
        path = _out(args, "convert.json", args.report)
        path.write_text(dumps(convert_report(graph, args.reference_radius)))
        print(f"wrote {path}")
    return 0


def _verdict(checks: dict) -> int:
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(checks.values()) else 1


COMMANDS = {
    "analyze": cmd_analyze,
    "flow": cmd_flow,
    "sweep": cmd_sweep,
    "optimality": cmd_optimality,
    "convert": cmd_convert,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        get_ambient(args.ambient) if args.ambient else None
        parse_grid(args.grid)
        return COMMANDS[args.command](args)
    except (ValueError, GeometryError, FlowBreakdown, OSError, json.JSONDecodeError) as exc:
        print(f"umbilab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
