"""Command-line driver.

Every subcommand writes CSV files plus a JSON sidecar into ``--out``.
Exit codes: 0 success, 1 usage error, 2 invalid configuration or input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import accelerator, melnikov
from .boundary import BoundaryModel, load_config
from .dynmap import PhaseState, iterate_full
from .errors import ConfigError, DomainError, NumericError
from .frozen import hyperbolic_data
from .inner import CylinderState, H_in, inner_orbit, level_curve_in
from .melnikov import SplittingConfig
from .output import write_csv, write_sidecar
from .scattering import H_out, S_truncated, level_curve_out
from .selftest import format_table, run_checks


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _boundary(args):
    if args.config:
        boundary = load_config(args.config)
    else:
        boundary = BoundaryModel.figure1()
    if args.delta is not None:
        boundary = boundary.with_delta(args.delta)
    return boundary


def _path(args, name):
    return os.path.join(args.out, name)


def _finish(args, boundary, params, outputs, summary=None):
    params = {k: v for k, v in sorted(params.items())}
    text = boundary.config_text or boundary.to_config_text()
    write_sidecar(_path(args, f"{args.command}.json"), args.command, params, text, outputs, summary)


def cmd_simulate(args, boundary):
    rng = np.random.default_rng(args.seed)
    phi = args.phi if args.phi is not None else float(rng.uniform(0.0, math.pi))
    theta = args.theta if args.theta is not None else float(rng.uniform(0.2, math.pi - 0.2))
    start = PhaseState(phi, theta, args.E, args.t, args.eps)
    orbit = iterate_full(start, boundary, args.steps)
    rows = [(n, s.phi, s.theta, s.E, s.t, s.physical_energy) for n, s in enumerate(orbit)]
    out = write_csv(_path(args, "orbit.csv"), ["n", "phi", "theta", "E", "t", "Ecal"], rows)
    _finish(args, boundary, {"phi": phi, "theta": theta, "E": args.E, "t": args.t, "eps": args.eps,
                             "steps": args.steps, "seed": args.seed}, [out])
    return 0


def _level_rows(levels, curve, grid):
    t = np.arange(grid) / grid
    return [(float(H), float(tk), float(Ek)) for H in levels for tk, Ek in zip(t, curve(H, t))]


def cmd_inner(args, boundary):
    E, t = inner_orbit(CylinderState(args.E, args.t), args.eps, boundary, args.steps)
    rows = [(n, E[n], t[n], H_in(CylinderState(E[n], t[n]), boundary)) for n in range(len(E))]
    orbit = write_csv(_path(args, "inner_orbit.csv"), ["n", "E", "t", "H_in"], rows)
    levels = np.linspace(5.0, 50.0, 10)
    lv = write_csv(_path(args, "inner_levels.csv"), ["H_in", "t", "E"],
                   _level_rows(levels, lambda H, tt: level_curve_in(H, tt, boundary), args.grid))
    summary = {"E_min": float(E.min()), "E_max": float(E.max())}
    _finish(args, boundary, {"E": args.E, "t": args.t, "eps": args.eps, "steps": args.steps,
                             "grid": args.grid}, [orbit, lv], summary)
    return 0


def cmd_scatter(args, boundary):
    cfg = SplittingConfig(args.eps, boundary.delta)
    s = CylinderState(args.E, args.t)
    rows = [(0, s.E, s.t, H_in(s, boundary), H_out(s, boundary))]
    stop = "steps"
    for n in range(1, args.steps + 1):
        try:
            s = S_truncated(s, args.eps, boundary, cfg)
        except DomainError:
            stop = "domain"
            break
        rows.append((n, s.E, s.t, H_in(s, boundary), H_out(s, boundary)))
    trace = write_csv(_path(args, "scatter_trace.csv"), ["n", "E", "t", "H_in", "H_out"], rows)
    levels = np.linspace(5.0, 50.0, 10)
    lv = write_csv(_path(args, "scatter_levels.csv"), ["H_out", "t", "E"],
                   _level_rows(levels, lambda H, tt: level_curve_out(H, tt, boundary), args.grid))
    _finish(args, boundary, {"E": args.E, "t": args.t, "eps": args.eps, "steps": args.steps,
                             "grid": args.grid}, [trace, lv], {"stopped_by": stop, "steps_taken": len(rows) - 1})
    return 0


def cmd_melnikov(args, boundary):
    cfg = SplittingConfig(args.eps, boundary.delta)
    times = [args.t] if args.t is not None else list(np.arange(args.grid) / args.grid)
    speeds = [float(x) for x in args.v.split(",")]
    rows = []
    for t in times:
        h = hyperbolic_data(*boundary.semi_axes(t)[0:3:2]).h
        tau = np.arange(args.grid) * (h / args.grid)
        for v in speeds:
            f, g, j = melnikov.fgj(tau, t, boundary)
            m1 = f * g / v
            d = cfg.eps * f * g / (cfg.delta * v) + j
            rows.extend((float(tk), float(t), v, float(a), float(b), float(c)) for tk, a, b, c in zip(tau, m1, j, d))
    out = write_csv(_path(args, "melnikov.csv"), ["tau", "t", "v", "M1", "M2", "dbar"], rows)
    summary = {"max_abs_M1": max(abs(r[3]) for r in rows)}
    if args.t is not None:
        crit = accelerator.critical_times(boundary)
        t_star = min((c[0] for c in crit), key=lambda c: min(abs(c - args.t), 1 - abs(c - args.t)))
        h = hyperbolic_data(*boundary.semi_axes(t_star)[0:3:2]).h
        tau = np.arange(args.grid) * (h / args.grid)
        at_star = max(float(np.max(np.abs(melnikov.M1_closed(tau, t_star, v, boundary)))) for v in speeds)
        scale = max(float(np.max(4 * boundary.semi_axes(t_star).b * melnikov.fgj(tau, t_star, boundary)[1] / v))
                    for v in speeds)
        summary.update({"nearest_critical_time": t_star, "max_abs_M1_at_critical_time": at_star,
                        "tolerance": 1e-10 * scale})
        print(f"nearest critical time t* = {t_star:.10f}; max|M1| there = {at_star:.3e} "
              f"(tolerance {1e-10 * scale:.3e})")
    _finish(args, boundary, {"t": args.t, "v": speeds, "eps": args.eps, "grid": args.grid}, [out], summary)
    return 0


def cmd_domain(args, boundary):
    cfg = SplittingConfig(args.eps, boundary.delta)
    t = np.arange(args.grid) / args.grid
    thresholds = np.array([melnikov.domain_threshold(float(tk), cfg.delta, boundary) for tk in t])
    curve = write_csv(_path(args, "domain_curve.csv"), ["t", "threshold_sq"],
                      [(float(tk), float(th * th)) for tk, th in zip(t, thresholds)])
    floor = cfg.floor_C / abs(cfg.delta)
    energies = np.linspace(floor, 1.5 * float(np.max(thresholds)) ** 2, args.grid)
    rows = []
    for tk in t:
        for Ecal in energies:
            rows.append((float(Ecal), float(tk), melnikov.in_domain(float(Ecal), float(tk), cfg, boundary).value))
    grid = write_csv(_path(args, "domain_grid.csv"), ["Ecal", "t", "status"], rows)
    summary = {"max_threshold_sq": float(np.max(thresholds) ** 2), "min_threshold_sq": float(np.min(thresholds) ** 2)}
    _finish(args, boundary, {"eps": args.eps, "grid": args.grid, "margin_k": cfg.margin_k,
                             "floor_C": cfg.floor_C}, [curve, grid], summary)
    return 0


def cmd_accelerate(args, boundary):
    cfg = SplittingConfig(args.eps, boundary.delta)
    result = accelerator.run_ifs(CylinderState(args.E, args.t), args.cycles, cfg, boundary)
    cycles = result.itinerary.cycles
    it = write_csv(_path(args, "itinerary.csv"),
                   ["cycle", "n_inner", "n_scatter", "H_in_before", "H_in_after", "gain", "aborted"],
                   [(k, c.n_inner, c.n_scatter, c.H_in_before, c.H_in_after, c.gain, c.aborted)
                    for k, c in enumerate(cycles)])
    tr = write_csv(_path(args, "trace.csv"), ["step", "map", "E", "t", "H_in", "H_out", "Ecal"],
                   [(r.step, r.tag, r.E, r.t, r.H_in, r.H_out, r.Ecal) for r in result.trace])
    summary = {"energy_ratio": result.final.E / args.E, "all_gains_positive": all(c.gain > 0 for c in cycles)}
    print(f"{len(cycles)} cycles, final/initial energy = {summary['energy_ratio']:.6g}")
    _finish(args, boundary, {"E": args.E, "t": args.t, "eps": args.eps, "cycles": args.cycles}, [it, tr], summary)
    return 0


def cmd_selftest(args, boundary):
    results = run_checks()
    print(format_table(results))
    return 0 if all(r.passed for r in results) else 3


def build_parser():
    parser = _Parser(prog="fermi-ellipse", description="Time-dependent elliptic billiard experiments.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="boundary configuration file (default: a = 5 + sin 2 pi t, b = 2 - cos 2 pi t)")
    common.add_argument("--eps", type=float, default=1e-3, help="slow-fast scaling parameter")
    common.add_argument("--delta", type=float, help="override the quartic deformation strength")
    common.add_argument("--seed", type=int, default=0, help="seed for randomly drawn initial data")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--grid", type=int, default=64, help="grid resolution")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="iterate the full billiard map")
    p.add_argument("--phi", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inner", parents=[common], help="inner-map orbit and H_in level curves")
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=10000)
    p.set_defaults(func=cmd_inner)

    p = sub.add_parser("scatter", parents=[common], help="scattering-map trace and H_out level curves")
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("melnikov", parents=[common], help="grids of M1, M2 and the splitting function")
    p.add_argument("--t", type=float, help="single time (default: a grid over one period)")
    p.add_argument("--v", default="0.5,1,2", help="comma-separated speeds sqrt(2E)")
    p.set_defaults(func=cmd_melnikov)

    p = sub.add_parser("domain", parents=[common], help="scattering-domain boundary and classification grid")
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("accelerate", parents=[common], help="run the inner/scattering iterated system")
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.05)
    p.add_argument("--cycles", type=int, default=5)
    p.set_defaults(func=cmd_accelerate)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in cross-checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        boundary = _boundary(args)
        return args.func(args, boundary)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())
