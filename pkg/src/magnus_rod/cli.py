"""Command line entry point: ``magnus-rod {solve,sweep,bounds,grid}``.

Every flag can also be given in a flat ``key = value`` config file passed with
``--config``; keys are the flag names without dashes (``E``, ``radius``,
``force-levels`` ...). Flags on the command line override the file.
Exit status is 0 on success, 1 if any solve failed to converge, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .bench import SweepSpec, emit_report, pose_errors, run_benchmark
from .magnus import MagnusOrder, check_convergence_bound, max_step
from .rod import NITINOL_E, NITINOL_POISSON, RodProperties, TipWrench, strain_limited_curvature
from .solvers import SolverConfig, evaluate_solution, solve_collocation, solve_shooting
from .spectral import make_grid


def read_config(path) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _rod_args(p):
    p.add_argument("--L", type=float, default=0.2, help="rod length [m]")
    p.add_argument("--radius", type=float, default=1e-3, help="rod radius [m]")
    p.add_argument("--E", type=float, default=NITINOL_E, help="Young's modulus [Pa]")
    p.add_argument("--poisson", type=float, default=NITINOL_POISSON, help="Poisson ratio")
    p.add_argument("--tolerance", type=float, default=1e-9, help="residual tolerance")
    p.add_argument("--max-iterations", type=int, default=200)


def _order_args(p, many=False):
    if many:
        p.add_argument("--n-list", type=_ints, default=(2, 4, 6, 8, 10))
        p.add_argument("--orders", type=_ints, default=(4, 6), help="Magnus orders, 4 and/or 6")
    else:
        p.add_argument("--n", type=int, default=10, help="collocation polynomial order")
        p.add_argument("--order", type=int, choices=(4, 6), default=6, help="Magnus order")
        p.add_argument("--nu", type=int, choices=(2, 3), default=None,
                       help="quadrature points per segment (default: 2 for order 4, 3 for order 6)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magnus-rod", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file with defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one tip wrench")
    _rod_args(p)
    _order_args(p)
    for k in ("fx", "fy", "fz"):
        p.add_argument(f"--{k}", type=float, default=0.0, help="tip force, world frame [N]")
    for k in ("mx", "my", "mz"):
        p.add_argument(f"--{k}", type=float, default=0.0, help="tip moment, world frame [N m]")
    p.add_argument("--compare-shooting", action="store_true", help="also solve by shooting and report tip errors")
    p.add_argument("--shape-out", help="write shape samples (s, x, y, z, u_x, u_y, u_z) as CSV")
    p.add_argument("--samples", type=int, default=101)

    p = sub.add_parser("sweep", help="run the wrench-sweep benchmark")
    _rod_args(p)
    _order_args(p, many=True)
    p.add_argument("--force-levels", type=_floats, default=(-1.0, 0.0, 1.0))
    p.add_argument("--moment-levels", type=_floats, default=(-0.5, 0.0, 0.5))
    p.add_argument("--steps", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1, help="worker processes; use 1 for timing")
    p.add_argument("--output", help="report path")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("bounds", help="Magnus convergence step bounds and grid spacings")
    p.add_argument("--L", type=float, default=0.2)
    p.add_argument("--strain", type=float, default=0.05)
    p.add_argument("--radii", type=_floats, default=(1e-3, 2e-3, 3e-3, 4e-3))
    p.add_argument("--n-list", type=_ints, default=(2, 4, 6, 8, 10))
    p.add_argument("--radius", type=float, default=1e-3, help="radius used to flag grid segments")

    p = sub.add_parser("grid", help="dump collocation operators as JSON")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--L", type=float, default=0.2)
    p.add_argument("--nu", type=int, choices=(2, 3), default=3)
    p.add_argument("--output", help="file path (default stdout)")
    return parser


def _apply_config(parser, values: dict[str, str]) -> None:
    subparsers = parser._subparsers._group_actions[0].choices.values()
    known = {"config"}
    for sub in subparsers:
        defaults = {}
        for action in sub._actions:
            known.add(action.dest)
            if action.dest not in values:
                continue
            value = values[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = value.lower() in ("1", "true", "yes", "on")
            else:
                # argparse runs string defaults through the action's type converter
                defaults[action.dest] = value
        sub.set_defaults(**defaults)
    unknown = sorted(set(values) - known)
    if unknown:
        parser.error(f"unknown config key(s): {', '.join(unknown)}")


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            values = read_config(known.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        _apply_config(parser, values)
    return parser.parse_args(argv)


def _props(args) -> RodProperties:
    return RodProperties.from_material(L=args.L, radius=args.radius, E=args.E, poisson=args.poisson)


def _config(args) -> SolverConfig:
    return SolverConfig(residual_tolerance=args.tolerance, max_iterations=args.max_iterations)


def _print_pose(label, T):
    p = T[:3, 3]
    print(f"{label} position [m]: {p[0]:.12g} {p[1]:.12g} {p[2]:.12g}")
    for row in T[:3, :3]:
        print(f"{label} rotation     : {row[0]: .12f} {row[1]: .12f} {row[2]: .12f}")


def cmd_solve(args) -> int:
    props = _props(args)
    config = _config(args)
    order = MagnusOrder.parse(args.order)
    grid = make_grid(args.n, props.L, args.nu or order.default_nu)
    wrench = TipWrench([args.fx, args.fy, args.fz], [args.mx, args.my, args.mz])
    sol = solve_collocation(props, wrench, grid, order, config)
    report = check_convergence_bound(grid, float(np.max(np.abs(sol.U_c))))
    print(f"collocation n={args.n} order={order.value}: converged={sol.converged} "
          f"iterations={sol.iterations} residual={sol.residual_norm:.3e} time={sol.wall_time:.4f}s")
    if not report.ok:
        print(f"note: {int(report.flagged.sum())} segment(s) exceed the Magnus convergence step "
              f"{report.h_max * 1e3:.2f} mm for the solved curvature")
    _print_pose("tip", sol.tip_pose)
    ok = sol.converged
    if args.compare_shooting:
        ref = solve_shooting(props, wrench, config)
        e_p, e_r = pose_errors(sol.tip_pose, ref.tip_pose, props.L)
        print(f"shooting: converged={ref.converged} iterations={ref.iterations} time={ref.wall_time:.4f}s")
        print(f"e_p = {e_p:.6g} %  e_r = {e_r:.6g} deg")
        ok = ok and ref.converged
    if args.shape_out:
        with open(args.shape_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x", "y", "z", "u_x", "u_y", "u_z"])
            for s in np.linspace(0.0, props.L, args.samples):
                T, u = evaluate_solution(sol, float(s))
                w.writerow([format(float(v), ".17g") for v in (s, *T[:3, 3], *u)])
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        force_levels=args.force_levels, moment_levels=args.moment_levels, steps=args.steps,
        orders_n=args.n_list, magnus_orders=tuple(MagnusOrder.parse(o) for o in args.orders),
    )
    report = run_benchmark(spec, _props(args), _config(args), jobs=args.jobs)
    if args.output:
        emit_report(report, args.format, args.output)
    print(f"{'n':>3} {'order':>5} {'subset':>8} {'avg e_p %':>11} {'max e_p %':>11} "
          f"{'avg e_r deg':>12} {'max e_r deg':>12} {'Hz':>8} {'failed':>6}")
    for a in report.aggregates:
        print(f"{a['n']:>3} {a['magnus_order']:>5} {a['subset']:>8} {a['avg_e_p_percent']:11.3g} "
              f"{a['max_e_p_percent']:11.3g} {a['avg_e_r_deg']:12.3g} {a['max_e_r_deg']:12.3g} "
              f"{a['mean_rate_hz']:8.1f} {a['failed']:>6}")
    shots = [s.time_s for s in report.shooting if s.converged]
    if shots:
        print(f"shooting mean rate: {1.0 / np.mean(shots):.1f} Hz")
    return 0 if report.all_converged else 1


def cmd_bounds(args) -> int:
    print(f"{'r (mm)':>8} {'beta (1/m)':>11} {'h_max (mm)':>11}")
    for r in args.radii:
        beta = strain_limited_curvature(r, args.strain)
        print(f"{r * 1e3:8.3g} {beta:11.4g} {max_step(beta) * 1e3:11.2f}")
    beta = strain_limited_curvature(args.radius, args.strain)
    print()
    print(f"{'n':>3} {'max spacing (mm)':>17} {'segments over bound':>20}")
    for n in args.n_list:
        grid = make_grid(n, args.L, 3)
        report = check_convergence_bound(grid, beta)
        print(f"{n:>3} {grid.max_spacing * 1e3:17.2f} {int(report.flagged.sum()):>20}")
    return 0


def cmd_grid(args) -> int:
    grid = make_grid(args.n, args.L, args.nu)
    data = {
        "n": grid.n, "L": grid.L, "nu": grid.nu,
        **{k: getattr(grid, k).tolist() for k in ("c", "q", "D_full", "D_reduced", "A", "B", "boundary_row", "widths")},
    }
    text = json.dumps(data, indent=1)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "bounds": cmd_bounds, "grid": cmd_grid}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"magnus-rod: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
