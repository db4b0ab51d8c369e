"""Wrench-sweep benchmark: collocation solutions against the shooting reference."""

from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .magnus import MagnusOrder
from .rod import RodProperties, TipWrench
from .solvers import NonConvergenceError, SolverConfig, solve_collocation, solve_shooting
from .spectral import make_grid

CSV_COLUMNS = (
    "case_id", "fx", "fy", "fz", "mx", "my", "mz", "step_index", "n",
    "magnus_order", "e_p_percent", "e_r_deg", "iterations", "time_s", "converged",
)


@dataclass(frozen=True)
class SweepSpec:
    force_levels: tuple[float, ...] = (-1.0, 0.0, 1.0)
    moment_levels: tuple[float, ...] = (-0.5, 0.0, 0.5)
    steps: int = 3
    orders_n: tuple[int, ...] = (2, 4, 6, 8, 10)
    magnus_orders: tuple[MagnusOrder, ...] = (MagnusOrder.FOURTH, MagnusOrder.SIXTH)

    def __post_init__(self):
        if not self.force_levels or not self.moment_levels:
            raise ValueError("level sets must be non-empty")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.orders_n or not self.magnus_orders:
            raise ValueError("need at least one n and one Magnus order")
        object.__setattr__(self, "magnus_orders", tuple(MagnusOrder.parse(o) for o in self.magnus_orders))


@dataclass(frozen=True)
class SweepCase:
    case_id: int
    chain_id: int
    step_index: int
    wrench: tuple[float, ...]
    steps_in_chain: int = 1

    @property
    def is_terminal(self) -> bool:
        return self.step_index == self.steps_in_chain


@dataclass
class CaseResult:
    case_id: int
    wrench: tuple[float, ...]
    step_index: int
    n: int
    magnus_order: int
    e_p_percent: float
    e_r_deg: float
    iterations: int
    time_s: float
    converged: bool

    def row(self) -> dict:
        d = dict(zip(("fx", "fy", "fz", "mx", "my", "mz"), self.wrench))
        return {
            "case_id": self.case_id, **d, "step_index": self.step_index, "n": self.n,
            "magnus_order": self.magnus_order, "e_p_percent": self.e_p_percent,
            "e_r_deg": self.e_r_deg, "iterations": self.iterations,
            "time_s": self.time_s, "converged": self.converged,
        }


@dataclass
class ShootingRecord:
    case_id: int
    iterations: int
    time_s: float
    converged: bool


@dataclass
class BenchmarkReport:
    cases: list[CaseResult] = field(default_factory=list)
    shooting: list[ShootingRecord] = field(default_factory=list)
    aggregates: list[dict] = field(default_factory=list)
    steps: int = 1

    @property
    def all_converged(self) -> bool:
        return all(c.converged for c in self.cases) and all(s.converged for s in self.shooting)

    def aggregate(self, n: int, order, subset: str = "all") -> dict:
        order = MagnusOrder.parse(order).value
        for a in self.aggregates:
            if a["n"] == n and a["magnus_order"] == order and a["subset"] == subset:
                return a
        raise KeyError((n, order, subset))


def generate_sweep(spec: SweepSpec) -> list[SweepCase]:
    """Terminal wrenches in lexicographic axis order, each preceded by its interpolation steps."""
    axes = [spec.force_levels] * 3 + [spec.moment_levels] * 3
    cases = []
    for chain_id, final in enumerate(itertools.product(*axes)):
        final = np.asarray(final, dtype=float)
        for k in range(1, spec.steps + 1):
            w = tuple(float(x) for x in final * (k / spec.steps))
            cases.append(SweepCase(len(cases), chain_id, k, w, spec.steps))
    return cases


def tip_error_metrics(sol_collocation, sol_shooting, L: float, require_converged: bool = True):
    """Tip position error in percent of ``L`` and geodesic rotation error in degrees."""
    if require_converged and not (sol_collocation.converged and sol_shooting.converged):
        raise NonConvergenceError("tip error metrics need converged solutions")
    Tc, Ts = sol_collocation.tip_pose, sol_shooting.tip_pose
    return pose_errors(Tc, Ts, L)


def pose_errors(Tc, Ts, L: float):
    e_p = float(np.linalg.norm(Tc[:3, 3] - Ts[:3, 3]) / L * 100.0)
    cos = (np.trace(Ts[:3, :3] @ Tc[:3, :3].T) - 1.0) / 2.0
    e_r = float(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))
    return e_p, e_r


def _solve_chain(solve, wrenches):
    """Warm-started solves along one interpolation chain; cold restart on failure."""
    out = []
    guess = None
    for w in wrenches:
        sol = solve(w, guess)
        if not sol.converged and guess is not None:
            sol = solve(w, None)
        out.append(sol)
        guess = sol if sol.converged else None
    return out


def _run_chain(args):
    chain, spec, props, config = args
    wrenches = [TipWrench.from_vector(c.wrench) for c in chain]
    shots = _solve_chain(
        lambda w, g: solve_shooting(props, w, config, None if g is None else g.u0, samples=2),
        wrenches,
    )
    shooting = [ShootingRecord(c.case_id, s.iterations, s.wall_time, s.converged) for c, s in zip(chain, shots)]
    # a failed reference aborts the rest of the chain
    usable = len(shots)
    for i, s in enumerate(shots):
        if not s.converged:
            usable = i
            break
    results = []
    for n in spec.orders_n:
        for order in spec.magnus_orders:
            grid = make_grid(n, props.L, order.default_nu)
            sols = _solve_chain(
                lambda w, g: solve_collocation(props, w, grid, order, config, None if g is None else g.U_c),
                wrenches[:usable],
            )
            for i, c in enumerate(chain):
                if i < usable:
                    sol = sols[i]
                    e_p, e_r = pose_errors(sol.tip_pose, shots[i].tip_pose, props.L)
                    results.append(CaseResult(c.case_id, c.wrench, c.step_index, n, order.value,
                                              e_p, e_r, sol.iterations, sol.wall_time, sol.converged))
                else:
                    results.append(CaseResult(c.case_id, c.wrench, c.step_index, n, order.value,
                                              math.nan, math.nan, 0, 0.0, False))
    return shooting, results


def _aggregate(cases: list[CaseResult], steps: int) -> list[dict]:
    out = []
    keys = sorted({(c.n, c.magnus_order) for c in cases})
    for n, order in keys:
        group = [c for c in cases if c.n == n and c.magnus_order == order]
        for subset in ("all", "terminal"):
            sel = group if subset == "all" else [c for c in group if c.step_index == steps]
            ok = [c for c in sel if c.converged]
            e_p = np.array([c.e_p_percent for c in ok])
            e_r = np.array([c.e_r_deg for c in ok])
            t = np.array([c.time_s for c in ok])
            out.append({
                "n": n, "magnus_order": order, "subset": subset,
                "cases": len(sel), "converged": len(ok), "failed": len(sel) - len(ok),
                "avg_e_p_percent": float(e_p.mean()) if ok else math.nan,
                "max_e_p_percent": float(e_p.max()) if ok else math.nan,
                "avg_e_r_deg": float(e_r.mean()) if ok else math.nan,
                "max_e_r_deg": float(e_r.max()) if ok else math.nan,
                "mean_rate_hz": float(1.0 / t.mean()) if ok and t.mean() > 0 else math.nan,
            })
    return out


def run_benchmark(
    spec: SweepSpec | None = None,
    props: RodProperties | None = None,
    config: SolverConfig | None = None,
    jobs: int = 1,
    progress=None,
) -> BenchmarkReport:
    """Solve every sweep case with shooting and with each ``(n, order)`` collocation setup.

    ``jobs > 1`` distributes whole chains over worker processes; timings are
    only comparable with ``jobs == 1``.
    """
    spec = spec or SweepSpec()
    props = props or RodProperties.from_material()
    config = config or SolverConfig()
    cases = generate_sweep(spec)
    chains = [list(g) for _, g in itertools.groupby(cases, key=lambda c: c.chain_id)]
    work = [(chain, spec, props, config) for chain in chains]
    report = BenchmarkReport(steps=spec.steps)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = pool.map(_run_chain, work, chunksize=8)
            for i, out in enumerate(outputs):
                _collect(report, out)
                if progress:
                    progress(i + 1, len(chains))
    else:
        for i, item in enumerate(work):
            _collect(report, _run_chain(item))
            if progress:
                progress(i + 1, len(chains))
    report.cases.sort(key=lambda c: (c.n, c.magnus_order, c.case_id))
    report.aggregates = _aggregate(report.cases, spec.steps)
    return report


def _collect(report, out):
    shooting, results = out
    report.shooting.extend(shooting)
    report.cases.extend(results)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit_report(report: BenchmarkReport, fmt: str, path) -> None:
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for c in report.cases:
                row = c.row()
                writer.writerow([_fmt(row[k]) for k in CSV_COLUMNS])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump(report_to_dict(report), fh, indent=1)
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def _nan_to_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def report_to_dict(report: BenchmarkReport) -> dict:
    return {
        "steps": report.steps,
        "cases": [{k: _nan_to_none(v) for k, v in c.row().items()} for c in report.cases],
        "shooting": [asdict(s) for s in report.shooting],
        "aggregates": [{k: _nan_to_none(v) for k, v in a.items()} for a in report.aggregates],
    }


def _none_to_nan(x):
    return math.nan if x is None else x


def report_from_dict(data: dict) -> BenchmarkReport:
    cases = [
        CaseResult(
            case_id=r["case_id"], wrench=tuple(r[k] for k in ("fx", "fy", "fz", "mx", "my", "mz")),
            step_index=r["step_index"], n=r["n"], magnus_order=r["magnus_order"],
            e_p_percent=_none_to_nan(r["e_p_percent"]), e_r_deg=_none_to_nan(r["e_r_deg"]),
            iterations=r["iterations"], time_s=r["time_s"], converged=r["converged"],
        )
        for r in data["cases"]
    ]
    shooting = [ShootingRecord(**s) for s in data["shooting"]]
    aggregates = [{k: _none_to_nan(v) for k, v in a.items()} for a in data["aggregates"]]
    return BenchmarkReport(cases=cases, shooting=shooting, aggregates=aggregates, steps=data["steps"])


def load_report(path) -> BenchmarkReport:
    with open(path) as fh:
        return report_from_dict(json.load(fh))
