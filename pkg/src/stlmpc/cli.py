"""Command line interface: simulate, monitor, encode, case-study.

Artifacts are CSV files (exact float formatting, reloadable) plus LP
model exports.  The default output directory comes from the
``STLMPC_OUT`` environment variable, falling back to ``stlmpc_out``.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .casestudy import SCENARIOS, scenario_config
from .config import ProblemConfig, load_config
from .errors import ConfigError, SolveError, TraceTooShortError
from .formula import horizon
from .milp.lp_format import export_lp
from .mpc import ClosedLoopTrace, HistoryBuffer, Planner, run_closed_loop
from .parser import PredicateEnv, parse
from .pnf import to_pnf
from .robustness import robustness_series
from .traces import SignalTrace

__all__ = ["main"]

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _out_dir(arg: str | None) -> Path:
    out = Path(arg or os.environ.get("STLMPC_OUT") or "stlmpc_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace_csv(path, trace: ClosedLoopTrace) -> None:
    n = trace.x.shape[1]
    m = trace.u.shape[1]
    p = trace.y.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t"]
            + [f"x{i + 1}" for i in range(n)]
            + [f"u{j + 1}" for j in range(m)]
            + [f"w{i + 1}" for i in range(n)]
            + [f"y{i + 1}" for i in range(p)]
            + ["zeta", "objective", "status"]
        )
        for t in range(trace.N):
            writer.writerow(
                [t]
                + [_fmt(v) for v in trace.x[t]]
                + [_fmt(v) for v in trace.u[t]]
                + [_fmt(v) for v in trace.w[t]]
                + [_fmt(v) for v in trace.y[t]]
                + [_fmt(trace.zeta[t]), _fmt(trace.objective[t]), trace.status[t]]
            )


def write_robustness_csv(path, rho: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "rho"])
        for t, value in enumerate(rho):
            writer.writerow([t, _fmt(value)])


def _apply_overrides(pc: ProblemConfig, args) -> ProblemConfig:
    changed = {}
    if getattr(args, "seed", None) is not None:
        changed["seed"] = args.seed
    if getattr(args, "d_zero_reduction", False):
        from dataclasses import replace

        changed["controller"] = replace(pc.controller, d_zero_reduction=True)
    if not changed:
        return pc
    from dataclasses import replace

    return replace(pc, **changed)


def _simulate_to(pc: ProblemConfig, out: Path, label: str, lp_export: bool) -> ClosedLoopTrace:
    trace = run_closed_loop(
        pc.model, pc.dist, pc.cset, pc.formula, pc.controller, pc.x0, pc.N,
        seed=pc.seed, solver_cfg=pc.solver,
    )
    write_trace_csv(out / f"{label}_trace.csv", trace)
    write_robustness_csv(out / f"{label}_robustness.csv", trace.rho)
    if lp_export:
        _export_step_models(pc, trace, out, label)
    return trace


def _export_step_models(pc: ProblemConfig, trace: ClosedLoopTrace, out: Path, label: str) -> None:
    """Replay the run and write each step's MILP in LP format."""
    f, outputs = to_pnf(pc.formula, pc.model.output_map)
    model = pc.model.with_outputs(outputs)
    planner = Planner(model, pc.dist, pc.cset, f, pc.controller, pc.solver)
    hist = HistoryBuffer(planner.h_phi + 1)
    for t in range(trace.N):
        grid_start = max(0, t - planner.h_phi)
        milp, _, _ = planner.build_model(trace.x[t], hist.window(grid_start, t - 1), t)
        (out / f"{label}_step_{t:04d}.lp").write_text(export_lp(milp))
        hist.push(trace.y[t])


def cmd_simulate(args) -> int:
    out = _out_dir(args.out)
    pc = _apply_overrides(load_config(args.config), args)
    trace = _simulate_to(pc, out, pc.name, args.lp_export)
    s = trace.summary(pc.controller)
    print(
        f"{pc.name}: {s['steps']} steps, min rho {s['min_rho']:.6g}, "
        f"max zeta {s['max_zeta']:.6g}, total cost {s['total_cost']:.6g}"
    )
    print(f"artifacts in {out}")
    if args.require_satisfaction and (s["violations"] > 0 or s["max_zeta"] > 1e-9):
        print("specification violated", file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_monitor(args) -> int:
    env = PredicateEnv()
    f = parse(args.formula, env)
    trace = SignalTrace.from_csv(args.trace)
    rho = robustness_series(f, trace)
    out = _out_dir(args.out)
    write_robustness_csv(out / "robustness.csv", rho)
    verdict = "satisfied" if (rho >= 0.0).all() else "violated"
    print(f"horizon {horizon(f)}, {rho.size} robustness values, verdict: {verdict}")
    for t, value in enumerate(rho):
        print(f"  rho[{t}] = {value:.12g}")
    if args.require_satisfaction and verdict != "satisfied":
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_encode(args) -> int:
    pc = _apply_overrides(load_config(args.config), args)
    f, outputs = to_pnf(pc.formula, pc.model.output_map)
    model = pc.model.with_outputs(outputs)
    planner = Planner(model, pc.dist, pc.cset, f, pc.controller, pc.solver)
    h = planner.h_phi

    x_t = np.array([float(v) for v in args.state.split(",")])
    rows: list[np.ndarray] = []
    if args.history:
        hist_trace = SignalTrace.from_csv(args.history)
        if hist_trace.p != model.p:
            raise ConfigError(
                f"history has {hist_trace.p} outputs, the model (after PNF) needs {model.p}"
            )
        rows = [hist_trace.values[:, k] for k in range(hist_trace.values.shape[1])]

    if args.startup:
        t = min(len(rows), h) if args.time is None else args.time
        history = {tau: rows[len(rows) - t + tau] for tau in range(max(0, t - h), t)}
    else:
        # steady-state shape: full constraint window regardless of the time
        # label, the missing history padded with zeros
        t = max(args.time if args.time is not None else h, h)
        kept = rows[-h:] if h else []
        if len(kept) < h:
            warnings.warn(
                f"history supplies {len(kept)} of {h} samples; missing entries are zero"
            )
            kept = [np.zeros(model.p)] * (h - len(kept)) + kept
        history = {t - h + k: kept[k] for k in range(h)}

    milp, encoding, _ = planner.build_model(x_t, history, t)
    out = _out_dir(args.out)
    path = out / f"step_{t}.lp"
    path.write_text(export_lp(milp))
    print(
        f"wrote {path}: {milp.num_vars} variables ({len(milp.binary_ids)} binary), "
        f"{len(milp.constraints)} constraints, K={encoding.K:.6g}"
    )
    return EXIT_OK


def cmd_case_study(args) -> int:
    out = _out_dir(args.out)
    series: list[tuple[str, np.ndarray]] = []
    for name in SCENARIOS:
        pc = scenario_config(name)
        if args.seed is not None:
            from dataclasses import replace

            pc = replace(pc, seed=args.seed)
        try:
            trace = _simulate_to(pc, out, name, args.lp_export)
        except SolveError as exc:
            print(f"{name}: solver failure: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        s = trace.summary(pc.controller)
        series.append((name, trace.rho))
        print(
            f"{name}: min rho {s['min_rho']:.6g}, violations {s['violations']}, "
            f"max zeta {s['max_zeta']:.6g}, soft steps {s['soft_steps']}, "
            f"total cost {s['total_cost']:.6g}"
        )
    length = min(len(r) for _, r in series)
    with open(out / "robustness_all.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"rho_{name}" for name, _ in series])
        for t in range(length):
            writer.writerow([t] + [_fmt(r[t]) for _, r in series])
    print(f"artifacts in {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlmpc",
        description="Robust receding-horizon control under signal temporal logic constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a closed-loop scenario from a config file")
    sim.add_argument("--config", required=True, help="problem configuration (JSON)")
    sim.add_argument("--out", help="output directory")
    sim.add_argument("--seed", type=int, help="override the configured seed")
    sim.add_argument("--require-satisfaction", action="store_true",
                     help="exit nonzero when the run violates the specification")
    sim.add_argument("--lp-export", action="store_true", help="write each step's model as .lp")
    sim.add_argument("--d-zero-reduction", action="store_true",
                     help="enable the reduced window/controls when D = 0")
    sim.set_defaults(func=cmd_simulate)

    mon = sub.add_parser("monitor", help="evaluate robustness of a recorded trace")
    mon.add_argument("--formula", required=True, help="formula text, predicates p1..pN")
    mon.add_argument("--trace", required=True, help="trace CSV with header t,y1,...,yp")
    mon.add_argument("--out", help="output directory")
    mon.add_argument("--require-satisfaction", action="store_true")
    mon.set_defaults(func=cmd_monitor)

    enc = sub.add_parser("encode", help="write one step's MILP in LP format")
    enc.add_argument("--config", required=True)
    enc.add_argument("--time", type=int, help="time label of the encoded step")
    enc.add_argument("--state", required=True, help="current state, comma separated")
    enc.add_argument("--history", help="output history CSV (t,y1,...,yp)")
    enc.add_argument("--startup", action="store_true",
                     help="encode the truncated startup window instead of the steady-state shape")
    enc.add_argument("--out", help="output directory")
    enc.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    enc.add_argument("--d-zero-reduction", action="store_true")
    enc.set_defaults(func=cmd_encode)

    cs = sub.add_parser("case-study", help="run the five bundled scenarios")
    cs.add_argument("--out", help="output directory")
    cs.add_argument("--seed", type=int, help="override every scenario's seed")
    cs.add_argument("--lp-export", action="store_true")
    cs.set_defaults(func=cmd_case_study)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TraceTooShortError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolveError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
