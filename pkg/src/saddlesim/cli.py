"""Experiment runner: scenario generation, simulation, offline solve, report.

Subcommands
-----------
generate   draw a viable shepherd scenario and write it as JSON
simulate   run a controller over a scenario; writes trajectory.csv + metrics.json
offline    solve the clairvoyant fixed-action problem; writes offline.json
report     render SVG figures and a PASS/FAIL summary from result directories

Exit codes: 0 success, 2 usage error, 3 numeric divergence,
4 infeasible or inconclusive viability.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import metrics, shepherd, svgplot
from .dynamics import ControllerConfig, DivergenceError, TrajectoryLog, simulate
from .offline import (
    InconclusiveViabilityError,
    InfeasibleEnvironmentError,
    OfflineSolution,
    TimeGrid,
    solve_offline,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3
EXIT_INFEASIBLE = 4

CONFIG_VERSION = 1
OBJECTIVE_NAMES = {"none": "none", "blacksheep": "black_sheep", "minaccel": "min_acceleration"}
MODE_NAMES = ("gradient", "feasibility", "saddle")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------

def _fmt_float(v: float) -> str:
    # repr gives the shortest decimal that round-trips
    return repr(float(v))


def write_trajectory_csv(path, log: TrajectoryLog) -> None:
    """Schema: t, x_0..x_{n-1}, lambda_0..lambda_{m-1}, f_0val, f_1..f_m,
    fit_1..fit_m, cost_accum."""
    n = log.x.shape[1]
    m_lam = log.lam.shape[1]
    m = log.f.shape[1]
    header = (
        ["t"]
        + [f"x_{i}" for i in range(n)]
        + [f"lambda_{i}" for i in range(m_lam)]
        + ["f_0val"]
        + [f"f_{i}" for i in range(1, m + 1)]
        + [f"fit_{i}" for i in range(1, m + 1)]
        + ["cost_accum"]
    )
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(log.t.shape[0]):
            row = (
                [log.t[k]]
                + list(log.x[k])
                + list(log.lam[k])
                + [log.f0[k]]
                + list(log.f[k])
                + list(log.fit_accum[k])
                + [log.cost_accum[k]]
            )
            fh.write(",".join(_fmt_float(v) for v in row) + "\n")


def offline_to_dict(sol: OfflineSolution, objective: str) -> dict:
    return {
        "version": CONFIG_VERSION,
        "objective": objective,
        "xstar": sol.xstar.tolist(),
        "offline_cost": sol.offline_cost,
        "xdagger": sol.xdagger.tolist(),
        "viability_residual": sol.viability_residual,
        "K": sol.K,
        "grid": {"T": sol.grid.T, "num_steps": sol.grid.num_steps},
        "cost_cumulative": sol.cost_cumulative.tolist(),
        "diagnostics": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                        for k, v in sol.diagnostics.items()},
    }


def offline_from_dict(d: dict) -> OfflineSolution:
    grid = TimeGrid(T=float(d["grid"]["T"]), num_steps=int(d["grid"]["num_steps"]))
    return OfflineSolution(
        xstar=np.asarray(d["xstar"], dtype=float),
        offline_cost=float(d["offline_cost"]),
        xdagger=np.asarray(d["xdagger"], dtype=float),
        viability_residual=float(d["viability_residual"]),
        K=float(d["K"]),
        grid=grid,
        cost_cumulative=np.asarray(d["cost_cumulative"], dtype=float),
        diagnostics=dict(d.get("diagnostics", {})),
    )


_CONFIG_KEYS = {
    "version", "scenario", "mode", "epsilon", "step", "horizon", "delta",
    "objective", "out", "sweep", "stride", "offline",
}


def load_experiment_config(path) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("experiment config must be a JSON object")
    if cfg.get("version") != CONFIG_VERSION:
        raise UsageError(f"unsupported config version {cfg.get('version')!r}")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return cfg


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    scenario = shepherd.generate_sheep_paths(
        seed=args.seed,
        m=args.m,
        T=args.horizon,
        radius=args.radius,
        n=args.n,
        n_sheep=args.n_sheep,
        basis=args.basis,
        L=args.waypoints,
        offset_box=args.offset,
        noise_std=args.sigma,
        noise_cells=args.noise_cells,
        action_half=args.action_half,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    shepherd.save_scenario(scenario, out)
    print(
        f"scenario seed={scenario.seed} draws={scenario.draws} "
        f"viability_residual={scenario.viability_residual:.6g} -> {out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _run_metrics_dict(log: TrajectoryLog, scenario, delta, objective, mode,
                      scenario_path, offline_sol, offline_path) -> dict:
    fit_vec = metrics.fit(log)
    R = scenario.action_set().norm_bound()
    x0 = log.x[0]
    lam0 = log.lam[0] if log.lam.shape[1] else np.zeros(scenario.m)
    bounds = [
        metrics.fit_bound(log.config.epsilon, x0, lam0, scenario.xdagger, i)
        for i in range(scenario.m)
    ]
    out = {
        "version": CONFIG_VERSION,
        "scenario_file": str(scenario_path) if scenario_path else None,
        "scenario_seed": scenario.seed,
        "mode": mode,
        "objective": objective,
        "epsilon": log.config.epsilon,
        "h": log.h_eff,
        "T": log.T,
        "delta": delta,
        "sample_stride": None,
        "fit": fit_vec.tolist(),
        "fit_final_accum": log.final_fit.tolist(),
        "clipped_fit_norm": metrics.clipped_fit_norm(fit_vec),
        "cost": log.final_cost,
        "fit_bounds": bounds,
        "multiplier_bound": metrics.multiplier_bound(R) if np.isfinite(R) else None,
        "action_norm_radius": R if np.isfinite(R) else None,
        "lambda_max": log.lambda_max.tolist(),
        "max_field_norm": log.max_field_norm,
    }
    if delta is not None:
        out["saturated_fit"] = metrics.saturated_fit(log, delta).tolist()
    if offline_sol is not None:
        rep = metrics.regret(log, offline_sol)
        out["regret"] = {
            "regret": rep.regret,
            "online_cost": rep.online_cost,
            "offline_cost": rep.offline_cost,
            "bound": rep.bound,
            "floor": rep.floor,
            "offline_file": str(offline_path),
        }
    return out


def _simulate_one(scenario, scenario_path, mode, epsilon, step, T, delta,
                  objective, stride, out_dir, offline_sol=None, offline_path=None) -> None:
    env = shepherd.shepherd_env(scenario, objective, noise="frozen")
    if delta is not None:
        env = env.saturate(delta)
    cfg = ControllerConfig(epsilon=epsilon, h=step, mode=mode)
    log = simulate(
        env, cfg, T=T, X=scenario.action_set(), Lam=scenario.multiplier_set(),
        sample_stride=stride, seed=scenario.seed,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out_dir / "trajectory.csv", log)
    md = _run_metrics_dict(log, scenario, delta, objective, mode,
                           scenario_path, offline_sol, offline_path)
    md["sample_stride"] = stride
    with open(out_dir / "metrics.json", "w") as fh:
        json.dump(md, fh, sort_keys=True, indent=1)
        fh.write("\n")


def cmd_simulate(args) -> int:
    cfg = load_experiment_config(args.config) if args.config else {}

    def pick(flag, key, default=None):
        return flag if flag is not None else cfg.get(key, default)

    scenario_src = pick(args.scenario, "scenario")
    mode = pick(args.mode, "mode", "saddle")
    epsilon = float(pick(args.epsilon, "epsilon", 50.0))
    step = float(pick(args.step, "step", 1e-4))
    horizon = pick(args.horizon, "horizon")
    delta = pick(args.delta, "delta")
    objective_flag = pick(args.objective, "objective", "none")
    out = pick(args.out, "out")
    sweep = pick(args.sweep, "sweep")
    stride = int(pick(args.stride, "stride", 10))
    offline_path = pick(args.offline, "offline")

    if mode not in MODE_NAMES:
        raise UsageError(f"mode must be one of {MODE_NAMES}")
    objective = OBJECTIVE_NAMES.get(objective_flag, objective_flag)
    if objective not in shepherd.OBJECTIVES:
        raise UsageError(f"objective must be one of {sorted(OBJECTIVE_NAMES)}")
    if scenario_src is None:
        raise UsageError("a scenario file is required (--scenario or config)")
    if out is None:
        raise UsageError("an output directory is required (--out or config)")

    scenario_path = None
    if isinstance(scenario_src, str):
        scenario_path = Path(scenario_src)
        if not scenario_path.exists():
            raise UsageError(f"scenario file not found: {scenario_path}")
        scenario = shepherd.load_scenario(scenario_path)
    elif isinstance(scenario_src, dict):
        params = dict(scenario_src)
        if "seed" not in params:
            if args.seed is None:
                raise UsageError("inline scenario parameters need a seed (--seed)")
            params["seed"] = args.seed
        scenario = shepherd.generate_sheep_paths(**params)
    else:
        raise UsageError("scenario must be a file path or inline parameter object")

    offline_sol = None
    if offline_path is not None:
        with open(offline_path) as fh:
            offline_sol = offline_from_dict(json.load(fh))

    if sweep:
        horizons = [float(s) for s in str(sweep).split(",") if s.strip()]
        if not horizons:
            raise UsageError("empty sweep list")

        def run_for(T: float):
            sc_T = shepherd.regenerate(scenario, T=T)
            _simulate_one(sc_T, scenario_path, mode, epsilon, step, T, delta,
                          objective, stride, Path(out) / f"T_{T:g}")

        workers = min(len(horizons), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_for, horizons))
    else:
        T = float(horizon) if horizon is not None else scenario.T
        _simulate_one(scenario, scenario_path, mode, epsilon, step, T, delta,
                      objective, stride, out, offline_sol, offline_path)
    print(f"simulation results written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# offline
# ---------------------------------------------------------------------------

def cmd_offline(args) -> int:
    objective = OBJECTIVE_NAMES.get(args.objective, args.objective)
    if objective == "none":
        raise UsageError("the offline solve needs an objective (blacksheep or minaccel)")
    scenario = shepherd.load_scenario(args.scenario)
    env = shepherd.shepherd_env(scenario, objective, noise="mean")
    sol = solve_offline(
        env, scenario.offline_grid(), scenario.action_set(),
        viability=shepherd.viability_certificate(scenario),
        max_iter=args.max_iter,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(offline_to_dict(sol, objective), fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"offline cost={sol.offline_cost:.6g} K={sol.K:.6g} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _cols(header, prefix):
    return [i for i, name in enumerate(header) if name.startswith(prefix)]


def _check_run(run_dir: Path, md: dict, header, data) -> list[str]:
    """PASS/FAIL lines recomputed from the CSV series."""
    lines = []
    slack = metrics.slack(
        max((abs(b) for b in md["fit_bounds"]), default=0.0),
        md["h"], md["T"], md["max_field_norm"],
    )
    fit_idx = _cols(header, "fit_")
    fit_series = data[:, fit_idx]
    bounds = np.asarray(md["fit_bounds"])
    ok = bool(np.all(fit_series <= bounds[None, :] + slack))
    lines.append(f"fit<=bound+slack: {'PASS' if ok else 'FAIL'} "
                 f"(max fit {fit_series.max():.4g}, max bound {bounds.max():.4g}, slack {slack:.4g})")
    lam_idx = _cols(header, "lambda_")
    if lam_idx and md.get("multiplier_bound") is not None:
        lam = data[:, lam_idx]
        ok = bool(np.all(lam >= -1e-12) and np.all(lam <= md["multiplier_bound"]))
        lines.append(f"multipliers in [0, 4R^2+1]: {'PASS' if ok else 'FAIL'} "
                     f"(max {lam.max():.4g} vs {md['multiplier_bound']:.4g})")
    if md.get("delta") is not None:
        f_idx = _cols(header, "f_")
        f_idx = [i for i in f_idx if header[i] != "f_0val" and not header[i].startswith("fit_")]
        fv = data[:, f_idx]
        ok = bool(np.all(fv >= -md["delta"] - 1e-9))
        lines.append(f"saturated values >= -delta: {'PASS' if ok else 'FAIL'} (min {fv.min():.4g})")
    if "regret" in md:
        r = md["regret"]
        sl = metrics.slack(r["bound"], md["h"], md["T"], md["max_field_norm"])
        ok = r["regret"] <= r["bound"] + sl
        lines.append(f"regret<=bound+slack: {'PASS' if ok else 'FAIL'} "
                     f"({r['regret']:.4g} vs {r['bound']:.4g}+{sl:.4g})")
    return lines


def _render_run_figures(run_dir: Path, md: dict, header, data, out_dir: Path) -> list[str]:
    missing = []
    t = data[:, header.index("t")]
    fit_idx = _cols(header, "fit_")
    svgplot.write_plot(
        out_dir / "fit_vs_t.svg",
        [svgplot.Series(x=t.tolist(), y=data[:, i].tolist(), label=header[i]) for i in fit_idx],
        "Fit components along the trajectory", "t", "fit",
    )
    lam_idx = _cols(header, "lambda_")
    if lam_idx:
        svgplot.write_plot(
            out_dir / "lambda_vs_t.svg",
            [svgplot.Series(x=t.tolist(), y=data[:, i].tolist(), label=header[i]) for i in lam_idx],
            "Multipliers along the trajectory", "t", "lambda",
        )
    else:
        missing.append("lambda_vs_t (no multiplier columns)")

    scn_file = md.get("scenario_file")
    if scn_file and Path(scn_file).exists():
        scenario = shepherd.load_scenario(scn_file)
        x_idx = _cols(header, "x_")
        series = []
        Y = shepherd.sheep_positions(scenario, t)
        for i in range(scenario.m):
            series.append(svgplot.Series(
                x=Y[:, i, 0].tolist(), y=Y[:, i, 1].tolist(),
                label=f"sheep {i + 1}", color=svgplot.PALETTE[(i + 2) % len(svgplot.PALETTE)],
            ))
        P, _, _ = shepherd.basis_matrices(scenario.basis, scenario.n, t, scenario.T)
        xs = data[:, x_idx]
        z1 = np.einsum("kj,kj->k", P, xs[:, :scenario.n])
        z2 = np.einsum("kj,kj->k", P, xs[:, scenario.n:])
        series.append(svgplot.Series(x=z1.tolist(), y=z2.tolist(),
                                     label="shepherd", color="#d62728"))
        svgplot.write_plot(out_dir / "path_overlay.svg", series,
                           "Shepherd and sheep paths", "z1", "z2")
    else:
        missing.append("path_overlay (scenario file unavailable)")

    reg = md.get("regret")
    if reg and reg.get("offline_file") and Path(reg["offline_file"]).exists():
        with open(reg["offline_file"]) as fh:
            sol = offline_from_dict(json.load(fh))
        nodes = sol.grid.nodes()
        offline_cum = np.interp(t, nodes, sol.cost_cumulative)
        cost = data[:, header.index("cost_accum")]
        svgplot.write_plot(
            out_dir / "regret_vs_t.svg",
            [svgplot.Series(x=t.tolist(), y=(cost - offline_cum).tolist(), label="regret")],
            "Regret along the trajectory", "t", "regret",
        )
    else:
        missing.append("regret_vs_t (offline solution unavailable)")
    return missing


def _sweep_trend_table(summaries) -> list[str]:
    """Fit growth across a horizon sweep: clipped norm against sqrt(T)."""
    rows = sorted(summaries, key=lambda s: s["T"])
    lines = ["horizon sweep trend (clipped fit norm vs sqrt(T)):",
             f"   {'T':>8} {'max fit':>12} {'clipped norm':>13} {'norm/sqrt(T)':>13}"]
    for s in rows:
        ratio = s["clipped"] / np.sqrt(s["T"])
        lines.append(f"   {s['T']:>8g} {s['max_fit']:>12.4g} {s['clipped']:>13.4g} {ratio:>13.4g}")
    return lines


def cmd_report(args) -> int:
    results = Path(args.results)
    run_dirs = sorted(
        {p.parent for p in results.rglob("metrics.json") if (p.parent / "trajectory.csv").exists()}
    )
    if not run_dirs:
        print("no results found", file=sys.stderr)
        return EXIT_USAGE
    all_ok = True
    sweeps: dict = {}
    for run_dir in run_dirs:
        with open(run_dir / "metrics.json") as fh:
            md = json.load(fh)
        header, data = _read_csv(run_dir / "trajectory.csv")
        out_dir = Path(args.out) / run_dir.name if args.out else run_dir
        out_dir.mkdir(parents=True, exist_ok=True)
        checks = _check_run(run_dir, md, header, data)
        missing = _render_run_figures(run_dir, md, header, data, out_dir)
        print(f"== {run_dir}")
        print(f"   mode={md['mode']} objective={md['objective']} eps={md['epsilon']} "
              f"T={md['T']} h={md['h']:g}")
        for line in checks:
            all_ok = all_ok and ("FAIL" not in line)
            print(f"   {line}")
        for name in missing:
            print(f"   missing: {name}")
        if run_dir.name.startswith("T_"):
            sweeps.setdefault(run_dir.parent, []).append({
                "T": md["T"],
                "max_fit": max(md["fit"]),
                "clipped": md["clipped_fit_norm"],
            })
    for parent, summaries in sorted(sweeps.items()):
        if len(summaries) > 1:
            print(f"== {parent}")
            for line in _sweep_trend_table(summaries):
                print(f"   {line}")
    print("report: " + ("all checks PASS" if all_ok else "some checks FAILED"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="saddlesim", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="draw a viable shepherd scenario")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--m", type=int, default=5)
    g.add_argument("--horizon", type=float, default=1.0)
    g.add_argument("--radius", type=float, default=0.3)
    g.add_argument("--n", type=int, default=30)
    g.add_argument("--n-sheep", type=int, default=None)
    g.add_argument("--basis", choices=shepherd.BASIS_KINDS, default="legendre")
    g.add_argument("--waypoints", type=int, default=3, help="intermediate waypoint count")
    g.add_argument("--offset", type=float, default=0.1)
    g.add_argument("--sigma", type=float, default=0.1)
    g.add_argument("--noise-cells", type=int, default=1000)
    g.add_argument("--action-half", type=float, default=5.0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="run a controller over a scenario")
    s.add_argument("--config", default=None, help="experiment config JSON")
    s.add_argument("--scenario", default=None)
    s.add_argument("--mode", choices=MODE_NAMES, default=None)
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--step", type=float, default=None)
    s.add_argument("--horizon", type=float, default=None)
    s.add_argument("--delta", type=float, default=None)
    s.add_argument("--objective", choices=sorted(OBJECTIVE_NAMES), default=None)
    s.add_argument("--seed", type=int, default=None, help="echoed into outputs")
    s.add_argument("--out", default=None)
    s.add_argument("--sweep", default=None, help='horizon list, e.g. "0.5,1,2"')
    s.add_argument("--stride", type=int, default=None)
    s.add_argument("--offline", default=None, help="offline.json for regret")
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("offline", help="clairvoyant fixed-action solve")
    o.add_argument("--scenario", required=True)
    o.add_argument("--objective", choices=sorted(OBJECTIVE_NAMES), required=True)
    o.add_argument("--max-iter", type=int, default=4000)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_offline)

    r = sub.add_parser("report", help="summarize results and render figures")
    r.add_argument("--results", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (InconclusiveViabilityError, InfeasibleEnvironmentError,
            shepherd.GeneratorError) as exc:
        print(f"viability: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
