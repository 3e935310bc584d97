"""Command-line entry point: run scenarios, sweep gains, inspect the catalog.

Verbs:
    run <target>       simulate one scenario (config path or catalog name)
    sweep <target>     run a gain sweep and emit a summary table
    catalog            list built-in scenarios
    check              run the structural invariant suites

Outputs land in --out (or $CONVERTER_SIM_OUT): one CSV per run in the
simulator's column format plus a flat metrics JSON per run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, plant
from .catalog import CATALOG, get_entry
from .config import ScenarioConfig, build_scenario, parse_config
from .controller import (
    ControllerState, References, Sigma2Gains, sigma2_control_deployed,
    sigma2_control_oracle,
)
from .errors import ConfigError, ConverterSimError, SimError
from .plant import ControlInput, ConverterParams, PlantState
from .simulator import Scenario, SimResult, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIM = 3
EXIT_IO = 4

EXPERIMENTAL_GAINS = {
    "kappa1": 1.0, "kappa2": 0.5, "kappa3": 10.0, "kappa4": 1.0, "kappa5": 1.8,
}


def _value_tag(v: float) -> str:
    return f"{v:g}".replace(".", "p").replace("-", "m")


def default_transient_cut(sc: Scenario) -> float:
    """Last schedule breakpoint plus ten times the slowest error time constant."""
    slowest = min(
        (sc.params.R2 + sc.g1.kappa1) / sc.params.L2,
        (sc.params.R1 + sc.g2.kappa4) / sc.params.L1,
        sc.g1.kappa2 / sc.params.C2 / 2.0,
    )
    last_bp = 0.0
    for sched in (sc.x2star_schedule, sc.x4star_schedule, sc.il_schedule):
        last_bp = max(last_bp, max(bp for bp, _ in sched))
    return min(last_bp + 10.0 / slowest, 0.5 * (last_bp + sc.horizon))


def scenario_metrics(sc: Scenario, traj: SimResult) -> dict:
    """Flat metrics document for one completed run."""
    cut = default_transient_cut(sc)
    x2star_final = sc.refs_at(sc.horizon).x2star
    x4star_final = sc.refs_at(sc.horizon).x4star
    x2_step_time = max(bp for bp, _ in sc.x2star_schedule)
    x4_step_time = max(bp for bp, _ in sc.x4star_schedule)
    m2 = analysis.response_metrics(traj, "x2", x2star_final, x2_step_time)
    m4 = analysis.response_metrics(traj, "x4", x4star_final, x4_step_time)
    phiM = analysis.phi_sup(traj, x2star_final, sc.params, cut)
    post = traj.t >= cut
    kappa5_min = float(np.min(np.abs(traj.kappa5[post])))
    bound = analysis.ultimate_bound(phiM, kappa5_min, sc.g2, sc.params)
    max_x2_err = float(np.max(np.abs(traj.x2[post] - traj.x2star[post])))
    metrics = {
        "transient_cut_s": cut,
        "x2_settling_time_s": m2.settling_time_2pct,
        "x2_overshoot_pct": m2.overshoot_pct,
        "x2_steady_state_error_v": m2.steady_state_error,
        "x4_settling_time_s": m4.settling_time_2pct,
        "x4_overshoot_pct": m4.overshoot_pct,
        "x4_steady_state_error_v": m4.steady_state_error,
        "phi_sup_a": phiM,
        "kappa5_min_post_transient": kappa5_min,
        "x2_ultimate_bound_v": bound,
        "x2_max_error_post_transient_v": max_x2_err,
        "saturation_fraction_u1": float(np.mean(traj.sat1)),
        "saturation_fraction_u2": float(np.mean(traj.sat2)),
    }
    return metrics


def _load_config(target: str, experimental: bool) -> ScenarioConfig:
    if target in CATALOG:
        cfg = get_entry(target).config
        cfg = ScenarioConfig(
            name=cfg.name, params=dict(cfg.params), gains=dict(cfg.gains),
            schedules=dict(cfg.schedules), sim=dict(cfg.sim),
            x0=dict(cfg.x0) if cfg.x0 else None,
            sweep_gain=cfg.sweep_gain,
            sweep_values=list(cfg.sweep_values) if cfg.sweep_values else None,
        )
    else:
        path = Path(target)
        if not path.exists():
            raise ConfigError(f"'{target}' is neither a catalog entry nor a readable file")
        cfg = parse_config(path.read_text())
    if experimental:
        cfg.params["preset"] = "experimental"
        cfg.gains.update(EXPERIMENTAL_GAINS)
    return cfg


def _out_dir(args) -> Path:
    out = os.environ.get("CONVERTER_SIM_OUT", args.out)
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_one(cfg: ScenarioConfig, out_dir: Path, gain_override=None,
            tag: str | None = None) -> dict:
    sc = build_scenario(cfg, gain_override)
    if tag:
        sc = Scenario(**{**sc.__dict__, "name": f"{cfg.name}.{tag}"})
    traj = simulate(sc)
    metrics = scenario_metrics(sc, traj)
    csv_path = out_dir / f"{sc.name}.csv"
    traj.to_csv(csv_path)
    with open(out_dir / f"{sc.name}.metrics.json", "w") as fh:
        json.dump({sc.name: metrics}, fh, indent=2)
    return metrics


def cmd_run(args) -> int:
    cfg = _load_config(args.target, args.params == "experimental")
    out_dir = _out_dir(args)
    metrics = run_one(cfg, out_dir)
    print(f"{cfg.name}: wrote {out_dir / (cfg.name + '.csv')}")
    for key in ("x4_settling_time_s", "x4_overshoot_pct", "x2_max_error_post_transient_v"):
        print(f"  {key} = {metrics[key]}")
    return EXIT_OK


def _sweep_worker(payload):
    cfg, out_str, gain, value = payload
    metrics = run_one(cfg, Path(out_str), {gain: value},
                      tag=f"{gain}_{_value_tag(value)}")
    return value, metrics


def cmd_sweep(args) -> int:
    cfg = _load_config(args.target, args.params == "experimental")
    gain = args.gain or cfg.sweep_gain
    if gain is None:
        raise ConfigError("no sweep gain given and none baked into the config")
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    elif cfg.sweep_values and gain == cfg.sweep_gain:
        values = cfg.sweep_values
    else:
        raise ConfigError("no sweep values given and none baked into the config")
    out_dir = _out_dir(args)

    payloads = [(cfg, str(out_dir), gain, v) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_worker, payloads))
    else:
        results = [_sweep_worker(p) for p in payloads]

    summary = {
        "scenario": cfg.name,
        "gain": gain,
        "runs": {
            _value_tag(v): {
                "value": v,
                "x4_settling_time_s": m["x4_settling_time_s"],
                "x4_overshoot_pct": m["x4_overshoot_pct"],
                "x4_steady_state_error_v": m["x4_steady_state_error_v"],
                "x2_settling_time_s": m["x2_settling_time_s"],
                "x2_steady_state_error_v": m["x2_steady_state_error_v"],
            }
            for v, m in results
        },
    }
    summary_path = out_dir / f"{cfg.name}.sweep.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"{cfg.name}: swept {gain} over {values}; summary at {summary_path}")
    return EXIT_OK


def cmd_catalog(_args) -> int:
    for name, entry in sorted(CATALOG.items()):
        print(f"{name:8s} {entry.description}")
    return EXIT_OK


def _check_structural(rng) -> list[tuple[str, bool, str]]:
    p = ConverterParams()
    results = []

    worst_skew = 0.0
    worst_pb = 0.0
    worst_ph = 0.0
    infeasible_ok = True
    for _ in range(10_000):
        u = ControlInput(*rng.uniform(0.0, 1.0, 2))
        x = PlantState(*rng.uniform(-100.0, 100.0, 5))
        il = float(rng.uniform(-20.0, 20.0))
        f = plant.ph_matrices(u, p)
        worst_skew = max(worst_skew, float(np.max(np.abs(f.J + f.J.T))))
        xdot = np.array(plant.derivative(x, u, il, p))
        scale = max(1.0, float(np.abs(x.as_array() @ f.Q @ xdot)))
        worst_pb = max(worst_pb, abs(plant.power_balance_residual(x, u, il, p)) / scale)
        ph = plant.derivative_ph(x, u, il, p)
        worst_ph = max(worst_ph, float(np.max(np.abs(xdot - ph)))
                       / max(1.0, float(np.max(np.abs(xdot)))))
    for _ in range(1000):
        feas = plant.equilibrium_feasibility(
            float(rng.uniform(1.0, 200.0)), float(rng.uniform(1.0, 200.0)),
            float(rng.uniform(0.0, 20.0)), p)
        infeasible_ok &= not feas.feasible
    results.append(("J skew-symmetry exact", worst_skew == 0.0, f"max |J+J'| = {worst_skew:g}"))
    results.append(("power balance residual <= 1e-9 rel", worst_pb <= 1e-9,
                    f"worst = {worst_pb:.3g}"))
    results.append(("vector field matches pH form <= 1e-12 rel", worst_ph <= 1e-12,
                    f"worst = {worst_ph:.3g}"))
    results.append(("equilibria infeasible for IL >= 0", infeasible_ok, ""))

    from .controller import Sigma1Gains
    hurwitz_ok = True
    for _ in range(100):
        g1 = Sigma1Gains(*np.exp(rng.uniform(np.log(0.01), np.log(1000.0), 3)))
        hurwitz_ok &= analysis.hurwitz(analysis.sigma1_error_matrix(g1, p))
    results.append(("Hurwitz certificate on random positive gains", hurwitz_ok, ""))

    margin = analysis.spr_margin(p)
    results.append(("SPR margin positive on default grid", margin.min_real_part > 0.0,
                    f"min Re = {margin.min_real_part:.3g} at w = {margin.argmin_omega:.3g}"))

    g2 = Sigma2Gains()
    worst_eq = 0.0
    n_ok = 0
    while n_ok < 1000:
        x = PlantState(
            x1=float(rng.uniform(0.5, 40.0)),
            x2=float(rng.uniform(50.0, 150.0)),
            x3=float(rng.uniform(-20.0, 20.0)),
            x4=float(rng.uniform(20.0, 80.0)),
            x5=float(rng.uniform(10.0, 90.0)),
        )
        kappa5 = max(1.8, (p.C1 / p.L1) * x.x2 / g2.x1_max + g2.epsilon)
        if abs(x.x2 - p.L1 * kappa5 * x.x1 / p.C1) < 2.0:
            continue
        cs = ControllerState(x3ref=x.x3, x1ref=float(rng.uniform(-10.0, 10.0)))
        u2 = float(rng.uniform(0.05, 0.95))
        u1_closed, _ = sigma2_control_deployed(x, cs, u2, kappa5, g2, p)
        u1_fp = sigma2_control_oracle(x, cs, u2, kappa5, g2, p)
        worst_eq = max(worst_eq, abs(u1_closed - u1_fp) / max(1.0, abs(u1_closed)))
        n_ok += 1
    results.append(("deployed/derivative duty-law agreement <= 1e-9", worst_eq <= 1e-9,
                    f"worst = {worst_eq:.3g}"))
    return results


def cmd_check(_args) -> int:
    rng = np.random.default_rng(0)
    results = _check_structural(rng)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        failed += not ok
    return EXIT_OK if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="converter-sim",
        description="Bidirectional buck+boost converter simulation and verification",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(sp):
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--params", choices=["table1", "experimental"],
                        default="table1", help="parameter/gain preset")

    sp_run = sub.add_parser("run", help="simulate one scenario")
    sp_run.add_argument("target", help="config path or catalog entry name")
    add_common(sp_run)
    sp_run.set_defaults(func=cmd_run)

    sp_sweep = sub.add_parser("sweep", help="run a gain sweep")
    sp_sweep.add_argument("target", help="config path or catalog entry name")
    sp_sweep.add_argument("--gain", default=None, help="gain to sweep (kappa1..kappa5)")
    sp_sweep.add_argument("--values", default=None, help="comma-separated sweep values")
    sp_sweep.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    add_common(sp_sweep)
    sp_sweep.set_defaults(func=cmd_sweep)

    sp_cat = sub.add_parser("catalog", help="list built-in scenarios")
    sp_cat.set_defaults(func=cmd_catalog)

    sp_check = sub.add_parser("check", help="run structural invariant suites")
    sp_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIM
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConverterSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
