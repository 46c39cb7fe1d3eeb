"""Command-line interface.

Subcommands:
  validate-config  structural checks + steady-state report for a reference input
  steady-state     steady temperatures for the configured reference input
  simulate         one seeded episode, full trace CSV
  batch            randomized long-horizon batch, summary + scatter + traces
  terrain-suite    stairs/slope traversal trials, outcome histograms
  reward-sweep     thermal weight/reward tabulation over a temperature grid
  layout           observation layout tables (index -> field)

Exit codes: 0 success, 1 configuration error, 2 runtime error. Every run
writes a manifest into the output directory. The default worker count
comes from THERMOQUAD_WORKERS (flag overrides).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    config_checksum,
    dump_config,
    load_default_config,
)
from .errors import ConfigError, ThermoquadError
from .control import layout_table
from .harness import (
    MODES,
    agent_rng,
    constant_profile,
    run_episode,
    long_horizon_experiment,
    sample_command_profile,
    sample_setup,
    terrain_trial_suite,
)
from .rewards import thermal_weight, thermal_reward, ThermalRewardInput
from .thermal import build_network, steady_state
from .traces import (
    experiment_summary,
    write_dict_trace,
    write_fig_scatter,
    write_manifest,
    write_record_trace,
    write_summary,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None,
                   help="config YAML (default: shipped config)")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $THERMOQUAD_WORKERS or 1)")
    p.add_argument("--bucket-width", type=float, default=None,
                   help="override velocity bucket width (m/s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoquad",
        description="Actuator thermal simulation and thermal-aware "
                    "locomotion experiments for quadruped robots")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate-config", help="validate a config file")
    _add_common(p)

    p = sub.add_parser("steady-state", help="steady-state temperature report")
    _add_common(p)

    p = sub.add_parser("simulate", help="run one episode and write its trace")
    _add_common(p)
    p.add_argument("--duration", type=float, default=60.0, help="seconds")
    p.add_argument("--mode", choices=MODES, default="governed")
    p.add_argument("--command", type=float, nargs=3, default=None,
                   metavar=("VX", "VY", "YAW"),
                   help="constant command instead of a sampled profile")

    p = sub.add_parser("batch", help="randomized long-horizon experiment")
    _add_common(p)
    p.add_argument("--agents", type=int, default=64)
    p.add_argument("--duration", type=float, default=None,
                   help="seconds (default: scenario duration)")
    p.add_argument("--mode", choices=MODES, default="governed")
    p.add_argument("--traces", type=int, default=4,
                   help="number of leading agents to write full traces for")

    p = sub.add_parser("terrain-suite", help="stairs/slope traversal trials")
    _add_common(p)
    p.add_argument("--terrain", choices=("stairs", "slope", "both"),
                   default="both")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--mode", choices=MODES + ("both",), default="both")

    p = sub.add_parser("reward-sweep", help="thermal reward tabulation")
    _add_common(p)
    p.add_argument("--t-min", type=float, default=20.0)
    p.add_argument("--t-max", type=float, default=80.0)
    p.add_argument("--rate", type=float, default=0.1,
                   help="temperature rate (degC/s) for the reward column")

    p = sub.add_parser("layout", help="observation layout tables")
    _add_common(p)
    return parser


def _load(args) -> tuple:
    if args.config:
        text = Path(args.config).read_text()
        from .config import loads_config

        cfg = loads_config(text)
    else:
        from importlib import resources

        text = resources.files("thermoquad").joinpath(
            "data/default_config.yaml").read_text()
        cfg = load_default_config()
    if args.bucket_width is not None:
        cfg.bucket_width_mps = args.bucket_width
    return cfg, text


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("THERMOQUAD_WORKERS")
    return max(1, int(env)) if env else 1


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(args, out: Path | None, config_text: str) -> None:
    if out is None:
        return
    flags = {k: v for k, v in vars(args).items()
             if k not in ("subcommand",) and v is not None}
    write_manifest(out, args.subcommand, getattr(args, "seed", None),
                   config_text, flags, __version__)


def cmd_validate_config(args) -> int:
    cfg, text = _load(args)
    net = build_network(cfg)
    motors = net.motor_indices()
    print(f"config OK: {net.n} nodes ({len(motors)} motors), "
          f"{len(net.edges)} edges, sha256 {config_checksum(text)[:12]}")
    for node in net.nodes:
        cap = f"C={node.capacitance:g} J/K" if node.kind != "ambient" else "boundary"
        print(f"  node {node.id:2d} {node.label:10s} [{node.kind}] {cap}")
    _steady_report(cfg, net)
    out = _outdir(args)
    if out is not None:
        (out / "config_normalized.yaml").write_text(dump_config(cfg))
        _manifest(args, out, text)
    return 0


def _steady_report(cfg, net) -> None:
    ref = cfg.reference_input
    u = np.zeros(net.n)
    for i in net.motor_indices():
        u[i] = ref.per_motor_w
    u[12] = ref.computer_w
    temps = steady_state(net, u, ref.v_xy_mps, cfg.ambient_temp_c)
    print(f"steady state at {ref.per_motor_w:g} W/motor, "
          f"{ref.computer_w:g} W computer, v={ref.v_xy_mps:g} m/s, "
          f"ambient {cfg.ambient_temp_c:g} C:")
    for node in net.nodes:
        print(f"  {node.label:10s} {temps[node.id]:8.2f} C")


def cmd_steady_state(args) -> int:
    cfg, text = _load(args)
    net = build_network(cfg)
    _steady_report(cfg, net)
    out = _outdir(args)
    if out is not None:
        ref = cfg.reference_input
        u = np.zeros(net.n)
        for i in net.motor_indices():
            u[i] = ref.per_motor_w
        u[12] = ref.computer_w
        temps = steady_state(net, u, ref.v_xy_mps, cfg.ambient_temp_c)
        rows = ["node,label,kind,steady_temp_c"]
        for node in net.nodes:
            rows.append(f"{node.id},{node.label},{node.kind},{temps[node.id]!r}")
        (out / "steady_state.csv").write_text("\n".join(rows) + "\n")
        _manifest(args, out, text)
    return 0


def cmd_simulate(args) -> int:
    cfg, text = _load(args)
    rng = agent_rng(args.seed, 0)
    setup = sample_setup(
        rng, cfg.randomization,
        payload_range=cfg.long_horizon.payload_kg,
        initial_temp_range=cfg.long_horizon.initial_motor_temp_c)
    if args.command is not None:
        profile = constant_profile(args.duration, *args.command)
    else:
        profile = sample_command_profile(rng, args.duration, cfg)
    rec = run_episode(setup, profile, args.mode, cfg, duration=args.duration)
    track_err = float(np.mean(rec.tracking_err))
    max_temp = float(np.max(rec.temps[:, :12]))
    print(f"episode: mode={args.mode} seed={args.seed} "
          f"duration={args.duration:g}s")
    print(f"  mean tracking error: {track_err:.4f} m/s")
    print(f"  max motor temperature: {max_temp:.2f} C")
    out = _outdir(args)
    if out is not None:
        write_record_trace(rec, out / "trace.csv")
        write_summary({
            "scenario": {"mode": args.mode, "seed": args.seed,
                         "duration_s": args.duration},
            "mean_tracking_error": track_err,
            "max_motor_temp_c": max_temp,
        }, out / "summary.json")
        _manifest(args, out, text)
        print(f"  wrote {out / 'trace.csv'}")
    return 0


def cmd_batch(args) -> int:
    cfg, text = _load(args)
    duration = args.duration if args.duration is not None \
        else cfg.long_horizon.duration_s
    result = long_horizon_experiment(
        n_agents=args.agents, duration=duration, mode=args.mode,
        seed=args.seed, config=cfg, workers=_workers(args),
        trace_agents=args.traces if args.out else 0)
    agg = result["aggregate"]
    print(f"batch: {args.agents} agents x {duration:g}s mode={args.mode} "
          f"seed={args.seed}")
    print(f"  overheat fraction: {agg['overheat_fraction']:.3f}")
    print(f"  mean tracking error: {agg['mean_tracking_error']:.4f} m/s")
    print(f"  outcomes: {agg['outcome_histogram']}")
    out = _outdir(args)
    if out is not None:
        write_summary(experiment_summary(result), out / "summary.json")
        write_fig_scatter(result["agents"], out / "scatter.csv")
        for idx, rows in result["traces"].items():
            write_dict_trace(rows, out / f"trace_agent{idx:04d}.csv")
        _manifest(args, out, text)
        print(f"  wrote {out / 'summary.json'}")
    return 0


def cmd_terrain_suite(args) -> int:
    cfg, text = _load(args)
    terrains = ("stairs", "slope") if args.terrain == "both" else (args.terrain,)
    modes = MODES if args.mode == "both" else (args.mode,)
    results = []
    for terrain in terrains:
        for mode in modes:
            r = terrain_trial_suite(terrain, args.trials, mode, args.seed, cfg,
                                    workers=_workers(args))
            results.append(r)
            print(f"{terrain} / {mode}:")
            for level in r["levels"]:
                frac = level["outcome_fractions"]
                hot = level["initial_temp_c"]
                q = level["traversal_time_quantiles_s"]
                tq = f" t50={q['q50']:.2f}s" if q else ""
                print(f"  {hot:4.0f}C: success={frac['success']:.2f} "
                      f"overheated={frac['overheated']:.2f} "
                      f"drifting={frac['drifting']:.2f} "
                      f"stuck={frac['stuck']:.2f}{tq}")
    out = _outdir(args)
    if out is not None:
        write_summary({"suites": [_strip_trials(r) for r in results]},
                      out / "summary.json")
        (out / "trials.json").write_text(
            json.dumps(results, sort_keys=True, indent=1) + "\n")
        _manifest(args, out, text)
    return 0


def _strip_trials(result: dict) -> dict:
    slim = dict(result)
    slim["levels"] = [{k: v for k, v in lvl.items() if k != "trials"}
                      for lvl in result["levels"]]
    return slim


def cmd_reward_sweep(args) -> int:
    cfg, text = _load(args)
    w = cfg.rewards
    temps = np.arange(args.t_min, args.t_max + 0.5, 1.0)
    lines = ["temp_c,weight_smooth,weight_literal,reward_heating,reward_cooling"]
    for t in temps:
        t = float(t)
        ws = float(thermal_weight(t, w, "smooth"))
        wl = float(thermal_weight(t, w, "literal"))
        inp = ThermalRewardInput(temps=np.array([t]), temp_rates=np.array([args.rate]))
        heating = float(thermal_reward(inp, w, "smooth"))
        inp = ThermalRewardInput(temps=np.array([t]), temp_rates=np.array([-args.rate]))
        cooling = float(thermal_reward(inp, w, "smooth"))
        lines.append(f"{t!r},{ws!r},{wl!r},{heating!r},{cooling!r}")
    csv = "\n".join(lines) + "\n"
    out = _outdir(args)
    if out is not None:
        (out / "reward_sweep.csv").write_text(csv)
        _manifest(args, out, text)
        print(f"wrote {out / 'reward_sweep.csv'} ({len(temps)} rows)")
    else:
        print(csv, end="")
    return 0


def cmd_layout(args) -> int:
    cfg, text = _load(args)
    tables = {name: layout_table(name) for name in ("nominal", "residual")}
    for name, rows in tables.items():
        total = rows[-1]["stop"]
        print(f"{name} observation layout ({total} entries):")
        for r in rows:
            print(f"  [{r['start']:3d}:{r['stop']:3d}) {r['field']}")
    out = _outdir(args)
    if out is not None:
        (out / "layout.json").write_text(
            json.dumps(tables, sort_keys=True, indent=1) + "\n")
        _manifest(args, out, text)
    return 0


COMMANDS = {
    "validate-config": cmd_validate_config,
    "steady-state": cmd_steady_state,
    "simulate": cmd_simulate,
    "batch": cmd_batch,
    "terrain-suite": cmd_terrain_suite,
    "reward-sweep": cmd_reward_sweep,
    "layout": cmd_layout,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.subcommand](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ThermoquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
