"""Command-line interface: train, simulate, eval, demo-stats, report, serve.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .demos import DemoError
from .engine import ConfigError, GameConfig, default_config
from .metrics import MetricsError
from .neural import CheckpointError, NumericError
from .trainer import TrainerConfig, TrainerConfigError, preset

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _game_config(args) -> GameConfig:
    if getattr(args, "config", None):
        return GameConfig.load(args.config)
    return default_config()


def _trainer_config(args) -> TrainerConfig:
    if args.trainer_config:
        tcfg = TrainerConfig.load(args.trainer_config)
        if args.preset:
            raise TrainerConfigError("use either --preset or --trainer-config, not both")
    else:
        tcfg = preset(args.preset or "baseline")
    overrides = {}
    if args.steps is not None:
        overrides["total_steps"] = args.steps
    if args.seed is not None:
        overrides["seed"] = args.seed
    for item in args.set or []:
        if "=" not in item:
            raise TrainerConfigError(f"--set expects field=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key] = value
    return tcfg.with_overrides(overrides)


def cmd_train(args) -> int:
    from .trainer import train

    config = _game_config(args)
    tcfg = _trainer_config(args)
    if tcfg.uses_demos and not args.demos:
        raise TrainerConfigError(f"preset {tcfg.preset!r} needs --demos")
    print(f"training preset={tcfg.preset} steps={tcfg.total_steps} seed={tcfg.seed}")
    print(json.dumps(tcfg.to_json(), indent=2))
    result = train(tcfg, config, demo_path=args.demos, out_dir=args.out)
    last = result.rows[-1] if result.rows else {}
    print(f"done: checkpoint={result.checkpoint_path} log={result.log_path}")
    if last:
        print(
            f"final step={last['step']} mean_cum_reward={last['mean_cum_reward']:.3f} "
            f"gail_loss={last['gail_loss']:.3f} bc_loss={last['bc_loss']:.3f}"
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .runs import simulate

    config = _game_config(args)
    if args.red != "standard":
        raise ConfigError("only --red standard is supported for simulation")
    outcomes = simulate(
        config,
        args.blue,
        args.episodes,
        seed=args.seed or 0,
        record_path=args.record,
        metrics_path=args.metrics,
        session_id=args.session_id,
    )
    counts = {}
    for o in outcomes:
        counts[o.value] = counts.get(o.value, 0) + 1
    print(f"{args.episodes} episodes: {counts}")
    if args.record:
        print(f"demos -> {args.record}")
    if args.metrics:
        print(f"metrics -> {args.metrics}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from .runs import evaluate

    config = _game_config(args)
    outcomes, policy = evaluate(
        config,
        args.model,
        args.blue,
        args.episodes,
        seed=args.seed or 0,
        metrics_path=args.metrics,
        sample=args.sample,
    )
    counts = {}
    for o in outcomes:
        counts[o.value] = counts.get(o.value, 0) + 1
    print(f"{args.episodes} mirror episodes: {counts}")
    print(f"repairs: {policy.stats.to_json()}")
    if args.metrics:
        print(f"metrics -> {args.metrics}")
    return EXIT_OK


def cmd_demo_stats(args) -> int:
    from .demos import dataset_stats, load

    dataset = load(args.demo_file)
    stats = dataset_stats(dataset)
    print(json.dumps(stats, indent=2))
    return EXIT_OK


def cmd_report(args) -> int:
    from .metrics import load_metrics, report

    sources = []
    for spec in args.metric_files:
        if "=" in spec:
            name, path = spec.split("=", 1)
        else:
            name, path = Path(spec).stem, spec
        team = None
        if ":" in name:
            name, team = name.split(":", 1)
        sources.append((name, load_metrics(path), team))
    out_csv = Path(args.out) / "report.csv" if args.out else None
    out_fig = Path(args.out) / "report.png" if args.out else None
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    text, _ = report(sources, out_csv=out_csv, out_fig=out_fig)
    print(text)
    if args.out:
        print(f"report files -> {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    config = _game_config(args)
    print(f"serving on 127.0.0.1:{args.port} (data dir {args.data_dir})")
    serve(args.port, config, data_dir=args.data_dir, models_dir=args.models_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirrortactics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a mirror-enemy model")
    p.add_argument("--preset", default=None, help="named preset (baseline, baseline_plus, ...)")
    p.add_argument("--trainer-config", default=None, help="TrainerConfig JSON file")
    p.add_argument("--set", action="append", metavar="FIELD=VALUE", help="override one config field")
    p.add_argument("--demos", default=None, help="demo file for GAIL/BC")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", default=None, help="game config JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", help="record demos/metrics from scripted standard games")
    p.add_argument("--blue", required=True, help="scripted:<aggressive|defensive|random>")
    p.add_argument("--red", default="standard")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--record", default=None, help="demo output file")
    p.add_argument("--metrics", default=None, help="metrics CSV output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--session-id", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="run mirror games against a trained model")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--blue", required=True, help="scripted:<name> opponent")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--metrics", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", action="store_true", help="sample instead of greedy argmax")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("demo-stats", help="summarize a demo file")
    p.add_argument("demo_file")
    p.set_defaults(func=cmd_demo_stats)

    p = sub.add_parser("report", help="compare metric files")
    p.add_argument("metric_files", nargs="+", metavar="NAME[:TEAM]=FILE")
    p.add_argument("--out", default=None, help="directory for report.csv / report.png")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the game service")
    p.add_argument("--port", type=int, default=8712)
    p.add_argument("--config", default=None)
    p.add_argument("--data-dir", default="service_data")
    p.add_argument("--models-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TrainerConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DemoError, MetricsError, CheckpointError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
