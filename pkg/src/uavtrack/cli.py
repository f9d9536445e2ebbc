"""Command line entry point: ``run``, ``sweep`` and ``validate`` subcommands."""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .config import ExplicitPlacement, RingPlacement, ScenarioConfig, dump_config, load_config
from .engine import run
from .errors import ConfigError, UavTrackError
from .output import emit_csv, emit_plots, emit_sweep, sweep_row

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _output_dir(args, cfg: ScenarioConfig) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get("UAVTRACK_OUT", cfg.output_dir))


def _with_seed(cfg: ScenarioConfig, seed) -> ScenarioConfig:
    return cfg if seed is None else dataclasses.replace(cfg, seed=seed)


def run_scenario(cfg: ScenarioConfig, out: Path) -> dict[str, Path]:
    log = run(cfg)
    out.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out / "config.yaml")
    paths = emit_csv(log, out)
    paths.update(emit_plots(log, out))
    return paths


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN..MAX, got {text!r}") from None
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("need 1 <= MIN <= MAX")
    return lo, hi


def sweep_configs(cfg: ScenarioConfig, lo: int, hi: int):
    placement = cfg.placement
    if isinstance(placement, ExplicitPlacement):
        placement = RingPlacement()
    for m in range(lo, hi + 1):
        yield m, dataclasses.replace(cfg, num_uavs=m, placement=placement)


def run_sweep(cfg: ScenarioConfig, lo: int, hi: int, out: Path) -> dict[str, Path]:
    rows = []
    for m, sub in sweep_configs(cfg, lo, hi):
        log = run(sub)
        run_dir = out / f"M{m:02d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        dump_config(sub, run_dir / "config.yaml")
        emit_csv(log, run_dir)
        emit_plots(log, run_dir)
        rows.append(sweep_row(m, log, sub.intrinsics.fov_az))
    return emit_sweep(rows, out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavtrack", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    s = sub.add_parser("sweep", help="repeat a scenario over a range of UAV counts")
    s.add_argument("--config", required=True)
    s.add_argument("--uavs", type=parse_range, default=(1, 10), metavar="MIN..MAX")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg.num_uavs} UAVs, {cfg.max_rounds} rounds)")
        return EXIT_OK
    cfg = _with_seed(cfg, args.seed)
    out = _output_dir(args, cfg)
    try:
        if args.command == "run":
            paths = run_scenario(cfg, out)
        else:
            paths = run_sweep(cfg, *args.uavs, out)
    except UavTrackError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
