"""Command-line front end: one trial, a config sweep, or the cost tables.

Config files are JSON documents whose defaults reproduce the reference
experiment, so ``sparsenav trial --config empty.json`` (or no config at all)
runs the bundled arena and route with the default encoder. Success or failure
of a run is recorded in the artifacts, never in the exit status; exit 2 means
a malformed config and exit 3 a collision during scripted training.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .analysis import bernoulli_entropy, compression_lower_bound, op_counts, storage_size
from .encoders import EncoderConfig, Model
from .errors import ConfigError, TrainingCollisionError
from .harness import (
    RouteScript,
    TrialConfig,
    load_route,
    reference_route,
    run_sweep,
    run_trial,
    trial_seed,
)
from .simworld import Arena, load_arena, reference_arena
from .steering import SteeringParams

SEED_ENV_VAR = "SPARSENAV_SEED"

_TRIAL_DEFAULTS = {
    "model": "flyhash",
    "n_pn": 726,
    "n_kc": 32000,
    "kappa": 0.1,
    "theta": None,
    "fixed_fanout": False,
    "alpha": 1.0,
    "v_train": 0.5,
    "v_test": 0.2,
    "snapshot_period": 0.5,
    "n_snapshots": 25,
    "success_radius": 2.0,
    "max_test_time": None,
    "control_dt": 0.05,
}

_SWEEP_DEFAULTS = {
    "models": ["flyhash"],
    "n_kc": [500, 2000, 8000, 32000],
    "kappa": [0.1],
    "n_trials": 20,
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return doc


def _resolve_seed(config: dict, args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    return int(config.get("seed", 0))


def _resolve_world(config: dict):
    arena_path = config.get("arena")
    route_path = config.get("route")
    arena = load_arena(arena_path) if arena_path else reference_arena()
    route = load_route(route_path) if route_path else reference_route()
    return arena, route


def _trial_config(config: dict, seed: int, fixed_fanout: bool) -> TrialConfig:
    t = dict(_TRIAL_DEFAULTS)
    unknown = set(config.get("trial", {})) - set(t)
    if unknown:
        raise ConfigError(f"unknown trial config keys: {sorted(unknown)}")
    t.update(config.get("trial", {}))
    encoder = EncoderConfig(
        model=Model(t["model"]),
        n_pn=int(t["n_pn"]),
        n_kc=int(t["n_kc"]),
        kappa=float(t["kappa"]),
        theta=None if t["theta"] is None else float(t["theta"]),
        seed=seed,
        fixed_fanout=bool(t["fixed_fanout"]) or fixed_fanout,
    )
    return TrialConfig(
        encoder=encoder,
        steering=SteeringParams(alpha=float(t["alpha"]), v_test=float(t["v_test"])),
        v_train=float(t["v_train"]),
        snapshot_period=float(t["snapshot_period"]),
        n_snapshots=int(t["n_snapshots"]),
        success_radius=float(t["success_radius"]),
        max_test_time=None if t["max_test_time"] is None else float(t["max_test_time"]),
        control_dt=float(t["control_dt"]),
    )


def _write_manifest(out: Path, command: str, config: dict, seed: int, extra=None):
    doc = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
    }
    if extra:
        doc.update(extra)
    with open(out / "manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_trial(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(config, args)
    arena, route = _resolve_world(config)
    cfg = _trial_config(config, seed, args.fixed_fanout)
    record = run_trial(arena, route, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "train.csv", ["t", "x", "y", "heading"], record.train_trajectory)
    _write_csv(out / "test.csv", ["t", "x", "y", "heading"], record.test_trajectory)
    _write_csv(out / "novelty.csv", ["t", "d_left", "d_right", "omega"], record.novelty_trace)
    with open(out / "record.json", "w") as fh:
        json.dump(record.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out, "trial", config, seed)
    status = "success" if record.success else "failure"
    print(f"trial {status}: final distance {record.final_distance:.3f} m"
          f" (collided: {record.collided})")
    return 0


def _entropy_bits_per_item(enc: EncoderConfig) -> float:
    if enc.model is Model.PERFECT_MEMORY:
        return 8.0 * enc.n_pn
    if enc.model is Model.CONV_LSH:
        return float(enc.n_kc)
    return compression_lower_bound(enc.n_kc, enc.kappa)


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(config, args)
    arena, route = _resolve_world(config)
    base_cfg = _trial_config(config, seed, args.fixed_fanout)

    s = dict(_SWEEP_DEFAULTS)
    unknown = set(config.get("sweep", {})) - set(s)
    if unknown:
        raise ConfigError(f"unknown sweep config keys: {sorted(unknown)}")
    s.update(config.get("sweep", {}))
    grid = [
        replace(base_cfg.encoder, model=Model(m), n_kc=int(n), kappa=float(k))
        for m in s["models"] for n in s["n_kc"] for k in s["kappa"]
    ]
    if not grid:
        raise ConfigError("sweep grid is empty")
    n_trials = int(s["n_trials"])
    if n_trials < 1:
        raise ConfigError(f"n_trials must be >= 1, got {n_trials}")

    rows = run_sweep(arena, route, base_cfg, grid, n_trials, seed=seed, jobs=args.jobs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    long_rows = []
    for ci, row in enumerate(rows):
        enc = row.encoder
        summary.append([enc.model.value, enc.n_kc, enc.kappa, row.n_trials,
                        row.success_rate, row.mean_final_distance,
                        _entropy_bits_per_item(enc)])
        for ti, rec in enumerate(row.records):
            long_rows.append([enc.model.value, enc.n_kc, enc.kappa, ti,
                              trial_seed(seed, ci, ti), rec.final_distance,
                              int(rec.success), int(rec.collided)])
    _write_csv(out / "sweep.csv",
               ["model", "n_kc", "kappa", "n_trials", "success_rate",
                "mean_final_distance", "entropy_bits_per_item"], summary)
    _write_csv(out / "trials.csv",
               ["model", "n_kc", "kappa", "trial", "seed", "final_distance",
                "success", "collided"], long_rows)
    _write_manifest(out, "sweep", config, seed, {"n_trials": n_trials})
    for line in summary:
        print(f"{line[0]:>14}  n_kc={line[1]:<6} kappa={line[2]:<5}"
              f" success={line[4]:.2f} mean_final={line[5]:.3f} m")
    return 0


def cmd_tables(args) -> int:
    n_pn, n_kc, kappa = args.n_pn, args.n_kc, args.kappa
    if n_pn < 1 or n_kc < 1:
        raise ConfigError("dimensions must be positive")
    if not 0.0 < kappa < 1.0:
        raise ConfigError(f"kappa must lie in (0, 1), got {kappa}")
    print(f"n_pn={n_pn}  n_kc={n_kc}  kappa={kappa}")
    print(f"per-bit entropy H(kappa) = {bernoulli_entropy(kappa):.4f} bits;"
          f" compressed hash >= {compression_lower_bound(n_kc, kappa):.1f} bits")
    print()
    print("storage (bits)")
    print(f"{'model':>16} {'W':>14} {'y':>10} {'W + 25 items':>14}")
    for model in Model:
        rep = storage_size(model, n_pn, n_kc, n_items=25)
        print(f"{model.value:>16} {rep.w_bits:>14} {rep.y_bits:>10}"
              f" {rep.total_bits_for_n_items:>14}")
    print()
    print("run-time operations (per encode / per stored-item comparison)")
    print(f"{'model':>16} {'enc mult':>12} {'enc add':>12} {'k-WTA':>6}"
          f" {'XOR':>8} {'sq mult':>8} {'add':>8}")
    for model in Model:
        rep = op_counts(model, n_pn, n_kc, kappa)
        bound = "<=" if model in (Model.FLYHASH, Model.CONV_LSH) else "  "
        print(f"{model.value:>16} {rep.encode_mults:>12} {rep.encode_adds:>12}"
              f" {rep.encode_kwta:>6} {rep.eval_xor:>8} {rep.eval_square_mults:>8}"
              f" {bound}{rep.eval_adds:>6}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsenav",
        description="Route-following trials and efficiency tables for three visual-memory encoders.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run config (defaults reproduce the reference experiment)")
    common.add_argument("--seed", type=int, default=None,
                        help=f"override config seed (also settable via {SEED_ENV_VAR})")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    common.add_argument("--fixed-fanout", action="store_true",
                        help="sample exactly round(theta*n_pn) connections per hash unit")

    p_trial = sub.add_parser("trial", parents=[common], help="run one train+test trial")
    p_trial.set_defaults(func=cmd_trial)
    p_sweep = sub.add_parser("sweep", parents=[common], help="run a grid of trials")
    p_sweep.set_defaults(func=cmd_sweep)

    p_tables = sub.add_parser("tables", help="print storage and operation-count tables")
    p_tables.add_argument("--n-pn", type=int, default=726)
    p_tables.add_argument("--n-kc", type=int, default=32000)
    p_tables.add_argument("--kappa", type=float, default=0.05)
    p_tables.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingCollisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
