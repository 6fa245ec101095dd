"""Command-line interface.

Commands: generate, train, sweep, eval, attractors, tauopt. Exit codes:
0 on success, 1 on runtime failure, 2 on usage errors. The default output
root comes from the DSR_OUT_ROOT environment variable (fallback ./dsr_out);
existing artifacts are never overwritten without --overwrite.
"""

from __future__ import annotations

import argparse
import csv as csvmod
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .. import rng as rngmod
from ..analysis import forced_lyapunov, model_attractors, tau_opt_curve
from ..datasets import DATASET_NAMES, export_csv, generate_dataset, load_dataset, save_dataset
from ..evaluation import EvalConfig, evaluate_model, generate_long
from ..models import load_model
from ..training import SweepGrid, TrainingConfig, sweep, train
from .configfile import ConfigError, apply_overrides, read_config_file, validate_keys
from .svg import histogram_plot, line_plot

TRAINING_KEYS = {f.name for f in fields(TrainingConfig)}
EVAL_KEYS = {f"eval_{f.name}" for f in fields(EvalConfig)}
GRID_KEYS = {f"grid_{f.name}" for f in fields(SweepGrid)}
DATA_KEYS = {"data"}


class CliError(RuntimeError):
    """Runtime failure -> exit code 1."""


def out_root() -> Path:
    return Path(os.environ.get("DSR_OUT_ROOT", "dsr_out"))


def _require_fresh(path: Path, overwrite: bool) -> None:
    if path.exists() and not overwrite:
        raise CliError(f"{path} already exists; pass --overwrite to replace it")


def _load_split_pair(prefix: str):
    train_ds = load_dataset(f"{prefix}_train")
    test_ds = load_dataset(f"{prefix}_test")
    return train_ds, test_ds


def _resolve_config(args, allowed: set, context: str) -> dict:
    entries = read_config_file(args.config) if args.config else {}
    entries = apply_overrides(entries, getattr(args, "set", None))
    validate_keys(entries, allowed, context)
    if getattr(args, "seed", None) is not None:
        entries["seed"] = args.seed
    if getattr(args, "scale", None) is not None:
        entries["iter_scale"] = args.scale
    return entries


def _split_config(entries: dict):
    train_keys = {k: v for k, v in entries.items() if k in TRAINING_KEYS}
    eval_keys = {k[5:]: v for k, v in entries.items() if k in EVAL_KEYS}
    grid_keys = {k[5:]: v for k, v in entries.items() if k in GRID_KEYS}
    for k in ("taus", "log_var_etas", "log_var_epss", "gammas", "t_preds"):
        if k in grid_keys:
            grid_keys[k] = tuple(grid_keys[k])
    data = entries.get("data")
    return train_keys, eval_keys, grid_keys, data


def cmd_generate(args) -> int:
    out_dir = Path(args.out) if args.out else out_root() / "datasets"
    train_ds, test_ds = generate_dataset(args.name, seed=args.seed, scale=args.scale)
    for ds in (train_ds, test_ds):
        base = out_dir / f"{args.name}_{ds.split}"
        _require_fresh(base.with_suffix(".bin"), args.overwrite)
    for ds in (train_ds, test_ds):
        base = out_dir / f"{args.name}_{ds.split}"
        save_dataset(ds, base)
        if args.csv:
            export_csv(ds, base.with_suffix(".csv"))
        print(f"wrote {base}.bin ({ds.length} points)")
    return 0


def cmd_train(args) -> int:
    entries = _resolve_config(args, TRAINING_KEYS | DATA_KEYS, "train config")
    train_keys, _, _, data = _split_config(entries)
    if data is None:
        raise CliError("train: config must set 'data' to a dataset path prefix")
    cfg = TrainingConfig.fromdict(train_keys)
    train_ds, _ = _load_split_pair(data)
    run_dir = Path(args.out) if args.out else out_root() / "runs" / "train"
    _require_fresh(run_dir / "config.json", args.overwrite)
    result = train(cfg, train_ds, run_dir, log_every=args.log_every)
    if result.failed:
        raise CliError(f"training failed: {result.failure_reason}")
    print(f"finished: final loss {result.final_loss:.6g}; artifacts in {run_dir}")
    return 0


def cmd_sweep(args) -> int:
    entries = _resolve_config(args, TRAINING_KEYS | EVAL_KEYS | GRID_KEYS | DATA_KEYS, "sweep config")
    train_keys, eval_keys, grid_keys, data = _split_config(entries)
    if data is None:
        raise CliError("sweep: config must set 'data' to a dataset path prefix")
    cfg = TrainingConfig.fromdict(train_keys)
    grid = SweepGrid(**grid_keys)
    eval_cfg = EvalConfig(**eval_keys)
    train_ds, test_ds = _load_split_pair(data)
    out_dir = Path(args.out) if args.out else out_root() / "runs" / "sweep"
    _require_fresh(out_dir / "sweep_results.csv", args.overwrite)
    summary = sweep(
        cfg, grid, train_ds, test_ds, out_dir, eval_cfg=eval_cfg, workers=args.workers
    )
    print(
        f"sweep finished: best cell {summary['best_cell']} "
        f"(mean score {summary['best_cell_mean_score']:.6g}); "
        f"selected {summary['selected_checkpoint']}"
    )
    return 0


def cmd_eval(args) -> int:
    entries = _resolve_config(args, EVAL_KEYS | DATA_KEYS, "eval config")
    _, eval_keys, _, data = _split_config(entries)
    data = data or args.data
    if data is None:
        raise CliError("eval: provide --data or a config with 'data'")
    eval_cfg = EvalConfig(**eval_keys)
    train_ds, test_ds = _load_split_pair(data)
    model, manifest = load_model(args.checkpoint)
    out_dir = Path(args.out) if args.out else out_root() / "eval"
    _require_fresh(out_dir / "report.json", args.overwrite)
    report = evaluate_model(model, train_ds, test_ds, eval_cfg, model_name=str(args.checkpoint))
    report.save(out_dir / "report.json")
    gen = generate_long(
        model, train_ds, eval_cfg.gen_length, rngmod.stream(eval_cfg.seed, "eval", "generate")
    )
    window = min(2000, test_ds.length, len(gen))
    line_plot(
        out_dir / "series.svg",
        [("data", test_ds.observations[:window, 0]), ("generated", gen[:window, 0])],
        title=f"{test_ds.name}: test data vs generated",
    )
    histogram_plot(
        out_dir / "histogram.svg",
        [("data", test_ds.observations[:, 0]), ("generated", gen[:, 0])],
        title=f"{test_ds.name}: value distributions",
    )
    print(json.dumps(report.asdict(), indent=2, sort_keys=True))
    return 0


def cmd_attractors(args) -> int:
    train_ds, _ = _load_split_pair(args.data)
    model, _ = load_model(args.checkpoint)
    out_dir = Path(args.out) if args.out else out_root() / "attractors"
    _require_fresh(out_dir / "attractors.json", args.overwrite)
    report = model_attractors(
        model, train_ds, n_init=args.n_init, warmup=args.warmup, T=args.steps, seed=args.seed or 0
    )
    report.save(out_dir / "attractors.json")
    with open(out_dir / "attractors.csv", "w", newline="") as fh:
        writer = csvmod.writer(fh)
        writer.writerow(["kind", "lambda_max", "basin_fraction", "extent"])
        for a in report.attractors:
            s = a.summary()
            writer.writerow([s["kind"], repr(s["lambda_max"]), repr(s["basin_fraction"]), repr(s["extent"])])
    for a in report.attractors:
        s = a.summary()
        print(f"{s['kind']}: lambda_max={s['lambda_max']:.6g} basin={s['basin_fraction']:.2f}")
    return 0


def cmd_tauopt(args) -> int:
    sweep_dir = Path(args.sweep_dir)
    results_path = sweep_dir / "sweep_results.csv"
    if not results_path.exists():
        raise CliError(f"{results_path} not found; run a sweep first")
    train_ds, _ = _load_split_pair(args.data)
    rows = list(csvmod.DictReader(results_path.open()))
    best_by_tau: dict[float, dict] = {}
    for row in rows:
        if row["best_in_run"] != "True" or row["failed"] == "True" or not row["tau"]:
            continue
        tau = float(row["tau"])
        if tau not in best_by_tau or float(row["score"]) < float(best_by_tau[tau]["score"]):
            best_by_tau[tau] = row
    if len(best_by_tau) < 2:
        raise CliError("tauopt: need at least two teacher-forcing-interval cells")
    taus, lams = [], []
    for tau in sorted(best_by_tau):
        model, _ = load_model(best_by_tau[tau]["checkpoint"])
        window = min(train_ds.length, args.window)
        zhat = model.embedded_states(train_ds.observations[:window])[:, : model.cfg.d_zhat]
        lams.append(forced_lyapunov(model, zhat, int(tau), seed=args.seed or 0))
        taus.append(tau)
    curve = tau_opt_curve(taus, lams)
    out_dir = Path(args.out) if args.out else out_root() / "tauopt"
    _require_fresh(out_dir / "taucurve.json", args.overwrite)
    curve.save(out_dir / "taucurve.json")
    with open(out_dir / "taucurve.csv", "w", newline="") as fh:
        writer = csvmod.writer(fh)
        writer.writerow(["tau", "lambda_max", "tau_opt"])
        for t, l, o in zip(curve.taus, curve.lambda_max, curve.tau_opt):
            writer.writerow([repr(t), repr(l), repr(o)])
    print(json.dumps(curve.asdict(), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsr", description="Stochastic dynamical system reconstruction toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config: bool = True):
        p.add_argument("--out", help="output directory (default under DSR_OUT_ROOT)")
        p.add_argument("--overwrite", action="store_true", help="replace existing artifacts")
        p.add_argument("--seed", type=int, default=None)
        if config:
            p.add_argument("--config", help="flat key=value config file")
            p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    g = sub.add_parser("generate", help="simulate a benchmark dataset")
    g.add_argument("name", choices=DATASET_NAMES)
    g.add_argument("--scale", type=float, default=1.0, help="length-scale factor in (0, 1]")
    g.add_argument("--csv", action="store_true", help="also export CSV payloads")
    common(g, config=False)
    g.set_defaults(fn=cmd_generate, seed=0)

    t = sub.add_parser("train", help="train one model replica")
    t.add_argument("--scale", type=float, default=None, help="desk-scale factor for the iteration schedule")
    t.add_argument("--log-every", type=int, default=0)
    common(t)
    t.set_defaults(fn=cmd_train)

    s = sub.add_parser("sweep", help="hyperparameter grid sweep")
    s.add_argument("--scale", type=float, default=None)
    s.add_argument("--workers", type=int, default=1)
    common(s)
    s.set_defaults(fn=cmd_sweep)

    e = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    e.add_argument("--checkpoint", required=True, help="checkpoint base path (no suffix)")
    e.add_argument("--data", help="dataset path prefix")
    common(e)
    e.set_defaults(fn=cmd_eval)

    a = sub.add_parser("attractors", help="attractor analysis of a checkpoint")
    a.add_argument("--checkpoint", required=True)
    a.add_argument("--data", required=True)
    a.add_argument("--n-init", type=int, default=100)
    a.add_argument("--warmup", type=int, default=1000)
    a.add_argument("--steps", type=int, default=20000)
    common(a, config=False)
    a.set_defaults(fn=cmd_attractors)

    o = sub.add_parser("tauopt", help="predictability-time curve over a finished sweep")
    o.add_argument("--sweep-dir", required=True)
    o.add_argument("--data", required=True)
    o.add_argument("--window", type=int, default=2000)
    common(o, config=False)
    o.set_defaults(fn=cmd_tauopt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
