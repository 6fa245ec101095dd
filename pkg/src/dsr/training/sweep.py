"""Hyperparameter sweeps: grid x seeds, checkpoint evaluation, selection.

Every grid cell is trained with several random initializations; every
saved checkpoint is scored on the test split. Within a run the checkpoint
with the lowest score wins; the best cell has the lowest mean score across
its seeds (failed runs count as +inf); the selected model is the best
run's best checkpoint inside the best cell.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from ..datasets.store import TimeSeriesDataset
from ..evaluation import EvalConfig, evaluate_model
from ..models import load_model
from .config import SweepGrid, TrainingConfig
from .loop import train

AXIS_COLUMNS = ("tau", "log_var_eta", "log_var_eps", "gamma", "t_pred")


class SweepError(RuntimeError):
    pass


def _cell_label(cell: dict) -> str:
    return "_".join(f"{k}{cell[k]:g}" if isinstance(cell[k], float) else f"{k}{cell[k]}" for k in sorted(cell))


def _run_seed(base_seed: int, cell: dict, seed_idx: int) -> int:
    key = json.dumps({"cell": cell, "idx": seed_idx, "base": base_seed}, sort_keys=True)
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "little")


def _run_one(args) -> list[dict]:
    cfg_dict, cell, seed_idx, train_ds, test_ds, run_dir, eval_dict = args
    cfg = TrainingConfig.fromdict(cfg_dict)
    cfg = replace(cfg, **cell, seed=_run_seed(cfg.seed, cell, seed_idx))
    result = train(cfg, train_ds, run_dir)
    rows = []
    base_row = {k: cell.get(k, "") for k in AXIS_COLUMNS}
    base_row.update(variant=cfg.variant, seed_index=seed_idx, seed=cfg.seed)
    eval_cfg = EvalConfig(**eval_dict)
    if result.failed:
        rows.append(
            dict(
                base_row,
                iteration="",
                checkpoint="",
                D_d="",
                D_s="",
                PE="",
                D_isi="",
                KL_eps="",
                score=math.inf,
                failed=True,
                best_in_run=True,
            )
        )
        return rows
    for iteration, ckpt in result.checkpoints:
        model, _ = load_model(ckpt)
        report = evaluate_model(model, train_ds, test_ds, eval_cfg, model_name=str(ckpt))
        rows.append(
            dict(
                base_row,
                iteration=iteration,
                checkpoint=str(ckpt),
                D_d=report.D_d,
                D_s=report.D_s,
                PE=report.PE,
                D_isi="" if report.D_isi is None else report.D_isi,
                KL_eps="" if report.KL_eps is None else report.KL_eps,
                score=report.score,
                failed=False,
                best_in_run=False,
            )
        )
    best = min(rows, key=lambda r: r["score"])
    best["best_in_run"] = True
    return rows


def sweep(
    base_config: TrainingConfig,
    grid: SweepGrid,
    train_ds: TimeSeriesDataset,
    test_ds: TimeSeriesDataset,
    out_dir: str | Path,
    eval_cfg: EvalConfig | None = None,
    workers: int = 1,
) -> dict:
    """Run the full grid and emit sweep_results.csv plus sweep_summary.json.

    Returns the summary dictionary (best cell, selected checkpoint, mean
    scores per cell).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = grid.cells(base_config.variant)
    eval_dict = (eval_cfg or EvalConfig()).asdict()
    jobs = []
    for cell in cells:
        for seed_idx in range(grid.seeds):
            run_dir = out_dir / f"run_{_cell_label(cell)}_s{seed_idx}"
            jobs.append(
                (base_config.asdict(), cell, seed_idx, train_ds, test_ds, run_dir, eval_dict)
            )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    rows = [r for rows_ in results for r in rows_]
    if all(r["failed"] for r in rows):
        raise SweepError("all sweep runs failed")

    columns = (
        ["variant"]
        + list(AXIS_COLUMNS)
        + [
            "seed_index",
            "seed",
            "iteration",
            "checkpoint",
            "D_d",
            "D_s",
            "PE",
            "D_isi",
            "KL_eps",
            "score",
            "failed",
            "best_in_run",
        ]
    )
    lines = [",".join(columns)]
    for r in rows:
        lines.append(
            ",".join(
                repr(v) if isinstance(v, float) else str(v) for v in (r[c] for c in columns)
            )
        )
    (out_dir / "sweep_results.csv").write_text("\n".join(lines) + "\n")

    # cell selection on best-in-run scores
    cell_scores: dict[str, list] = {}
    cell_best_rows: dict[str, list] = {}
    for r in rows:
        if not r["best_in_run"]:
            continue
        key = _cell_label({k: r[k] for k in AXIS_COLUMNS if r[k] != ""})
        cell_scores.setdefault(key, []).append(r["score"])
        cell_best_rows.setdefault(key, []).append(r)
    mean_scores = {k: sum(v) / len(v) for k, v in cell_scores.items()}
    best_cell = min(mean_scores, key=mean_scores.get)
    selected = min(cell_best_rows[best_cell], key=lambda r: r["score"])

    summary = {
        "best_cell": best_cell,
        "best_cell_mean_score": mean_scores[best_cell],
        "cell_mean_scores": mean_scores,
        "selected_checkpoint": selected["checkpoint"],
        "selected_score": selected["score"],
        "n_runs": len(jobs),
    }
    (out_dir / "sweep_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    return summary
