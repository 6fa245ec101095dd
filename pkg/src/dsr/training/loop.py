"""Optimization loop with checkpointing and causal-encoder co-training."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import rng as rngmod
from ..autodiff import AdamState, Tape, Tensor, adam_step, clip_global_norm
from ..datasets.store import TimeSeriesDataset, chunk
from ..models import build_model, save_checkpoint
from .config import TrainingConfig
from .losses import LOSS_FUNCTIONS, causal_encoder_loss


@dataclass
class TrainResult:
    run_dir: Path
    checkpoints: list  # [(iteration, base path)]
    final_loss: float
    failed: bool = False
    failure_reason: str = ""
    trace_path: Path | None = None

    @property
    def final_checkpoint(self) -> Path | None:
        return self.checkpoints[-1][1] if self.checkpoints else None


def _format_row(values) -> str:
    return ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in values)


def _causal_target(model, variant: str, x_batch: np.ndarray, aux: dict):
    if variant in ("dpdsr", "spdsr"):
        return aux["zhat"]
    if variant == "dkf":
        return model.posterior_mean(Tensor(x_batch)).data
    return None


def _causal_prediction(model, variant: str, x_batch: np.ndarray):
    if variant in ("dpdsr", "spdsr"):
        return model.encode_states(Tensor(x_batch), causal=True)
    return model.causal_encoder(Tensor(x_batch))


def train(
    config: TrainingConfig,
    train_ds: TimeSeriesDataset,
    run_dir: str | Path,
    log_every: int = 0,
) -> TrainResult:
    """Train one model replica and persist config, checkpoints, and the
    loss trace under run_dir.

    A non-finite loss aborts the iteration with a diagnostic dump of the
    component values; two in a row mark the run failed (partial artifacts
    are kept). Runs are deterministic given (config, seed).
    """
    cfg = config.resolved()
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(
        json.dumps(cfg.asdict(), indent=2, sort_keys=True) + "\n"
    )
    ckpt_dir = run_dir / "checkpoints"
    ckpt_dir.mkdir(exist_ok=True)

    model = build_model(cfg.model_config(), rngmod.stream(cfg.seed, "init"))
    loss_fn = LOSS_FUNCTIONS[cfg.variant]
    main_params = model.main_params()
    causal_params = model.causal_params()
    opt = AdamState.for_params(main_params, lr=cfg.lr)
    causal_opt = AdamState.for_params(causal_params, lr=cfg.lr) if causal_params else None

    trace_path = run_dir / "loss_trace.csv"
    trace_rows = []
    comp_names: list[str] = []
    checkpoints: list = []
    consecutive_bad = 0
    final_loss = float("nan")

    def save(iteration: int) -> None:
        base = ckpt_dir / f"ckpt_{iteration}"
        save_checkpoint(base, model.cfg, model.params.state_arrays(), iteration, cfg.seed)
        checkpoints.append((iteration, base))

    for it in range(1, cfg.iterations + 1):
        lr = cfg.lr_at(it)
        batch = chunk(
            train_ds, cfg.chunk_T, cfg.batch_size, rngmod.stream(cfg.seed, "batch", it)
        )
        mc_rng = rngmod.stream(cfg.seed, "mc", it)
        with Tape() as tape:
            total, comps, aux = loss_fn(model, batch, cfg, mc_rng)
        loss_value = float(total.data)
        if not comp_names:
            comp_names = list(comps)

        if not np.isfinite(loss_value):
            diag = {k: float(v.data) for k, v in comps.items()}
            print(
                f"iteration {it}: non-finite loss {loss_value}; components {diag}",
                file=sys.stderr,
            )
            consecutive_bad += 1
            if consecutive_bad >= 2:
                save(it)
                _write_trace(trace_path, comp_names, trace_rows)
                return TrainResult(
                    run_dir=run_dir,
                    checkpoints=checkpoints,
                    final_loss=loss_value,
                    failed=True,
                    failure_reason=f"non-finite loss at iterations {it - 1}, {it}",
                    trace_path=trace_path,
                )
            continue
        consecutive_bad = 0
        final_loss = loss_value

        tape.backward(total, params=main_params)
        grads = clip_global_norm([p.grad for p in main_params], cfg.clip_threshold)
        opt.lr = lr
        adam_step(main_params, grads, opt)

        causal_value = ""
        if causal_opt is not None:
            target = _causal_target(model, cfg.variant, batch, aux)
            with Tape() as ctape:
                closs = causal_encoder_loss(
                    _causal_prediction(model, cfg.variant, batch), target
                )
            ctape.backward(closs, params=causal_params)
            cgrads = clip_global_norm(
                [p.grad for p in causal_params], cfg.clip_threshold
            )
            causal_opt.lr = lr
            adam_step(causal_params, cgrads, causal_opt)
            causal_value = float(closs.data)

        trace_rows.append(
            [it, lr, loss_value]
            + [float(comps[k].data) for k in comp_names]
            + [causal_value]
        )
        if log_every and it % log_every == 0:
            print(f"iteration {it}/{cfg.iterations}: loss {loss_value:.4f}", file=sys.stderr)
        if it % cfg.checkpoint_every == 0:
            save(it)

    if not checkpoints or checkpoints[-1][0] != cfg.iterations:
        save(cfg.iterations)
    _write_trace(trace_path, comp_names, trace_rows)
    return TrainResult(
        run_dir=run_dir,
        checkpoints=checkpoints,
        final_loss=final_loss,
        trace_path=trace_path,
    )


def _write_trace(path: Path, comp_names: list[str], rows: list) -> None:
    header = ["iteration", "lr", "total"] + comp_names + ["causal"]
    lines = [",".join(header)]
    lines += [_format_row(r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
