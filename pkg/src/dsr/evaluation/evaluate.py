"""Model evaluation against a held-out split."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import rng as rngmod
from ..autodiff import Tensor, reduce_sum, std_normal_log_density
from ..datasets.store import TimeSeriesDataset
from .metrics import isi_distance, score, score_weights, spectral_distance, wasserstein_1d


@dataclass
class EvalConfig:
    gen_length: int = 40000
    pe_n: int = 20
    pe_warmup: int = 256  # causal-encoder context before prediction starts
    pe_noise_draws: int = 20
    pe_chunks: int = 2000
    kl_chunks: int = 32
    kl_chunk_T: int = 300
    kl_trim: int = 50
    seed: int = 0

    def asdict(self) -> dict:
        return asdict(self)


@dataclass
class EvaluationReport:
    dataset: str
    model: str
    D_d: float
    D_s: float
    PE: float
    D_isi: float | None
    score: float
    KL_eps: float | None
    gen_length: int
    extra: dict = field(default_factory=dict)

    def asdict(self) -> dict:
        return asdict(self)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.asdict(), indent=2, sort_keys=True) + "\n")
        return path


def generate_long(
    model, train_ds: TimeSeriesDataset, length: int, rng: np.random.Generator
) -> np.ndarray:
    """Observation series of `length` steps, started from a random point of
    the encoder-embedded training trajectory; stochastic variants draw
    their noise from the prior."""
    x = train_ds.observations
    window = min(len(x), 1024)
    start = int(rng.integers(0, len(x) - window + 1))
    states = model.embedded_states(x[start : start + window])
    margin = min(50, (len(states) - 1) // 2)
    pick = int(rng.integers(margin, len(states) - margin)) if len(states) > 2 * margin else 0
    z0 = states[pick]
    noise_rng = rng if getattr(model, "stochastic", False) else None
    obs, _ = model.generate(z0, length, noise_rng)
    return obs


def prediction_error(
    model, test_ds: TimeSeriesDataset, cfg: EvalConfig, rng: np.random.Generator
) -> float:
    """Mean n-step prediction error from causally estimated initial states.

    Each chunk contributes (1/n) sum_i ||x_{k+i} - x~_{k+i}||, averaged over
    noise draws (stochastic models only) and chunks.
    """
    n, k = cfg.pe_n, cfg.pe_warmup
    L = test_ds.length
    if L < k + n:
        raise ValueError(f"prediction_error: test split of {L} is shorter than k+n={k + n}")
    n_chunks = min(cfg.pe_chunks, L - k - n + 1)
    starts = rng.integers(0, L - k - n + 1, size=n_chunks)
    windows = np.stack([test_ds.observations[s : s + k] for s in starts])
    targets = np.stack([test_ds.observations[s + k : s + k + n] for s in starts])
    states = model.initial_states_from_windows(windows)
    draws = cfg.pe_noise_draws if getattr(model, "stochastic", False) else 1
    states = np.repeat(states, draws, axis=0)
    err = np.zeros(states.shape[0])
    noise_rng = rng if draws > 1 or getattr(model, "stochastic", False) else None
    for i in range(n):
        states = model.prior_step(states, noise_rng)
        pred = model.observe_np(states).reshape(n_chunks, draws, -1)
        diff = pred - targets[:, None, i, :]
        err += np.sqrt((diff**2).sum(axis=2)).reshape(-1)
    return float(err.mean() / n)


def kl_usage(
    model, ds: TimeSeriesDataset, cfg: EvalConfig, rng: np.random.Generator
) -> float | None:
    """Per-step KL of the noise posterior from its prior, averaged over
    sampled chunks; exactly 0.0 for the deterministic variant, None for
    models without a noise posterior."""
    variant = model.cfg.variant
    if variant == "spdsr":
        return 0.0
    if variant != "dpdsr":
        return None
    T = min(cfg.kl_chunk_T, ds.length)
    a = cfg.kl_trim if T > 2 * cfg.kl_trim else 0
    starts = rng.integers(0, ds.length - T + 1, size=cfg.kl_chunks)
    windows = np.stack([ds.observations[s : s + T] for s in starts])
    x = Tensor(windows)
    zhat = model.encode_states(x)
    post = model.encode_noise(x, zhat, rng, n_samples=1)
    lq = post.logq_steps.data[:, a : T - a]
    lp = std_normal_log_density(post.eps[:, a : T - a, :]).data.sum(axis=2)
    per_step = (lq - lp).sum(axis=1) / (T - 2 * a)
    return float(per_step.mean())


def evaluate_model(
    model,
    train_ds: TimeSeriesDataset,
    test_ds: TimeSeriesDataset,
    cfg: EvalConfig | None = None,
    model_name: str = "model",
) -> EvaluationReport:
    cfg = cfg or EvalConfig()
    dataset = test_ds.name
    gen = generate_long(
        model, train_ds, cfg.gen_length, rngmod.stream(cfg.seed, "eval", "generate")
    )
    test_obs = test_ds.observations
    d_d = wasserstein_1d(gen[:, 0], test_obs[:, 0])
    d_s = spectral_distance(test_obs[:, 0], gen[:, 0])
    pe = prediction_error(model, test_ds, cfg, rngmod.stream(cfg.seed, "eval", "pe"))
    w = score_weights(dataset)
    d_isi = isi_distance(test_obs[:, 0], gen[:, 0]) if w[3] > 0 else None
    kl = kl_usage(model, test_ds, cfg, rngmod.stream(cfg.seed, "eval", "kl"))
    measures = {"D_d": d_d, "D_s": d_s, "PE": pe, "D_isi": d_isi}
    return EvaluationReport(
        dataset=dataset,
        model=model_name,
        D_d=d_d,
        D_s=d_s,
        PE=pe,
        D_isi=d_isi,
        score=score(measures, dataset),
        KL_eps=kl,
        gen_length=cfg.gen_length,
    )
