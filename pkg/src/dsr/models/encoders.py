"""Observation encoders.

The state encoder maps the observed sequence to a deterministic (possibly
partial) state estimate with a non-causal conv stack; an auxiliary causal
stack with the same architecture is co-trained for honest prediction. The
noise encoder consumes observations and state estimates through another
conv stack and an autoregressive LSTM that emits a Gaussian posterior over
the system noise, sampled with the reparameterization trick.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from .conv import ConvStack
from .params import ModelConfig, ParamSet


def tile_batch(t, n: int) -> Tensor:
    """Repeat a (B, ...) tensor n times along the batch axis."""
    t = ad.as_tensor(t)
    return t if n == 1 else ad.concat([t] * n, axis=0)


@dataclass
class PosteriorSample:
    """One batch of reparameterized draws from the autoregressive posterior."""

    eps: Tensor  # (S*B, T, d)
    eps_steps: list  # T tensors (S*B, d)
    mu: Tensor  # (S*B, T, d)
    logvar: Tensor  # (S*B, T, d)
    logq_steps: Tensor  # (S*B, T): log q(eps_t | ...) per step
    n_samples: int

    @property
    def var(self) -> np.ndarray:
        return np.exp(self.logvar.data)

    @property
    def logq(self) -> Tensor:
        """Accumulated log-density of the sample, one scalar per lane."""
        return ad.reduce_sum(self.logq_steps, axis=1)


class AutoregressiveGaussianHead:
    """LSTM over per-step features and the previous draw, with a Gaussian
    output head; shared by the noise encoder and the one-step-prediction
    variant's state posterior."""

    def __init__(self, params: ParamSet, prefix: str, feat_dim: int, out_dim: int, cfg: ModelConfig):
        H = cfg.lstm_size
        d_in = feat_dim + out_dim
        self.H = H
        self.out_dim = out_dim
        self.clamp = cfg.logvar_clamp
        self.w_ih = params.uniform(f"{prefix}.lstm.w_ih", (d_in, 4 * H), d_in)
        self.w_hh = params.uniform(f"{prefix}.lstm.w_hh", (H, 4 * H), H)
        self.b = params.zeros(f"{prefix}.lstm.b", (4 * H,))
        self.w_head = params.uniform(f"{prefix}.head.w", (H, 2 * out_dim), H)
        self.b_head = params.zeros(f"{prefix}.head.b", (2 * out_dim,))

    def run(self, feats: Tensor, xi: np.ndarray):
        """Sample the autoregressive posterior along the sequence.

        feats: (B, T, F); xi: standard-normal draws (B, T, out_dim).
        Returns (samples, logqs, heads) as per-step tensor lists; means and
        log-variances are the two halves of each head (log-variances before
        clamping).
        """
        B, T, _ = feats.shape
        h = Tensor(np.zeros((B, self.H)))
        c = Tensor(np.zeros((B, self.H)))
        prev = Tensor(np.zeros((B, self.out_dim)))
        samples, logqs, heads = [], [], []
        for t in range(T):
            inp = ad.concat([feats[:, t, :], prev], axis=1)
            h, c = ad.lstm_cell(inp, h, c, self.w_ih, self.w_hh, self.b)
            head = ad.add(ad.matmul(h, self.w_head), self.b_head)
            sample, logq = ad.reparam_gaussian(head, xi[:, t, :], self.clamp)
            samples.append(sample)
            logqs.append(logq)
            heads.append(head)
            prev = sample
        return samples, logqs, heads


def build_posterior_sample(samples, logqs, heads, cfg, n_samples: int) -> PosteriorSample:
    d = samples[0].shape[-1]
    head_seq = ad.stack_steps(heads, axis=1)  # (B, T, 2d)
    return PosteriorSample(
        eps=ad.stack_steps(samples, axis=1),
        eps_steps=samples,
        mu=head_seq[:, :, :d],
        logvar=ad.clamp(head_seq[:, :, d:], -cfg.logvar_clamp, cfg.logvar_clamp),
        logq_steps=ad.stack_steps(logqs, axis=1)[:, :, 0],
        n_samples=n_samples,
    )


class NoiseEncoder:
    def __init__(self, params: ParamSet, cfg: ModelConfig):
        self.cfg = cfg
        self.stack = ConvStack(
            params, "enc_noise.conv", cfg.d_x + cfg.d_zhat, None, cfg, causal=False
        )
        self.head = AutoregressiveGaussianHead(
            params, "enc_noise", cfg.conv_channels, cfg.d_eps, cfg
        )

    def __call__(self, x, zhat, rng: np.random.Generator, n_samples: int = 1) -> PosteriorSample:
        """Posterior over the noise sequence given observations and state
        estimates; n_samples independent reparameterized draws are stacked
        along the batch axis."""
        x = ad.as_tensor(x)
        zhat = ad.as_tensor(zhat)
        feats = self.stack(ad.concat([x, zhat], axis=2))
        feats = tile_batch(feats, n_samples)
        B, T, _ = feats.shape
        xi = rng.standard_normal((B, T, self.cfg.d_eps))
        samples, logqs, heads = self.head.run(feats, xi)
        return build_posterior_sample(samples, logqs, heads, self.cfg, n_samples)
