"""One-step-prediction baseline: latent states as the variational posterior.

The encoder (conv stack + autoregressive LSTM) emits a Gaussian posterior
over the full state sequence. The dynamics enter the loss through the
one-step transition prior N(f(z_t), sigma_eps^2 I); the evolution map has
no tanh squashing and the observation map is linear. The system-noise
variance is a trainable scalar (log parameterization).
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from .conv import ConvStack
from .encoders import (
    AutoregressiveGaussianHead,
    PosteriorSample,
    build_posterior_sample,
    tile_batch,
)
from .generative import GenerativeCore, evolve_map
from .params import ModelConfig, ParamSet


class DkfModel:
    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        assert cfg.variant == "dkf"
        self.cfg = cfg
        self.params = ParamSet(rng)
        p = self.params
        d_z, h = cfg.d_z, cfg.hidden_f
        self.core = GenerativeCore(
            d_z=d_z,
            d_zhat=d_z,
            d_eps=cfg.d_eps,
            w1=p.uniform("gen.f.w1", (d_z, h), d_z),
            b1=p.zeros("gen.f.b1", (h,)),
            w2=p.uniform("gen.f.w2", (h, d_z), h),
            b2=p.zeros("gen.f.b2", (d_z,)),
            wg1=None,
            bg1=None,
            wg2=None,
            bg2=None,
            squash=False,
        )
        self.w_g = p.uniform("gen.g.w", (d_z, cfg.d_x), d_z)
        self.b_g = p.zeros("gen.g.b", (cfg.d_x,))
        self.log_var_eps = p.constant("gen.log_var_eps", np.array(cfg.log_var_eps_init))
        self.stack = ConvStack(p, "enc_state.conv", cfg.d_x, None, cfg, causal=False)
        self.head = AutoregressiveGaussianHead(p, "enc_state", cfg.conv_channels, d_z, cfg)
        self.causal_encoder = ConvStack(p, "enc_causal.conv", cfg.d_x, d_z, cfg, causal=True)
        self.stochastic = True

    def main_params(self) -> list[Tensor]:
        return [t for n, t in self.params.items() if not n.startswith("enc_causal.")]

    def causal_params(self) -> list[Tensor]:
        return self.params.tensors("enc_causal.")

    # ---- training-graph API ----------------------------------------------
    def encode_states(self, x, rng, n_samples: int = 1) -> PosteriorSample:
        """Autoregressive Gaussian posterior over the state sequence."""
        feats = tile_batch(self.stack(ad.as_tensor(x)), n_samples)
        B, T, _ = feats.shape
        xi = rng.standard_normal((B, T, self.cfg.d_z))
        samples, logqs, heads = self.head.run(feats, xi)
        return build_posterior_sample(samples, logqs, heads, self.cfg, n_samples)

    def evolve(self, z) -> Tensor:
        return evolve_map(ad.as_tensor(z), self.core)

    def observe(self, z) -> Tensor:
        return ad.add(ad.matmul(ad.as_tensor(z), self.w_g), self.b_g)

    def posterior_mean(self, x) -> Tensor:
        """Posterior mean state sequence (no sampling), for the causal target."""
        feats = self.stack(ad.as_tensor(x))
        B, T, _ = feats.shape
        xi = np.zeros((B, T, self.cfg.d_z))
        # with xi = 0 each sample equals its mean, making the pass deterministic
        samples, _, _ = self.head.run(feats, xi)
        return ad.stack_steps(samples, axis=1)

    # ---- evaluation / analysis API -----------------------------------------
    def sigma_eps(self) -> float:
        return float(np.exp(0.5 * self.log_var_eps.data))

    def noise_amplitude(self) -> float:
        return self.sigma_eps()

    def deterministic_step(self, z: np.ndarray) -> np.ndarray:
        return evolve_map(Tensor(np.atleast_2d(z)), self.core).data

    def observe_np(self, z: np.ndarray) -> np.ndarray:
        return self.observe(Tensor(z)).data

    def embedded_states(self, x: np.ndarray, causal: bool = False) -> np.ndarray:
        if causal:
            return self.causal_encoder(Tensor(np.asarray(x)[None])).data[0]
        return self.posterior_mean(Tensor(np.asarray(x)[None])).data[0]

    def initial_state_causal(self, x_past: np.ndarray) -> np.ndarray:
        return self.causal_encoder(Tensor(np.asarray(x_past)[None])).data[0, -1]

    def generate(
        self, z0: np.ndarray, length: int, rng: np.random.Generator | None
    ) -> tuple[np.ndarray, np.ndarray]:
        z = np.atleast_2d(np.asarray(z0, dtype=float))
        states = np.empty((length, self.cfg.d_z))
        sig = self.sigma_eps()
        for t in range(length):
            states[t] = z[0]
            z = self.deterministic_step(z)
            if rng is not None:
                z = z + sig * rng.standard_normal(z.shape)
        return self.observe_np(states), states

    def initial_states_from_windows(self, windows: np.ndarray) -> np.ndarray:
        return self.causal_encoder(Tensor(windows)).data[:, -1, :]

    def prior_step(self, states: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
        z = self.deterministic_step(states)
        if rng is not None:
            z = z + self.sigma_eps() * rng.standard_normal(z.shape)
        return z
