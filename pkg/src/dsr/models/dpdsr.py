"""Double- and single-projection reconstruction models.

The stochastic variant (dpdsr) projects observations onto state estimates
and a noise posterior; the deterministic variant (spdsr) drops the noise
channel and encoder but is otherwise identical.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from .conv import ConvStack
from .encoders import NoiseEncoder, PosteriorSample
from .generative import (
    GenerativeCore,
    complete_state,
    evolve_map,
    evolve_step,
    observe,
    rollout_teacher_forced,
)
from .params import ModelConfig, ParamSet


class DpdsrModel:
    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        assert cfg.variant in ("dpdsr", "spdsr")
        self.cfg = cfg
        self.stochastic = cfg.variant == "dpdsr"
        self.params = ParamSet(rng)
        self.core = GenerativeCore.build(self.params, cfg, with_noise=self.stochastic)
        self.state_encoder = ConvStack(
            self.params, "enc_state.conv", cfg.d_x, cfg.d_zhat, cfg, causal=False
        )
        self.noise_encoder = NoiseEncoder(self.params, cfg) if self.stochastic else None
        self.causal_encoder = ConvStack(
            self.params, "enc_causal.conv", cfg.d_x, cfg.d_zhat, cfg, causal=True
        )

    # ---- parameter groups -------------------------------------------------
    def main_params(self) -> list[Tensor]:
        return [
            t for n, t in self.params.items() if not n.startswith("enc_causal.")
        ]

    def causal_params(self) -> list[Tensor]:
        return self.params.tensors("enc_causal.")

    # ---- training-graph API ----------------------------------------------
    def encode_states(self, x, causal: bool = False) -> Tensor:
        return (self.causal_encoder if causal else self.state_encoder)(ad.as_tensor(x))

    def encode_noise(self, x, zhat, rng, n_samples: int = 1) -> PosteriorSample:
        if not self.stochastic:
            raise ValueError("deterministic variant has no noise encoder")
        return self.noise_encoder(x, zhat, rng, n_samples)

    def rollout(self, zhat, eps_steps, tau: int) -> Tensor:
        return rollout_teacher_forced(zhat, eps_steps, tau, self.core)

    def observe(self, z) -> Tensor:
        return observe(z, self.core)

    def complete_state(self, zhat_t) -> Tensor:
        return complete_state(ad.as_tensor(zhat_t), self.core)

    def complete_state_np(self, zhat_t: np.ndarray) -> np.ndarray:
        return complete_state(Tensor(np.atleast_2d(zhat_t)), self.core).data

    # ---- evaluation / analysis API (plain arrays, no tape expected) -------
    def noise_amplitude(self) -> float:
        return float(self.core.noise_scale.data[0, 0]) if self.stochastic else 0.0

    def deterministic_step(self, z: np.ndarray) -> np.ndarray:
        """Noise-free map on a (N, d_z) batch of states."""
        return evolve_step(Tensor(np.atleast_2d(z)), None, self.core).data

    def step(self, z: np.ndarray, eps: np.ndarray | None) -> np.ndarray:
        e = None if eps is None else Tensor(np.atleast_2d(eps))
        return evolve_step(Tensor(np.atleast_2d(z)), e, self.core).data

    def observe_np(self, z: np.ndarray) -> np.ndarray:
        return observe(Tensor(z), self.core).data

    def embedded_states(self, x: np.ndarray, causal: bool = False) -> np.ndarray:
        """Project an observed series (T, d_x) to completed states (T, d_z)."""
        zhat = self.encode_states(Tensor(np.asarray(x)[None]), causal=causal)
        return complete_state(zhat[0], self.core).data

    def initial_state_causal(self, x_past: np.ndarray) -> np.ndarray:
        """State estimate at the last step of x_past using only the past."""
        zhat = self.encode_states(Tensor(np.asarray(x_past)[None]), causal=True)
        return complete_state(zhat[:, -1, :], self.core).data[0]

    def generate(
        self, z0: np.ndarray, length: int, rng: np.random.Generator | None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Free-run the model for `length` steps from state z0.

        Stochastic variants draw the noise from its standard-normal prior;
        pass rng=None (or a deterministic variant) for the noise-free
        skeleton. Returns (observations (length, d_x), states (length, d_z)).
        """
        z = np.atleast_2d(np.asarray(z0, dtype=float))
        states = np.empty((length, self.cfg.d_z))
        use_noise = self.stochastic and rng is not None
        eps = rng.standard_normal((length, self.cfg.d_eps)) if use_noise else None
        for t in range(length):
            states[t] = z[0]
            e = Tensor(eps[t : t + 1]) if use_noise else None
            z = evolve_step(Tensor(z), e, self.core).data
        obs = observe(Tensor(states), self.core).data
        return obs, states

    def evolve_map_np(self, z: np.ndarray) -> np.ndarray:
        return evolve_map(Tensor(np.atleast_2d(z)), self.core).data

    def initial_states_from_windows(self, windows: np.ndarray) -> np.ndarray:
        """Batched causal state estimates: (N, k, d_x) -> (N, d_z) at the
        final step of each window."""
        zhat = self.encode_states(Tensor(windows), causal=True)
        return complete_state(zhat[:, -1, :], self.core).data

    def prior_step(self, states: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
        """Free-run transition with prior noise on a (N, d_z) batch."""
        eps = None
        if self.stochastic and rng is not None:
            eps = Tensor(rng.standard_normal((states.shape[0], self.cfg.d_eps)))
        return evolve_step(Tensor(states), eps, self.core).data
