"""Generative dynamics: evolution map, observation map, teacher-forced rollout.

The latent state evolves as z' = tanh(f(z) + noise), where f is a residual
two-layer perceptron and the noise enters through the last state dimension
only. Observations come from a separate two-layer perceptron; observation
noise lives in the likelihood, never here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from .params import ModelConfig, ParamSet


@dataclass
class GenerativeCore:
    d_z: int
    d_zhat: int
    d_eps: int
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor
    wg1: Tensor
    bg1: Tensor
    wg2: Tensor
    bg2: Tensor
    noise_scale: Tensor | None = None  # (d_eps, 1); None in the deterministic variant
    f_init_w: Tensor | None = None  # completes partial states: d_zhat -> d_z - d_zhat
    f_init_b: Tensor | None = None
    squash: bool = True  # tanh stabilization; off for the one-step-prediction variant

    @classmethod
    def build(cls, params: ParamSet, cfg: ModelConfig, with_noise: bool) -> "GenerativeCore":
        d_z, d_zhat, h, hg = cfg.d_z, cfg.d_zhat, cfg.hidden_f, cfg.hidden_g
        core = cls(
            d_z=d_z,
            d_zhat=d_zhat,
            d_eps=cfg.d_eps,
            w1=params.uniform("gen.f.w1", (d_z, h), d_z),
            b1=params.zeros("gen.f.b1", (h,)),
            w2=params.uniform("gen.f.w2", (h, d_z), h),
            b2=params.zeros("gen.f.b2", (d_z,)),
            wg1=params.uniform("gen.g.w1", (d_z, hg), d_z),
            bg1=params.zeros("gen.g.b1", (hg,)),
            wg2=params.uniform("gen.g.w2", (hg, cfg.d_x), hg),
            bg2=params.zeros("gen.g.b2", (cfg.d_x,)),
        )
        if with_noise:
            core.noise_scale = params.constant(
                "gen.noise_scale", np.full((cfg.d_eps, 1), cfg.noise_scale_init)
            )
        if d_zhat < d_z:
            core.f_init_w = params.uniform("gen.f_init.w", (d_zhat, d_z - d_zhat), d_zhat)
            core.f_init_b = params.zeros("gen.f_init.b", (d_z - d_zhat,))
        return core

    def noise_row(self) -> Tensor | None:
        """(d_eps, d_z) injection matrix: zero except the last column."""
        if self.noise_scale is None:
            return None
        onehot = np.zeros((1, self.d_z))
        onehot[0, -1] = 1.0
        return ad.matmul(self.noise_scale, Tensor(onehot))


def evolve_map(z, core: GenerativeCore) -> Tensor:
    """Residual perceptron f(z) = z + relu(z W1 + b1) W2 + b2."""
    hidden = ad.relu(ad.add(ad.matmul(z, core.w1), core.b1))
    return ad.add(z, ad.add(ad.matmul(hidden, core.w2), core.b2))


def evolve_step(z, eps, core: GenerativeCore, noise_row: Tensor | None = None) -> Tensor:
    """One state transition: tanh(f(z) + noise injection).

    `eps` is a (B, d_eps) tensor or None. Output components are strictly
    inside (-1, 1).
    """
    z = ad.as_tensor(z)
    if z.shape[-1] != core.d_z:
        raise ad.ShapeError(f"evolve_step: state dim {z.shape[-1]} != {core.d_z}")
    pre = evolve_map(z, core)
    if eps is not None:
        if core.noise_scale is None:
            raise ValueError("evolve_step: this model has no noise channel")
        row = noise_row if noise_row is not None else core.noise_row()
        pre = ad.add(pre, ad.matmul(ad.as_tensor(eps), row))
    if not core.squash:
        return pre
    return ad.tanh(pre)


def observe(z, core: GenerativeCore) -> Tensor:
    """Deterministic observation g(z); works on (..., d_z) inputs."""
    hidden = ad.relu(ad.add(ad.matmul(z, core.wg1), core.bg1))
    return ad.add(ad.matmul(hidden, core.wg2), core.bg2)


def complete_state(zhat_t, core: GenerativeCore) -> Tensor:
    """Initial condition from a partial state estimate via the trainable
    linear completion; identity when the estimate is full-dimensional."""
    zhat_t = ad.as_tensor(zhat_t)
    if core.d_zhat == core.d_z:
        return zhat_t
    rest = ad.add(ad.matmul(zhat_t, core.f_init_w), core.f_init_b)
    return ad.concat([zhat_t, rest], axis=1)


def rollout_teacher_forced(
    zhat, eps_steps, tau: int, core: GenerativeCore
) -> Tensor:
    """Simulate the state sequence with sparse teacher forcing.

    zhat: (B, T, d_zhat) estimated states; eps_steps: list of >= T-1 noise
    tensors (B, d_eps), or None for the deterministic variant. Counting
    from 0 at the chunk head, every step with t mod tau == 0 replaces the
    first d_zhat input components with the estimate while the remaining
    components evolve freely; eps_steps[t] drives the transition t -> t+1.
    Returns (B, T, d_z).
    """
    if tau < 1:
        raise ValueError(f"rollout: teacher forcing interval must be >= 1, got {tau}")
    zhat = ad.as_tensor(zhat)
    T = zhat.shape[1]
    if eps_steps is not None and len(eps_steps) < T - 1:
        raise ValueError(f"rollout: got {len(eps_steps)} noise steps for T={T}")
    noise_row = core.noise_row() if eps_steps is not None else None
    partial = core.d_zhat < core.d_z
    z = complete_state(zhat[:, 0, :], core)
    states = [z]
    for t in range(T - 1):
        if t % tau == 0:
            inp = ad.concat([zhat[:, t, :], z[:, core.d_zhat :]], axis=1) if partial else zhat[:, t, :]
        else:
            inp = z
        eps_t = eps_steps[t] if eps_steps is not None else None
        z = evolve_step(inp, eps_t, core, noise_row=noise_row)
        states.append(z)
    return ad.stack_steps(states, axis=1)
