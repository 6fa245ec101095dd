"""Loss assembly for all model variants.

Reconstruction and KL terms are evaluated on the trimmed interior of each
chunk (boundary effects of the convolutional encoders), summed over time,
and averaged over the batch and the Monte Carlo samples.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..models.encoders import PosteriorSample, tile_batch
from .config import TrainingConfig


def kl_autoregressive(sample: PosteriorSample, interior: slice | None = None) -> ad.Tensor:
    """Monte Carlo KL of the autoregressive posterior from the unit-normal
    prior: E_q[log q - log p] over the drawn samples, summed over (trimmed)
    time and averaged over batch lanes and samples."""
    sl = interior if interior is not None else slice(None)
    lq = sample.logq_steps[:, sl]
    lp = ad.reduce_sum(ad.std_normal_log_density(sample.eps[:, sl, :]), axis=2)
    lanes = sample.logq_steps.shape[0]
    return ad.mul(ad.reduce_sum(ad.sub(lq, lp)), 1.0 / lanes)


def state_stats_regularizer(zhat: ad.Tensor, eps: float = 1e-12) -> ad.Tensor:
    """KL(N(mu, diag var) || N(0, I)) of the per-feature batch-and-time
    statistics of the estimated states."""
    mu = ad.reduce_mean(zhat, axis=(0, 1))
    centered = ad.sub(zhat, mu)
    var = ad.add(ad.reduce_mean(ad.square(centered), axis=(0, 1)), eps)
    return ad.kl_diag_gaussian(mu, var)


def l1_penalty(tensors) -> ad.Tensor:
    total = None
    for t in tensors:
        s = ad.reduce_sum(ad.absolute(t))
        total = s if total is None else ad.add(total, s)
    return total


def dpdsr_loss(model, x_batch: np.ndarray, cfg: TrainingConfig, rng: np.random.Generator):
    """Projection-based loss for the stochastic and deterministic variants.

    Returns (total, components, aux) where components maps
    rec_x / rec_zhat / kl / reg_g / reg_zhat to scalar tensors ("kl" only
    for the stochastic variant) and aux carries the state estimates for
    the causal co-training step.
    """
    B, T, _ = x_batch.shape
    a = cfg.trim
    sl = slice(a, T - a)
    d_zhat = model.cfg.d_zhat
    stochastic = model.stochastic
    S = cfg.mc_samples if stochastic else 1

    x = Tensor(x_batch)
    zhat = model.encode_states(x)
    if stochastic:
        post = model.encode_noise(x, zhat, rng, n_samples=S)
        eps_steps = post.eps_steps
    else:
        post, eps_steps = None, None
    zhat_t = tile_batch(zhat, S)
    ztil = model.rollout(zhat_t, eps_steps, cfg.tau)

    xrec = model.observe(ztil[:, sl, :])
    rec_x = ad.mul(
        ad.gaussian_nll(tile_batch(x, S)[:, sl, :], xrec, cfg.sigma_eta2), 1.0 / (S * B)
    )
    rec_zhat = ad.mul(
        ad.gaussian_nll(zhat_t[:, sl, :], ztil[:, sl, :d_zhat], cfg.sigma_zhat2),
        1.0 / (S * B),
    )
    comps = {"rec_x": rec_x, "rec_zhat": rec_zhat}
    if stochastic:
        comps["kl"] = kl_autoregressive(post, interior=sl)
    comps["reg_g"] = ad.mul(l1_penalty([model.core.wg1, model.core.wg2]), cfg.alpha_g)
    comps["reg_zhat"] = ad.mul(state_stats_regularizer(zhat), cfg.alpha_zhat)

    total = None
    for v in comps.values():
        total = v if total is None else ad.add(total, v)
    return total, comps, {"zhat": zhat.data}


def dkf_elbo(model, x_batch: np.ndarray, cfg: TrainingConfig, rng: np.random.Generator):
    """Evidence bound for the one-step-prediction variant, one posterior
    sample per call: KL(q(z|x) || p(z)) - E_q[log p(x|z)]."""
    B, T, _ = x_batch.shape
    x = Tensor(x_batch)
    post = model.encode_states(x, rng, n_samples=1)
    z = post.eps  # (B, T, d_z)

    logq = ad.reduce_sum(post.logq_steps)
    logp0 = ad.reduce_sum(ad.std_normal_log_density(z[:, 0, :]))
    trans_nll = ad.gaussian_nll(
        z[:, 1:, :], model.evolve(z[:, : T - 1, :]), ad.exp(model.log_var_eps)
    )
    kl = ad.mul(ad.add(ad.sub(logq, logp0), trans_nll), 1.0 / B)
    rec = ad.mul(ad.gaussian_nll(x, model.observe(z), cfg.sigma_eta2), 1.0 / B)
    total = ad.add(kl, rec)
    return total, {"kl": kl, "rec_x": rec}, {"posterior_mu": post.mu.data}


def arlstm_loss(model, x_batch: np.ndarray, cfg: TrainingConfig, rng: np.random.Generator):
    """Gaussian NLL of the prediction window under scheduled sampling."""
    B, T, _ = x_batch.shape
    t_pred = cfg.t_pred
    if t_pred >= T:
        raise ValueError(f"prediction window {t_pred} must be shorter than chunk {T}")
    x = Tensor(x_batch)
    x_past = x[:, : T - t_pred, :]
    x_future = x[:, T - t_pred :, :]
    mu, logvar, _ = model.predict_window(
        x_past, t_pred, cfg.gamma, rng, x_future=x_future
    )
    nll = ad.mul(
        ad.neg(ad.reduce_sum(ad.gaussian_log_density(x_future, mu, logvar))), 1.0 / B
    )
    return nll, {"rec_x": nll}, {}


LOSS_FUNCTIONS = {
    "dpdsr": dpdsr_loss,
    "spdsr": dpdsr_loss,
    "dkf": dkf_elbo,
    "arlstm": arlstm_loss,
}


def causal_encoder_loss(pred: ad.Tensor, target: np.ndarray) -> ad.Tensor:
    """Mean squared mismatch between the causal encoder output and the
    detached non-causal target."""
    return ad.reduce_mean(ad.square(ad.sub(pred, Tensor(target))))
