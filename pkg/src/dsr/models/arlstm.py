"""Autoregressive LSTM baseline with scheduled sampling.

A standard LSTM cell whose Gaussian output feeds back as input; initial
conditions (h0, c0, x0) are estimated from a past window by a conv stack,
a linear bottleneck, and a two-layer ReLU perceptron. During training the
input at each prediction step is the model's own draw with probability
gamma, the recorded observation otherwise.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from .conv import ConvStack
from .params import ModelConfig, ParamSet


class ArLstmModel:
    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        assert cfg.variant == "arlstm"
        self.cfg = cfg
        self.params = ParamSet(rng)
        p = self.params
        H, d_x = cfg.arlstm_state, cfg.d_x
        code, hidden = cfg.arlstm_code, cfg.arlstm_mlp_hidden
        self.H = H
        self.w_ih = p.uniform("gen.lstm.w_ih", (d_x, 4 * H), d_x)
        self.w_hh = p.uniform("gen.lstm.w_hh", (H, 4 * H), H)
        self.b = p.zeros("gen.lstm.b", (4 * H,))
        self.w_out = p.uniform("gen.head.w", (H, 2 * d_x), H)
        self.b_out = p.zeros("gen.head.b", (2 * d_x,))
        self.stack = ConvStack(p, "init.conv", d_x, None, cfg, causal=False)
        self.w_code = p.uniform("init.code.w", (cfg.conv_channels, code), cfg.conv_channels)
        self.b_code = p.zeros("init.code.b", (code,))
        self.w_m1 = p.uniform("init.mlp.w1", (code, hidden), code)
        self.b_m1 = p.zeros("init.mlp.b1", (hidden,))
        self.w_m2 = p.uniform("init.mlp.w2", (hidden, 2 * H + d_x), hidden)
        self.b_m2 = p.zeros("init.mlp.b2", (2 * H + d_x,))
        self.clamp = cfg.logvar_clamp
        self.stochastic = True

    def main_params(self) -> list[Tensor]:
        return [t for _, t in self.params.items()]

    def causal_params(self) -> list[Tensor]:
        return []

    def initial_conditions(self, x_past) -> tuple[Tensor, Tensor, Tensor]:
        """(h0, c0, x0) from the past window (B, T_past, d_x)."""
        feats = self.stack(ad.as_tensor(x_past))
        code = ad.add(ad.matmul(feats[:, -1, :], self.w_code), self.b_code)
        hidden = ad.relu(ad.add(ad.matmul(code, self.w_m1), self.b_m1))
        out = ad.add(ad.matmul(hidden, self.w_m2), self.b_m2)
        H, d_x = self.H, self.cfg.d_x
        return out[:, :H], out[:, H : 2 * H], out[:, 2 * H :]

    def predict_window(
        self,
        x_past,
        n_steps: int,
        gamma: float,
        rng: np.random.Generator,
        x_future=None,
    ):
        """Roll the cell forward for n_steps from estimated initial conditions.

        Per step the next input is the reparameterized draw from the
        emitted Gaussian with probability gamma, otherwise the recorded
        value from x_future (required when gamma < 1). Returns
        (mu, logvar, samples): stacked (B, n_steps, d_x) Gaussian
        parameters and the per-step sample list.
        """
        if gamma < 1.0 and x_future is None:
            raise ValueError("predict_window: gamma < 1 requires data to feed back")
        h, c, x = self.initial_conditions(x_past)
        B = h.shape[0]
        d_x = self.cfg.d_x
        xi = rng.standard_normal((B, n_steps, d_x))
        feed_own = rng.random((B, n_steps)) < gamma
        heads, samples = [], []
        for t in range(n_steps):
            h, c = ad.lstm_cell(x, h, c, self.w_ih, self.w_hh, self.b)
            head = ad.add(ad.matmul(h, self.w_out), self.b_out)
            sample, _ = ad.reparam_gaussian(head, xi[:, t, :], self.clamp)
            heads.append(head)
            samples.append(sample)
            if gamma >= 1.0:
                x = sample
            elif gamma <= 0.0:
                x = x_future[:, t, :]
            else:
                mask = Tensor(feed_own[:, t : t + 1].astype(float))
                x = ad.add(ad.mul(sample, mask), ad.mul(x_future[:, t, :], 1.0 - mask))
        head_seq = ad.stack_steps(heads, axis=1)
        mu = head_seq[:, :, :d_x]
        logvar = ad.clamp(head_seq[:, :, d_x:], -self.clamp, self.clamp)
        return mu, logvar, samples

    # ---- evaluation / analysis API -----------------------------------------
    def noise_amplitude(self) -> float:
        return 1.0

    def state_dim(self) -> int:
        return 2 * self.H + self.cfg.d_x

    def _unpack(self, state: np.ndarray):
        H = self.H
        return state[:, :H], state[:, H : 2 * H], state[:, 2 * H :]

    def deterministic_step(self, state: np.ndarray) -> np.ndarray:
        """Mean map on the stacked (h, c, x) state, for attractor analysis."""
        state = np.atleast_2d(state)
        h, c, x = (Tensor(v) for v in self._unpack(state))
        h, c = ad.lstm_cell(x, h, c, self.w_ih, self.w_hh, self.b)
        head = ad.add(ad.matmul(h, self.w_out), self.b_out)
        mu = head[:, : self.cfg.d_x]
        return np.concatenate([h.data, c.data, mu.data], axis=1)

    def observe_np(self, state: np.ndarray) -> np.ndarray:
        return self._unpack(np.atleast_2d(state))[2]

    def embedded_states(self, x: np.ndarray, causal: bool = True) -> np.ndarray:
        """Initial-condition states along the series, one per window end."""
        T_past = min(len(x), 300)
        h, c, x0 = self.initial_conditions(Tensor(np.asarray(x)[None, :T_past]))
        return np.concatenate([h.data, c.data, x0.data], axis=1)

    def initial_state_causal(self, x_past: np.ndarray) -> np.ndarray:
        h, c, x0 = self.initial_conditions(Tensor(np.asarray(x_past)[None]))
        return np.concatenate([h.data[0], c.data[0], x0.data[0]])

    def initial_states_from_windows(self, windows: np.ndarray) -> np.ndarray:
        T_past = min(windows.shape[1], 300)
        h, c, x0 = self.initial_conditions(Tensor(windows[:, -T_past:, :]))
        return np.concatenate([h.data, c.data, x0.data], axis=1)

    def prior_step(self, states: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
        out = self.deterministic_step(states)
        if rng is not None:
            h, c, x = (Tensor(v) for v in self._unpack(np.atleast_2d(states)))
            h2, c2 = ad.lstm_cell(x, h, c, self.w_ih, self.w_hh, self.b)
            head = ad.add(ad.matmul(h2, self.w_out), self.b_out)
            mu = head.data[:, : self.cfg.d_x]
            lv = np.clip(head.data[:, self.cfg.d_x :], -self.clamp, self.clamp)
            draw = mu + np.exp(0.5 * lv) * rng.standard_normal(mu.shape)
            out = np.concatenate([h2.data, c2.data, draw], axis=1)
        return out

    def generate(
        self, z0: np.ndarray, length: int, rng: np.random.Generator | None
    ) -> tuple[np.ndarray, np.ndarray]:
        state = np.atleast_2d(np.asarray(z0, dtype=float))
        h, c, x = (Tensor(v) for v in self._unpack(state))
        obs = np.empty((length, self.cfg.d_x))
        states = np.empty((length, self.state_dim()))
        for t in range(length):
            states[t] = np.concatenate([h.data[0], c.data[0], x.data[0]])
            obs[t] = x.data[0]
            h, c = ad.lstm_cell(x, h, c, self.w_ih, self.w_hh, self.b)
            head = ad.add(ad.matmul(h, self.w_out), self.b_out)
            mu, logvar = head.data[:, : self.cfg.d_x], head.data[:, self.cfg.d_x :]
            if rng is not None:
                draw = mu + np.exp(0.5 * np.clip(logvar, -self.clamp, self.clamp)) * rng.standard_normal(mu.shape)
            else:
                draw = mu
            x = Tensor(draw)
        return obs, states
