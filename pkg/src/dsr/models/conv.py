"""Dilated convolutional sequence encoder.

A stack of residual blocks over a (B, T, C) sequence: dilated conv,
ReLU, 1x1 channel mix, residual add. Dilations double per layer, so a
7-layer stack with kernel 7 sees 1 + 6 * 127 = 763 samples. The causal
flavor pads on the left only; the symmetric flavor splits the padding
evenly (extra element on the left).
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from .params import ModelConfig, ParamSet


class ConvStack:
    def __init__(
        self,
        params: ParamSet,
        prefix: str,
        in_dim: int,
        out_dim: int | None,
        cfg: ModelConfig,
        causal: bool,
    ):
        self.prefix = prefix
        self.causal = causal
        self.kernel = cfg.conv_kernel
        self.dilations = [2**i for i in range(cfg.conv_layers)]
        c = cfg.conv_channels
        add, zeros = params.uniform, params.zeros
        self.w_in = add(f"{prefix}.in.w", (in_dim, c), in_dim)
        self.b_in = zeros(f"{prefix}.in.b", (c,))
        self.layers = []
        for i, dil in enumerate(self.dilations):
            self.layers.append(
                (
                    add(f"{prefix}.l{i}.conv", (self.kernel, c, c), self.kernel * c),
                    zeros(f"{prefix}.l{i}.conv_b", (c,)),
                    add(f"{prefix}.l{i}.mix", (c, c), c),
                    zeros(f"{prefix}.l{i}.mix_b", (c,)),
                    dil,
                )
            )
        if out_dim is None:
            self.w_out = self.b_out = None
        else:
            self.w_out = add(f"{prefix}.out.w", (c, out_dim), c)
            self.b_out = zeros(f"{prefix}.out.b", (out_dim,))

    @property
    def receptive_field(self) -> int:
        return 1 + (self.kernel - 1) * sum(self.dilations)

    def __call__(self, x) -> ad.Tensor:
        x = ad.as_tensor(x)
        mode = "causal" if self.causal else "symmetric"
        h = ad.add(ad.matmul(x, self.w_in), self.b_in)
        for w_conv, b_conv, w_mix, b_mix, dil in self.layers:
            y = ad.add(ad.conv1d_dilated(h, w_conv, dil, mode), b_conv)
            y = ad.add(ad.matmul(ad.relu(y), w_mix), b_mix)
            h = ad.add(h, y)
        if self.w_out is not None:
            h = ad.add(ad.matmul(h, self.w_out), self.b_out)
        return h
