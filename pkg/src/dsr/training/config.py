"""Training configuration and sweep grids."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

from ..models.params import ModelConfig

DATASET_STATE_DIM = {"lorenz": 5}  # all other benchmarks use 8


@dataclass
class TrainingConfig:
    variant: str = "dpdsr"
    dataset: str = "doublewell"
    # swept hyperparameters
    tau: int = 20
    log_var_eta: float = -2.0  # log sigma_eta^2; sigma_zhat^2 rule adds +2
    log_var_eps: float = -4.0  # dkf: initial system-noise log variance
    gamma: float = 0.2  # arlstm: probability of feeding back the model's own draw
    t_pred: int = 50  # arlstm: prediction-window length
    # optimization schedule
    chunk_T: int = 300
    batch_size: int = 16
    trim: int = 50
    mc_samples: int = 4
    iterations: int = 30000
    lr: float = 1e-3
    lr_decay: float = 0.3
    lr_breakpoints: tuple = (10000, 20000)
    clip_threshold: float = 100.0
    checkpoint_every: int = 5000
    iter_scale: float = 1.0  # desk-scale factor applied to the schedule
    seed: int = 0
    # regularization
    alpha_g: float = 0.3
    alpha_zhat: float = 0.001
    # architecture
    d_z: int = 0  # 0: derived from the dataset name
    d_zhat: int = 0
    d_eps: int = 1
    hidden_f: int = 256
    hidden_g: int = 32
    conv_channels: int = 24
    conv_layers: int = 7
    conv_kernel: int = 7
    lstm_size: int = 32
    noise_scale_init: float = 1.0

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"teacher forcing interval must be >= 1, got {self.tau}")
        if self.trim < 0 or 2 * self.trim >= self.chunk_T:
            raise ValueError(f"trim {self.trim} must satisfy 0 <= 2*trim < chunk_T")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")

    @property
    def sigma_eta2(self) -> float:
        return math.exp(self.log_var_eta)

    @property
    def sigma_zhat2(self) -> float:
        # one fewer free parameter: estimated-state noise rides two e-folds
        # above the observation noise
        return math.exp(self.log_var_eta + 2.0)

    def resolved(self) -> "TrainingConfig":
        """Apply the desk-scale factor to the iteration schedule."""
        s = self.iter_scale
        if s == 1.0:
            return self
        return replace(
            self,
            iterations=max(1, round(self.iterations * s)),
            lr_breakpoints=tuple(max(1, round(b * s)) for b in self.lr_breakpoints),
            checkpoint_every=max(1, round(self.checkpoint_every * s)),
            iter_scale=1.0,
        )

    def lr_at(self, iteration: int) -> float:
        lr = self.lr
        for b in self.lr_breakpoints:
            if iteration > b:
                lr *= self.lr_decay
        return lr

    def state_dim(self) -> int:
        if self.d_z:
            return self.d_z
        return DATASET_STATE_DIM.get(self.dataset, 8)

    def model_config(self) -> ModelConfig:
        d_z = self.state_dim()
        return ModelConfig(
            variant=self.variant,
            d_z=d_z,
            d_zhat=self.d_zhat,
            d_eps=self.d_eps,
            hidden_f=self.hidden_f,
            hidden_g=self.hidden_g,
            conv_channels=self.conv_channels,
            conv_layers=self.conv_layers,
            conv_kernel=self.conv_kernel,
            lstm_size=self.lstm_size,
            noise_scale_init=self.noise_scale_init,
            log_var_eps_init=self.log_var_eps,
            arlstm_state=24 if self.dataset == "lorenz" else 32,
            arlstm_code=d_z,
        )

    def asdict(self) -> dict:
        d = asdict(self)
        d["lr_breakpoints"] = list(self.lr_breakpoints)
        return d

    @classmethod
    def fromdict(cls, d: dict) -> "TrainingConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "lr_breakpoints" in d:
            d["lr_breakpoints"] = tuple(d["lr_breakpoints"])
        return cls(**d)


@dataclass
class SweepGrid:
    taus: tuple = (1, 10, 20, 40, 60, 80, 100, 200)
    log_var_etas: tuple = (-4.0, -2.0, 0.0)
    log_var_epss: tuple = (-8.0, -6.0, -4.0, -2.0)  # dkf axis
    gammas: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)  # arlstm axes
    t_preds: tuple = (20, 50, 100, 200)
    seeds: int = 4

    def cells(self, variant: str) -> list[dict]:
        if variant in ("dpdsr", "spdsr"):
            axes = [("tau", self.taus), ("log_var_eta", self.log_var_etas)]
        elif variant == "dkf":
            axes = [("log_var_eta", self.log_var_etas), ("log_var_eps", self.log_var_epss)]
        elif variant == "arlstm":
            axes = [("gamma", self.gammas), ("t_pred", self.t_preds)]
        else:
            raise ValueError(f"unknown variant {variant!r}")
        for name, values in axes:
            if not len(values):
                raise ValueError(f"sweep axis {name} is empty")
        if self.seeds < 1:
            raise ValueError("sweep needs at least one seed")
        cells = [{}]
        for name, values in axes:
            cells = [dict(c, **{name: v}) for c in cells for v in values]
        return cells
