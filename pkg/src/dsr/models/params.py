"""Parameter containers and initialization."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..autodiff import Tensor


@dataclass
class ModelConfig:
    """Architecture hyperparameters shared by all model variants."""

    variant: str = "dpdsr"  # dpdsr | spdsr | dkf | arlstm
    d_x: int = 1
    d_z: int = 8
    d_zhat: int = 0  # 0: derive as d_z - 1 (noise-injected dimension left free)
    d_eps: int = 1
    hidden_f: int = 256
    hidden_g: int = 32
    conv_channels: int = 24
    conv_layers: int = 7
    conv_kernel: int = 7
    lstm_size: int = 32
    noise_scale_init: float = 1.0
    logvar_clamp: float = 10.0
    log_var_eps_init: float = -4.0  # dkf: initial log system-noise variance
    arlstm_state: int = 32
    arlstm_code: int = 8
    arlstm_mlp_hidden: int = 32

    def __post_init__(self):
        if self.variant not in ("dpdsr", "spdsr", "dkf", "arlstm"):
            raise ValueError(f"unknown model variant {self.variant!r}")
        if self.d_zhat == 0:
            self.d_zhat = self.d_z if self.variant == "dkf" else max(1, self.d_z - 1)
        if not 1 <= self.d_zhat <= self.d_z:
            raise ValueError(f"d_zhat={self.d_zhat} must be in [1, d_z={self.d_z}]")
        if self.d_eps != 1:
            raise ValueError("only one-dimensional system noise is supported")

    def asdict(self) -> dict:
        return asdict(self)

    @classmethod
    def fromdict(cls, d: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


class ParamSet:
    """Ordered, named collection of trainable tensors."""

    def __init__(self, rng: np.random.Generator):
        self._params: dict[str, Tensor] = {}
        self.rng = rng

    def add(self, name: str, value: np.ndarray) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(np.asarray(value, dtype=float), requires_grad=True)
        self._params[name] = t
        return t

    def uniform(self, name: str, shape: tuple, fan_in: int) -> Tensor:
        bound = 1.0 / math.sqrt(fan_in)
        return self.add(name, self.rng.uniform(-bound, bound, size=shape))

    def zeros(self, name: str, shape) -> Tensor:
        return self.add(name, np.zeros(shape))

    def constant(self, name: str, value) -> Tensor:
        return self.add(name, np.asarray(value, dtype=float))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def names(self) -> list[str]:
        return list(self._params)

    def tensors(self, prefix: str = "") -> list[Tensor]:
        return [t for n, t in self._params.items() if n.startswith(prefix)]

    def items(self):
        return self._params.items()

    def n_values(self) -> int:
        return sum(t.size for t in self._params.values())

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {n: t.data.copy() for n, t in self._params.items()}

    def load_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        missing = set(self._params) - set(arrays)
        extra = set(arrays) - set(self._params)
        if missing or extra:
            raise ValueError(
                f"parameter mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        for n, t in self._params.items():
            a = np.asarray(arrays[n], dtype=float)
            if a.shape != t.data.shape:
                raise ValueError(
                    f"parameter {n}: shape {a.shape} does not match {t.data.shape}"
                )
            t.data = a.copy()
