import numpy as np
import pytest

from dsr.datasets import generate_dataset
from dsr.models import ModelConfig, build_model


@pytest.fixture(scope="session")
def doublewell_small():
    return generate_dataset("doublewell", seed=11, scale=0.02)


@pytest.fixture(scope="session")
def tiny_model_cfg():
    # small but structurally complete: partial state estimate, noise channel,
    # conv + LSTM encoders
    return ModelConfig(
        variant="dpdsr",
        d_z=3,
        d_zhat=2,
        hidden_f=8,
        hidden_g=6,
        conv_channels=4,
        conv_layers=2,
        conv_kernel=3,
        lstm_size=6,
    )


@pytest.fixture()
def tiny_model(tiny_model_cfg):
    return build_model(tiny_model_cfg, np.random.default_rng(0))
