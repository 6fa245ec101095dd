"""Reconstruction of stochastic dynamical systems from partially observed time series.

Subpackages:
    autodiff    reverse-mode differentiation engine, optimizer
    datasets    benchmark generators, external-recording preprocessing, storage
    embedding   mutual-information delay selection, delay embedding
    models      generative model, encoders, model variants
    training    loss assembly, training loop, parameter sweeps
    evaluation  reconstruction-quality measures and reports
    analysis    attractor detection, Lyapunov exponents, forcing-interval diagnostics
    cli         command-line interface
"""

__version__ = "0.1.0"
