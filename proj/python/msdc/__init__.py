"""Delayed car-following model: simulation, stability analysis and identification."""

from ._core import (
    BankConfig,
    CFParams,
    IqrEstimator,
    ReducedParams,
    acceleration,
    batch_ls,
    identify,
    inject_noise,
    is_stable,
    measure_snr,
    relaxation_length,
    rmse,
    simulate_dde,
    simulate_euler,
    stability_sweep,
    steady_state,
)

__all__ = [
    "BankConfig",
    "CFParams",
    "IqrEstimator",
    "ReducedParams",
    "acceleration",
    "batch_ls",
    "identify",
    "inject_noise",
    "is_stable",
    "measure_snr",
    "relaxation_length",
    "rmse",
    "simulate_dde",
    "simulate_euler",
    "stability_sweep",
    "steady_state",
]
