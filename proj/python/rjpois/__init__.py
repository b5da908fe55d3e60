"""Reversible jump MCMC for exposure-weighted Poisson mixtures."""

from ._rjpois import (
    ChainTrace,
    DataError,
    Dataset,
    Hyperparams,
    InsufficientSamples,
    RunConfig,
    acceptance_rates,
    cli,
    conditional_estimates,
    hpd_interval,
    load_csv,
    model_probabilities,
    read_traces,
    run,
    simulate,
    summary_json,
    write_csv,
)

__all__ = [
    "ChainTrace",
    "DataError",
    "Dataset",
    "Hyperparams",
    "InsufficientSamples",
    "RunConfig",
    "acceptance_rates",
    "cli",
    "conditional_estimates",
    "hpd_interval",
    "load_csv",
    "model_probabilities",
    "read_traces",
    "run",
    "simulate",
    "summary_json",
    "write_csv",
]
