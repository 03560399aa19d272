"""Python face of the robust clustered federated learning core."""

from ._brifca import (
    ConfigError,
    EmptyAggregateError,
    InvalidInputError,
    OverTrimError,
    RngStream,
    coordinate_median,
    coordinate_trimmed_mean,
    diagnose,
    dist,
    empirical_gradient,
    empirical_loss,
    fedavg_mean,
    generate_ground_truth,
    local_erm,
    project,
    run_trial,
    trimmed_kmeans,
)

__all__ = [
    "ConfigError",
    "EmptyAggregateError",
    "InvalidInputError",
    "OverTrimError",
    "RngStream",
    "coordinate_median",
    "coordinate_trimmed_mean",
    "diagnose",
    "dist",
    "empirical_gradient",
    "empirical_loss",
    "fedavg_mean",
    "generate_ground_truth",
    "local_erm",
    "project",
    "run_trial",
    "trimmed_kmeans",
]
