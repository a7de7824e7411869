"""Entangled-pair quantum secret sharing: simulation and key-rate analysis."""

__version__ = "0.1.0"

from .numerics import LinkParams, binary_entropy, link_efficiency
from .photonics import (
    BipartiteStats,
    SourceKind,
    SourceModel,
    bipartite_stats,
    ghz_source_gain,
    x_total_error,
    z_marginal_error,
)
from .keyrate import (
    FiniteBudget,
    RateReport,
    SecurityParams,
    asymptotic_rate,
    derive_budget,
    finite_key_length,
    fluctuation_lambda,
    ghz_protocol_rate,
)
from .config import ConfigError, ProtocolConfig, config_from_dict, load_config

__all__ = [
    "__version__",
    "LinkParams",
    "binary_entropy",
    "link_efficiency",
    "BipartiteStats",
    "SourceKind",
    "SourceModel",
    "bipartite_stats",
    "ghz_source_gain",
    "x_total_error",
    "z_marginal_error",
    "FiniteBudget",
    "RateReport",
    "SecurityParams",
    "asymptotic_rate",
    "derive_budget",
    "finite_key_length",
    "fluctuation_lambda",
    "ghz_protocol_rate",
    "ConfigError",
    "ProtocolConfig",
    "config_from_dict",
    "load_config",
]
