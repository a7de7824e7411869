"""Analysis runners and parameter sweeps shared by the CLI and the service."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .config import ConfigError, ProtocolConfig
from .keyrate import (
    BudgetError,
    FiniteBudget,
    RateReport,
    asymptotic_rate,
    derive_budget,
    finite_key_length,
    ghz_protocol_rate,
    leak_ec_bits,
)
from .photonics import BipartiteStats, SourceKind, SourceModel, bipartite_stats, ghz_source_gain, x_parity_error
from .simulation import (
    CorrelatedRound,
    Decision,
    MatchedRound,
    SimEstimates,
    apply_xor,
    correlation_test,
    estimate_statistics,
    generate_events,
    post_match,
)
from .verifier import MAX_PARTIES, MIN_PARTIES, EquivalenceReport, check_equivalence

MODES = ("asymptotic", "finite", "ghz_compare", "simulate")
VARIABLES = ("distance", "n", "mu", "n_signals")

# Event-level simulation walks every pulse; larger budgets belong to the
# analytic finite mode.
MAX_SIMULATED_PULSES = 10**9

CSV_COLUMNS = (
    "mode",
    "n",
    "N_s",
    "mu",
    "L_km",
    "gain",
    "e_x",
    "e_z_max",
    "rate_per_pulse",
    "key_length",
)


def link_stats(config: ProtocolConfig) -> list[BipartiteStats]:
    """Bipartite statistics of each dealer-player pair."""
    return [bipartite_stats(config.source, config.dealer_link, link) for link in config.links]


def _pooled_inputs(stats: list[BipartiteStats]) -> tuple[float, list[float], float]:
    # The poorest link bounds the matched-round rate; errors aggregate
    # per-link.
    gain = min(s.gain for s in stats)
    marginals = [s.error_z for s in stats]
    e_x = x_parity_error([s.error_x for s in stats])
    return gain, marginals, e_x


def run_rate(config: ProtocolConfig) -> RateReport:
    """Asymptotic secret key rate for the configured network."""
    gain, marginals, e_x = _pooled_inputs(link_stats(config))
    rate = asymptotic_rate(gain, marginals, e_x, config.security.f_e)
    return RateReport(
        gain=gain,
        e_x_total=e_x,
        e_z_marginals=marginals,
        rate_per_pulse=rate,
    )


def run_finite(config: ProtocolConfig) -> RateReport:
    """Finite-size key length and per-pulse rate for the configured network."""
    gain, marginals, e_x = _pooled_inputs(link_stats(config))
    budget = derive_budget(config.n_signals, config.p_x, gain)
    length = finite_key_length(budget, config.security, marginals, e_x)
    return RateReport(
        gain=gain,
        e_x_total=e_x,
        e_z_marginals=marginals,
        rate_per_pulse=length / config.n_signals,
        key_length=length,
        leak_ec_bits=leak_ec_bits(budget.m, config.security.f_e, e_x),
    )


def run_ghz_compare(config: ProtocolConfig) -> tuple[RateReport, RateReport]:
    """Asymptotic rates of this protocol and of direct n-party distribution."""
    ours = run_rate(config)
    links = config.all_links()
    perfect = SourceModel(kind=SourceKind.PERFECT)
    stats = [bipartite_stats(perfect, links[0], link) for link in links[1:]]
    ghz = RateReport(
        gain=ghz_source_gain(links),
        e_x_total=x_parity_error([s.error_x for s in stats]),
        e_z_marginals=[s.error_z for s in stats],
        rate_per_pulse=ghz_protocol_rate(links, config.security.f_e, config.n_participants),
    )
    return ours, ghz


@dataclass(frozen=True)
class SimulationResult:
    estimates: SimEstimates
    decision: Decision
    report: RateReport
    matched: list[MatchedRound]
    correlated: list[CorrelatedRound]


def run_simulation(config: ProtocolConfig) -> SimulationResult:
    """Full Monte-Carlo pass: sample, match, correlate, estimate, rate.

    The finite-key evaluation uses the observed budget (matched round
    counts) and observed error rates in place of the analytic ones.
    """
    if config.n_signals > MAX_SIMULATED_PULSES:
        raise ConfigError(
            "n_signals",
            f"event-level simulation is capped at {MAX_SIMULATED_PULSES:.0e} pulses;"
            " use the analytic finite mode for larger budgets",
        )
    stats = link_stats(config)
    streams = generate_events(stats, config.n_players, config.n_signals, config.p_x, config.seed)
    matched = post_match(streams)
    correlated = [apply_xor(m) for m in matched]
    est = estimate_statistics(correlated, matched, config.n_signals)
    decision = correlation_test(est, config.abort_threshold)

    budget = FiniteBudget(
        n_signals=config.n_signals, m=est.rounds_x, k=est.rounds_z, k_i=est.rounds_z
    )
    length = finite_key_length(budget, config.security, est.e_z_marginal_est, est.e_x_est)
    leak = leak_ec_bits(budget.m, config.security.f_e, est.e_x_est)
    report = RateReport(
        gain=est.gain_est,
        e_x_total=est.e_x_est,
        e_z_marginals=est.e_z_marginal_est,
        rate_per_pulse=length / config.n_signals,
        key_length=length,
        leak_ec_bits=leak,
    )
    return SimulationResult(
        estimates=est, decision=decision, report=report, matched=matched, correlated=correlated
    )


def run_verify(n_min: int, n_max: int) -> list[EquivalenceReport]:
    """Equivalence reports for every participant count in [n_min, n_max]."""
    if not MIN_PARTIES <= n_min <= n_max <= MAX_PARTIES:
        raise ValueError(
            f"verification range must satisfy {MIN_PARTIES} <= n_min <= n_max <= {MAX_PARTIES},"
            f" got [{n_min}, {n_max}]"
        )
    reports: list[EquivalenceReport] = []
    for n in range(n_min, n_max + 1):
        reports.extend(check_equivalence(n))
    return reports


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable evaluated under one or more analysis modes.

    ``n_values`` and ``n_signals_values`` add participant-count and
    pulse-budget series on top of the swept variable, one row per
    combination.
    """

    variable: str
    values: list[float]
    modes: list[str]
    n_values: list[int] | None = None
    n_signals_values: list[int] | None = None

    def __post_init__(self) -> None:
        if self.variable not in VARIABLES:
            raise ConfigError("sweep.variable", f"must be one of {VARIABLES}, got {self.variable!r}")
        if not self.values:
            raise ConfigError("sweep.values", "must be a non-empty list")
        if not self.modes:
            raise ConfigError("sweep.modes", "must list at least one mode")
        for mode in self.modes:
            if mode not in MODES:
                raise ConfigError("sweep.modes", f"unknown mode {mode!r}; choose from {MODES}")
        if self.variable == "n":
            if self.n_values is not None:
                raise ConfigError("sweep.n_values", "cannot combine n_values with variable 'n'")
            for v in self.values:
                if int(v) != v or int(v) < 3:
                    raise ConfigError("sweep.values", f"participant counts must be integers >= 3, got {v!r}")
        if self.variable == "n_signals":
            if self.n_signals_values is not None:
                raise ConfigError(
                    "sweep.n_signals_values", "cannot combine n_signals_values with variable 'n_signals'"
                )
            for mode in self.modes:
                if mode in ("asymptotic", "ghz_compare"):
                    raise ConfigError(
                        "sweep.variable",
                        f"n_signals sweep is meaningless in mode {mode!r}",
                    )
        if self.n_values is not None:
            for v in self.n_values:
                if v < 3:
                    raise ConfigError("sweep.n_values", f"participant counts must be >= 3, got {v!r}")
        if self.n_signals_values is not None:
            for v in self.n_signals_values:
                if v <= 0:
                    raise ConfigError("sweep.n_signals_values", f"pulse counts must be > 0, got {v!r}")


def sweep_spec_from_dict(data: dict[str, Any]) -> SweepSpec:
    known = {"variable", "values", "mode", "modes", "n_values", "n_signals_values"}
    for key in data:
        if key not in known:
            raise ConfigError(f"sweep.{key}", "unknown sweep field")
    modes = data.get("modes", data.get("mode"))
    if modes is None:
        raise ConfigError("sweep.modes", "missing")
    if isinstance(modes, str):
        modes = [m.strip() for m in modes.replace("+", ",").split(",") if m.strip()]
    values = data.get("values")
    if not isinstance(values, list):
        raise ConfigError("sweep.values", "must be a list")
    n_values = data.get("n_values")
    if n_values is not None and not isinstance(n_values, list):
        raise ConfigError("sweep.n_values", "must be a list")
    budgets = data.get("n_signals_values")
    if budgets is not None and not isinstance(budgets, list):
        raise ConfigError("sweep.n_signals_values", "must be a list")
    return SweepSpec(
        variable=data.get("variable", "distance"),
        values=[float(v) for v in values],
        modes=list(modes),
        n_values=None if n_values is None else [int(v) for v in n_values],
        n_signals_values=None if budgets is None else [int(v) for v in budgets],
    )


def _resize_participants(config: ProtocolConfig, n: int) -> ProtocolConfig:
    """Symmetric resize: replicate the first player arm to n-1 links."""
    template = config.links[0]
    return replace(config, n_participants=n, links=[template] * (n - 1))


def _apply_variable(config: ProtocolConfig, variable: str, value: float) -> ProtocolConfig:
    if variable == "distance":
        return config.with_distance(float(value))
    if variable == "n":
        return _resize_participants(config, int(value))
    if variable == "mu":
        if config.source.kind is not SourceKind.PAIR:
            raise ConfigError("sweep.variable", "mu sweep requires a pair source")
        return replace(config, source=SourceModel(kind=SourceKind.PAIR, mu=float(value)))
    if variable == "n_signals":
        return replace(config, n_signals=int(value))
    raise ConfigError("sweep.variable", f"unknown variable {variable!r}")


def report_row(mode: str, config: ProtocolConfig, report: RateReport) -> dict[str, Any]:
    """One fixed-schema output row echoing the inputs it was computed from."""
    mu = config.source.mu if config.source.kind is SourceKind.PAIR else 0.0
    if mode == "ghz_compare":
        mu = 0.0
    return {
        "mode": mode,
        "n": config.n_participants,
        "N_s": config.n_signals,
        "mu": mu,
        "L_km": config.links[0].distance_km,
        "gain": report.gain,
        "e_x": report.e_x_total,
        "e_z_max": max(report.e_z_marginals) if report.e_z_marginals else 0.0,
        "rate_per_pulse": report.rate_per_pulse,
        "key_length": report.key_length,
    }


def rows_for_mode(mode: str, config: ProtocolConfig) -> list[dict[str, Any]]:
    if mode == "asymptotic":
        return [report_row(mode, config, run_rate(config))]
    if mode == "finite":
        try:
            return [report_row(mode, config, run_finite(config))]
        except BudgetError:
            # Past the reach of the pulse budget; keep the zero row so a
            # distance scan shows where the key length dies.
            gain, marginals, e_x = _pooled_inputs(link_stats(config))
            starved = RateReport(gain=gain, e_x_total=e_x, e_z_marginals=marginals)
            return [report_row(mode, config, starved)]
    if mode == "ghz_compare":
        _, ghz = run_ghz_compare(config)
        return [report_row(mode, config, ghz)]
    if mode == "simulate":
        return [report_row(mode, config, run_simulation(config).report)]
    raise ConfigError("mode", f"unknown mode {mode!r}")


def run_sweep(config: ProtocolConfig, spec: SweepSpec) -> list[dict[str, Any]]:
    """Evaluate every (mode, n, budget, value) combination into fixed rows.

    Rows appear in deterministic input order: modes outermost, then the
    participant and pulse-budget series, swept values innermost.  Zero-rate
    rows are kept.
    """
    n_series = spec.n_values or [config.n_participants]
    budget_series = spec.n_signals_values or [config.n_signals]
    rows: list[dict[str, Any]] = []
    for mode in spec.modes:
        for n in n_series:
            base = _resize_participants(config, n) if n != config.n_participants else config
            for n_signals in budget_series:
                series = replace(base, n_signals=n_signals) if n_signals != base.n_signals else base
                for value in spec.values:
                    rows.extend(rows_for_mode(mode, _apply_variable(series, spec.variable, value)))
    return rows
