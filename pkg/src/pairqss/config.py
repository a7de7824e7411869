"""Run configuration: JSON loading, defaults, presets, validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .keyrate import SecurityParams
from .numerics import LinkParams
from .photonics import SourceKind, SourceModel


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# Baseline detector/fiber parameter set used when a config does not say
# otherwise.
DEFAULTS: dict[str, Any] = {
    "n_participants": 3,
    "distance_km": 50.0,
    "link": {
        "detector_efficiency": 0.78,
        "dark_count": 1e-7,
        "misalignment": 0.01,
        "attenuation_db_per_km": 0.16,
    },
    "source": {"kind": "pair", "mu": 0.04},
    "p_x": 0.9,
    "security": {
        "eps_correct": 1e-10,
        "eps_sample": 1e-10 / 3.0,
        "eps_prime": 1e-10 / 3.0,
        "q_complementarity": 1.0,
        "f_e": 1.12,
    },
    "n_signals": 10**12,
    "abort_threshold": 0.11,
    "seed": 20240,
}

# Named overlays on top of the defaults.
PRESETS: dict[str, dict[str, Any]] = {
    "table1": {},
    "maintext": {
        "link": {"detector_efficiency": 0.9, "dark_count": 1e-5, "attenuation_db_per_km": 0.2},
        "security": {"f_e": 1.22},
        "source": {"kind": "pair", "mu": 0.04},
    },
}


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything a protocol run needs: network, source, budget, security."""

    n_participants: int
    dealer_link: LinkParams
    links: list[LinkParams]
    source: SourceModel
    p_x: float
    security: SecurityParams
    n_signals: int
    abort_threshold: float = 0.11
    seed: int = 20240

    def __post_init__(self) -> None:
        if self.n_participants < 3:
            raise ConfigError("n_participants", f"must be >= 3, got {self.n_participants}")
        if len(self.links) != self.n_participants - 1:
            raise ConfigError(
                "links",
                f"expected {self.n_participants - 1} player links, got {len(self.links)}",
            )
        if not 0.0 < self.p_x < 1.0:
            raise ConfigError("p_x", f"must lie in (0, 1), got {self.p_x}")
        if self.n_signals <= 0:
            raise ConfigError("n_signals", f"must be > 0, got {self.n_signals}")
        if not 0.0 <= self.abort_threshold <= 0.5:
            raise ConfigError("abort_threshold", f"must lie in [0, 0.5], got {self.abort_threshold}")

    @property
    def n_players(self) -> int:
        return self.n_participants - 1

    def all_links(self) -> list[LinkParams]:
        """All n arms, dealer first."""
        return [self.dealer_link, *self.links]

    def with_distance(self, distance_km: float) -> "ProtocolConfig":
        """Same config with every arm set to the given provider distance."""
        return replace(
            self,
            dealer_link=replace(self.dealer_link, distance_km=distance_km),
            links=[replace(link, distance_km=distance_km) for link in self.links],
        )


def _merge(base: dict, overlay: dict) -> dict:
    out = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _build_link(raw: dict, distance_km: float, where: str) -> LinkParams:
    known = {
        "distance_km",
        "detector_efficiency",
        "dark_count",
        "misalignment",
        "misalignment_x",
        "misalignment_z",
        "attenuation_db_per_km",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(f"{where}.{key}", "unknown link field")
    mis = raw.get("misalignment", 0.01)
    kwargs = {
        "distance_km": raw.get("distance_km", distance_km),
        "detector_efficiency": raw.get("detector_efficiency", 0.78),
        "dark_count": raw.get("dark_count", 1e-7),
        "misalignment_x": raw.get("misalignment_x", mis),
        "misalignment_z": raw.get("misalignment_z", mis),
        "attenuation_db_per_km": raw.get("attenuation_db_per_km", 0.16),
    }
    try:
        return LinkParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from exc


def _build_source(raw: dict) -> SourceModel:
    kind = raw.get("kind", "pair")
    try:
        source_kind = SourceKind(kind)
    except ValueError as exc:
        raise ConfigError("source.kind", f"must be 'pair' or 'perfect', got {kind!r}") from exc
    mu = raw.get("mu", 0.04)
    if source_kind is SourceKind.PAIR and mu <= 0.0:
        raise ConfigError("source.mu", f"pair source requires mu > 0, got {mu}")
    try:
        return SourceModel(kind=source_kind, mu=float(mu))
    except ValueError as exc:
        raise ConfigError("source.mu", str(exc)) from exc


def _build_security(raw: dict) -> SecurityParams:
    known = {"eps_correct", "eps_sample", "eps_prime", "q_complementarity", "f_e"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"security.{key}", "unknown security field")
    try:
        return SecurityParams(**raw)
    except ValueError as exc:
        raise ConfigError("security", str(exc)) from exc


def config_from_dict(data: dict[str, Any]) -> ProtocolConfig:
    """Validate a raw config mapping, applying defaults and presets."""
    if not isinstance(data, dict):
        raise ConfigError("config", "top-level document must be a JSON object")
    preset = data.get("preset", "table1")
    if preset not in PRESETS:
        raise ConfigError("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    merged = _merge(_merge(DEFAULTS, PRESETS[preset]), {k: v for k, v in data.items() if k != "preset"})

    known = {
        "n_participants",
        "distance_km",
        "link",
        "links",
        "dealer_link",
        "source",
        "p_x",
        "security",
        "n_signals",
        "abort_threshold",
        "seed",
    }
    for key in merged:
        if key not in known:
            raise ConfigError(key, "unknown config field")

    n = merged["n_participants"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError("n_participants", f"must be an integer, got {n!r}")

    distance = merged["distance_km"]
    shared = merged["link"]
    if "links" in merged and merged["links"] is not None:
        raw_links = merged["links"]
        if not isinstance(raw_links, list) or not raw_links:
            raise ConfigError("links", "must be a non-empty list of link objects")
        links = [
            _build_link(_merge(shared, raw), distance, f"links[{i}]")
            for i, raw in enumerate(raw_links)
        ]
    else:
        links = [_build_link(shared, distance, "link") for _ in range(max(n - 1, 1))]

    if "dealer_link" in merged and merged["dealer_link"] is not None:
        dealer = _build_link(_merge(shared, merged["dealer_link"]), distance, "dealer_link")
    else:
        # Dealer arm mirrors the first player arm unless stated otherwise.
        dealer = links[0]

    p_x = merged["p_x"]
    if not isinstance(p_x, (int, float)) or not 0.0 < float(p_x) < 1.0:
        raise ConfigError("p_x", f"must lie in (0, 1), got {p_x!r}")

    n_signals = merged["n_signals"]
    if isinstance(n_signals, float) and n_signals.is_integer():
        n_signals = int(n_signals)
    if not isinstance(n_signals, int) or n_signals <= 0:
        raise ConfigError("n_signals", f"must be a positive integer, got {merged['n_signals']!r}")

    seed = merged["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed", f"must be an integer, got {seed!r}")

    threshold = merged["abort_threshold"]
    if not isinstance(threshold, (int, float)) or not 0.0 <= float(threshold) <= 0.5:
        raise ConfigError("abort_threshold", f"must lie in [0, 0.5], got {threshold!r}")

    return ProtocolConfig(
        n_participants=n,
        dealer_link=dealer,
        links=links,
        source=_build_source(merged["source"]),
        p_x=float(p_x),
        security=_build_security(merged["security"]),
        n_signals=n_signals,
        abort_threshold=float(threshold),
        seed=seed,
    )


def load_config(path: str | Path | None) -> ProtocolConfig:
    """Load and validate a JSON config file; ``None`` gives pure defaults."""
    if path is None:
        return config_from_dict({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data)


def _link_to_dict(link: LinkParams) -> dict[str, Any]:
    return {
        "distance_km": link.distance_km,
        "detector_efficiency": link.detector_efficiency,
        "dark_count": link.dark_count,
        "misalignment_x": link.misalignment_x,
        "misalignment_z": link.misalignment_z,
        "attenuation_db_per_km": link.attenuation_db_per_km,
    }


def config_to_dict(config: ProtocolConfig) -> dict[str, Any]:
    """Serialize a validated config; feeding it back reproduces the config."""
    return {
        "n_participants": config.n_participants,
        "distance_km": config.links[0].distance_km,
        "dealer_link": _link_to_dict(config.dealer_link),
        "links": [_link_to_dict(link) for link in config.links],
        "source": {"kind": config.source.kind.value, "mu": config.source.mu},
        "p_x": config.p_x,
        "security": {
            "eps_correct": config.security.eps_correct,
            "eps_sample": config.security.eps_sample,
            "eps_prime": config.security.eps_prime,
            "q_complementarity": config.security.q_complementarity,
            "f_e": config.security.f_e,
        },
        "n_signals": config.n_signals,
        "abort_threshold": config.abort_threshold,
        "seed": config.seed,
    }
