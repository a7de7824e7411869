"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict


class LinkSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    distance_km: Optional[float] = None
    detector_efficiency: Optional[float] = None
    dark_count: Optional[float] = None
    misalignment: Optional[float] = None
    misalignment_x: Optional[float] = None
    misalignment_z: Optional[float] = None
    attenuation_db_per_km: Optional[float] = None


class SourceSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Optional[str] = None
    mu: Optional[float] = None


class SecuritySchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps_correct: Optional[float] = None
    eps_sample: Optional[float] = None
    eps_prime: Optional[float] = None
    q_complementarity: Optional[float] = None
    f_e: Optional[float] = None


class ConfigSchema(BaseModel):
    """Mirrors the JSON config document; unset fields fall back to defaults."""

    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = None
    n_participants: Optional[int] = None
    distance_km: Optional[float] = None
    link: Optional[LinkSchema] = None
    links: Optional[list[LinkSchema]] = None
    dealer_link: Optional[LinkSchema] = None
    source: Optional[SourceSchema] = None
    p_x: Optional[float] = None
    security: Optional[SecuritySchema] = None
    n_signals: Optional[int] = None
    abort_threshold: Optional[float] = None
    seed: Optional[int] = None

    def as_config_dict(self) -> dict[str, Any]:
        return self.model_dump(exclude_none=True)


class SweepSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variable: str = "distance"
    values: list[float]
    modes: list[str]
    n_values: Optional[list[int]] = None
    n_signals_values: Optional[list[int]] = None


class RateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigSchema = ConfigSchema()


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigSchema = ConfigSchema()
    include_transcript: bool = False


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_min: int = 2
    n_max: int = 8


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigSchema = ConfigSchema()
    sweep: SweepSchema


class RateResponse(BaseModel):
    mode: str
    n: int
    gain: float
    e_x_total: float
    e_z_marginals: list[float]
    rate_per_pulse: float
    key_length: int
    leak_ec_bits: float


class CompareResponse(BaseModel):
    ours: RateResponse
    ghz: RateResponse


class EstimatesResponse(BaseModel):
    gain_est: float
    e_z_marginal_est: list[float]
    e_x_est: float
    rounds_x: int
    rounds_z: int


class SimulateResponse(BaseModel):
    decision: str
    estimates: EstimatesResponse
    report: RateResponse
    transcript: Optional[list[dict[str, Any]]] = None


class EquivalenceEntry(BaseModel):
    n: int
    basis: str
    fidelity: float
    support_match: bool
    counterexample: Optional[list[int]] = None


class VerifyResponse(BaseModel):
    passed: bool
    reports: list[EquivalenceEntry]


class SweepResponse(BaseModel):
    columns: list[str]
    rows: list[dict[str, Any]]


class HealthResponse(BaseModel):
    status: str
    version: str
