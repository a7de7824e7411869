"""FastAPI application exposing the analysis engine over HTTP.

Run with: uvicorn pairqss.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import ConfigError, ProtocolConfig, config_from_dict
from ..keyrate import RateReport
from ..sweeps import (
    CSV_COLUMNS,
    run_ghz_compare,
    run_finite,
    run_rate,
    run_simulation,
    run_sweep,
    run_verify,
    sweep_spec_from_dict,
)
from ..simulation import transcript_records
from .schemas import (
    CompareResponse,
    ConfigSchema,
    EstimatesResponse,
    EquivalenceEntry,
    HealthResponse,
    RateRequest,
    RateResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="pairqss",
    description="Key-rate analysis and protocol simulation for entangled-pair secret sharing networks",
)


def _load(config: ConfigSchema) -> ProtocolConfig:
    try:
        return config_from_dict(config.as_config_dict())
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _rate_response(mode: str, config: ProtocolConfig, report: RateReport) -> RateResponse:
    return RateResponse(
        mode=mode,
        n=config.n_participants,
        gain=report.gain,
        e_x_total=report.e_x_total,
        e_z_marginals=report.e_z_marginals,
        rate_per_pulse=report.rate_per_pulse,
        key_length=report.key_length,
        leak_ec_bits=report.leak_ec_bits,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/rate", response_model=RateResponse)
def rate(request: RateRequest) -> RateResponse:
    config = _load(request.config)
    try:
        return _rate_response("asymptotic", config, run_rate(config))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/finite", response_model=RateResponse)
def finite(request: RateRequest) -> RateResponse:
    config = _load(request.config)
    try:
        return _rate_response("finite", config, run_finite(config))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/compare-ghz", response_model=CompareResponse)
def compare_ghz(request: RateRequest) -> CompareResponse:
    config = _load(request.config)
    try:
        ours, ghz = run_ghz_compare(config)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return CompareResponse(
        ours=_rate_response("asymptotic", config, ours),
        ghz=_rate_response("ghz_compare", config, ghz),
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    config = _load(request.config)
    try:
        result = run_simulation(config)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    transcript = None
    if request.include_transcript:
        transcript = list(transcript_records(result.matched, result.correlated))
    return SimulateResponse(
        decision=result.decision.value,
        estimates=EstimatesResponse(
            gain_est=result.estimates.gain_est,
            e_z_marginal_est=result.estimates.e_z_marginal_est,
            e_x_est=result.estimates.e_x_est,
            rounds_x=result.estimates.rounds_x,
            rounds_z=result.estimates.rounds_z,
        ),
        report=_rate_response("simulate", config, result.report),
        transcript=transcript,
    )


@app.post("/verify", response_model=VerifyResponse)
def verify(request: VerifyRequest) -> VerifyResponse:
    try:
        reports = run_verify(request.n_min, request.n_max)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    entries = [
        EquivalenceEntry(
            n=r.n,
            basis=r.basis.value,
            fidelity=r.fidelity,
            support_match=r.support_match,
            counterexample=None if r.counterexample is None else list(r.counterexample),
        )
        for r in reports
    ]
    passed = all(r.support_match and r.fidelity >= 1.0 - 1e-10 for r in reports)
    return VerifyResponse(passed=passed, reports=entries)


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    config = _load(request.config)
    try:
        spec = sweep_spec_from_dict(request.sweep.model_dump(exclude_none=True))
        rows = run_sweep(config, spec)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return SweepResponse(columns=list(CSV_COLUMNS), rows=rows)
