"""FastAPI front-end exposing the design/simulate/synthesize/verify/curve pipelines."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .ndpa import RankOneConditionError
from .pipelines import run_curve, run_design, run_simulate, run_synthesize, run_verify
from .schemas import (
    CurveRequest,
    DesignRequest,
    SimulateRequest,
    SynthesizeRequest,
    VerifyRequest,
)

app = FastAPI(
    title="qobserver",
    version=__version__,
    description="Direct-coupled coherent quantum observer design and simulation service",
)


def _domain(call, *args):
    """Map domain errors to HTTP statuses: 409 infeasible, 422 invalid."""
    try:
        return call(*args)
    except RankOneConditionError as exc:
        raise HTTPException(status_code=409, detail={"message": str(exc), "residual": exc.residual})
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/design")
def design(req: DesignRequest) -> dict:
    return _domain(run_design, req)


@app.post("/simulate")
def simulate(req: SimulateRequest) -> dict:
    return _domain(run_simulate, req)


@app.post("/synthesize")
def synthesize(req: SynthesizeRequest) -> dict:
    return _domain(run_synthesize, req)


@app.post("/verify")
def verify(req: VerifyRequest) -> dict:
    return _domain(run_verify, req)


@app.post("/curve")
def curve(req: CurveRequest) -> dict:
    return _domain(run_curve, req)
