"""HTTP service wrapping the analysis pipelines.

Run with any ASGI server, e.g. ``uvicorn dstab.service:app``.  Request
bodies embed the same problem document the CLI reads from disk, so a file
can be posted as ``{"problem": <file contents>}`` unchanged.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import __version__
from .pipeline import run_analyze, run_roots_csv, run_sample
from .problem import ProblemFormatError, ProblemSpec


class AnalyzeRequest(BaseModel):
    problem: ProblemSpec
    no_oracle: bool = False
    shared_p: bool | None = None


class SampleRequest(BaseModel):
    problem: ProblemSpec


class FixedDegreeModel(BaseModel):
    ok: bool
    expected_degree: int
    detail: str


class SolverModel(BaseModel):
    status: str
    margin: float
    iterations: int


class OracleModel(BaseModel):
    status: str
    samples_checked: int
    worst_margin: float | None
    boundary_grazing: int
    witness: Any = None
    witness_root: list[float] | None = None
    degree_drop_witness: Any = None


class AnalyzeResponse(BaseModel):
    verdict: str
    exit_code: int
    region: str
    stability: str
    family_kind: str
    fixed_degree: FixedDegreeModel
    lmi_count: int
    solver: SolverModel
    oracle: OracleModel | None
    oracle_skipped: bool


class SampleResponse(BaseModel):
    status: str
    exit_code: int
    region: str
    family_kind: str
    samples_checked: int
    worst_margin: float | None
    boundary_grazing: int
    witness: Any = None
    witness_root: list[float] | None = None
    degree_drop_witness: Any = None


app = FastAPI(
    title="dstab",
    version=__version__,
    description="Robust D-stability certification for uncertain polynomial matrix families.",
)


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    try:
        outcome = run_analyze(req.problem, no_oracle=req.no_oracle, shared_p=req.shared_p)
    except (ProblemFormatError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return AnalyzeResponse.model_validate(outcome.to_dict())


@app.post("/sample", response_model=SampleResponse)
def sample(req: SampleRequest) -> SampleResponse:
    try:
        outcome = run_sample(req.problem)
    except (ProblemFormatError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return SampleResponse.model_validate(outcome.to_dict())


@app.post("/roots-csv", response_class=PlainTextResponse)
def roots(req: SampleRequest) -> PlainTextResponse:
    try:
        text = run_roots_csv(req.problem)
    except (ProblemFormatError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return PlainTextResponse(text, media_type="text/csv")
