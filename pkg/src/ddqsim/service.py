"""FastAPI service wrapping the simulator.

Endpoints mirror the CLI subcommands: POST /run, /verify, /bench, /gen,
plus GET /health.  Request validation errors and usage errors map to
400/422; anything else that goes wrong in a run is a 500.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .report import BenchReport, BenchRequest, GenRequest, GenResponse, RunReport, RunRequest
from .runner import UsageError, do_bench, do_gen, do_run, do_verify

app = FastAPI(title="ddqsim", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


def _guard(fn, *args):
    try:
        return fn(*args)
    except UsageError as ex:
        raise HTTPException(status_code=400, detail=str(ex)) from ex


@app.post("/run", response_model=RunReport)
def run_endpoint(req: RunRequest) -> RunReport:
    return _guard(do_run, req)


@app.post("/verify", response_model=RunReport)
def verify_endpoint(req: RunRequest) -> RunReport:
    return _guard(do_verify, req)


@app.post("/bench", response_model=BenchReport)
def bench_endpoint(req: BenchRequest) -> BenchReport:
    return _guard(do_bench, req)


@app.post("/gen", response_model=GenResponse)
def gen_endpoint(req: GenRequest) -> GenResponse:
    return _guard(do_gen, req)
