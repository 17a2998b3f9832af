"""HTTP service: one POST endpoint per command, each returning an Outcome."""
from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__, service
from .models import CheckRequest, CompareRequest, EmitRequest, OrderRequest, Outcome, SimRequest, json_schemas
from .scjmodel import BUILTINS

app = FastAPI(title="scjl2", version=__version__)


@app.exception_handler(service.InputError)
async def _input_error(_, exc: service.InputError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "tool": f"scjl2 {__version__}"}


@app.get("/builtins")
def builtins() -> dict:
    return {"topologies": list(BUILTINS), "scenarios": list(service.scenario_names())}


@app.get("/schemas")
def schemas() -> dict:
    return json_schemas()


@app.post("/check", response_model=Outcome, response_model_by_alias=True)
def check(req: CheckRequest) -> Outcome:
    return service.check(req)


@app.post("/compare", response_model=Outcome, response_model_by_alias=True)
def compare(req: CompareRequest) -> Outcome:
    return service.compare(req)


@app.post("/order", response_model=Outcome, response_model_by_alias=True)
def order(req: OrderRequest) -> Outcome:
    return service.order(req)


@app.post("/sim", response_model=Outcome, response_model_by_alias=True)
def sim(req: SimRequest) -> Outcome:
    return service.sim(req)


@app.post("/emit-model", response_model=Outcome, response_model_by_alias=True)
def emit_model(req: EmitRequest) -> Outcome:
    return service.emit_model(req)
