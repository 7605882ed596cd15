"""FastAPI service wrapping the computation engine.

POST /v1/run executes one command and returns the versioned ResultDocument;
GET /v1/catalog lists the named spaces with their golden dimensions.  Library
errors map to HTTP 422 with the CLI exit code in the payload, so thin clients
can propagate it.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .engine import COMMANDS, ResultDocument, catalog_documents, parse_space_expr, run_command
from .errors import DcohomError, exit_code_for

app = FastAPI(title="dcohom", version=__version__)


class RunRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    command: str
    space: str
    window: int = 6
    omega: str | None = None
    lam: str | None = Field(None, alias="lambda")


class Witness(BaseModel):
    kind: str
    expr: str


class DocumentModel(BaseModel):
    schema_version: int
    command: str
    space: str
    dims: dict[str, list[int]]
    stabilized: list[bool]
    witnesses: list[Witness]
    status: str


class ErrorBody(BaseModel):
    name: str
    message: str
    exit_code: int


@app.get("/v1/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/v1/catalog")
def catalog():
    return {"schema_version": 1, "entries": catalog_documents()}


@app.post("/v1/run", response_model=DocumentModel, responses={422: {"model": ErrorBody}})
def run(req: RunRequest):
    if req.command not in COMMANDS:
        return _error(ValueError(f"unknown command {req.command!r}"))
    try:
        spec = parse_space_expr(req.space)
        doc = run_command(req.command, spec, window=req.window, omega=req.omega, lam=req.lam)
    except DcohomError as exc:
        return _error(exc)
    except ValueError as exc:
        return _error(exc)
    return doc.to_json_dict()


def _error(exc: Exception) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={
            "name": type(exc).__name__,
            "message": str(exc),
            "exit_code": exit_code_for(exc),
        },
    )
