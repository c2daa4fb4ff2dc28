"""HTTP scoring service.

Three endpoints share one request shape::

    POST /v1/tag        {"instances": [{"id": str, "tokens": [str, ...]}, ...]}
    POST /v1/role
    POST /v1/candidate

``/v1/tag`` answers ``{"results": [{"id": ..., "labels": [...]}]}`` with one
label per token; the other two answer ``{"results": [{"id": ...,
"probs": [...]}]}`` with probabilities aligned to the task's label order.
Results preserve request order and ids.  Malformed payloads get a 400 with
``{"error": str}``; every error response uses that shape.
"""

from __future__ import annotations

import pathlib
from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .checkpoint import LoadedModel, load_checkpoint
from .inference import prob_batch, tag_batch
from .labels import TASKS


class Instance(BaseModel):
    id: str
    tokens: list[str]


class ScoreRequest(BaseModel):
    instances: list[Instance]


class BadRequest(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _first_error(exc: RequestValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return "invalid request"
    err = errors[0]
    loc = ".".join(str(part) for part in err.get("loc", ()) if part != "body")
    msg = err.get("msg", "invalid value")
    return f"{loc}: {msg}" if loc else msg


def _checked(req: ScoreRequest) -> list[Instance]:
    seen: set[str] = set()
    for inst in req.instances:
        if inst.id in seen:
            raise BadRequest(f"duplicate instance id {inst.id!r}")
        seen.add(inst.id)
        if not inst.tokens:
            raise BadRequest(f"instance {inst.id!r} has no tokens")
    return req.instances


def create_app(
    checkpoints: Mapping[str, str | pathlib.Path], batch_size: int = 32
) -> FastAPI:
    """Load the given checkpoints and return the ready-to-serve app.

    ``checkpoints`` maps task names to checkpoint directories; any subset
    of tasks may be served.  Endpoints for tasks without a checkpoint
    answer 503 so clients treat them as unavailable rather than broken.
    """
    unknown = sorted(set(checkpoints) - set(TASKS))
    if unknown:
        raise ValueError(f"unknown tasks: {', '.join(unknown)}")
    if not checkpoints:
        raise ValueError("no checkpoints given")

    models: dict[str, LoadedModel] = {}
    for task, directory in checkpoints.items():
        loaded = load_checkpoint(directory)
        if loaded.task != task:
            raise ValueError(
                f"{directory} holds a {loaded.task!r} checkpoint, expected {task!r}"
            )
        models[task] = loaded

    app = FastAPI(title="bioee scorer service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": _first_error(exc)})

    @app.exception_handler(BadRequest)
    async def _on_bad_request(request: Request, exc: BadRequest):
        return JSONResponse(status_code=400, content={"error": exc.message})

    @app.exception_handler(StarletteHTTPException)
    async def _on_http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code, content={"error": str(exc.detail)})

    def _model_or_503(task: str) -> LoadedModel | JSONResponse:
        loaded = models.get(task)
        if loaded is None:
            return JSONResponse(
                status_code=503,
                content={"error": f"no checkpoint loaded for task {task!r}"},
            )
        return loaded

    @app.post("/v1/tag")
    def tag(req: ScoreRequest):
        loaded = _model_or_503("tag")
        if isinstance(loaded, JSONResponse):
            return loaded
        instances = _checked(req)
        labels = tag_batch(loaded, [i.tokens for i in instances], batch_size)
        return {
            "results": [
                {"id": inst.id, "labels": row}
                for inst, row in zip(instances, labels)
            ]
        }

    def _classify(task: str, req: ScoreRequest):
        loaded = _model_or_503(task)
        if isinstance(loaded, JSONResponse):
            return loaded
        instances = _checked(req)
        probs = prob_batch(loaded, [i.tokens for i in instances], batch_size)
        return {
            "results": [
                {"id": inst.id, "probs": row}
                for inst, row in zip(instances, probs)
            ]
        }

    @app.post("/v1/role")
    def role(req: ScoreRequest):
        return _classify("role", req)

    @app.post("/v1/candidate")
    def candidate(req: ScoreRequest):
        return _classify("candidate", req)

    @app.get("/healthz")
    def health():
        return {"status": "ok", "tasks": sorted(models)}

    return app
