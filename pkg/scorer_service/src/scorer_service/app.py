"""FastAPI application implementing the scorer wire protocol.

Endpoints (all floats natural-log):

* ``POST /v1/score``    {"context", "candidates"} -> {"logprobs"}
* ``POST /v1/step``     {"context", "history", "candidates"} -> {"logprobs"}
* ``POST /v1/generate`` {"context"} -> {"text"}
* ``GET  /v1/info``     -> {"name", "tokenizer"}

Request problems return HTTP 4xx with a JSON error body; backend failures
return 5xx.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import toy


class ScoreRequest(BaseModel):
    context: str
    candidates: list[str]


class StepRequest(BaseModel):
    context: str
    history: list[str]
    candidates: list[str]


class GenerateRequest(BaseModel):
    context: str


class LogprobsResponse(BaseModel):
    logprobs: list[float]


class GenerateResponse(BaseModel):
    text: str


class InfoResponse(BaseModel):
    name: str
    tokenizer: str


class ToyBackend:
    """Stateless adapter over the frozen toy model functions."""

    name = toy.NAME
    tokenizer_name = toy.TOKENIZER
    score = staticmethod(toy.score)
    step = staticmethod(toy.step)
    generate = staticmethod(toy.generate)


def make_backend(backend: str, model_path: str | None = None):
    if backend == "toy":
        return ToyBackend()
    if backend == "model":
        from .model_backend import ModelBackendError, Seq2SeqBackend

        if not model_path:
            raise SystemExit("the model backend needs --model-path")
        try:
            return Seq2SeqBackend(model_path)
        except ModelBackendError as exc:
            raise SystemExit(f"refusing to start: {exc}") from exc
    raise SystemExit(f"unknown backend {backend!r}")


def create_app(backend=None) -> FastAPI:
    backend = backend or ToyBackend()
    app = FastAPI(title="scorer-service", version="0.1.0")

    @app.post("/v1/score", response_model=LogprobsResponse)
    def score(request: ScoreRequest):
        try:
            return LogprobsResponse(logprobs=backend.score(request.context, request.candidates))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/v1/step", response_model=LogprobsResponse)
    def step(request: StepRequest):
        try:
            return LogprobsResponse(
                logprobs=backend.step(request.context, request.history, request.candidates)
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/v1/generate", response_model=GenerateResponse)
    def generate(request: GenerateRequest):
        return GenerateResponse(text=backend.generate(request.context))

    @app.get("/v1/info", response_model=InfoResponse)
    def info():
        return InfoResponse(name=backend.name, tokenizer=backend.tokenizer_name)

    return app
