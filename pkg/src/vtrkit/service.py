"""HTTP reward service for RL rollouts.

The handlers are plain functions over JSON-like maps so they can be called
in-process (and benchmarked) without a server; :func:`create_app` wraps them
in a FastAPI application. Handlers share nothing but an immutable config.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, ValidationError

from vtrkit import __version__
from vtrkit.marked import MarkedTextError
from vtrkit.scoring import RewardConfig, composite_reward

DEFAULT_BATCH_LIMIT = 256


class ScoreRequest(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    target: str
    prediction: str
    language: Literal["en", "zh"]
    omega: Optional[float] = None
    w_semantic: Optional[float] = None
    w_quality: Optional[float] = None


class BatchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    items: list[Any]


@dataclass(frozen=True)
class ServiceConfig:
    reward: RewardConfig = field(default_factory=RewardConfig)
    batch_limit: int = DEFAULT_BATCH_LIMIT

    def __post_init__(self):
        if self.batch_limit < 1:
            raise ValueError("batch_limit must be at least 1")


class ServiceError(Exception):
    """A request failure carrying its HTTP status and JSON body."""

    def __init__(self, status: int, body: dict):
        super().__init__(body.get("message", ""))
        self.status = status
        self.body = body


def _schema_error(e: ValidationError) -> ServiceError:
    errors = [
        {"field": ".".join(str(p) for p in err["loc"]) or "<body>", "message": err["msg"]}
        for err in e.errors()
    ]
    return ServiceError(400, {"error": "schema", "message": errors[0]["message"], "fields": errors})


def handle_score(payload: Any, cfg: ServiceConfig = ServiceConfig()) -> dict:
    """Score one request map; raises :class:`ServiceError` on bad input."""
    try:
        req = payload if isinstance(payload, ScoreRequest) else ScoreRequest.model_validate(payload)
    except ValidationError as e:
        raise _schema_error(e) from None
    try:
        rc = RewardConfig.with_overrides(req.omega, req.w_semantic, req.w_quality, base=cfg.reward)
    except ValueError as e:
        fields = [f for f in ("omega", "w_semantic", "w_quality") if getattr(req, f) is not None]
        raise ServiceError(400, {"error": "schema", "message": str(e),
                                 "fields": [{"field": f, "message": str(e)} for f in fields]}) from None
    try:
        report = composite_reward(req.target, req.prediction, req.language, rc)
    except MarkedTextError as e:
        raise ServiceError(422, {"error": "parse", "field": "prediction", "message": e.reason,
                                 "offset": e.offset}) from None
    except ValueError as e:
        raise ServiceError(400, {"error": "schema", "message": str(e),
                                 "fields": [{"field": "target", "message": str(e)}]}) from None
    return {
        "semantic": report.semantic,
        "quality": report.quality,
        "reward": report.reward,
        "unmatched": report.unmatched_count,
        "n_anomalous": report.n_anomalous,
        "n_total": report.n_total,
    }


def handle_batch(payload: Any, cfg: ServiceConfig = ServiceConfig()) -> dict:
    """Score ``{"items": [...]}`` in order. Failing items become
    ``{"error": {..., "status": code}}`` slots instead of failing the batch."""
    try:
        batch = BatchRequest.model_validate(payload)
    except ValidationError as e:
        raise _schema_error(e) from None
    n = len(batch.items)
    if n > cfg.batch_limit:
        raise ServiceError(413, {"error": "batch_too_large", "message": f"batch of {n} exceeds the limit",
                                 "limit": cfg.batch_limit, "size": n})
    if n == 0:
        raise ServiceError(400, {"error": "schema", "message": "batch must not be empty",
                                 "fields": [{"field": "items", "message": "empty"}]})
    results = []
    for item in batch.items:
        try:
            results.append(handle_score(item, cfg))
        except ServiceError as e:
            results.append({"error": {**e.body, "status": e.status}})
    return {"results": results}


def handle_health(cfg: ServiceConfig = ServiceConfig()) -> dict:
    return {
        "status": "ok",
        "version": __version__,
        "omega": cfg.reward.omega,
        "w_semantic": cfg.reward.w_semantic,
        "w_quality": cfg.reward.w_quality,
        "batch_limit": cfg.batch_limit,
    }


def create_app(cfg: ServiceConfig = ServiceConfig()) -> FastAPI:
    app = FastAPI(title="vtrkit reward service", version=__version__)

    async def _body(request: Request):
        raw = await request.body()
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ServiceError(400, {"error": "schema", "message": f"body is not valid JSON: {e}",
                                     "fields": [{"field": "<body>", "message": "invalid JSON"}]}) from None

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(exc.body, status_code=exc.status)

    @app.post("/score")
    async def score(request: Request):
        return handle_score(await _body(request), cfg)

    @app.post("/score/batch")
    async def score_batch(request: Request):
        return handle_batch(await _body(request), cfg)

    @app.get("/healthz")
    async def healthz():
        return handle_health(cfg)

    return app
