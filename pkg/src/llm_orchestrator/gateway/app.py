"""FastAPI application exposing the gateway."""

from __future__ import annotations

import asyncio
import contextlib
from collections.abc import AsyncIterator
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from llm_orchestrator import __version__
from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import GatewayConfig
from llm_orchestrator.errors import InvalidProfileError, OrchestratorError
from llm_orchestrator.gateway.models import ErrorBody, HealthUpdate, RouteRequest, RouteResponse
from llm_orchestrator.gateway.service import GatewayService, build_service, status_for_error
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


def _error_response(status: int, body: ErrorBody) -> JSONResponse:
    return JSONResponse(status_code=status, content=body.to_content())


def create_app(
    config: GatewayConfig | None = None,
    config_loader: ConfigLoader | None = None,
    service: GatewayService | None = None,
) -> FastAPI:
    """
    Build the gateway app.

    Args:
        config: Gateway configuration (ignored when ``service`` is given)
        config_loader: Loader for the files the configuration references
        service: Pre-built service, mainly for tests

    Returns:
        FastAPI application; the scaling loop runs for the app's lifespan
    """
    if service is None:
        if config is None:
            raise ValueError("create_app needs a config or a service")
        service = build_service(config, config_loader)
    gateway = service

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI) -> AsyncIterator[None]:
        task = None
        if gateway.config.run_scaling_loop:
            task = asyncio.create_task(gateway.scaling_loop())
        try:
            yield
        finally:
            if task is not None:
                task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await task
            await gateway.aclose()

    app = FastAPI(title="llm-orchestrator gateway", version=__version__, lifespan=lifespan)
    app.state.service = gateway

    @app.exception_handler(OrchestratorError)
    async def orchestrator_error(request: Request, exc: OrchestratorError) -> JSONResponse:
        body = ErrorBody(
            error=type(exc).__name__,
            detail=str(exc),
            service_id=getattr(exc, "service_id", None),
            known_profiles=(
                sorted(gateway.profiles) if isinstance(exc, InvalidProfileError) else None
            ),
        )
        return _error_response(status_for_error(exc), body)

    @app.exception_handler(RequestValidationError)
    async def invalid_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error_response(400, ErrorBody(error="InvalidRequest", detail=str(exc.errors())))

    @app.post("/v1/route", response_model=RouteResponse, response_model_exclude_none=True)
    async def route(payload: dict[str, Any] = Body(...)) -> Any:
        try:
            request = RouteRequest.model_validate(payload)
        except ValidationError as e:
            detail = "; ".join(err["msg"] for err in e.errors())
            raw_id = payload.get("request_id")
            request_id = gateway.reject(raw_id if isinstance(raw_id, str) else None, detail)
            return _error_response(
                400, ErrorBody(error="InvalidRequest", detail=detail, request_id=request_id)
            )
        return await gateway.handle_route(request)

    @app.get("/registry")
    async def registry() -> dict[str, object]:
        return gateway.registry_view()

    @app.get("/metrics")
    async def metrics() -> dict[str, Any]:
        return gateway.metrics()

    @app.get("/profiles")
    async def profiles() -> dict[str, object]:
        return gateway.profiles_view()

    @app.post("/health/{service_id}")
    async def set_health(service_id: str, update: HealthUpdate) -> dict[str, object]:
        return gateway.set_health(service_id, update.health)

    return app
