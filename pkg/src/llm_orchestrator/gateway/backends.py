"""Backend pools the gateway dispatches to: simulated cells and OpenAI-compatible upstreams."""

from __future__ import annotations

import asyncio
import hashlib
import json
import time
from collections.abc import Sequence

import httpx
from tenacity import (
    AsyncRetrying,
    RetryError,
    retry_if_exception_type,
    stop_after_delay,
    wait_fixed,
)

from llm_orchestrator.config.models import SimServiceConfig
from llm_orchestrator.errors import ColdStartTimeoutError, SimulationConfigError
from llm_orchestrator.orchestration import InferenceOutcome, ScaleCommand
from llm_orchestrator.routing import Prompt
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_REQUEST_TIMEOUT = 120.0
DEFAULT_MAX_OUTPUT_TOKENS = 2048
DEFAULT_READINESS_POLL = 1.0
CHAT_COMPLETIONS_PATH = "/v1/chat/completions"
HEALTH_PATH = "/health"


def _index(services: Sequence[SimServiceConfig]) -> dict[str, SimServiceConfig]:
    return {s.service_id: s for s in services}


def _unit_draw(prompt_id: str, service_id: str) -> float:
    """Deterministic uniform draw in [0, 1) per (prompt, service)."""
    digest = hashlib.blake2b(f"{prompt_id}|{service_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


class SimulatedBackendPool:
    """
    Answers from the cell's simulator parameters without sleeping.

    TTFT is ``base_ttft``; latency adds the mean output length times the
    per-token latency. Injected failures are decided by a hash of the prompt
    id, so the same request always gets the same result.
    """

    def __init__(
        self,
        services: Sequence[SimServiceConfig],
        warm: Sequence[str] = (),
        request_timeout: float = DEFAULT_REQUEST_TIMEOUT,
        max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
    ) -> None:
        self._services = _index(services)
        self._warm = set(warm)
        self.request_timeout = request_timeout
        self.max_output_tokens = max_output_tokens
        self.commands: list[ScaleCommand] = []

    def _config(self, service_id: str) -> SimServiceConfig:
        try:
            return self._services[service_id]
        except KeyError:
            raise SimulationConfigError(f"Unknown service '{service_id}'") from None

    def is_warm(self, service_id: str) -> bool:
        return service_id in self._warm

    def apply_scale(self, command: ScaleCommand, time: float) -> None:
        for service_id in command.allocation:
            self._config(service_id)
        self.commands.append(command)
        for service_id, count in command.allocation.items():
            if count == 0:
                self._warm.discard(service_id)

    async def wait_ready(self, service_id: str, timeout: float) -> float:
        """
        Seconds a cold cell needs to boot; nothing is slept.

        Raises:
            ColdStartTimeoutError: If the cell's cold start exceeds ``timeout``
        """
        config = self._config(service_id)
        if service_id in self._warm:
            return 0.0
        # The deployment keeps booting after the caller gives up.
        self._warm.add(service_id)
        if config.cold_start_duration > timeout:
            raise ColdStartTimeoutError(service_id, waited=timeout, timeout=timeout)
        return config.cold_start_duration

    async def invoke(self, service_id: str, prompt: Prompt) -> InferenceOutcome:
        config = self._config(service_id)
        tokens = max(1, round(config.output_tokens.expected))
        ttft = config.base_ttft
        latency = ttft + min(tokens, self.max_output_tokens) * config.per_token_latency

        error = None
        if latency > self.request_timeout:
            error = f"timeout after {self.request_timeout:.1f}s"
            latency = self.request_timeout
        elif tokens > self.max_output_tokens:
            error = f"output exceeded {self.max_output_tokens} tokens"
        elif _unit_draw(prompt.id, service_id) < config.failure_probability:
            error = "backend error"

        return InferenceOutcome(
            prompt_id=prompt.id,
            service_id=service_id,
            success=error is None,
            ttft=min(ttft, latency),
            latency=latency,
            cost=config.unit_cost,
            completion=f"[simulated {tokens} tokens from {service_id}]" if error is None else "",
            error=error,
            output_tokens=tokens,
            benchmark_tag=prompt.benchmark_tag,
        )


class ProxyBackendPool:
    """
    Forwards prompts to OpenAI-compatible chat-completion endpoints.

    Requests are streamed; TTFT is taken at the first chunk carrying content
    and latency at the end of the stream. An upstream that ignores
    ``stream`` gets TTFT equal to its full latency and ``streamed=False``.
    Connection failures, non-2xx statuses and timeouts come back as
    unsuccessful outcomes.
    """

    def __init__(
        self,
        services: Sequence[SimServiceConfig],
        client: httpx.AsyncClient | None = None,
        request_timeout: float = DEFAULT_REQUEST_TIMEOUT,
        max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
        readiness_poll: float = DEFAULT_READINESS_POLL,
    ) -> None:
        self._services = _index(services)
        missing = [sid for sid, s in self._services.items() if not s.endpoint]
        if missing:
            raise SimulationConfigError(f"Proxy mode needs an endpoint for {missing}")
        self._client = client or httpx.AsyncClient(timeout=httpx.Timeout(request_timeout))
        self.request_timeout = request_timeout
        self.max_output_tokens = max_output_tokens
        self.readiness_poll = readiness_poll
        self.desired_replicas: dict[str, int] = {}

    def _config(self, service_id: str) -> SimServiceConfig:
        try:
            return self._services[service_id]
        except KeyError:
            raise SimulationConfigError(f"Unknown service '{service_id}'") from None

    def _url(self, service_id: str, path: str) -> str:
        endpoint = self._config(service_id).endpoint or ""
        return endpoint.rstrip("/") + path

    async def aclose(self) -> None:
        await self._client.aclose()

    def apply_scale(self, command: ScaleCommand, time: float) -> None:
        # Replicas are managed by the serving platform; the pool only records intent.
        for service_id, count in command.allocation.items():
            self._config(service_id)
            self.desired_replicas[service_id] = count
        logger.info(
            f"Desired replicas for {command.model_id}: {dict(command.allocation)} "
            f"({command.reason.value})"
        )

    async def _probe(self, service_id: str) -> None:
        response = await self._client.get(self._url(service_id, HEALTH_PATH))
        response.raise_for_status()

    async def wait_ready(self, service_id: str, timeout: float) -> float:
        """
        Poll the upstream health endpoint until it answers 2xx.

        Raises:
            ColdStartTimeoutError: If the endpoint is not healthy within ``timeout``
        """
        start = time.perf_counter()
        try:
            async for attempt in AsyncRetrying(
                retry=retry_if_exception_type(httpx.HTTPError),
                stop=stop_after_delay(timeout),
                wait=wait_fixed(self.readiness_poll),
            ):
                with attempt:
                    await self._probe(service_id)
        except RetryError:
            raise ColdStartTimeoutError(
                service_id, waited=time.perf_counter() - start, timeout=timeout
            ) from None
        return time.perf_counter() - start

    async def invoke(self, service_id: str, prompt: Prompt) -> InferenceOutcome:
        config = self._config(service_id)
        start = time.perf_counter()
        try:
            result = await asyncio.wait_for(
                self._stream(service_id, config, prompt, start), timeout=self.request_timeout
            )
        except (asyncio.TimeoutError, httpx.TimeoutException):
            error = f"timeout after {self.request_timeout:.1f}s"
            return self._failure(prompt, config, start, error)
        except httpx.HTTPStatusError as e:
            return self._failure(prompt, config, start, f"upstream status {e.response.status_code}")
        except (httpx.HTTPError, ValueError) as e:
            return self._failure(prompt, config, start, f"upstream error: {e}")

        completion, ttft, tokens, streamed = result
        latency = time.perf_counter() - start
        error = None
        if not completion:
            error = "empty completion"
        elif tokens > self.max_output_tokens:
            error = f"output exceeded {self.max_output_tokens} tokens"
        return InferenceOutcome(
            prompt_id=prompt.id,
            service_id=service_id,
            success=error is None,
            ttft=latency if ttft is None else ttft,
            latency=latency,
            cost=config.unit_cost,
            completion=completion,
            error=error,
            output_tokens=tokens,
            streamed=streamed,
            benchmark_tag=prompt.benchmark_tag,
        )

    async def _stream(
        self, service_id: str, config: SimServiceConfig, prompt: Prompt, start: float
    ) -> tuple[str, float | None, int, bool]:
        payload = {
            "model": config.model_id,
            "messages": [{"role": "user", "content": prompt.text}],
            "stream": True,
            "max_tokens": self.max_output_tokens,
        }
        url = self._url(service_id, CHAT_COMPLETIONS_PATH)
        async with self._client.stream("POST", url, json=payload) as response:
            if response.is_error:
                await response.aread()
                response.raise_for_status()
            if "text/event-stream" not in response.headers.get("content-type", ""):
                body = json.loads(await response.aread())
                text = body["choices"][0]["message"]["content"] or ""
                usage = body.get("usage") or {}
                return text, None, int(usage.get("completion_tokens", len(text.split()))), False

            parts: list[str] = []
            ttft: float | None = None
            chunks = 0
            async for line in response.aiter_lines():
                if not line.startswith("data:"):
                    continue
                data = line[len("data:") :].strip()
                if data == "[DONE]":
                    break
                delta = json.loads(data)["choices"][0].get("delta", {}).get("content")
                if not delta:
                    continue
                if ttft is None:
                    ttft = time.perf_counter() - start
                parts.append(delta)
                chunks += 1
            return "".join(parts), ttft, chunks, True

    def _failure(
        self, prompt: Prompt, config: SimServiceConfig, start: float, error: str
    ) -> InferenceOutcome:
        logger.error(f"Upstream {config.service_id} failed for {prompt.id}: {error}")
        return InferenceOutcome(
            prompt_id=prompt.id,
            service_id=config.service_id,
            success=False,
            latency=time.perf_counter() - start,
            error=error,
            benchmark_tag=prompt.benchmark_tag,
        )
