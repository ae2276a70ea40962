"""Append-only JSON-lines log of routing decisions."""

from __future__ import annotations

import json
import threading
from collections import deque
from pathlib import Path

from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.orchestration.selection import RoutingDecision
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


class DecisionLog:
    """
    Thread-safe JSONL writer, one line per handled request.

    Each line holds the decision (null when routing failed), the outcome if
    the request was dispatched, and the error message if any. In-memory
    entries are capped at ``max_entries`` (oldest dropped first); the count
    covers every recorded entry.
    """

    def __init__(
        self,
        path: Path | None = None,
        keep_in_memory: bool = True,
        max_entries: int | None = None,
    ) -> None:
        if max_entries is not None and max_entries < 1:
            raise ValueError(f"max_entries must be >= 1, got {max_entries}")
        self.path = path
        self.keep_in_memory = keep_in_memory
        self._entries: deque[dict[str, object]] = deque(maxlen=max_entries)
        self._count = 0
        self._lock = threading.Lock()
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.touch(exist_ok=True)

    def __len__(self) -> int:
        return self._count

    @property
    def entries(self) -> list[dict[str, object]]:
        with self._lock:
            return list(self._entries)

    def record(
        self,
        prompt_id: str,
        decision: RoutingDecision | None = None,
        outcome: InferenceOutcome | None = None,
        error: str | None = None,
    ) -> dict[str, object]:
        entry: dict[str, object] = {
            "prompt_id": prompt_id,
            "decision": decision.to_dict() if decision else None,
            "outcome": outcome.to_dict() if outcome else None,
            "error": error,
        }
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(line + "\n")
            if self.keep_in_memory:
                self._entries.append(entry)
            self._count += 1
        return entry

    @staticmethod
    def read(path: Path) -> list[dict[str, object]]:
        """Load every entry of a log file."""
        if not path.exists():
            raise FileNotFoundError(f"Decision log not found: {path}")
        with open(path, encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]
