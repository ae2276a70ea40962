"""Complexity router: picks a classification mode per request."""

from __future__ import annotations

import threading
from enum import Enum

from llm_orchestrator.errors import ClassifierUnavailableError
from llm_orchestrator.routing.hybrid import DEFAULT_CONFIDENCE_THRESHOLD, hybrid_classify
from llm_orchestrator.routing.keyword import keyword_classify
from llm_orchestrator.routing.relevance import relevance
from llm_orchestrator.routing.semantic import BaseClassifier, semantic_classify
from llm_orchestrator.routing.types import (
    ClassifierOutput,
    KeywordRuleSet,
    ModelTier,
    Prompt,
    RelevanceTable,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


class RoutingMode(str, Enum):
    """Classification path used for a request."""

    KEYWORD = "keyword"
    SEMANTIC = "semantic"
    HYBRID = "hybrid"


class ComplexityRouter:
    """
    Classifies prompts and turns the result into per-tier relevance.

    The semantic model can be replaced at runtime with ``swap_model``; each
    classification reads a single model reference, so in-flight requests keep
    the snapshot they started with.
    """

    def __init__(
        self,
        rules: KeywordRuleSet | None = None,
        model: BaseClassifier | None = None,
        relevance_table: RelevanceTable | None = None,
        mode: RoutingMode = RoutingMode.HYBRID,
        confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    ) -> None:
        self.rules = rules or KeywordRuleSet()
        self.relevance_table = relevance_table or RelevanceTable()
        self.mode = mode
        self.confidence_threshold = confidence_threshold
        self._model = model
        self._lock = threading.Lock()

    @property
    def model(self) -> BaseClassifier | None:
        return self._model

    def swap_model(self, model: BaseClassifier | None) -> None:
        """Atomically replace the semantic model."""
        with self._lock:
            self._model = model
        logger.info(f"Semantic classifier swapped to {type(model).__name__ if model else 'none'}")

    def classify(self, prompt: Prompt, mode: RoutingMode | None = None) -> ClassifierOutput:
        """
        Classify ``prompt`` with ``mode`` (or the router default).

        Semantic mode falls back to keyword mode when the model is unavailable.
        """
        mode = mode or self.mode
        model = self._model
        if mode == RoutingMode.KEYWORD:
            return keyword_classify(prompt, self.rules)
        if mode == RoutingMode.SEMANTIC:
            try:
                return semantic_classify(prompt, model)
            except ClassifierUnavailableError as e:
                logger.warning(f"Falling back to keyword routing for prompt {prompt.id}: {e}")
                return keyword_classify(prompt, self.rules)
        return hybrid_classify(prompt, self.rules, model, self.confidence_threshold)

    def relevance(self, output: ClassifierOutput, tier: ModelTier) -> float:
        return relevance(output, tier, self.relevance_table)
