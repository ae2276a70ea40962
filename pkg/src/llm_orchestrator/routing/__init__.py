"""Prompt complexity classification and tier relevance."""

from llm_orchestrator.routing.hybrid import DEFAULT_CONFIDENCE_THRESHOLD, hybrid_classify
from llm_orchestrator.routing.keyword import keyword_classify, keyword_match
from llm_orchestrator.routing.relevance import DEFAULT_TOKEN_THRESHOLDS, relevance, token_bucket
from llm_orchestrator.routing.router import ComplexityRouter, RoutingMode
from llm_orchestrator.routing.semantic import (
    BaseClassifier,
    ExternalClassifier,
    ReferenceClassifier,
    semantic_classify,
    softmax,
)
from llm_orchestrator.routing.types import (
    COMPLEXITY_CLASSES,
    ClassifierOutput,
    ClassifierSource,
    ComplexityClass,
    KeywordRuleSet,
    ModelTier,
    Prompt,
    RelevanceTable,
    count_tokens,
)

__all__ = [
    "BaseClassifier",
    "COMPLEXITY_CLASSES",
    "ClassifierOutput",
    "ClassifierSource",
    "ComplexityClass",
    "ComplexityRouter",
    "DEFAULT_CONFIDENCE_THRESHOLD",
    "DEFAULT_TOKEN_THRESHOLDS",
    "ExternalClassifier",
    "KeywordRuleSet",
    "ModelTier",
    "Prompt",
    "ReferenceClassifier",
    "RelevanceTable",
    "RoutingMode",
    "count_tokens",
    "hybrid_classify",
    "keyword_classify",
    "keyword_match",
    "relevance",
    "semantic_classify",
    "softmax",
    "token_bucket",
]
