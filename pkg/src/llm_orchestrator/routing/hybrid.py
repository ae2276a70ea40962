"""Hybrid routing: keyword rules first, semantic classifier for the rest."""

from __future__ import annotations

from llm_orchestrator.errors import ClassifierUnavailableError
from llm_orchestrator.routing.keyword import keyword_match
from llm_orchestrator.routing.semantic import BaseClassifier, semantic_classify
from llm_orchestrator.routing.types import (
    ClassifierOutput,
    ClassifierSource,
    ComplexityClass,
    KeywordRuleSet,
    Prompt,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_CONFIDENCE_THRESHOLD = 0.6


def hybrid_classify(
    prompt: Prompt,
    rules: KeywordRuleSet,
    model: BaseClassifier | None,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
) -> ClassifierOutput:
    """
    Classify with keyword rules, refining unmatched prompts semantically.

    A keyword hit is returned as-is and the model is never consulted. An
    unmatched prompt goes to the semantic model; when its top probability is
    below ``confidence_threshold`` the result is a one-hot Medium with the
    semantic probabilities kept in ``evidence``. If the model is unavailable
    the keyword fallback (Medium) is returned.

    Args:
        prompt: Prompt to classify
        rules: Keyword rule set
        model: Semantic classifier, or None when not loaded
        confidence_threshold: Minimum semantic confidence, in (0, 1]

    Returns:
        Classifier output

    Raises:
        ValueError: If the threshold is outside (0, 1]
    """
    if not 0.0 < confidence_threshold <= 1.0:
        raise ValueError(f"confidence_threshold must be in (0, 1], got {confidence_threshold}")

    matched = keyword_match(prompt, rules)
    if matched is not None:
        return ClassifierOutput.one_hot(matched, ClassifierSource.KEYWORD)

    try:
        semantic = semantic_classify(prompt, model)
    except ClassifierUnavailableError as e:
        logger.warning(f"Semantic path unavailable for prompt {prompt.id}, keyword fallback: {e}")
        return ClassifierOutput.one_hot(ComplexityClass.MEDIUM, ClassifierSource.KEYWORD)

    if semantic.confidence < confidence_threshold:
        return ClassifierOutput.one_hot(
            ComplexityClass.MEDIUM, ClassifierSource.HYBRID, evidence=semantic.probabilities
        )
    return semantic
