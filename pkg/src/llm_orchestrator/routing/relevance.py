"""Relevance of a model tier for a classified prompt, and token bucketing."""

from __future__ import annotations

import math

from llm_orchestrator.routing.types import (
    COMPLEXITY_CLASSES,
    ClassifierOutput,
    ComplexityClass,
    ModelTier,
    Prompt,
    RelevanceTable,
)

DEFAULT_TOKEN_THRESHOLDS = (64, 256)


def relevance(output: ClassifierOutput, model_tier: ModelTier, table: RelevanceTable) -> float:
    """
    Expected relevance of ``model_tier`` under the output's class probabilities.

    Args:
        output: Classifier output
        model_tier: Tier of the candidate model
        table: Relevance table

    Returns:
        Relevance in [0, 1]
    """
    value = math.fsum(
        p * table.lookup(c, model_tier)
        for p, c in zip(output.probabilities, COMPLEXITY_CLASSES)
    )
    return min(1.0, max(0.0, value))


def token_bucket(
    prompt: Prompt, thresholds: tuple[int, int] = DEFAULT_TOKEN_THRESHOLDS
) -> ComplexityClass:
    """
    Label a prompt by token count: [0, t1) Low, [t1, t2) Medium, [t2, inf) High.

    Raises:
        ValueError: If thresholds are not 0 < t1 < t2
    """
    t1, t2 = thresholds
    if not 0 < t1 < t2:
        raise ValueError(f"Token thresholds must satisfy 0 < t1 < t2, got {thresholds}")
    if prompt.token_count < t1:
        return ComplexityClass.LOW
    if prompt.token_count < t2:
        return ComplexityClass.MEDIUM
    return ComplexityClass.HIGH
