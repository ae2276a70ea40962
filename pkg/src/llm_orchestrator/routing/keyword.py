"""Keyword-based complexity classification."""

from __future__ import annotations

import re
from functools import lru_cache

from llm_orchestrator.routing.types import (
    ClassifierOutput,
    ClassifierSource,
    ComplexityClass,
    KeywordRuleSet,
    Prompt,
)


@lru_cache(maxsize=64)
def _compile(keywords: frozenset[str]) -> re.Pattern[str] | None:
    if not keywords:
        return None
    # Phrases match across any run of whitespace; longest first so "explain why" wins over "explain"
    alternatives = sorted(
        (r"\s+".join(re.escape(word) for word in kw.lower().split()) for kw in keywords),
        key=len,
        reverse=True,
    )
    return re.compile(r"\b(?:" + "|".join(alternatives) + r")\b", re.IGNORECASE)


def keyword_match(prompt: Prompt, rules: KeywordRuleSet) -> ComplexityClass | None:
    """
    Return the class implied by a keyword hit, or None when nothing matches.

    High keywords take precedence, so a prompt containing both low and high
    keywords is High.
    """
    high = _compile(rules.high_keywords)
    if high is not None and high.search(prompt.text):
        return ComplexityClass.HIGH
    low = _compile(rules.low_keywords)
    if low is not None and low.search(prompt.text):
        return ComplexityClass.LOW
    return None


def keyword_classify(prompt: Prompt, rules: KeywordRuleSet) -> ClassifierOutput:
    """
    Classify by indicative keywords; unmatched prompts are Medium.

    Args:
        prompt: Prompt to classify
        rules: Keyword rule set

    Returns:
        One-hot classifier output
    """
    matched = keyword_match(prompt, rules)
    return ClassifierOutput.one_hot(matched or ComplexityClass.MEDIUM, ClassifierSource.KEYWORD)
