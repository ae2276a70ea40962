"""Domain types for prompt complexity routing."""

from __future__ import annotations

import math
import re
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

PROBABILITY_TOLERANCE = 1e-9

_TOKEN_SPLIT = re.compile(r"\s+")


def count_tokens(text: str) -> int:
    """Whitespace-delimited token count."""
    return len([t for t in _TOKEN_SPLIT.split(text.strip()) if t])


class ComplexityClass(str, Enum):
    """Prompt complexity levels, ordered Low < Medium < High."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def index(self) -> int:
        return _CLASS_ORDER.index(self)

    @classmethod
    def from_index(cls, index: int) -> ComplexityClass:
        return _CLASS_ORDER[index]


_CLASS_ORDER: tuple[ComplexityClass, ...] = (
    ComplexityClass.LOW,
    ComplexityClass.MEDIUM,
    ComplexityClass.HIGH,
)
COMPLEXITY_CLASSES = _CLASS_ORDER


class ModelTier(str, Enum):
    """Capability tier of a model."""

    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


class ClassifierSource(str, Enum):
    """Which routing path produced a classification."""

    KEYWORD = "keyword"
    SEMANTIC = "semantic"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Prompt:
    """An incoming prompt. ``token_count`` is always derived from ``text``."""

    id: str
    text: str
    benchmark_tag: str | None = None
    arrival_time: float = field(default_factory=time.time)
    token_count: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "token_count", count_tokens(self.text))


def argmax_low_first(values: Sequence[float]) -> int:
    """Index of the maximum, lowest index on exact ties."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


@dataclass(frozen=True)
class ClassifierOutput:
    """Probability vector over (Low, Medium, High) plus its argmax.

    ``evidence`` carries semantic probabilities that were consulted but not
    acted on (hybrid low-confidence fallback).
    """

    probabilities: tuple[float, float, float]
    predicted: ComplexityClass
    source: ClassifierSource
    evidence: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if len(self.probabilities) != 3:
            raise ValueError("Exactly three class probabilities are required")
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError(f"Probabilities outside [0, 1]: {self.probabilities}")
        if not math.isclose(math.fsum(self.probabilities), 1.0, abs_tol=PROBABILITY_TOLERANCE):
            raise ValueError(f"Probabilities do not sum to 1: {self.probabilities}")
        if self.predicted != ComplexityClass.from_index(argmax_low_first(self.probabilities)):
            raise ValueError(f"Predicted {self.predicted} is not the argmax")

    @classmethod
    def from_probabilities(
        cls,
        probabilities: Sequence[float],
        source: ClassifierSource,
        evidence: Sequence[float] | None = None,
    ) -> ClassifierOutput:
        probs = tuple(float(p) for p in probabilities)
        return cls(
            probabilities=probs,  # type: ignore[arg-type]
            predicted=ComplexityClass.from_index(argmax_low_first(probs)),
            source=source,
            evidence=tuple(evidence) if evidence is not None else None,  # type: ignore[arg-type]
        )

    @classmethod
    def one_hot(
        cls,
        complexity: ComplexityClass,
        source: ClassifierSource,
        evidence: Sequence[float] | None = None,
    ) -> ClassifierOutput:
        probs = [0.0, 0.0, 0.0]
        probs[complexity.index] = 1.0
        return cls.from_probabilities(probs, source, evidence)

    @property
    def confidence(self) -> float:
        return max(self.probabilities)

    def to_dict(self) -> dict[str, object]:
        return {
            "probabilities": list(self.probabilities),
            "predicted": self.predicted.value,
            "source": self.source.value,
            "evidence": list(self.evidence) if self.evidence is not None else None,
        }


DEFAULT_LOW_KEYWORDS = frozenset({"sum", "list", "define", "name", "translate", "convert"})
DEFAULT_HIGH_KEYWORDS = frozenset(
    {"prove", "derive", "explain why", "analyze", "optimize", "step by step"}
)


class KeywordRuleSet(BaseModel):
    """Indicative keywords; matched as whole words, case-insensitively."""

    model_config = ConfigDict(frozen=True)

    low_keywords: frozenset[str] = Field(default=DEFAULT_LOW_KEYWORDS)
    high_keywords: frozenset[str] = Field(default=DEFAULT_HIGH_KEYWORDS)

    @model_validator(mode="after")
    def _check_disjoint(self) -> KeywordRuleSet:
        low = {k.lower().strip() for k in self.low_keywords}
        high = {k.lower().strip() for k in self.high_keywords}
        overlap = low & high
        if overlap:
            raise ValueError(f"Keywords in both low and high sets: {sorted(overlap)}")
        if "" in low or "" in high:
            raise ValueError("Empty keyword")
        return self


_TIER_ORDER: tuple[ModelTier, ...] = (ModelTier.SMALL, ModelTier.MEDIUM, ModelTier.LARGE)

DEFAULT_RELEVANCE: dict[ComplexityClass, dict[ModelTier, float]] = {
    ComplexityClass.HIGH: {ModelTier.SMALL: 0.2, ModelTier.MEDIUM: 0.6, ModelTier.LARGE: 1.0},
    ComplexityClass.MEDIUM: {ModelTier.SMALL: 0.5, ModelTier.MEDIUM: 1.0, ModelTier.LARGE: 0.8},
    ComplexityClass.LOW: {ModelTier.SMALL: 1.0, ModelTier.MEDIUM: 0.8, ModelTier.LARGE: 0.5},
}


class RelevanceTable(BaseModel):
    """Relevance of each model tier for each complexity class."""

    model_config = ConfigDict(frozen=True)

    entries: dict[ComplexityClass, dict[ModelTier, float]] = Field(
        default_factory=lambda: {k: dict(v) for k, v in DEFAULT_RELEVANCE.items()}
    )

    @model_validator(mode="after")
    def _check_table(self) -> RelevanceTable:
        for complexity in _CLASS_ORDER:
            row = self.entries.get(complexity)
            if row is None or set(row) != set(_TIER_ORDER):
                raise ValueError(f"Relevance row for '{complexity.value}' must list every tier")
            for tier, value in row.items():
                if not 0.0 <= value <= 1.0:
                    raise ValueError(
                        f"Relevance[{complexity.value}][{tier.value}]={value} outside [0, 1]"
                    )
        high = self.entries[ComplexityClass.HIGH]
        if high[ModelTier.LARGE] < max(high.values()):
            raise ValueError("Large tier must be the most relevant tier for high complexity")
        return self

    def lookup(self, complexity: ComplexityClass, tier: ModelTier) -> float:
        return self.entries[complexity][tier]

    def column_mean(self, tier: ModelTier) -> float:
        return math.fsum(self.entries[c][tier] for c in _CLASS_ORDER) / len(_CLASS_ORDER)
