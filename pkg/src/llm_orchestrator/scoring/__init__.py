"""Multi-objective scoring core."""

from llm_orchestrator.scoring.normalization import (
    NormalizationScope,
    NormalizationStats,
    normalize_metric,
    pool_stats,
)
from llm_orchestrator.scoring.score import (
    Candidate,
    ScoreComponents,
    ScoringMode,
    legacy_score,
    pick_max,
    score,
    select_best,
)
from llm_orchestrator.scoring.weights import (
    BALANCED,
    COST,
    DEFAULT_PROFILES,
    QUALITY,
    SPEED,
    WeightProfile,
    normalize_weights,
)

__all__ = [
    "BALANCED",
    "COST",
    "Candidate",
    "DEFAULT_PROFILES",
    "NormalizationScope",
    "NormalizationStats",
    "QUALITY",
    "SPEED",
    "ScoreComponents",
    "ScoringMode",
    "WeightProfile",
    "legacy_score",
    "normalize_metric",
    "normalize_weights",
    "pick_max",
    "pool_stats",
    "score",
    "select_best",
]
