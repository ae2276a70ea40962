"""Multi-objective score and argmax selection over service candidates."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

from llm_orchestrator.errors import ContractViolationError, NoHealthyServiceError
from llm_orchestrator.scoring.weights import WeightProfile, normalize_weights

TIE_TOLERANCE = 1e-12


class ScoringMode(str, Enum):
    """Convex normalized score, or the raw linear form kept for comparison."""

    NORMALIZED = "normalized"
    LEGACY = "legacy"


@dataclass(frozen=True)
class ScoreComponents:
    """Goodness scores in [0, 1]; latency and cost are already inverted."""

    relevance_hat: float
    latency_hat: float
    cost_hat: float

    def __post_init__(self) -> None:
        for name in ("relevance_hat", "latency_hat", "cost_hat"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ContractViolationError(f"{name}={value} is outside [0, 1]")

    def to_dict(self) -> dict[str, float]:
        return {
            "relevance_hat": self.relevance_hat,
            "latency_hat": self.latency_hat,
            "cost_hat": self.cost_hat,
        }


@dataclass(frozen=True)
class Candidate:
    """A scored option for ``select_best``."""

    service_id: str
    components: ScoreComponents
    raw_cost: float = 0.0


def score(components: ScoreComponents, profile: WeightProfile) -> float:
    """
    Weighted convex combination w_R*R + w_T*T + w_C*C.

    Args:
        components: Normalized goodness scores
        profile: Operator weight profile

    Returns:
        Score in [0, 1]
    """
    w_r, w_t, w_c = normalize_weights(profile)
    value = (
        w_r * components.relevance_hat
        + w_t * components.latency_hat
        + w_c * components.cost_hat
    )
    # rounding can push a convex combination of ones a hair past 1
    return min(1.0, max(0.0, value))


def legacy_score(relevance: float, latency: float, cost: float, profile: WeightProfile) -> float:
    """Raw linear form alpha*R - lambda*T - mu*C over unnormalized latency and cost."""
    return profile.alpha * relevance - profile.lam * latency - profile.mu * cost


def select_best(candidates: Sequence[Candidate], profile: WeightProfile) -> str:
    """
    Pick the candidate with the highest score.

    Ties (within 1e-12) go to the lower raw cost, then the lexicographically
    smaller service id.

    Raises:
        NoHealthyServiceError: If there are no candidates
    """
    if not candidates:
        raise NoHealthyServiceError("No candidate services to select from")
    scored = [(score(c.components, profile), c) for c in candidates]
    return pick_max(scored)


def pick_max(scored: Sequence[tuple[float, Candidate]]) -> str:
    """Argmax over precomputed scores with the cost / id tie rule."""
    if not scored:
        raise NoHealthyServiceError("No candidate services to select from")
    best = max(value for value, _ in scored)
    tied = [c for value, c in scored if value >= best - TIE_TOLERANCE]
    winner = min(tied, key=lambda c: (c.raw_cost, c.service_id))
    return winner.service_id
