"""Operator weight profiles and their normalization."""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from llm_orchestrator.errors import InvalidProfileError


class WeightProfile(BaseModel):
    """Raw preference coefficients for relevance, latency and cost.

    ``lambda`` is a Python keyword, so the latency coefficient is stored as
    ``lam`` and accepted as ``lambda`` in config files.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    name: str = "custom"
    alpha: float = Field(ge=0.0)
    lam: float = Field(ge=0.0, alias="lambda")
    mu: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _check_positive_sum(self) -> WeightProfile:
        total = self.alpha + self.lam + self.mu
        if not total > 0 or not math.isfinite(total):
            raise InvalidProfileError(
                f"Profile '{self.name}': alpha + lambda + mu must be positive and finite"
            )
        return self

    @property
    def weights(self) -> tuple[float, float, float]:
        """Normalized (w_R, w_T, w_C)."""
        return normalize_weights(self)

    def scaled(self, factor: float) -> WeightProfile:
        """Return the same preferences multiplied by ``factor``."""
        return WeightProfile(
            name=self.name, alpha=self.alpha * factor, lam=self.lam * factor, mu=self.mu * factor
        )

    def to_dict(self) -> dict[str, object]:
        """Profile plus its normalized weights, as served by the admin API."""
        w_r, w_t, w_c = self.weights
        return {
            "name": self.name,
            "alpha": self.alpha,
            "lambda": self.lam,
            "mu": self.mu,
            "weights": {"relevance": w_r, "latency": w_t, "cost": w_c},
        }


def normalize_weights(profile: WeightProfile) -> tuple[float, float, float]:
    """
    Turn (alpha, lambda, mu) into convex weights (w_R, w_T, w_C).

    Args:
        profile: Weight profile

    Returns:
        Weights summing to 1

    Raises:
        InvalidProfileError: If all coefficients are zero
    """
    total = profile.alpha + profile.lam + profile.mu
    if total <= 0:
        raise InvalidProfileError(f"Profile '{profile.name}' has all-zero coefficients")
    return profile.alpha / total, profile.lam / total, profile.mu / total


QUALITY = WeightProfile(name="quality", alpha=1.0, lam=0.1, mu=0.1)
COST = WeightProfile(name="cost", alpha=0.3, lam=0.2, mu=0.8)
SPEED = WeightProfile(name="speed", alpha=0.3, lam=0.8, mu=0.2)
BALANCED = WeightProfile(name="balanced", alpha=0.5, lam=0.3, mu=0.3)

DEFAULT_PROFILES: dict[str, WeightProfile] = {
    p.name: p for p in (QUALITY, COST, SPEED, BALANCED)
}
