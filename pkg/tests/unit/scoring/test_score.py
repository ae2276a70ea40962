"""Unit tests for the multi-objective score and argmax selection."""

import numpy as np
import pytest

from llm_orchestrator.errors import ContractViolationError, NoHealthyServiceError
from llm_orchestrator.scoring import (
    DEFAULT_PROFILES,
    Candidate,
    ScoreComponents,
    WeightProfile,
    legacy_score,
    score,
    select_best,
)

BALANCED = DEFAULT_PROFILES["balanced"]


def _random_profile(rng: np.random.Generator) -> WeightProfile:
    alpha, lam, mu = rng.random(3)
    return WeightProfile(alpha=float(alpha) + 1e-6, lam=float(lam), mu=float(mu))


def _random_candidates(rng: np.random.Generator, n: int) -> list[Candidate]:
    return [
        Candidate(
            service_id=f"svc-{i:02d}",
            components=ScoreComponents(*(float(x) for x in rng.random(3))),
            raw_cost=float(rng.random()),
        )
        for i in range(n)
    ]


class TestScoreComponents:
    """Tests for ScoreComponents."""

    @pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
    def test_out_of_range_rejected(self, bad: float) -> None:
        """Test components outside [0, 1] are contract violations."""
        with pytest.raises(ContractViolationError):
            ScoreComponents(0.5, bad, 0.5)


class TestScore:
    """Tests for score."""

    def test_all_ones(self) -> None:
        """Test components (1, 1, 1) score 1 under every profile."""
        for profile in DEFAULT_PROFILES.values():
            assert score(ScoreComponents(1.0, 1.0, 1.0), profile) == pytest.approx(1.0)

    def test_all_zeros(self) -> None:
        """Test components (0, 0, 0) score 0."""
        assert score(ScoreComponents(0.0, 0.0, 0.0), BALANCED) == 0.0

    def test_balanced_example(self) -> None:
        """Test (0.9, 0.4, 0.6) under the balanced profile."""
        value = score(ScoreComponents(0.9, 0.4, 0.6), BALANCED)
        assert value == pytest.approx(0.75 / 1.1, abs=1e-12)
        assert value == pytest.approx(0.6818, abs=1e-4)

    def test_bounded_over_random_draws(self) -> None:
        """Test the score stays in [0, 1] over 10,000 random draws."""
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            components = ScoreComponents(*(float(x) for x in rng.random(3)))
            value = score(components, _random_profile(rng))
            assert 0.0 <= value <= 1.0

    def test_legacy_score(self) -> None:
        """Test the raw linear form alpha*R - lambda*T - mu*C."""
        profile = WeightProfile(alpha=1.0, lam=0.5, mu=2.0)
        assert legacy_score(0.8, 2.0, 0.1, profile) == pytest.approx(0.8 - 1.0 - 0.2)


class TestSelectBest:
    """Tests for select_best."""

    def test_single_candidate(self) -> None:
        """Test a single candidate is returned."""
        only = Candidate("a", ScoreComponents(0.1, 0.1, 0.1))
        assert select_best([only], BALANCED) == "a"

    def test_strict_dominance(self) -> None:
        """Test the higher scoring candidate wins."""
        high = Candidate("high", ScoreComponents(0.7, 0.7, 0.7))
        low = Candidate("low", ScoreComponents(0.3, 0.3, 0.3))
        assert select_best([low, high], BALANCED) == "high"

    def test_empty_raises(self) -> None:
        """Test an empty candidate list is a no-healthy-service error."""
        with pytest.raises(NoHealthyServiceError):
            select_best([], BALANCED)

    def test_tie_goes_to_lower_cost(self) -> None:
        """Test equal scores are broken by lower raw cost."""
        components = ScoreComponents(0.5, 0.5, 0.5)
        dear = Candidate("a", components, raw_cost=0.02)
        cheap = Candidate("b", components, raw_cost=0.01)
        assert select_best([dear, cheap], BALANCED) == "b"

    def test_tie_then_service_id(self) -> None:
        """Test equal score and cost fall back to the smaller service id."""
        components = ScoreComponents(0.5, 0.5, 0.5)
        first = Candidate("zeta", components, raw_cost=0.01)
        second = Candidate("alpha", components, raw_cost=0.01)
        assert select_best([first, second], BALANCED) == "alpha"

    def test_matches_exhaustive_scan(self) -> None:
        """Test 50 random candidates against a brute-force maximum."""
        rng = np.random.default_rng(7)
        for _ in range(200):
            candidates = _random_candidates(rng, 50)
            profile = _random_profile(rng)
            best = max(candidates, key=lambda c: score(c.components, profile))
            assert select_best(candidates, profile) == best.service_id

    def test_scale_invariance(self) -> None:
        """Test multiplying the coefficients by c > 0 keeps the winner."""
        rng = np.random.default_rng(11)
        for _ in range(200):
            candidates = _random_candidates(rng, 20)
            profile = _random_profile(rng)
            winner = select_best(candidates, profile)
            for factor in (0.001, 0.5, 3.0, 1e6):
                assert select_best(candidates, profile.scaled(factor)) == winner

    def test_monotone_in_relevance(self) -> None:
        """Test raising the winner's relevance never dethrones it."""
        rng = np.random.default_rng(5)
        for _ in range(200):
            candidates = _random_candidates(rng, 10)
            profile = _random_profile(rng)
            winner = select_best(candidates, profile)
            boosted = [
                Candidate(
                    c.service_id,
                    ScoreComponents(
                        min(1.0, c.components.relevance_hat + 0.2),
                        c.components.latency_hat,
                        c.components.cost_hat,
                    ),
                    c.raw_cost,
                )
                if c.service_id == winner
                else c
                for c in candidates
            ]
            assert select_best(boosted, profile) == winner
