"""Unit tests for semantic classifiers and the classifier artifact."""

from pathlib import Path

import httpx
import numpy as np
import pytest

from llm_orchestrator.errors import ArtifactFormatError, ClassifierUnavailableError
from llm_orchestrator.routing import (
    ClassifierSource,
    ComplexityClass,
    ExternalClassifier,
    Prompt,
    ReferenceClassifier,
    semantic_classify,
    softmax,
)


def _prompt(text: str = "tell me about Paris") -> Prompt:
    return Prompt(id="p", text=text, arrival_time=0.0)


def _small_model() -> ReferenceClassifier:
    rng = np.random.default_rng(0)
    return ReferenceClassifier(rng.normal(size=(3, 16)), rng.normal(size=3), hash_seed=9)


class TestSoftmax:
    """Tests for softmax."""

    def test_hand_computed(self) -> None:
        """Test logits (2, 0, 0) give (0.7870, 0.1065, 0.1065)."""
        probs = softmax([2.0, 0.0, 0.0])
        assert probs == pytest.approx([0.7870, 0.1065, 0.1065], abs=1e-4)

    def test_stable_for_large_logits(self) -> None:
        """Test large logits do not overflow."""
        probs = softmax([1000.0, 1000.0, 0.0])
        assert probs == pytest.approx([0.5, 0.5, 0.0])


class TestSemanticClassify:
    """Tests for semantic_classify."""

    def test_untrained_is_uniform(self) -> None:
        """Test an untrained model predicts 1/3 each and Low by the tie rule."""
        output = semantic_classify(_prompt(), ReferenceClassifier.untrained(dim=64))
        assert output.probabilities == pytest.approx((1 / 3, 1 / 3, 1 / 3))
        assert output.predicted == ComplexityClass.LOW
        assert output.source == ClassifierSource.SEMANTIC

    def test_missing_model(self) -> None:
        """Test classifying without a model raises classifier-unavailable."""
        with pytest.raises(ClassifierUnavailableError):
            semantic_classify(_prompt(), None)

    def test_probabilities_sum_to_one(self) -> None:
        """Test a random model's output is normalized."""
        model = _small_model()
        for text in ("a b c", "prove the theorem", "", "x " * 300):
            output = semantic_classify(_prompt(text), model)
            assert sum(output.probabilities) == pytest.approx(1.0, abs=1e-9)

    def test_fit_returns_new_model(self) -> None:
        """Test fitting leaves the original snapshot untouched."""
        model = ReferenceClassifier.untrained(dim=32)
        trained = model.fit(["alpha beta", "gamma delta"], [ComplexityClass.LOW] * 2, epochs=3)
        assert trained is not model
        assert not model.weights.any()
        assert trained.weights.any()


class TestArtifact:
    """Tests for the classifier artifact format."""

    def test_round_trip(self, tmp_path: Path) -> None:
        """Test save then load restores weights, bias and hash seed."""
        model = _small_model()
        path = tmp_path / "artifacts" / "classifier.pslc"
        model.save(path)
        loaded = ReferenceClassifier.load(path)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        np.testing.assert_array_equal(loaded.bias, model.bias)
        assert loaded.hash_seed == 9
        assert path.read_bytes()[:4] == b"PSLC"

    def test_bad_magic(self) -> None:
        """Test an unknown header is rejected."""
        payload = bytearray(_small_model().to_bytes())
        payload[:4] = b"XXXX"
        with pytest.raises(ArtifactFormatError, match="magic"):
            ReferenceClassifier.from_bytes(bytes(payload))

    def test_truncated(self) -> None:
        """Test a truncated payload is rejected."""
        payload = _small_model().to_bytes()
        with pytest.raises(ArtifactFormatError):
            ReferenceClassifier.from_bytes(payload[:-8])
        with pytest.raises(ArtifactFormatError):
            ReferenceClassifier.from_bytes(payload[:5])

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test loading a missing artifact raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            ReferenceClassifier.load(tmp_path / "missing.pslc")


class TestExternalClassifier:
    """Tests for the HTTP classifier adapter."""

    def test_normalizes_response(self) -> None:
        """Test returned probabilities are renormalized."""

        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json={"probabilities": [1, 2, 1]})

        client = httpx.Client(transport=httpx.MockTransport(handler))
        classifier = ExternalClassifier("http://classifier/predict", client=client)
        output = semantic_classify(_prompt(), classifier)
        assert output.probabilities == pytest.approx((0.25, 0.5, 0.25))
        assert output.predicted == ComplexityClass.MEDIUM

    def test_http_error(self) -> None:
        """Test a 500 from the service is classifier-unavailable."""
        client = httpx.Client(transport=httpx.MockTransport(lambda r: httpx.Response(500)))
        classifier = ExternalClassifier("http://classifier/predict", client=client)
        with pytest.raises(ClassifierUnavailableError):
            classifier.predict_proba(_prompt())

    def test_transport_errors_are_retried(self) -> None:
        """Test connection failures are retried before giving up."""
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(request)
            raise httpx.ConnectError("refused", request=request)

        client = httpx.Client(transport=httpx.MockTransport(handler))
        classifier = ExternalClassifier("http://classifier/predict", client=client)
        with pytest.raises(ClassifierUnavailableError):
            classifier.predict_proba(_prompt())
        assert len(calls) == 3

    def test_malformed_probabilities(self) -> None:
        """Test a wrong-length vector is rejected."""
        client = httpx.Client(
            transport=httpx.MockTransport(
                lambda r: httpx.Response(200, json={"probabilities": [0.5, 0.5]})
            )
        )
        classifier = ExternalClassifier("http://classifier/predict", client=client)
        with pytest.raises(ClassifierUnavailableError, match="Malformed"):
            classifier.predict_proba(_prompt())
