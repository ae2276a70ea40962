"""Semantic complexity classifiers.

The engine only relies on the ``BaseClassifier`` contract: a normalized
three-class probability vector. ``ReferenceClassifier`` is a hashed
bag-of-words linear softmax model; ``ExternalClassifier`` delegates to an HTTP
classification service (e.g. a hosted transformer).
"""

from __future__ import annotations

import hashlib
import math
import re
import struct
from abc import ABC, abstractmethod
from collections.abc import Sequence
from functools import lru_cache
from pathlib import Path

import httpx
import numpy as np
from tenacity import (
    retry,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from llm_orchestrator.errors import ArtifactFormatError, ClassifierUnavailableError
from llm_orchestrator.routing.types import (
    ClassifierOutput,
    ClassifierSource,
    ComplexityClass,
    Prompt,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

N_CLASSES = 3
ARTIFACT_MAGIC = b"PSLC"
ARTIFACT_VERSION = 1
_HEADER = struct.Struct("<4sIQI")
_WORD = re.compile(r"[a-z0-9']+")


def softmax(logits: Sequence[float] | np.ndarray) -> np.ndarray:
    """Numerically stable softmax."""
    values = np.asarray(logits, dtype=np.float64)
    shifted = np.exp(values - values.max())
    return shifted / shifted.sum()


@lru_cache(maxsize=65536)
def _bucket(token: str, seed: int, dim: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest, "little") % dim


class BaseClassifier(ABC):
    """Contract every semantic classifier honors."""

    @property
    def is_ready(self) -> bool:
        return True

    @abstractmethod
    def predict_proba(self, prompt: Prompt) -> tuple[float, float, float]:
        """
        Class probabilities (Low, Medium, High) summing to 1.

        Raises:
            ClassifierUnavailableError: If the classifier cannot answer
        """


class ReferenceClassifier(BaseClassifier):
    """Hashed bag-of-words features into a three-class linear softmax."""

    def __init__(
        self,
        weights: np.ndarray,
        bias: np.ndarray,
        hash_seed: int = 0,
    ) -> None:
        weights = np.asarray(weights, dtype=np.float64)
        bias = np.asarray(bias, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != N_CLASSES:
            raise ValueError(f"weights must have shape (3, dim), got {weights.shape}")
        if bias.shape != (N_CLASSES,):
            raise ValueError(f"bias must have shape (3,), got {bias.shape}")
        self.weights = weights
        self.bias = bias
        self.hash_seed = hash_seed
        self.weights.setflags(write=False)
        self.bias.setflags(write=False)

    @classmethod
    def untrained(cls, dim: int = 4096, hash_seed: int = 0) -> ReferenceClassifier:
        """All-zero model; predicts the uniform distribution."""
        return cls(np.zeros((N_CLASSES, dim)), np.zeros(N_CLASSES), hash_seed)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[1])

    def featurize(self, text: str) -> np.ndarray:
        """L2-normalized hashed term counts."""
        features = np.zeros(self.dim)
        for token in _WORD.findall(text.lower()):
            features[_bucket(token, self.hash_seed, self.dim)] += 1.0
        norm = np.linalg.norm(features)
        return features / norm if norm > 0 else features

    def featurize_many(self, texts: Sequence[str]) -> np.ndarray:
        return np.vstack([self.featurize(t) for t in texts]) if texts else np.zeros((0, self.dim))

    def logits(self, prompt: Prompt) -> np.ndarray:
        return self.weights @ self.featurize(prompt.text) + self.bias

    def predict_proba(self, prompt: Prompt) -> tuple[float, float, float]:
        probs = softmax(self.logits(prompt))
        return float(probs[0]), float(probs[1]), float(probs[2])

    def fit(
        self,
        texts: Sequence[str],
        labels: Sequence[ComplexityClass],
        epochs: int = 30,
        batch_size: int = 32,
        learning_rate: float = 0.5,
        seed: int = 0,
    ) -> ReferenceClassifier:
        """
        Mini-batch gradient descent on cross-entropy.

        Returns a new classifier; ``self`` is left untouched so a serving
        snapshot can be swapped atomically.
        """
        features = self.featurize_many(texts)
        targets = np.zeros((len(labels), N_CLASSES))
        for row, label in enumerate(labels):
            targets[row, label.index] = 1.0

        weights = np.array(self.weights, copy=True)
        bias = np.array(self.bias, copy=True)
        rng = np.random.default_rng(seed)
        n = len(texts)

        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start : start + batch_size]
                x = features[idx]
                logits = x @ weights.T + bias
                logits -= logits.max(axis=1, keepdims=True)
                probs = np.exp(logits)
                probs /= probs.sum(axis=1, keepdims=True)
                error = (probs - targets[idx]) / len(idx)
                weights -= learning_rate * (error.T @ x)
                bias -= learning_rate * error.sum(axis=0)

        return ReferenceClassifier(weights, bias, self.hash_seed)

    def to_bytes(self) -> bytes:
        """Serialize as a versioned little-endian artifact."""
        header = _HEADER.pack(ARTIFACT_MAGIC, ARTIFACT_VERSION, self.hash_seed, self.dim)
        return (
            header
            + self.weights.astype("<f8").tobytes(order="C")
            + self.bias.astype("<f8").tobytes(order="C")
        )

    @classmethod
    def from_bytes(cls, payload: bytes) -> ReferenceClassifier:
        """
        Parse an artifact produced by ``to_bytes``.

        Raises:
            ArtifactFormatError: If the header or payload length is wrong
        """
        if len(payload) < _HEADER.size:
            raise ArtifactFormatError("Artifact is shorter than its header")
        magic, version, seed, dim = _HEADER.unpack_from(payload)
        if magic != ARTIFACT_MAGIC:
            raise ArtifactFormatError(f"Bad artifact magic {magic!r}")
        if version != ARTIFACT_VERSION:
            raise ArtifactFormatError(f"Unsupported artifact version {version}")
        expected = _HEADER.size + 8 * (N_CLASSES * dim + N_CLASSES)
        if len(payload) != expected or dim == 0:
            raise ArtifactFormatError(
                f"Artifact payload is {len(payload)} bytes, expected {expected}"
            )
        body = np.frombuffer(payload, dtype="<f8", offset=_HEADER.size)
        weights = body[: N_CLASSES * dim].reshape(N_CLASSES, dim).astype(np.float64)
        bias = body[N_CLASSES * dim :].astype(np.float64)
        return cls(weights, bias, seed)

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes())
        logger.info(f"Wrote classifier artifact to {path} (dim={self.dim})")

    @classmethod
    def load(cls, path: Path) -> ReferenceClassifier:
        if not path.exists():
            raise FileNotFoundError(f"Classifier artifact not found: {path}")
        return cls.from_bytes(path.read_bytes())


class ExternalClassifier(BaseClassifier):
    """Adapter for an HTTP classifier answering ``{"probabilities": [l, m, h]}``."""

    def __init__(
        self,
        url: str,
        timeout: float = 2.0,
        client: httpx.Client | None = None,
    ) -> None:
        self.url = url
        self.timeout = timeout
        self._client = client or httpx.Client(timeout=timeout)

    @retry(
        retry=retry_if_exception_type(httpx.TransportError),
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=0.05, max=0.5),
        reraise=True,
    )
    def _post(self, text: str) -> httpx.Response:
        response = self._client.post(self.url, json={"text": text})
        response.raise_for_status()
        return response

    def predict_proba(self, prompt: Prompt) -> tuple[float, float, float]:
        try:
            payload = self._post(prompt.text).json()
            probs = [float(p) for p in payload["probabilities"]]
        except (httpx.HTTPError, KeyError, TypeError, ValueError) as e:
            raise ClassifierUnavailableError(f"External classifier at {self.url}: {e}") from e
        total = math.fsum(probs)
        if len(probs) != N_CLASSES or total <= 0 or any(p < 0 for p in probs):
            raise ClassifierUnavailableError(f"Malformed probabilities from {self.url}: {probs}")
        return probs[0] / total, probs[1] / total, probs[2] / total


def semantic_classify(prompt: Prompt, model: BaseClassifier | None) -> ClassifierOutput:
    """
    Classify with a semantic model.

    Raises:
        ClassifierUnavailableError: If no model is loaded
    """
    if model is None or not model.is_ready:
        raise ClassifierUnavailableError("Semantic classifier is not loaded")
    return ClassifierOutput.from_probabilities(
        model.predict_proba(prompt), ClassifierSource.SEMANTIC
    )
