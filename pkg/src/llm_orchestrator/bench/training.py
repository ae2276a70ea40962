"""Training the reference classifier on a labeled corpus."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from llm_orchestrator.errors import TrainingError
from llm_orchestrator.routing import (
    COMPLEXITY_CLASSES,
    ComplexityClass,
    Prompt,
    ReferenceClassifier,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_HOLDOUT_FRACTION = 0.1

# Each class owns a disjoint vocabulary; fillers are shared, so the corpus is linearly separable.
_PLANTED_WORDS: dict[ComplexityClass, tuple[str, ...]] = {
    ComplexityClass.LOW: (
        "capital", "spelling", "synonym", "plural",
        "abbreviation", "acronym", "birthday", "weekday",
    ),
    ComplexityClass.MEDIUM: (
        "paragraph", "overview", "outline", "tutorial", "comparison", "recipe", "email", "review",
    ),
    ComplexityClass.HIGH: (
        "theorem", "lemma", "asymptotic", "invariant", "counterexample", "eigenvalue",
        "convergence", "complexity",
    ),
}
_FILLER_WORDS = (
    "please", "the", "a", "about", "for", "with", "this", "topic", "some", "question",
    "today", "my", "team", "quickly", "of", "and",
)


@dataclass(frozen=True)
class TrainingResult:
    """A trained classifier and how it did on the held-out split."""

    model: ReferenceClassifier
    holdout_accuracy: float
    train_size: int
    holdout_size: int
    epochs: int
    artifact_path: Path | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "holdout_accuracy": self.holdout_accuracy,
            "train_size": self.train_size,
            "holdout_size": self.holdout_size,
            "epochs": self.epochs,
            "dim": self.model.dim,
            "artifact_path": str(self.artifact_path) if self.artifact_path else None,
        }


def planted_corpus(
    per_class: int = 300, seed: int = 0
) -> tuple[list[str], list[ComplexityClass]]:
    """
    Synthetic labeled prompts with class-specific planted words.

    Each prompt mixes two or three words from its class vocabulary with three
    to six shared filler words. Labels cycle Low, Medium, High.
    """
    rng = np.random.default_rng(seed)
    texts: list[str] = []
    labels: list[ComplexityClass] = []
    for _ in range(per_class):
        for complexity in COMPLEXITY_CLASSES:
            vocab = _PLANTED_WORDS[complexity]
            planted = [vocab[int(i)] for i in rng.choice(len(vocab), int(rng.integers(2, 4)))]
            picks = rng.integers(0, len(_FILLER_WORDS), int(rng.integers(3, 7)))
            fillers = [_FILLER_WORDS[int(i)] for i in picks]
            words = planted + fillers
            order = rng.permutation(len(words))
            texts.append(" ".join(words[int(i)] for i in order))
            labels.append(complexity)
    return texts, labels


def read_corpus(path: Path) -> tuple[list[str], list[ComplexityClass]]:
    """
    Read a JSONL corpus of ``{"text": ..., "label": "low|medium|high"}`` lines.

    Trace files work too: ``prompt`` and ``complexity`` are accepted as aliases.

    Raises:
        FileNotFoundError: If the file does not exist
        TrainingError: If a line has no usable label
    """
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")
    texts: list[str] = []
    labels: list[ComplexityClass] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            text = row.get("text", row.get("prompt"))
            label = row.get("label", row.get("complexity"))
            if text is None or label is None:
                raise TrainingError(f"{path}:{line_no}: needs text and label")
            try:
                labels.append(ComplexityClass(str(label).lower()))
            except ValueError:
                raise TrainingError(f"{path}:{line_no}: unknown label '{label}'") from None
            texts.append(str(text))
    return texts, labels


def holdout_split(n: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded (train, holdout) index split; at least one holdout item when n > 1."""
    order = np.random.default_rng(seed).permutation(n)
    size = int(round(n * fraction))
    if n > 1:
        size = min(max(size, 1), n - 1)
    return order[size:], order[:size]


def accuracy(
    model: ReferenceClassifier, texts: Sequence[str], labels: Sequence[ComplexityClass]
) -> float:
    if not texts:
        return 0.0
    hits = 0
    for i, (text, label) in enumerate(zip(texts, labels)):
        probs = model.predict_proba(Prompt(id=f"eval-{i}", text=text, arrival_time=0.0))
        predicted = COMPLEXITY_CLASSES[int(np.argmax(probs))]
        hits += predicted == label
    return hits / len(texts)


def train_reference_classifier(
    texts: Sequence[str],
    labels: Sequence[ComplexityClass],
    epochs: int = 30,
    batch_size: int = 32,
    learning_rate: float = 0.5,
    seed: int = 0,
    dim: int = 4096,
    holdout_fraction: float = DEFAULT_HOLDOUT_FRACTION,
    out: Path | None = None,
) -> TrainingResult:
    """
    Train the hashed bag-of-words softmax model.

    Args:
        texts: Prompt texts
        labels: Complexity label per text
        epochs: Passes over the training split (0 leaves the model uniform)
        batch_size: Mini-batch size
        learning_rate: Gradient step size
        seed: Seed for the split, shuffling and feature hashing
        dim: Hashed feature dimension
        holdout_fraction: Share of the corpus held out for validation
        out: Artifact path to write

    Returns:
        Training result with held-out accuracy

    Raises:
        TrainingError: If any class is missing or inputs are inconsistent
    """
    if len(texts) != len(labels):
        raise TrainingError(f"{len(texts)} texts but {len(labels)} labels")
    missing = [c.value for c in COMPLEXITY_CLASSES if c not in set(labels)]
    if missing:
        raise TrainingError(f"Corpus has no examples of class(es): {', '.join(missing)}")
    if epochs < 0 or batch_size < 1 or learning_rate <= 0:
        raise TrainingError("epochs must be >= 0, batch_size >= 1 and learning_rate > 0")

    train_idx, hold_idx = holdout_split(len(texts), holdout_fraction, seed)
    train_texts = [texts[i] for i in train_idx]
    train_labels = [labels[i] for i in train_idx]
    hold_texts = [texts[i] for i in hold_idx]
    hold_labels = [labels[i] for i in hold_idx]

    model = ReferenceClassifier.untrained(dim=dim, hash_seed=seed)
    if epochs > 0:
        model = model.fit(train_texts, train_labels, epochs, batch_size, learning_rate, seed)
    held_out = accuracy(model, hold_texts, hold_labels)
    logger.info(
        f"Trained reference classifier on {len(train_texts)} prompts: "
        f"held-out accuracy {held_out:.3f} on {len(hold_texts)}"
    )
    if out is not None:
        model.save(out)
    return TrainingResult(model, held_out, len(train_texts), len(hold_texts), epochs, out)
