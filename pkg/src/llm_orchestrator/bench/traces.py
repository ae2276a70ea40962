"""Trace records (JSONL) and synthetic prompt generation."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from llm_orchestrator.bench.reference import benchmark_mix
from llm_orchestrator.routing.types import ComplexityClass

# benchmark -> probabilities of (low, medium, high) prompts
BENCHMARK_COMPLEXITY: dict[str, tuple[float, float, float]] = {
    "HumanEval": (0.1, 0.5, 0.4),
    "GSM8K": (0.2, 0.5, 0.3),
    "MBPP": (0.2, 0.6, 0.2),
    "TruthfulQA": (0.3, 0.4, 0.3),
    "ARC": (0.5, 0.3, 0.2),
    "HellaSwag": (0.6, 0.3, 0.1),
    "MATH": (0.1, 0.3, 0.6),
    "MMLU Pro": (0.3, 0.3, 0.4),
}

# Low prompts carry a low keyword, High prompts a high keyword, Medium prompts neither.
_TEMPLATES: dict[ComplexityClass, tuple[str, ...]] = {
    ComplexityClass.LOW: (
        "List {n} common {thing}.",
        "Define {term} in one sentence.",
        "Translate '{phrase}' into {language}.",
        "Convert {n} {unit} to meters.",
        "Name the capital of {country}.",
        "Sum the numbers {n} and {m}.",
    ),
    ComplexityClass.MEDIUM: (
        "Write a short paragraph about {topic}.",
        "Describe how {topic} works for a new student.",
        "Summarize the main ideas behind {topic}.",
        "Compare {topic} with {other} in plain words.",
        "Write a function that reverses a {structure} in Python.",
        "Give an example of {topic} used in industry.",
    ),
    ComplexityClass.HIGH: (
        "Prove that {claim}.",
        "Derive the closed form of {quantity} from first principles.",
        "Explain why {phenomenon} happens, with supporting evidence.",
        "Analyze the trade-offs of {design} under heavy load.",
        "Optimize {algorithm} for memory and justify each change.",
        "Work through {quantity} step by step and check every assumption.",
    ),
}

_FILLERS: dict[str, tuple[str, ...]] = {
    "n": ("3", "5", "7", "12", "42"),
    "m": ("8", "19", "23", "64"),
    "thing": ("fruits", "colors", "programming languages", "planets", "rivers"),
    "term": ("entropy", "latency", "a prime number", "photosynthesis", "inflation"),
    "phrase": ("good morning", "thank you", "where is the station", "see you soon"),
    "language": ("French", "German", "Spanish", "Japanese"),
    "unit": ("feet", "inches", "yards", "miles"),
    "country": ("France", "Kenya", "Chile", "Japan", "Canada"),
    "topic": ("vector databases", "public key cryptography", "garbage collection",
              "supply chains", "climate models", "load balancers"),
    "other": ("relational storage", "symmetric ciphers", "reference counting", "queues"),
    "structure": ("string", "binary tree", "array", "deque"),
    "claim": ("there are infinitely many primes", "the harmonic series diverges",
              "every tree with n nodes has n - 1 edges", "sqrt(2) is irrational"),
    "quantity": ("the variance of a binomial variable", "a geometric series total",
                 "the expected queue length of an M/M/1 system", "the gradient of softmax"),
    "phenomenon": ("the sky looks blue", "caches speed up programs", "tides rise twice a day"),
    "design": ("eventual consistency", "sharded key-value stores", "microservice decomposition"),
    "algorithm": ("quicksort", "Dijkstra's algorithm", "a trie-based autocomplete"),
}


@dataclass(frozen=True)
class TraceRecord:
    """One prompt in a replayable trace."""

    prompt: str
    arrival_offset: float = 0.0
    benchmark_tag: str | None = None
    complexity: ComplexityClass | None = None
    prompt_id: str | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "prompt_id": self.prompt_id,
            "prompt": self.prompt,
            "arrival_offset": self.arrival_offset,
            "benchmark_tag": self.benchmark_tag,
            "complexity": self.complexity.value if self.complexity else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, object]) -> TraceRecord:
        complexity = data.get("complexity")
        return cls(
            prompt=str(data["prompt"]),
            arrival_offset=float(data.get("arrival_offset", 0.0)),  # type: ignore[arg-type]
            benchmark_tag=data.get("benchmark_tag"),  # type: ignore[arg-type]
            complexity=ComplexityClass(complexity) if complexity else None,
            prompt_id=data.get("prompt_id"),  # type: ignore[arg-type]
        )


def read_trace(path: Path) -> list[TraceRecord]:
    """
    Read a JSONL trace.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If arrival offsets decrease or a line is malformed
    """
    if not path.exists():
        raise FileNotFoundError(f"Trace file not found: {path}")
    records: list[TraceRecord] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = TraceRecord.from_dict(json.loads(line))
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}:{line_no}: invalid trace record: {e}") from e
            if records and record.arrival_offset < records[-1].arrival_offset:
                raise ValueError(f"{path}:{line_no}: arrival offsets must be non-decreasing")
            records.append(record)
    return records


def write_trace(records: Iterable[TraceRecord], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def _fill(template: str, rng: np.random.Generator) -> str:
    values = {
        key: options[int(rng.integers(len(options)))]
        for key, options in _FILLERS.items()
        if "{" + key + "}" in template
    }
    return template.format(**values)


def synthetic_prompt(complexity: ComplexityClass, rng: np.random.Generator) -> str:
    templates = _TEMPLATES[complexity]
    return _fill(templates[int(rng.integers(len(templates)))], rng)


def synthetic_prompts(
    count: int,
    rng: np.random.Generator,
    complexity_mix: dict[ComplexityClass, float] | None = None,
) -> list[tuple[str, str, ComplexityClass]]:
    """
    Draw labeled prompts following the benchmark mix.

    Args:
        count: Number of prompts
        rng: Random generator
        complexity_mix: Fixed class probabilities overriding the per-benchmark ones

    Returns:
        (text, benchmark tag, complexity) triples
    """
    mix = benchmark_mix()
    names = list(mix)
    weights = np.array([mix[n] for n in names])
    classes = (ComplexityClass.LOW, ComplexityClass.MEDIUM, ComplexityClass.HIGH)
    fixed = None
    if complexity_mix:
        fixed = np.array([complexity_mix.get(c, 0.0) for c in classes], dtype=float)
        fixed = fixed / fixed.sum()

    prompts = []
    for _ in range(count):
        tag = names[int(rng.choice(len(names), p=weights))]
        probs = fixed if fixed is not None else np.array(BENCHMARK_COMPLEXITY[tag])
        complexity = classes[int(rng.choice(3, p=probs))]
        prompts.append((synthetic_prompt(complexity, rng), tag, complexity))
    return prompts


def build_trace(
    offsets: Sequence[float],
    rng: np.random.Generator,
    complexity_mix: dict[ComplexityClass, float] | None = None,
) -> list[TraceRecord]:
    """Attach synthetic labeled prompts to arrival offsets."""
    prompts = synthetic_prompts(len(offsets), rng, complexity_mix)
    return [
        TraceRecord(
            prompt=text,
            arrival_offset=float(offset),
            benchmark_tag=tag,
            complexity=complexity,
            prompt_id=f"p{i:06d}",
        )
        for i, (offset, (text, tag, complexity)) in enumerate(zip(offsets, prompts))
    ]
