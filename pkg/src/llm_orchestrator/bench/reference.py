"""Reported baseline numbers used for arithmetic checks and report context.

None of these are reproduction targets for the simulator.
"""

# benchmark -> (runs, successes) of the baseline completion study
BASELINE_RUNS: dict[str, tuple[int, int]] = {
    "HumanEval": (820, 656),
    "GSM8K": (6595, 5924),
    "MBPP": (2500, 1736),
    "TruthfulQA": (3950, 3167),
    "ARC": (5860, 4704),
    "HellaSwag": (50210, 40260),
    "MATH": (25000, 19908),
    "MMLU Pro": (60160, 42103),
}
BASELINE_TOTAL: tuple[int, int] = (163720, 126237)

# success percentages as published (one decimal)
BASELINE_SUCCESS_PERCENT: dict[str, float] = {
    "HumanEval": 80.0,
    "GSM8K": 89.8,
    "MBPP": 69.4,
    "TruthfulQA": 80.2,
    "ARC": 80.3,
    "HellaSwag": 80.2,
    "MATH": 79.6,
    "MMLU Pro": 70.0,
    "Total": 77.1,
}

REPORTED_EFFICIENCY = 1.43

# strategy -> (accuracy %, latency s, cost per query)
REPORTED_SELECTION: dict[str, tuple[float, float, float]] = {
    "random": (78.4, 63.1, 0.020),
    "latency_only": (82.9, 48.6, 0.017),
    "multi_objective": (88.3, 42.5, 0.015),
}

# deployment -> (cost per query, recovery seconds)
REPORTED_DEPLOYMENT: dict[str, tuple[float, float]] = {
    "static": (0.021, 45.0),
    "base": (0.016, 12.0),
    "auto": (0.014, 4.0),
}


def benchmark_mix() -> dict[str, float]:
    """Share of each benchmark in the baseline runs."""
    total = sum(runs for runs, _ in BASELINE_RUNS.values())
    return {name: runs / total for name, (runs, _) in BASELINE_RUNS.items()}
