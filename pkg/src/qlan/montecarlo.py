"""Chunked, seed-stable Monte Carlo accumulation.

Each chunk draws from ``default_rng([seed, chunk_index])`` so results do not depend on
scheduling or worker count.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

CHUNK = 1 << 16


def chunks(reps: int, chunk: int = CHUNK) -> Iterator[tuple[int, int]]:
    """Yield (chunk_index, chunk_size) pairs covering reps draws."""
    for index, start in enumerate(range(0, reps, chunk)):
        yield index, min(chunk, reps - start)


def seed_sequence(seed, *extra: int) -> list[int]:
    """Entropy list for a derived stream; ``seed`` may itself be a tuple of ints."""
    base = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return [int(x) for x in base] + [int(x) for x in extra]


def chunk_rng(seed, index: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, index))


def mean_se(total: float, total_sq: float, reps: int) -> tuple[float, float]:
    """Sample mean and its standard error from running sums."""
    mean = total / reps
    if reps < 2:
        return mean, float("nan")
    var = max(total_sq / reps - mean**2, 0.0) * reps / (reps - 1)
    return mean, float(np.sqrt(var / reps))


def summarize(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    return mean_se(float(values.sum()), float((values**2).sum()), values.size)
