"""Seed handling helpers: one seeded generator hierarchy per run."""

from __future__ import annotations

import numpy as np

RngLike = "int | np.random.Generator | np.random.SeedSequence | None"


def as_generator(seed) -> np.random.Generator:
    """Coerce an int seed, SeedSequence, Generator or None into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(seed)


def split(seed, n: int) -> list[np.random.Generator]:
    """Derive `n` independent child generators deterministically."""
    return as_generator(seed).spawn(n)
