"""Labeled, reproducible random streams derived from one integer seed."""

from __future__ import annotations

import zlib

import numpy as np


def stream(seed: int, label: str) -> np.random.SeedSequence:
    """Seed sequence for ``label``; different labels never share a stream."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence([seed, zlib.crc32(label.encode("utf-8"))])


def generator(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(stream(seed, label))


def run_generators(seed: int, label: str, runs: int) -> list[np.random.Generator]:
    """One independent generator per run index."""
    return [np.random.default_rng(s) for s in stream(seed, label).spawn(runs)]
