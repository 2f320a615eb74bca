"""Deterministic, independently addressable uniform streams.

A stream is identified by a 64-bit seed plus an integer key path such as
(exercise, config point, n, replication, attempt). The same address always yields
the same variates, whatever order or thread the streams are consumed in.
"""

from __future__ import annotations

import numpy as np

_SCALE = 2.0**-52


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.PCG64(ss))


def open_uniforms(gen: np.random.Generator, size: int) -> np.ndarray:
    """Uniforms on the open interval (0, 1): (j + 1/2) 2^-52 with j a 52-bit integer."""
    bits = gen.bit_generator.random_raw(size) >> np.uint64(12)
    return (bits.astype(np.float64) + 0.5) * _SCALE


def uniforms(seed: int, *key: int, size: int) -> np.ndarray:
    return open_uniforms(stream(seed, *key), size)
