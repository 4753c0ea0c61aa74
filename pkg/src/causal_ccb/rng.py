"""Seed derivation and per-run random streams."""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the splitmix64 finalizer on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stable_hash(label: str) -> int:
    return zlib.crc32(label.encode("utf-8")) & 0xFFFFFFFF


def derive_seed(base: int, run: int, label: str = "") -> int:
    """Mix ``(base, run, label)`` into an independent 64-bit seed.

    The mixer chains splitmix64 over the three components so neighbouring
    run indices and different algorithm labels land on unrelated streams.
    """
    h = splitmix64(int(base) & _MASK64)
    h = splitmix64(h ^ (int(run) & _MASK64))
    h = splitmix64(h ^ stable_hash(label))
    return h


def run_generators(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Return ``(environment, policy)`` generators for one run.

    Environment draws and policy coin flips come from separate children of
    the same seed so changing a policy never perturbs the sampled world.
    """
    env_ss, pol_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(env_ss)), np.random.Generator(np.random.PCG64(pol_ss))
