"""Seeded random graph generators.

All randomness comes from numpy's PCG64 generator seeded with the given
integer, so a (kind, parameters, seed) triple fixes the edge set exactly.
"""
from __future__ import annotations

import numpy as np

from .graph import Graph, _from_index_pairs


class GeneratorError(ValueError):
    pass


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _pair_offsets(n: int) -> np.ndarray:
    # first linear index of row i among pairs (i, j), i < j
    i = np.arange(n, dtype=np.int64)
    return i * (2 * n - i - 1) // 2


def generate_uniform(n: int, m: int, seed: int) -> Graph:
    """G(n, m): ``m`` distinct edges drawn uniformly from all unordered pairs."""
    if n < 1:
        raise GeneratorError("n must be >= 1")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise GeneratorError(f"m={m} edges do not fit in {total} node pairs")
    rng = _rng(seed)
    picks = np.sort(rng.choice(total, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    offsets = _pair_offsets(n)
    u = np.searchsorted(offsets, picks, side="right") - 1
    v = picks - offsets[u] + u + 1
    return _from_index_pairs(np.arange(n, dtype=np.int64), u, v)


def powerlaw_degrees(n: int, exponent: float, rng: np.random.Generator, sampler: str = "pareto") -> np.ndarray:
    """Degree sequence with tail ``P(k) ~ k**-exponent``, k >= 1, capped at n - 1.

    ``pareto`` rounds continuous Pareto draws (density ~ x**-exponent on x >= 1)
    to the nearest integer; ``zeta`` samples the discrete law directly.
    """
    cap = max(n - 1, 1)
    if sampler == "pareto":
        x = (1.0 - rng.random(n)) ** (-1.0 / (exponent - 1.0))
        return np.minimum(np.rint(np.minimum(x, cap)), cap).astype(np.int64)
    if sampler == "zeta":
        k = np.arange(1, cap + 1)
        p = k.astype(np.float64) ** -exponent
        return rng.choice(k, size=n, p=p / p.sum()).astype(np.int64)
    raise GeneratorError(f"unknown degree sampler {sampler!r}")


def generate_powerlaw(n: int, exponent: float, seed: int, sampler: str = "pareto") -> Graph:
    """Configuration-model graph on a power-law degree sequence.

    Stubs are shuffled and paired; self-loops and repeated pairs are
    discarded rather than rewired, so hubs end slightly below their target.
    """
    if exponent <= 2:
        raise GeneratorError(f"exponent must exceed 2, got {exponent}")
    if n < 2:
        raise GeneratorError("n must be >= 2")
    rng = _rng(seed)
    deg = powerlaw_degrees(n, exponent, rng, sampler)
    if deg.sum() % 2:
        room = np.flatnonzero(deg < n - 1)
        deg[room[rng.integers(len(room))]] += 1
    stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
    rng.shuffle(stubs)
    a, b = stubs[0::2], stubs[1::2]
    ok = a != b
    lo, hi = np.minimum(a[ok], b[ok]), np.maximum(a[ok], b[ok])
    pairs = np.unique(np.column_stack([lo, hi]), axis=0)
    return _from_index_pairs(np.arange(n, dtype=np.int64), pairs[:, 0], pairs[:, 1])
