"""PageRank and betweenness centrality on undirected graphs."""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .graph import Graph


@dataclass(frozen=True)
class ScoreVector:
    ids: np.ndarray
    scores: np.ndarray
    algorithm: str
    params: dict = field(default_factory=dict)
    iterations: int = 0
    converged: bool = True

    def ranking(self) -> np.ndarray:
        """Node positions by descending score, ties by ascending character id."""
        return np.lexsort((self.ids, -self.scores))

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.ids.tolist(), self.scores.tolist()))


def worker_count() -> int:
    """Parallelism cap taken from ``CLANFORGE_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("CLANFORGE_THREADS", "1")))
    except ValueError:
        return 1


def pagerank(g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 200) -> ScoreVector:
    """Power-iteration PageRank; each undirected edge is a pair of directed links.

    Degree-0 nodes spread their mass uniformly. Iteration stops once the L1
    change drops below ``tol``; hitting ``max_iter`` first leaves
    ``converged=False``.
    """
    if not 0 < damping < 1:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    n = g.node_count
    if n == 0:
        raise ValueError("pagerank of an empty graph is undefined")
    deg = g.degrees.astype(np.float64)
    dangling = deg == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / deg[~dangling]
    # column-stochastic transition: x_new[v] = sum_u A[v,u] x[u] / deg(u)
    transition = g.to_csr() @ sparse.diags(inv)
    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new = damping * (transition @ x)
        new += (damping * x[dangling].sum() + (1.0 - damping)) / n
        new /= new.sum()
        delta = np.abs(new - x).sum()
        x = new
        if delta < tol:
            converged = True
            break
    params = {"damping": damping, "tol": tol, "max_iter": max_iter}
    return ScoreVector(g.ids, x, "pagerank", params, it, converged)


def _brandes_sources(adj: list[list[int]], sources: range) -> np.ndarray:
    n = len(adj)
    cb = np.zeros(n)
    for s in sources:
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb


def _brandes_chunk(args):
    adj, start, stop = args
    return _brandes_sources(adj, range(start, stop))


def betweenness(g: Graph, normalized: bool = False, workers: int | None = None) -> ScoreVector:
    """Exact shortest-path betweenness (Brandes accumulation).

    Each unordered pair is counted once. ``normalized`` divides by
    (n-1)(n-2)/2. Sources are split across ``workers`` processes when more
    than one is requested; partial sums are reduced in source order.
    """
    n = g.node_count
    adj = g.adjacency()
    workers = workers or worker_count()
    if workers > 1 and n >= 2000:
        bounds = np.linspace(0, n, workers * 4 + 1).astype(int)
        tasks = [(adj, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_brandes_chunk, tasks))
        cb = np.zeros(n)
        for part in parts:
            cb += part
    else:
        cb = _brandes_sources(adj, range(n))
    cb /= 2.0
    if normalized and n > 2:
        cb /= (n - 1) * (n - 2) / 2.0
    return ScoreVector(g.ids, cb, "betweenness", {"normalized": normalized})
