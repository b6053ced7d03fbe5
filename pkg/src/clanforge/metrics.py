"""Structural statistics: degrees, components, clustering, path lengths."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.sparse import csgraph

from .graph import Graph, induced_subgraph
from .partition import Partition

# Node count above which the CLI samples path lengths instead of using all sources.
EXACT_PATH_LIMIT = 5000
_BFS_CHUNK = 256


class GraphMetricError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeDistribution:
    pmf: dict[int, float]
    ccdf: dict[int, float]
    mean_degree: float
    mean_degree_exact: Fraction


def degree_distribution(g: Graph) -> DegreeDistribution:
    """Per-degree node fractions, their tail sums, and the mean degree 2m/n."""
    n = g.node_count
    if n == 0:
        raise GraphMetricError("degree distribution of an empty graph is undefined")
    counts = np.bincount(g.degrees)
    observed = np.flatnonzero(counts)
    tails = np.cumsum(counts[::-1])[::-1]
    pmf = {int(k): counts[k] / n for k in observed}
    ccdf = {int(k): tails[k] / n for k in observed}
    exact = Fraction(2 * g.edge_count, n)
    return DegreeDistribution(pmf, ccdf, float(exact), exact)


@dataclass(frozen=True)
class ComponentReport:
    partition: Partition
    sizes: tuple[int, ...]
    largest: int            # block id of the largest component
    largest_size: int
    largest_edge_count: int

    @property
    def count(self) -> int:
        return len(self.sizes)


def component_labels(g: Graph) -> np.ndarray:
    if g.node_count == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    return labels


def connected_components(g: Graph) -> ComponentReport:
    labels = component_labels(g)
    part = Partition.from_labels(g.ids, labels)
    sizes = np.bincount(part.labels) if g.node_count else np.zeros(0, dtype=np.int64)
    if len(sizes) == 0:
        return ComponentReport(part, (), -1, 0, 0)
    # ties go to the component holding the smallest character id
    largest = int(np.argmax(sizes))
    e = g.edge_array()
    edge_count = int(np.count_nonzero(part.labels[e[:, 0]] == largest)) if len(e) else 0
    return ComponentReport(part, tuple(int(s) for s in sizes), largest, int(sizes[largest]), edge_count)


def largest_component_nodes(g: Graph) -> np.ndarray:
    report = connected_components(g)
    return np.flatnonzero(report.partition.labels == report.largest)


def local_clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient per node; 0 for degree below 2."""
    a = g.to_csr()
    # (A @ A) restricted to existing edges counts common neighbours per edge
    common = (a @ a).multiply(a)
    tri2 = np.asarray(common.sum(axis=1)).ravel()  # 2 * triangles(v)
    deg = g.degrees.astype(np.float64)
    denom = deg * (deg - 1)
    out = np.zeros(g.node_count)
    ok = deg >= 2
    out[ok] = tri2[ok] / denom[ok]
    return out


def average_clustering(g: Graph) -> float:
    if g.node_count == 0:
        raise GraphMetricError("clustering of an empty graph is undefined")
    return float(local_clustering(g).mean())


def _distance_rows(sub: Graph, sources: np.ndarray) -> Iterable[tuple[np.ndarray, np.ndarray]]:
    csr = sub.to_csr()
    for start in range(0, len(sources), _BFS_CHUNK):
        chunk = sources[start:start + _BFS_CHUNK]
        yield chunk, csgraph.shortest_path(csr, method="D", directed=False, unweighted=True, indices=chunk)


def average_shortest_path(g: Graph, nodes: Iterable[int] | None = None, mode: str = "exact",
                          count: int = 200, seed: int | None = None) -> float:
    """Mean hop distance over pairs of the (connected) induced subgraph on ``nodes``.

    ``mode="exact"`` averages over all unordered pairs. ``mode="sampled"``
    runs breadth-first search from ``count`` sources drawn without replacement
    and averages over every (source, target) pair reached.
    """
    if nodes is None:
        sub = g
    else:
        keep = np.zeros(g.node_count, dtype=bool)
        keep[np.fromiter((int(x) for x in nodes), dtype=np.int64)] = True
        sub = induced_subgraph(g, keep)
    n = sub.node_count
    if n < 2:
        raise GraphMetricError("average shortest path needs at least 2 nodes")

    if mode == "exact":
        sources = np.arange(n)
    elif mode == "sampled":
        if seed is None:
            raise GraphMetricError("sampled path mode requires a seed")
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=min(count, n), replace=False))
    else:
        raise ValueError(f"unknown path mode {mode!r}")

    total = 0.0
    pairs = 0
    for chunk, dist in _distance_rows(sub, sources):
        if np.isinf(dist).any():
            r, c = np.argwhere(np.isinf(dist))[0]
            raise GraphMetricError(
                f"node set is disconnected: no path between characters {sub.ids[chunk[r]]} and {sub.ids[c]}")
        total += float(dist.sum())
        pairs += len(chunk) * (n - 1)
    return total / pairs


@dataclass(frozen=True)
class SmallWorldReport:
    measured_avg_path: float
    expected_avg_path: float
    measured_clustering: float
    random_clustering: float
    verdict: bool
    path_factor: float = 2.0
    clustering_factor: float = 10.0


def expected_path_length(n: int, mean_degree: float) -> float:
    if mean_degree <= 1:
        raise GraphMetricError(f"mean degree {mean_degree} <= 1: ln n / ln <k> is undefined")
    return math.log(n) / math.log(mean_degree)


def small_world_verdict(n: int, mean_degree: float, measured_avg_path: float, measured_clustering: float,
                        random_clustering: float, path_factor: float = 2.0,
                        clustering_factor: float = 10.0) -> SmallWorldReport:
    expected = expected_path_length(n, mean_degree)
    verdict = (measured_avg_path <= path_factor * expected
               and measured_clustering >= clustering_factor * random_clustering)
    return SmallWorldReport(measured_avg_path, expected, measured_clustering, random_clustering,
                            bool(verdict), path_factor, clustering_factor)


def small_world_report(g: Graph, random_clustering: float, path_mode: str = "exact",
                       count: int = 200, seed: int | None = None, path_factor: float = 2.0,
                       clustering_factor: float = 10.0) -> SmallWorldReport:
    """Compare path length and clustering of ``g`` against the random-graph expectation.

    Path length is measured on the largest connected component.
    """
    mean_degree = degree_distribution(g).mean_degree
    expected_path_length(g.node_count, mean_degree)  # fail early on <k> <= 1
    path = average_shortest_path(g, largest_component_nodes(g), path_mode, count, seed)
    return small_world_verdict(g.node_count, mean_degree, path, average_clustering(g),
                               random_clustering, path_factor, clustering_factor)
