"""Map-equation community detection and partition agreement (NMI)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .centrality import pagerank
from .graph import Graph, PlayerTable
from .partition import Partition, PartitionError

MIN_IMPROVEMENT = 1e-10


@dataclass(frozen=True)
class MapScore:
    codelength: float
    index_codelength: float
    module_codelength: float


@dataclass(frozen=True)
class Flow:
    """Stationary visit rates and per-link flow of a teleporting random walk."""

    visit: np.ndarray
    link_scale: np.ndarray  # flow on each directed link u->v is link_scale[u]


def node_flow(g: Graph, teleport: float = 0.15) -> Flow:
    if not 0 < teleport < 1:
        raise ValueError(f"teleport must lie in (0, 1), got {teleport}")
    visit = pagerank(g, damping=1.0 - teleport, tol=1e-15, max_iter=10_000).scores
    deg = g.degrees
    scale = np.zeros(g.node_count)
    has = deg > 0
    scale[has] = (1.0 - teleport) * visit[has] / deg[has]
    return Flow(visit, scale)


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def _check_labels(g: Graph, p: Partition | Sequence[int] | np.ndarray) -> np.ndarray:
    if isinstance(p, Partition):
        if not np.array_equal(p.ids, g.ids):
            raise PartitionError("partition does not cover exactly the graph's nodes")
        return np.asarray(p.labels)
    labels = np.asarray(p, dtype=np.int64)
    if len(labels) != g.node_count:
        raise PartitionError("partition does not cover exactly the graph's nodes")
    if len(labels) and (labels.min() < 0 or np.any(np.bincount(labels) == 0)):
        raise PartitionError("partition has empty blocks; block ids must be contiguous from 0")
    return labels


def map_equation(g: Graph, p: Partition | Sequence[int], teleport: float = 0.15,
                 flow: Flow | None = None) -> MapScore:
    """Two-level map-equation codelength (bits) of partition ``p``.

    L = q H(Q) + sum_i p_i H(P_i): the index codebook encodes module exits,
    each module codebook encodes its nodes' visits plus its own exit.
    """
    labels = _check_labels(g, p)
    flow = flow or node_flow(g, teleport)
    k = int(labels.max()) + 1 if len(labels) else 0
    module_visit = np.bincount(labels, weights=flow.visit, minlength=k)
    exit_rate = np.zeros(k)
    e = g.edge_array()
    cross = e[labels[e[:, 0]] != labels[e[:, 1]]]
    for side in (0, 1):
        np.add.at(exit_rate, labels[cross[:, side]], flow.link_scale[cross[:, side]])

    total_exit = float(exit_rate.sum())
    index = 0.0
    if total_exit > 0:
        q = exit_rate[exit_rate > 0]
        index = float(-(q * np.log2(q / total_exit)).sum())

    ring = exit_rate + module_visit
    module = 0.0
    has_exit = exit_rate > 0
    module -= float((exit_rate[has_exit] * np.log2(exit_rate[has_exit] / ring[has_exit])).sum())
    visited = flow.visit > 0
    pa = flow.visit[visited]
    module -= float((pa * np.log2(pa / ring[labels[visited]])).sum())
    return MapScore(index + module, index, module)


@dataclass(frozen=True)
class MoveRecord:
    level: int
    node: int
    source: int
    target: int
    codelength_before: float
    codelength_after: float


@dataclass
class DetectionResult:
    partition: Partition
    codelength: float
    trace: list[MoveRecord] = field(default_factory=list)
    levels: int = 0


class _Level:
    """Super-node network at one aggregation level, with module bookkeeping."""

    def __init__(self, visit: np.ndarray, out_links: list[dict[int, float]]):
        n = len(visit)
        self.visit = visit
        self.out_links = out_links
        self.in_links: list[dict[int, float]] = [{} for _ in range(n)]
        for a, links in enumerate(out_links):
            for b, w in links.items():
                self.in_links[b][a] = w
        self.out_flow = np.array([sum(l.values()) for l in out_links])
        self.in_flow = np.array([sum(l.values()) for l in self.in_links])
        self.module = np.arange(n)
        self.mod_size = np.ones(n, dtype=np.int64)
        self.mod_visit = visit.copy()
        self.mod_exit = self.out_flow.copy()
        self.total_exit = float(self.mod_exit.sum())
        self.sum_plogp_exit = sum(_plogp(q) for q in self.mod_exit)
        self.sum_plogp_ring = sum(_plogp(q + v) for q, v in zip(self.mod_exit, self.mod_visit))

    def codelength(self, node_entropy_term: float) -> float:
        return (_plogp(self.total_exit) - 2.0 * self.sum_plogp_exit
                - node_entropy_term + self.sum_plogp_ring)

    def _flows_to_modules(self, a: int) -> tuple[dict[int, float], dict[int, float]]:
        out_to: dict[int, float] = {}
        in_from: dict[int, float] = {}
        mod = self.module
        for b, w in self.out_links[a].items():
            out_to[mod[b]] = out_to.get(mod[b], 0.0) + w
        for b, w in self.in_links[a].items():
            in_from[mod[b]] = in_from.get(mod[b], 0.0) + w
        return out_to, in_from

    def best_move(self, a: int) -> tuple[int, float, tuple]:
        """Best target module for ``a`` and the codelength change of moving there."""
        src = int(self.module[a])
        out_to, in_from = self._flows_to_modules(a)
        va, oa = self.visit[a], self.out_flow[a]

        q_src = self.mod_exit[src]
        if self.mod_size[src] == 1:
            new_q_src = new_v_src = 0.0
        else:
            new_q_src = q_src - oa + out_to.get(src, 0.0) + in_from.get(src, 0.0)
            new_v_src = self.mod_visit[src] - va
        d_exit_src = new_q_src - q_src
        d_plogp_src = _plogp(new_q_src) - _plogp(q_src)
        d_ring_src = _plogp(new_q_src + new_v_src) - _plogp(q_src + self.mod_visit[src])

        best, best_delta, best_state = src, 0.0, ()
        for dst in sorted(set(out_to) | set(in_from)):
            if dst == src:
                continue
            q_dst = self.mod_exit[dst]
            new_q_dst = q_dst + oa - out_to.get(dst, 0.0) - in_from.get(dst, 0.0)
            new_v_dst = self.mod_visit[dst] + va
            total = self.total_exit + d_exit_src + (new_q_dst - q_dst)
            d_plogp = d_plogp_src + _plogp(new_q_dst) - _plogp(q_dst)
            d_ring = d_ring_src + _plogp(new_q_dst + new_v_dst) - _plogp(q_dst + self.mod_visit[dst])
            delta = (_plogp(total) - _plogp(self.total_exit)) - 2.0 * d_plogp + d_ring
            if delta < best_delta:
                best, best_delta = dst, delta
                best_state = (new_q_src, new_v_src, new_q_dst, new_v_dst, total)
        return best, best_delta, best_state

    def apply(self, a: int, dst: int, state: tuple) -> None:
        src = int(self.module[a])
        new_q_src, new_v_src, new_q_dst, new_v_dst, total = state
        self.sum_plogp_exit += (_plogp(new_q_src) - _plogp(self.mod_exit[src])
                                + _plogp(new_q_dst) - _plogp(self.mod_exit[dst]))
        self.sum_plogp_ring += (_plogp(new_q_src + new_v_src) - _plogp(self.mod_exit[src] + self.mod_visit[src])
                                + _plogp(new_q_dst + new_v_dst) - _plogp(self.mod_exit[dst] + self.mod_visit[dst]))
        self.mod_exit[src], self.mod_visit[src] = new_q_src, new_v_src
        self.mod_exit[dst], self.mod_visit[dst] = new_q_dst, new_v_dst
        self.total_exit = total
        self.mod_size[src] -= 1
        self.mod_size[dst] += 1
        self.module[a] = dst

    def aggregate(self) -> tuple["_Level", np.ndarray]:
        _, relabel = np.unique(self.module, return_inverse=True)
        k = int(relabel.max()) + 1
        visit = np.bincount(relabel, weights=self.visit, minlength=k)
        links: list[dict[int, float]] = [{} for _ in range(k)]
        for a, out in enumerate(self.out_links):
            ma = relabel[a]
            for b, w in out.items():
                mb = relabel[b]
                if ma != mb:
                    links[ma][mb] = links[ma].get(mb, 0.0) + w
        return _Level(visit, links), relabel


def optimize_map_equation(g: Graph, seed: int, teleport: float = 0.15,
                          max_levels: int = 50) -> DetectionResult:
    """Greedy agglomerative minimisation of the two-level map equation.

    Every node starts in its own module. Nodes are visited in a seeded random
    order and moved to the neighbouring module giving the largest codelength
    decrease; when a sweep makes no move, modules are collapsed into
    super-nodes and the procedure repeats on the coarser network.
    """
    flow = node_flow(g, teleport)
    n = g.node_count
    links: list[dict[int, float]] = []
    for u in range(n):
        w = float(flow.link_scale[u])
        links.append({int(v): w for v in g.neighbors(u)})
    node_term = sum(_plogp(p) for p in flow.visit)

    rng = np.random.default_rng(seed)
    level = _Level(flow.visit.copy(), links)
    assignment = np.arange(n)
    current = level.codelength(node_term)
    trace: list[MoveRecord] = []
    depth = 0

    for depth in range(max_levels):
        moved_at_level = False
        while True:
            moved = False
            for a in rng.permutation(len(level.visit)):
                dst, delta, state = level.best_move(int(a))
                if delta < -MIN_IMPROVEMENT:
                    src = int(level.module[a])
                    level.apply(int(a), dst, state)
                    after = level.codelength(node_term)
                    trace.append(MoveRecord(depth, int(a), src, int(dst), current, after))
                    current = after
                    moved = moved_at_level = True
            if not moved:
                break
        if not moved_at_level:
            break
        level, relabel = level.aggregate()
        assignment = relabel[assignment]

    labels = assignment
    score = map_equation(g, labels_contiguous(labels), flow=flow)
    one_block = map_equation(g, np.zeros(n, dtype=np.int64), flow=flow) if n else score
    if one_block.codelength < score.codelength - MIN_IMPROVEMENT:
        labels = np.zeros(n, dtype=np.int64)
        score = one_block
    return DetectionResult(Partition.from_labels(g.ids, labels), score.codelength, trace, depth + 1)


def labels_contiguous(labels: np.ndarray) -> np.ndarray:
    return np.unique(labels, return_inverse=True)[1] if len(labels) else labels


def detect_communities(g: Graph, seed: int, teleport: float = 0.15) -> Partition:
    return optimize_map_equation(g, seed, teleport).partition


def _entropy(counts: np.ndarray, total: int) -> float:
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def nmi(p1: Partition, p2: Partition, normalization: str = "arithmetic") -> float:
    """Normalised mutual information (natural log) between two partitions.

    ``normalization="arithmetic"`` gives 2I/(H1+H2), ``"max"`` gives
    I/max(H1, H2). Two single-block partitions score 1.
    """
    if not np.array_equal(p1.ids, p2.ids):
        raise PartitionError("partitions cover different node sets")
    n = len(p1)
    if n == 0:
        raise PartitionError("NMI of empty partitions is undefined")
    a, b = p1.labels, p2.labels
    joint = np.unique(a * (int(b.max()) + 1) + b, return_counts=True)[1]
    ca = np.bincount(a)
    cb = np.bincount(b)
    h1, h2 = _entropy(ca, n), _entropy(cb, n)
    if h1 == 0 and h2 == 0:
        return 1.0
    mutual = h1 + h2 - _entropy(joint, n)
    mutual = max(mutual, 0.0)
    if normalization == "arithmetic":
        value = 2.0 * mutual / (h1 + h2)
    elif normalization == "max":
        value = mutual / max(h1, h2)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return min(max(value, 0.0), 1.0)


def clans_to_partition(t: PlayerTable, nodes: Iterable[int], clanless_policy: str = "singleton") -> Partition:
    """Clan membership of ``nodes`` (character ids) as a partition.

    Clanless characters become singleton blocks (``singleton``), share one
    block (``block``), or are left out (``drop``).
    """
    if clanless_policy not in ("singleton", "block", "drop"):
        raise ValueError(f"unknown clanless policy {clanless_policy!r}")
    ids, labels = [], []
    for c in nodes:
        c = int(c)
        clan = t.clan_of(c)
        if clan is None:
            if clanless_policy == "drop":
                continue
            label = ("none", c) if clanless_policy == "singleton" else ("none",)
        else:
            label = ("clan", clan)
        ids.append(c)
        labels.append(label)
    return Partition.from_labels(ids, labels)
