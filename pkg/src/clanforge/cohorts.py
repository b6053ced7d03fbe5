"""Hardcore / Casual / Peripheral player cohorts and their activity correlations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .centrality import ScoreVector
from .graph import Graph, PlayerTable

COHORTS = ("hardcore", "casual", "peripheral")


class CohortError(ValueError):
    pass


@dataclass(frozen=True)
class TraceStep:
    removed: int     # character id
    scc_size: int
    diss_count: int


@dataclass(frozen=True)
class CohortAssignment:
    """Cohort membership as sets of character ids."""

    hardcore: frozenset[int]
    casual: frozenset[int]
    peripheral: frozenset[int]
    removal_trace: tuple[TraceStep, ...] = ()
    # SCC / DISS sizes on the residual graph when the loop stopped
    final_scc: int = 0
    final_diss: int = 0

    def cohort_of(self, char_id: int) -> str:
        for name in COHORTS:
            if char_id in getattr(self, name):
                return name
        raise KeyError(char_id)

    def sizes(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in COHORTS}


def _residual_state(adj: sparse.csr_matrix, alive: np.ndarray, degree: np.ndarray) -> tuple[int, int]:
    if not alive.any():
        return 0, 0
    mask = sparse.diags(alive.astype(np.float64))
    _, labels = csgraph.connected_components(mask @ adj @ mask, directed=False)
    scc = int(np.bincount(labels[alive]).max())
    diss = int(np.count_nonzero(alive & (degree == 0)))
    return scc, diss


def classify_groups(g: Graph, strict: bool = False) -> CohortAssignment:
    """Strip the highest-degree node while the largest component is at least
    as large as the set of disconnected nodes.

    Degrees are recomputed on the residual graph after every removal; ties go
    to the smallest character id. Removed nodes are Hardcore, nodes left with
    degree 0 are Peripheral, the rest Casual. ``strict`` switches the loop
    test from ``>=`` to ``>``.
    """
    n = g.node_count
    adj = g.to_csr()
    alive = np.ones(n, dtype=bool)
    degree = g.degrees.astype(np.int64).copy()
    trace: list[TraceStep] = []
    hardcore: list[int] = []

    scc, diss = _residual_state(adj, alive, degree)
    while alive.any() and (scc > diss if strict else scc >= diss):
        cand = np.where(alive, degree, -1)
        u = int(np.argmax(cand))  # first maximum = smallest id
        trace.append(TraceStep(int(g.ids[u]), scc, diss))
        hardcore.append(int(g.ids[u]))
        alive[u] = False
        nb = g.neighbors(u)
        degree[nb[alive[nb]]] -= 1
        degree[u] = 0
        scc, diss = _residual_state(adj, alive, degree)

    peripheral = alive & (degree == 0)
    casual = alive & ~peripheral
    return CohortAssignment(frozenset(hardcore), frozenset(g.ids[casual].tolist()),
                            frozenset(g.ids[peripheral].tolist()), tuple(trace), scc, diss)


def _share(fraction: float, n: int) -> int:
    # rounding first keeps e.g. 0.3 * 10 from ceiling to 4
    return math.ceil(round(fraction * n, 9))


def classify_by_score(scores: ScoreVector, hardcore_fraction: float = 0.07,
                      peripheral_fraction: float = 0.14) -> CohortAssignment:
    """Top-scoring share is Hardcore, bottom share Peripheral, the rest Casual."""
    for name, f in (("hardcore", hardcore_fraction), ("peripheral", peripheral_fraction)):
        if not 0 < f < 1:
            raise CohortError(f"{name} fraction must lie in (0, 1), got {f}")
    if hardcore_fraction + peripheral_fraction >= 1:
        raise CohortError("hardcore and peripheral fractions must sum to less than 1")
    n = len(scores.ids)
    order = scores.ids[scores.ranking()]
    top = _share(hardcore_fraction, n)
    bottom = min(_share(peripheral_fraction, n), n - top)
    return CohortAssignment(frozenset(order[:top].tolist()),
                            frozenset(order[top:n - bottom].tolist()),
                            frozenset(order[n - bottom:].tolist()))


@dataclass(frozen=True)
class CorrelationReport:
    r: float
    metric_name: str
    method: str
    n: int = 0
    extra: dict = field(default_factory=dict)


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) < 2:
        raise CohortError("correlation needs two equally long vectors of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise CohortError("zero variance: correlation is undefined")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlate_cohort(assignment: CohortAssignment, cohort: str, t: PlayerTable, metric: str,
                     nodes: np.ndarray | None = None) -> CorrelationReport:
    """Point-biserial correlation of cohort membership with a player metric."""
    if cohort not in COHORTS:
        raise CohortError(f"unknown cohort {cohort!r}")
    members = getattr(assignment, cohort)
    if nodes is None:
        nodes = sorted(assignment.hardcore | assignment.casual | assignment.peripheral)
    indicator = np.array([1.0 if int(c) in members else 0.0 for c in nodes])
    values = t.metric(nodes, metric)
    return CorrelationReport(pearson(indicator, values), metric, f"point-biserial:{cohort}", len(nodes))


def correlate_scores(scores: ScoreVector, t: PlayerTable, metric: str) -> CorrelationReport:
    values = t.metric(scores.ids, metric)
    return CorrelationReport(pearson(scores.scores, values), metric, f"pearson:{scores.algorithm}",
                             len(scores.ids))
