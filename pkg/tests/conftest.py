from __future__ import annotations

import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from clanforge.graph import PlayerRecord, PlayerTable, build_graph  # noqa: E402
from clanforge.synth import generate_uniform  # noqa: E402


def clique_edges(nodes):
    return list(itertools.combinations(nodes, 2))


def cliques_graph(sizes, bridges=()):
    edges, start = [], 0
    for s in sizes:
        edges += clique_edges(range(start, start + s))
        start += s
    return build_graph(edges + list(bridges), nodes=range(start))


def star_graph(leaves, center=0):
    return build_graph([(center, center + i) for i in range(1, leaves + 1)])


def make_table(clans: dict, online=None, kills=None):
    """PlayerTable from {char_id: clan or None}."""
    recs = []
    for c, clan in clans.items():
        recs.append(PlayerRecord(c, clan, float(online[c]) if online else 0.0,
                                 int(kills[c]) if kills else 0, 1, "active"))
    return PlayerTable(recs)


def planted_clans(seed, clans=10, size=30, internal_degree=8.0, bridges=30, clanless_share=0.4):
    """Clan-planted friendship network.

    Each clan is a G(n, m) block; a few random inter-clan edges join the
    blocks. A seeded ``clanless_share`` of players then lose their label.
    Returns (graph, table with hidden labels, true clan per character).
    """
    rng = np.random.default_rng(seed)
    m_in = int(round(internal_degree * size / 2))
    edges = []
    truth = {}
    for k in range(clans):
        block = generate_uniform(size, m_in, seed * 1000 + k)
        base = k * size
        edges += [(base + u, base + v) for u, v in block.edge_array().tolist()]
        for i in range(size):
            truth[base + i] = str(k + 1)
    n = clans * size
    while bridges:
        u, v = rng.integers(n, size=2)
        if u // size != v // size:
            edges.append((int(u), int(v)))
            bridges -= 1
    g = build_graph(edges, nodes=range(n))
    hidden = set(rng.choice(n, size=int(round(clanless_share * n)), replace=False).tolist())
    table = make_table({c: (None if c in hidden else truth[c]) for c in range(n)})
    return g, table, truth, hidden


@pytest.fixture
def triangle():
    return build_graph([(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def path3():
    return build_graph([(1, 2), (2, 3)])
