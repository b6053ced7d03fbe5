import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clanforge.centrality import ScoreVector, pagerank
from clanforge.cohorts import (CohortError, TraceStep, classify_by_score, classify_groups, correlate_cohort,
                               correlate_scores, pearson)
from clanforge.graph import build_graph
from clanforge.synth import generate_powerlaw

from conftest import make_table, star_graph
from oracles import pearson_bruteforce, random_edges

edge_lists = st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), max_size=60)


def test_star_hand_trace():
    a = classify_groups(star_graph(5))
    assert a.hardcore == {0}
    assert a.casual == set()
    assert a.peripheral == {1, 2, 3, 4, 5}
    assert a.removal_trace == (TraceStep(0, 6, 0),)
    assert (a.final_scc, a.final_diss) == (1, 5)


def test_two_edges_hand_trace():
    # SCC 2 >= DISS 0: drop id 1 (degree tie, smallest id)
    # SCC 2 (3-4) >= DISS 1 ({2}): drop id 3 (degree 1 beats 2's degree 0)
    # SCC 1 < DISS 2: stop
    a = classify_groups(build_graph([(1, 2), (3, 4)]))
    assert a.removal_trace == (TraceStep(1, 2, 0), TraceStep(3, 2, 1))
    assert a.hardcore == {1, 3} and a.peripheral == {2, 4} and a.casual == set()


def test_strict_variant_stops_earlier():
    g = build_graph([(1, 2), (3, 4)])
    a = classify_groups(g, strict=True)
    # SCC 2 > 0 removes 1; then SCC 2 > 1 removes 3; then 1 > 2 fails
    assert a.hardcore == {1, 3}
    tri = build_graph([(1, 2), (2, 3), (1, 3), (4, 5)])
    b = classify_groups(tri, strict=True)
    assert all(s.scc_size > s.diss_count for s in b.removal_trace)


def test_empty_graph():
    a = classify_groups(build_graph([]))
    assert a.hardcore == a.casual == a.peripheral == set()


def test_isolated_nodes_count_as_diss():
    g = build_graph([(1, 2)], nodes=[7, 8, 9])
    a = classify_groups(g)
    # SCC 2 < DISS 3 from the start: nothing removed
    assert a.removal_trace == () and a.peripheral == {7, 8, 9} and a.casual == {1, 2}


def test_casual_nonempty_on_bigger_graph():
    a = classify_groups(generate_powerlaw(500, 2.3, 2))
    assert a.casual and a.hardcore and a.peripheral


@given(edge_lists)
def test_classification_partitions_nodes(edges):
    g = build_graph(edges)
    a = classify_groups(g)
    everyone = set(g.ids.tolist())
    assert a.hardcore | a.casual | a.peripheral == everyone
    assert not (a.hardcore & a.casual or a.hardcore & a.peripheral or a.casual & a.peripheral)
    assert len(a.removal_trace) <= g.node_count
    sccs = [s.scc_size for s in a.removal_trace]
    assert sccs == sorted(sccs, reverse=True)
    assert all(s.scc_size >= s.diss_count for s in a.removal_trace)
    assert a.final_scc < a.final_diss or not a.casual | a.peripheral


def test_score_split_counts():
    sv = ScoreVector(np.arange(10), np.linspace(1, 0, 10), "test")
    a = classify_by_score(sv, 0.2, 0.3)
    assert a.sizes() == {"hardcore": 2, "casual": 5, "peripheral": 3}
    assert a.hardcore == {0, 1} and a.peripheral == {7, 8, 9}


def test_uniform_scores_tie_break_by_id():
    sv = ScoreVector(np.array([40, 10, 30, 20]), np.ones(4), "test")
    a = classify_by_score(sv, 0.25, 0.25)
    assert a.hardcore == {10} and a.peripheral == {40}


def test_default_fractions_sizes():
    sv = pagerank(generate_powerlaw(1000, 2.3, 1))
    a = classify_by_score(sv)
    assert a.sizes()["hardcore"] == 70 and a.sizes()["peripheral"] == 140


@pytest.mark.parametrize("h, p", [(0, 0.1), (0.5, 0.5), (1.2, 0.1), (0.1, -0.1)])
def test_bad_fractions(h, p):
    with pytest.raises(CohortError):
        classify_by_score(ScoreVector(np.arange(5), np.ones(5), "t"), h, p)


@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=40, unique=True))
def test_score_split_monotone_invariant(values):
    ids = np.arange(len(values))
    raw = ScoreVector(ids, np.array(values), "t")
    # both transforms are strictly increasing without float collisions
    scaled = ScoreVector(ids, np.array(values) * 4.0, "t")
    ranks = ScoreVector(ids, np.argsort(np.argsort(values)).astype(float), "t")
    base = classify_by_score(raw, 0.2, 0.3)
    assert base == classify_by_score(scaled, 0.2, 0.3) == classify_by_score(ranks, 0.2, 0.3)


def test_cohort_correlation_perfect():
    sv = ScoreVector(np.arange(6), np.array([5, 4, 3, 2, 1, 0.0]), "t")
    a = classify_by_score(sv, 0.34, 0.2)
    t = make_table({i: None for i in range(6)}, online={i: 1 if i in a.hardcore else 0 for i in range(6)})
    assert correlate_cohort(a, "hardcore", t, "online_time").r == pytest.approx(1.0)


def test_cohort_correlation_constant_metric():
    a = classify_groups(star_graph(4))
    t = make_table({i: None for i in range(5)}, kills={i: 3 for i in range(5)})
    with pytest.raises(CohortError, match="variance"):
        correlate_cohort(a, "hardcore", t, "kills")


def test_cohort_correlation_needs_metadata():
    a = classify_groups(star_graph(3))
    t = make_table({0: None, 1: None})
    with pytest.raises(KeyError):
        correlate_cohort(a, "hardcore", t, "kills")


@pytest.mark.parametrize("seed", range(5))
def test_planted_association(seed):
    g = generate_powerlaw(2000, 2.3, seed)
    a = classify_groups(g)
    rng = np.random.default_rng(seed)
    ids = g.ids.tolist()
    online = {c: rng.normal(1000, 100) + (800 if c in a.hardcore else 0) for c in ids}
    t = make_table({c: None for c in ids}, online={c: max(v, 0) for c, v in online.items()})
    assert correlate_cohort(a, "hardcore", t, "online_time").r > 0.5


def test_score_correlation_signs():
    ids = np.arange(5)
    t = make_table({i: None for i in range(5)}, kills={i: 2 * i for i in range(5)})
    assert correlate_scores(ScoreVector(ids, ids * 0.1, "t"), t, "kills").r == pytest.approx(1.0)
    assert correlate_scores(ScoreVector(ids, -ids * 0.1, "t"), t, "kills").r == pytest.approx(-1.0)


def test_pearson_matches_covariance_oracle():
    rng = random.Random(9)
    for _ in range(200):
        n = rng.randint(2, 100)
        x = [rng.uniform(-50, 50) for _ in range(n)]
        y = [rng.uniform(0, 10) if rng.random() < 0.5 else rng.randint(0, 1) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        assert abs(pearson(x, y) - pearson_bruteforce(x, y)) <= 1e-12


def test_point_biserial_matches_oracle():
    rng = random.Random(1)
    edges = random_edges(rng, 40, 0.1)
    g = build_graph(edges, nodes=range(40))
    a = classify_groups(g)
    kills = {i: rng.randint(0, 50) for i in range(40)}
    t = make_table({i: None for i in range(40)}, kills=kills)
    ind = [1.0 if i in a.hardcore else 0.0 for i in range(40)]
    expected = pearson_bruteforce(ind, [kills[i] for i in range(40)])
    assert abs(correlate_cohort(a, "hardcore", t, "kills").r - expected) <= 1e-12
