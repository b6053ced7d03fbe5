"""Brute-force reference computations, independent of the library code paths."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def adjacency_sets(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def all_pairs_distances(n, edges):
    """Floyd-Warshall hop distances (inf when unreachable)."""
    d = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
    for u, v in edges:
        d[u][v] = d[v][u] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def shortest_paths(adj, dist, s, t):
    """Every shortest path s -> t, enumerated by depth-first extension."""
    out = []

    def walk(path):
        u = path[-1]
        if u == t:
            out.append(tuple(path))
            return
        for w in adj[u]:
            if dist[s][w] == len(path) and dist[w][t] == dist[s][t] - len(path):
                walk(path + [w])

    walk([s])
    return out


def betweenness_bruteforce(n, edges):
    """Exact rational betweenness by enumerating all shortest paths of each pair."""
    adj = adjacency_sets(n, edges)
    dist = all_pairs_distances(n, edges)
    cb = [Fraction(0)] * n
    for s, t in itertools.combinations(range(n), 2):
        if math.isinf(dist[s][t]):
            continue
        paths = shortest_paths(adj, dist, s, t)
        for path in paths:
            for v in path[1:-1]:
                cb[v] += Fraction(1, len(paths))
    return cb


def tree_betweenness(n, edges):
    """For a tree: pairs separated by removing v = sum over branch sizes."""
    adj = adjacency_sets(n, edges)
    out = []
    for v in range(n):
        seen = {v}
        branches = []
        for w in adj[v]:
            stack, size = [w], 0
            seen.add(w)
            while stack:
                x = stack.pop()
                size += 1
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            branches.append(size)
        total = sum(branches)
        out.append((total * total - sum(b * b for b in branches)) // 2)
    return out


def pagerank_linear(n, edges, damping):
    """Solve the stationary equations of the teleporting walk directly."""
    adj = adjacency_sets(n, edges)
    m = np.zeros((n, n))
    for u in range(n):
        if adj[u]:
            for v in adj[u]:
                m[v, u] = 1.0 / len(adj[u])
        else:
            m[:, u] = 1.0 / n
    g = damping * m + (1 - damping) / n
    a = np.eye(n) - g
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


def local_clustering_bruteforce(n, edges):
    adj = adjacency_sets(n, edges)
    out = []
    for v in range(n):
        nb = sorted(adj[v])
        k = len(nb)
        if k < 2:
            out.append(0.0)
            continue
        links = sum(1 for a, b in itertools.combinations(nb, 2) if b in adj[a])
        out.append(links / (k * (k - 1) / 2))
    return out


def pearson_bruteforce(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def nmi_bruteforce(a, b):
    """Arithmetic-mean NMI from explicit joint probabilities."""
    n = len(a)
    pa = {x: a.count(x) / n for x in set(a)}
    pb = {x: b.count(x) / n for x in set(b)}
    joint = {}
    for x, y in zip(a, b):
        joint[(x, y)] = joint.get((x, y), 0) + 1 / n
    mi = sum(p * math.log(p / (pa[x] * pb[y])) for (x, y), p in joint.items())
    ha = -sum(p * math.log(p) for p in pa.values())
    hb = -sum(p * math.log(p) for p in pb.values())
    if ha + hb == 0:
        return 1.0
    return 2 * mi / (ha + hb)


def random_edges(rng, n, p):
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
