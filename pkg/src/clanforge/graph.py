"""Undirected simple graphs, edge-list ingestion and player metadata."""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np
from scipy import sparse


class IngestionError(ValueError):
    """Raised for malformed edge-list or metadata input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    Node ``i`` carries the external character id ``ids[i]``; ids are sorted
    ascending, so the internal index order is the external id order.
    """

    ids: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.ids, self.indptr, self.indices):
            arr.setflags(write=False)
        object.__setattr__(self, "_index", {int(c): i for i, c in enumerate(self.ids)})

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists (fast for BFS-style loops)."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[u]:ptr[u + 1]] for u in range(self.node_count)]

    def index_of(self, char_id: int) -> int:
        try:
            return self._index[int(char_id)]
        except KeyError:
            raise KeyError(f"character {char_id} is not a node of the graph") from None

    def has_id(self, char_id: int) -> bool:
        return int(char_id) in self._index

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each undirected edge once as ``(u, v)`` with ``u < v``."""
        for u in range(self.node_count):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def edge_array(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def to_csr(self) -> sparse.csr_matrix:
        n = self.node_count
        data = np.ones(len(self.indices), dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.ids, other.ids)
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.node_count}, m={self.edge_count})"


@dataclass
class IngestSummary:
    pairs_read: int = 0
    self_loops: int = 0
    duplicates: int = 0


def _from_index_pairs(ids: np.ndarray, u: np.ndarray, v: np.ndarray) -> Graph:
    n = len(ids)
    if len(u) == 0:
        return Graph(ids, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return Graph(ids, indptr, cols.astype(np.int64))


def build_graph(edges: Iterable[tuple[int, int]], nodes: Iterable[int] | None = None,
                summary: IngestSummary | None = None) -> Graph:
    """Build an undirected simple graph from character-id pairs.

    Self-loops are dropped and repeated pairs (in either orientation) collapse
    to one edge. ``nodes`` adds ids that may have no edges at all.
    """
    summary = summary if summary is not None else IngestSummary()
    pairs = []
    for lineno, pair in enumerate(edges, start=1):
        pair = tuple(pair)
        if len(pair) != 2:
            raise IngestionError(f"expected 2 ids, got {len(pair)}: {pair!r}", lineno)
        pairs.append((int(pair[0]), int(pair[1])))
    summary.pairs_read += len(pairs)

    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    extra = np.fromiter((int(x) for x in nodes), dtype=np.int64) if nodes is not None else np.zeros(0, np.int64)
    ids = np.unique(np.concatenate([arr.ravel(), extra]))

    loops = arr[:, 0] == arr[:, 1]
    summary.self_loops += int(loops.sum())
    arr = arr[~loops]
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    uniq = np.unique(np.column_stack([lo, hi]), axis=0) if len(arr) else arr
    summary.duplicates += len(arr) - len(uniq)

    u = np.searchsorted(ids, uniq[:, 0])
    v = np.searchsorted(ids, uniq[:, 1])
    return _from_index_pairs(ids, u, v)


_SPLIT = re.compile(r"[,\s]+")


def load_edge_list(source: TextIO | str) -> list[tuple[int, int]]:
    """Parse a two-column edge list (whitespace or comma separated).

    Blank lines and lines starting with ``#`` are skipped.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    pairs = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        if len(tokens) != 2:
            raise IngestionError(f"expected 2 columns, got {len(tokens)}", lineno)
        try:
            pairs.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise IngestionError(f"non-integer id in {line!r}", lineno) from None
    return pairs


def write_edge_list(g: Graph, out: TextIO) -> None:
    ids = g.ids
    for u, v in g.edge_array():
        out.write(f"{ids[u]} {ids[v]}\n")


def remove_nodes(g: Graph, s: Iterable[int]) -> Graph:
    """Return the subgraph of ``g`` without the internal node indices ``s``.

    The result is re-indexed contiguously; external ids are kept, so a node's
    identity survives through ``ids``.
    """
    drop = np.fromiter((int(x) for x in s), dtype=np.int64)
    n = g.node_count
    if len(drop) and (drop.min() < 0 or drop.max() >= n):
        bad = drop[(drop < 0) | (drop >= n)][0]
        raise IndexError(f"node index {bad} out of range for graph with {n} nodes")
    keep = np.ones(n, dtype=bool)
    keep[drop] = False
    return induced_subgraph(g, keep)


def induced_subgraph(g: Graph, keep: np.ndarray) -> Graph:
    """Subgraph on the nodes where the boolean mask ``keep`` is true."""
    new_index = np.full(g.node_count, -1, dtype=np.int64)
    new_index[keep] = np.arange(int(keep.sum()))
    e = g.edge_array()
    e = e[keep[e[:, 0]] & keep[e[:, 1]]]
    return _from_index_pairs(g.ids[keep].copy(), new_index[e[:, 0]], new_index[e[:, 1]])


@dataclass(frozen=True)
class PlayerRecord:
    char_id: int
    clan_id: str | None
    online_time: float
    kills: int
    level: int
    status: str


def clan_sort_key(clan: str):
    """Numeric ids order numerically, anything else lexically after them."""
    return (0, int(clan), "") if clan.isdigit() else (1, 0, clan)


class PlayerTable(Mapping[int, PlayerRecord]):
    """Per-character metadata keyed by character id."""

    COLUMNS = ("char_id", "clan_id", "online_time", "kills", "level", "status")

    def __init__(self, records: Iterable[PlayerRecord]):
        self._records: dict[int, PlayerRecord] = {}
        for rec in records:
            if rec.char_id in self._records:
                raise IngestionError(f"duplicate char_id {rec.char_id}")
            self._records[rec.char_id] = rec

    def __getitem__(self, char_id):
        return self._records[int(char_id)]

    def __iter__(self):
        return iter(self._records)

    def __len__(self):
        return len(self._records)

    def clan_of(self, char_id: int) -> str | None:
        rec = self._records.get(int(char_id))
        return rec.clan_id if rec is not None else None

    def clan_sizes(self) -> dict[str, int]:
        sizes: dict[str, int] = {}
        for rec in self._records.values():
            if rec.clan_id is not None:
                sizes[rec.clan_id] = sizes.get(rec.clan_id, 0) + 1
        return sizes

    def metric(self, char_ids: Iterable[int], name: str) -> np.ndarray:
        if name not in ("online_time", "kills", "level"):
            raise ValueError(f"unknown metric {name!r}")
        out = []
        for c in char_ids:
            rec = self._records.get(int(c))
            if rec is None:
                raise KeyError(f"character {c} has no metadata record")
            out.append(getattr(rec, name))
        return np.asarray(out, dtype=np.float64)


def load_metadata(source: TextIO | str) -> PlayerTable:
    """Read the player metadata CSV (header row required)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    missing = [c for c in PlayerTable.COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise IngestionError(f"metadata header is missing columns: {', '.join(missing)}", 1)

    records: list[PlayerRecord] = []
    seen: set[int] = set()
    for row in reader:
        lineno = reader.line_num
        try:
            char_id = int(row["char_id"])
            online_time = float(row["online_time"])
            kills = int(row["kills"])
            level = int(row["level"])
        except (TypeError, ValueError):
            raise IngestionError(f"bad numeric field in {row!r}", lineno) from None
        if char_id in seen:
            raise IngestionError(f"duplicate char_id {char_id}", lineno)
        if online_time < 0 or kills < 0 or level < 0:
            raise IngestionError(f"negative online_time/kills/level for char_id {char_id}", lineno)
        seen.add(char_id)
        clan = (row["clan_id"] or "").strip() or None
        records.append(PlayerRecord(char_id, clan, online_time, kills, level, (row["status"] or "").strip()))
    return PlayerTable(records)
