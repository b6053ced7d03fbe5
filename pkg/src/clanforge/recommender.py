"""Community-based clan recommendation for clanless players."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .community import detect_communities
from .graph import Graph, PlayerTable, clan_sort_key, induced_subgraph
from .partition import Partition

RECOMMENDED = "recommended"
ALREADY_IN_CLAN = "already-in-clan"
NO_RECOMMENDATION = "no-recommendation"


@dataclass(frozen=True)
class RecommendConfig:
    max_clan_size: int
    points_balance: float | None = None
    max_rounds: int = 100
    seed: int = 0
    teleport: float = 0.15
    # False: restrict the original partition to the residual graph instead of re-detecting
    redetect: bool = True

    def __post_init__(self):
        if self.max_clan_size < 1:
            raise ValueError("max_clan_size must be >= 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass(frozen=True)
class Recommendation:
    player: int
    outcome: str
    clan_id: str | None = None
    rounds_used: int = 0
    reason: str | None = None
    rejected: tuple[str, ...] = ()

    @property
    def label(self) -> str:
        return f"{self.outcome}:{self.reason}" if self.reason else self.outcome


def _rejects(clan: str, clan_sizes: Mapping[str, int], clan_points: Mapping[str, float] | None,
             cfg: RecommendConfig) -> bool:
    if clan_sizes.get(clan, 0) >= cfg.max_clan_size:
        return True
    if cfg.points_balance is not None and clan_points is not None:
        return clan_points.get(clan, 0.0) > cfg.points_balance
    return False


class _CommunityCache:
    """Communities of residual graphs, keyed by the set of removed clans."""

    def __init__(self, g: Graph, t: PlayerTable, communities: Partition, cfg: RecommendConfig):
        self.g = g
        self.cfg = cfg
        self.base = communities
        self.clan_of_node = [t.clan_of(c) for c in g.ids.tolist()]
        self._cache: dict[frozenset, tuple[Graph, Partition]] = {frozenset(): (g, communities)}

    def get(self, removed: frozenset) -> tuple[Graph, Partition]:
        if removed not in self._cache:
            keep = np.array([c not in removed for c in self.clan_of_node], dtype=bool)
            residual = induced_subgraph(self.g, keep)
            if self.cfg.redetect:
                part = detect_communities(residual, self.cfg.seed, self.cfg.teleport)
            else:
                part = self.base.restrict(residual.ids)
            self._cache[removed] = (residual, part)
        return self._cache[removed]


def _recommend(cache: _CommunityCache, t: PlayerTable, clan_sizes: Mapping[str, int],
               clan_points: Mapping[str, float] | None, player: int, cfg: RecommendConfig) -> Recommendation:
    if t.clan_of(player) is not None:
        return Recommendation(player, ALREADY_IN_CLAN, t.clan_of(player), 0)

    removed: frozenset = frozenset()
    rejected: list[str] = []
    for rounds in range(1, cfg.max_rounds + 1):
        residual, part = cache.get(removed)
        if residual.degrees[residual.index_of(player)] == 0:
            return Recommendation(player, NO_RECOMMENDATION, None, rounds, "no-community-signal", tuple(rejected))
        block = part.block_of(player)
        votes = Counter(c for c in (t.clan_of(m) for m in part.members(block).tolist()) if c is not None)
        if not votes:
            return Recommendation(player, NO_RECOMMENDATION, None, rounds, "no-clan-in-community", tuple(rejected))
        clan = min(votes, key=lambda c: (-votes[c], clan_sort_key(c)))
        if not _rejects(clan, clan_sizes, clan_points, cfg):
            return Recommendation(player, RECOMMENDED, clan, rounds, None, tuple(rejected))
        rejected.append(clan)
        removed = removed | {clan}
    return Recommendation(player, NO_RECOMMENDATION, None, cfg.max_rounds, "max-rounds-exhausted", tuple(rejected))


def recommend_clan(g: Graph, t: PlayerTable, communities: Partition, clan_sizes: Mapping[str, int] | None,
                   clan_points: Mapping[str, float] | None, player: int, cfg: RecommendConfig) -> Recommendation:
    """Recommend the clan holding most members of the player's community.

    A clan that is full (size >= ``max_clan_size``) or, when a points cap is
    set, too strong is skipped: its members are taken out of a private copy
    of the network, the player's community is recomputed and the vote
    repeats. Clanless community members do not vote; equal votes go to the
    smaller clan id.
    """
    if not g.has_id(player):
        raise KeyError(f"player {player} is not in the friendship network")
    clan_sizes = t.clan_sizes() if clan_sizes is None else clan_sizes
    cache = _CommunityCache(g, t, communities, cfg)
    return _recommend(cache, t, clan_sizes, clan_points, player, cfg)


def batch_recommend(g: Graph, t: PlayerTable, cfg: RecommendConfig, communities: Partition | None = None,
                    clan_sizes: Mapping[str, int] | None = None,
                    clan_points: Mapping[str, float] | None = None) -> list[Recommendation]:
    """Recommendations for every clanless character in the network, in id order.

    Queries are independent: each starts from the full network, so the order
    of players never changes an outcome.
    """
    if communities is None:
        communities = detect_communities(g, cfg.seed, cfg.teleport)
    clan_sizes = t.clan_sizes() if clan_sizes is None else clan_sizes
    cache = _CommunityCache(g, t, communities, cfg)
    return [_recommend(cache, t, clan_sizes, clan_points, int(c), cfg)
            for c in g.ids.tolist() if t.clan_of(c) is None]
