from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class PartitionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of character ids to blocks ``0..block_count-1``.

    ``ids`` is sorted ascending and block ids are canonical: blocks are
    numbered in order of their first member, so two partitions describing the
    same grouping compare equal regardless of the labels they were built from.
    """

    ids: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.ids) != len(self.labels):
            raise PartitionError("ids and labels differ in length")
        self.ids.setflags(write=False)
        self.labels.setflags(write=False)

    @classmethod
    def from_labels(cls, ids: Sequence[int] | np.ndarray, labels: Sequence | np.ndarray) -> "Partition":
        ids = np.asarray(ids, dtype=np.int64)
        raw = list(labels)
        if len(raw) != len(ids):
            raise PartitionError("ids and labels differ in length")
        order = np.argsort(ids, kind="stable")
        ids = ids[order]
        if len(ids) > 1 and np.any(ids[1:] == ids[:-1]):
            raise PartitionError("duplicate id in partition")
        canon: dict = {}
        out = np.empty(len(ids), dtype=np.int64)
        for pos, i in enumerate(order):
            out[pos] = canon.setdefault(raw[i], len(canon))
        return cls(ids, out)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Partition":
        keys = list(mapping)
        return cls.from_labels(keys, [mapping[k] for k in keys])

    @property
    def block_count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.block_count)

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.labels, other.labels)

    __hash__ = None

    def block_of(self, char_id: int) -> int:
        pos = int(np.searchsorted(self.ids, char_id))
        if pos == len(self.ids) or self.ids[pos] != char_id:
            raise KeyError(f"character {char_id} is not covered by the partition")
        return int(self.labels[pos])

    def members(self, block: int) -> np.ndarray:
        return self.ids[self.labels == block]

    def blocks(self) -> list[np.ndarray]:
        return [self.members(b) for b in range(self.block_count)]

    def restrict(self, ids: Iterable[int]) -> "Partition":
        """Partition induced on a subset of the covered ids."""
        want = np.unique(np.fromiter((int(i) for i in ids), dtype=np.int64))
        pos = np.searchsorted(self.ids, want)
        if len(want) and (pos.max() >= len(self.ids) or np.any(self.ids[np.minimum(pos, len(self.ids) - 1)] != want)):
            raise PartitionError("restriction ids are not all covered by the partition")
        return Partition.from_labels(want, self.labels[pos])

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ids.tolist(), self.labels.tolist()))
