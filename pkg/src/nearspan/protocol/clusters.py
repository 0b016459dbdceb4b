"""Cluster collections: the per-phase partition state of the construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Cluster:
    center: int
    members: frozenset[int]

    def __post_init__(self):
        if self.center not in self.members:
            raise ValueError(f"cluster center {self.center} is not one of its members")


@dataclass(frozen=True)
class ClusterCollection:
    phase: int
    clusters: tuple[Cluster, ...]

    @classmethod
    def singletons(cls, n: int) -> "ClusterCollection":
        return cls(0, tuple(Cluster(v, frozenset((v,))) for v in range(n)))

    @classmethod
    def from_mapping(cls, phase: int, mapping: Mapping[int, Iterable[int]]) -> "ClusterCollection":
        return cls(phase, tuple(Cluster(c, frozenset(m)) for c, m in sorted(mapping.items())))

    def __post_init__(self):
        seen: set[int] = set()
        centers: set[int] = set()
        for cl in self.clusters:
            if cl.center in centers:
                raise ValueError(f"duplicate center {cl.center}")
            if seen & cl.members:
                raise ValueError(f"cluster {cl.center} overlaps an earlier cluster")
            centers.add(cl.center)
            seen |= cl.members

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def centers(self) -> frozenset[int]:
        return frozenset(cl.center for cl in self.clusters)

    def by_center(self) -> dict[int, Cluster]:
        return {cl.center: cl for cl in self.clusters}

    def vertices(self) -> frozenset[int]:
        out: set[int] = set()
        for cl in self.clusters:
            out |= cl.members
        return frozenset(out)

    def to_json(self) -> dict:
        return {str(cl.center): sorted(cl.members) for cl in self.clusters}
