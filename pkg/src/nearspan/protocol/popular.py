"""Detecting popular cluster centers with a degree-capped Bellman-Ford sweep.

Round 0: every center announces itself to its neighbours. Then come
``floor(delta)`` macro-phases of ``deg`` rounds each. In macro-phase ``j`` a
vertex re-broadcasts the centers it first learned at distance ``j``. The
distance a message stands for is implied by the round it travels in, so a
message carries only center ids, two per message.

A vertex remembers at most ``deg + 1`` centers (its own entry included),
keeping the smallest ids on ties. With that capacity a vertex that ends with
fewer than ``deg + 1`` entries has learned every center in its ball at the
exact distance, and a center is popular exactly when it learned ``deg`` other
centers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .. import engine
from ..engine import Message, VertexProgram
from ..graph import Graph, threshold
from .clusters import ClusterCollection

ANNOUNCE = 1


@dataclass(frozen=True)
class KnowledgeEntry:
    center: int
    distance: int
    predecessor: int


def popularity_rounds(deg: int, delta) -> int:
    return 1 + threshold(delta) * deg


class PopularityProgram(VertexProgram):
    def __init__(self, is_center: bool):
        self.is_center = is_center

    def init(self, vid, neighbors, globals_):
        super().init(vid, neighbors, globals_)
        self.deg = globals_["deg"]
        self.depth = globals_["depth"]
        self.length = 1 + self.depth * self.deg
        self.capacity = self.deg + 1
        self.known: dict[int, tuple[int, int]] = {}
        if self.is_center:
            self.known[vid] = (0, vid)
        self.pending: dict[int, list[int]] = {}
        self.finished = False

    def _macro_phase(self, rnd: int) -> tuple[int, int]:
        return (rnd - 1) // self.deg + 1, (rnd - 1) % self.deg

    def _hop_of_sender_round(self, sent: int) -> int:
        if sent == 0:
            return 1
        return self._macro_phase(sent)[0] + 1

    def step(self, rnd, inbox):
        if inbox:
            hop = self._hop_of_sender_round(rnd - 1)
            arrivals = sorted((c, src) for src, msg in inbox for c in msg.payload)
            for c, src in arrivals:
                if c in self.known or len(self.known) >= self.capacity:
                    continue
                self.known[c] = (hop, src)
                if hop < self.depth:
                    self.pending.setdefault(hop, []).append(c)
        if rnd >= self.length:
            self.finished = True
            return None
        if rnd == 0:
            if self.is_center and self.depth >= 1:
                return engine.broadcast(self.neighbors, Message(ANNOUNCE, (self.vid,)))
            return None
        j, slot = self._macro_phase(rnd)
        batch = self.pending.get(j)
        if not batch:
            return None
        batch.sort()
        chunk = batch[2 * slot : 2 * slot + 2]
        if not chunk:
            return None
        return engine.broadcast(self.neighbors, Message(ANNOUNCE, tuple(chunk)))

    def wake_round(self, rnd):
        if self.finished:
            return None
        if rnd == 0 and self.is_center:
            return 0
        for j in sorted(self.pending):
            first = (j - 1) * self.deg + 1
            last = first + (len(self.pending[j]) + 1) // 2 - 1
            if last >= rnd:
                return max(first, rnd)
        return self.length

    def entries(self) -> list[KnowledgeEntry]:
        rows = [KnowledgeEntry(c, d, p) for c, (d, p) in self.known.items()]
        rows.sort(key=lambda e: (e.distance, e.center))
        return rows

    def others(self) -> int:
        return len(self.known) - (1 if self.is_center else 0)

    def snapshot(self):
        return tuple(sorted(self.known.items()))


@dataclass
class PopularResult:
    W: frozenset[int]
    knowledge: list[list[KnowledgeEntry]]
    rounds: int
    trace: engine.EngineTrace = field(repr=False)


def detect_popular(
    graph: Graph,
    collection: ClusterCollection,
    deg: int,
    delta,
    **engine_opts,
) -> PopularResult:
    """Mark every center with at least ``deg`` other centers within ``delta``.

    Runs exactly ``1 + floor(delta) * deg`` rounds. Every vertex keeps the
    list of centers it heard about, each with its distance and the neighbour
    it heard it from; interconnection later walks those pointers back.
    """
    if deg < 1:
        raise ValueError(f"deg must be at least 1, got {deg}")
    depth = threshold(Fraction(delta))
    centers = collection.centers
    length = 1 + depth * deg
    result = engine.run(
        graph,
        lambda v: PopularityProgram(v in centers),
        length,
        {"deg": deg, "depth": depth},
        **engine_opts,
    )
    engine.require_complete(result, "popularity detection")
    progs: list[PopularityProgram] = result.programs  # type: ignore[assignment]
    W = frozenset(c for c in centers if progs[c].others() >= deg)
    knowledge = [p.entries() for p in progs]
    return PopularResult(W, knowledge, result.rounds, result.trace)
