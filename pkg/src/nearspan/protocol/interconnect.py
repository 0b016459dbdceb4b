"""Interconnection: tracing back the paths learned during popularity detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .. import engine
from ..engine import Message, VertexProgram
from ..errors import ProtocolError
from ..graph import Graph, edge_key, threshold
from .clusters import Cluster, ClusterCollection
from .popular import KnowledgeEntry

TRACE = 5


def interconnect_rounds(deg: int, delta) -> int:
    return deg * (threshold(delta) + 1)


class TraceProgram(VertexProgram):
    """Forwards each trace token toward its target along recorded predecessors.

    A vertex handles each target at most once; per outgoing edge it sends
    the smallest pending target id first.
    """

    def __init__(self, knowledge: dict[int, tuple[int, int]], initiator: bool):
        self.knowledge = knowledge
        self.initiator = initiator

    def init(self, vid, neighbors, globals_):
        super().init(vid, neighbors, globals_)
        self.length = globals_["length"]
        self.handled: set[int] = set()
        self.queues: dict[int, list[int]] = {}
        self.marked: set[tuple[int, int]] = set()
        self.finished = False

    def _take(self, target: int) -> None:
        if target == self.vid or target in self.handled:
            return
        if target not in self.knowledge:
            raise ProtocolError(f"vertex {self.vid} was asked to trace {target} but never learned it")
        self.handled.add(target)
        pred = self.knowledge[target][1]
        self.queues.setdefault(pred, []).append(target)
        self.marked.add(edge_key(self.vid, pred))

    def step(self, rnd, inbox):
        if rnd == 0 and self.initiator:
            for target in sorted(self.knowledge):
                self._take(target)
        for _, msg in inbox:
            self._take(msg.payload[0])
        if rnd >= self.length:
            if any(self.queues.values()):
                raise ProtocolError(f"trace-back at vertex {self.vid} exceeded {self.length} rounds")
            self.finished = True
            return None
        out = {}
        for pred, queue in self.queues.items():
            if queue:
                queue.sort()
                out[pred] = Message(TRACE, (queue.pop(0),))
        return out

    def wake_round(self, rnd):
        if self.finished:
            return None
        if rnd == 0 and self.initiator:
            return 0
        if any(self.queues.values()):
            return rnd
        return self.length

    def snapshot(self):
        return tuple(sorted(self.marked))


@dataclass
class InterconnectResult:
    edges_added: frozenset[tuple[int, int]]
    rounds: int
    trace: engine.EngineTrace = field(repr=False)


def interconnect(
    graph: Graph,
    collection: ClusterCollection,
    U,
    knowledge: list[list[KnowledgeEntry]],
    delta,
    deg: int,
    **engine_opts,
) -> InterconnectResult:
    """Add one shortest path from each center of ``U`` to every center it knows.

    ``knowledge`` must come from popularity detection on the same collection.
    The sweep has a fixed length of ``deg * (floor(delta) + 1)`` rounds.
    """
    centers = collection.centers
    initiators = frozenset(cl.center if isinstance(cl, Cluster) else cl for cl in U)
    if not initiators <= centers:
        raise ProtocolError("interconnection initiators must be centers of the collection")
    tables = [
        {e.center: (e.distance, e.predecessor) for e in rows if e.center in centers}
        for rows in knowledge
    ]
    length = interconnect_rounds(deg, Fraction(delta))
    result = engine.run(
        graph,
        lambda v: TraceProgram(tables[v], v in initiators),
        length,
        {"length": length},
        **engine_opts,
    )
    engine.require_complete(result, "interconnection")
    edges = frozenset().union(*(p.marked for p in result.programs)) if graph.n else frozenset()
    return InterconnectResult(edges, result.rounds, result.trace)
