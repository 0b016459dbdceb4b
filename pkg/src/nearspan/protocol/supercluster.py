"""Growing superclusters around the ruling set.

A BFS forest is grown from the ruling-set vertices. A vertex joins the tree
whose token reaches it first, taking the smallest root id (then the smallest
sender id) on ties. Every cluster center the forest reaches is absorbed by
its root. Each absorbed center then sends an acknowledgement up its parent
chain, and the edges the acknowledgements cross become spanner edges. An
acknowledgement crosses each edge at most once, so one message per edge
suffices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .. import engine
from ..engine import Message, VertexProgram
from ..errors import ProtocolError
from ..graph import Graph, edge_key
from ..schedule import ceil_frac
from .clusters import Cluster, ClusterCollection

JOIN = 3
ACK = 4


class ForestProgram(VertexProgram):
    def __init__(self, is_root: bool):
        self.is_root = is_root

    def init(self, vid, neighbors, globals_):
        super().init(vid, neighbors, globals_)
        self.depth = globals_["depth"]
        self.root = vid if self.is_root else None
        self.parent = vid if self.is_root else None
        self.hop = 0 if self.is_root else None
        self.finished = False

    def step(self, rnd, inbox):
        out = None
        if inbox and self.root is None:
            root, sender = min((msg.payload[0], src) for src, msg in inbox)
            self.root, self.parent, self.hop = root, sender, rnd
            if rnd < self.depth:
                out = engine.broadcast(self.neighbors, Message(JOIN, (root,)), skip=sender)
        if rnd == 0 and self.is_root:
            out = engine.broadcast(self.neighbors, Message(JOIN, (self.vid,)))
        if rnd >= self.depth:
            self.finished = True
        return out

    def wake_round(self, rnd):
        if self.finished:
            return None
        if rnd == 0 and self.is_root:
            return 0
        return self.depth

    def snapshot(self):
        return (self.root, self.parent, self.hop)


class AckProgram(VertexProgram):
    def __init__(self, parent: int | None, is_root: bool, starts: bool):
        self.parent = parent
        self.is_root = is_root
        self.starts = starts

    def init(self, vid, neighbors, globals_):
        super().init(vid, neighbors, globals_)
        self.length = globals_["depth"]
        self.acked = False
        self.finished = False

    def _ack(self):
        if self.acked or self.is_root or self.parent is None:
            return None
        self.acked = True
        return {self.parent: Message(ACK)}

    def step(self, rnd, inbox):
        out = None
        if (rnd == 0 and self.starts) or inbox:
            out = self._ack()
        if rnd >= self.length:
            if out:
                raise ProtocolError(f"acknowledgement still climbing at vertex {self.vid} after {rnd} rounds")
            self.finished = True
        return out

    def wake_round(self, rnd):
        if self.finished:
            return None
        if rnd == 0 and self.starts:
            return 0
        return self.length

    def snapshot(self):
        return self.acked


@dataclass
class SuperclusterResult:
    collection: ClusterCollection
    U: tuple[Cluster, ...]
    forest: dict[int, tuple[int, int, int]]  # vertex -> (root, parent, hop)
    absorbed: dict[int, int]  # spanned center -> root
    edges_added: frozenset[tuple[int, int]]
    rounds: int
    traces: list[engine.EngineTrace] = field(repr=False, default_factory=list)


def forest_depth(delta, c: int) -> int:
    return c * ceil_frac(2 * Fraction(delta))


def supercluster(
    graph: Graph,
    collection: ClusterCollection,
    W,
    RS,
    delta,
    rho,
    **engine_opts,
) -> SuperclusterResult:
    """Absorb every center reached by the BFS forest grown from ``RS``.

    The forest depth is ``c * ceil(2 * delta)`` with ``c = 1/rho``, the
    domination radius of the ruling set, so every popular center is reached.
    The forest and the acknowledgement sweep take that many rounds each.
    """
    rho = Fraction(rho)
    if rho <= 0 or rho.numerator != 1:
        raise ValueError(f"rho must be the reciprocal of an integer, got {rho}")
    c = rho.denominator
    W, RS = frozenset(W), frozenset(RS)
    centers = collection.centers
    if not RS <= W <= centers:
        raise ProtocolError("superclustering needs RS <= W <= S_i")
    depth = forest_depth(delta, c)
    opts = {"depth": depth}

    bfs_run = engine.run(graph, lambda v: ForestProgram(v in RS), depth, opts, **engine_opts)
    engine.require_complete(bfs_run, "supercluster BFS")
    forest = {}
    for prog in bfs_run.programs:
        if prog.root is not None:
            forest[prog.vid] = (prog.root, prog.parent, prog.hop)

    spanned = {v for v in centers if v in forest}
    ack_run = engine.run(
        graph,
        lambda v: AckProgram(
            forest[v][1] if v in forest else None,
            v in RS,
            v in spanned and v not in RS,
        ),
        depth,
        opts,
        **engine_opts,
    )
    engine.require_complete(ack_run, "path marking")
    edges = frozenset(edge_key(p.vid, p.parent) for p in ack_run.programs if p.acked)

    absorbed = {v: forest[v][0] for v in sorted(spanned)}
    by_center = collection.by_center()
    members: dict[int, set[int]] = {r: set() for r in RS}
    for center, root in absorbed.items():
        members[root] |= by_center[center].members
    new = ClusterCollection.from_mapping(collection.phase + 1, members)
    U = tuple(cl for cl in collection.clusters if cl.center not in spanned)
    return SuperclusterResult(
        new,
        U,
        forest,
        absorbed,
        edges,
        bfs_run.rounds + ack_run.rounds,
        [bfs_run.trace, ack_run.trace],
    )
