"""Phase-by-phase driver of the distributed spanner construction."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ProtocolError
from ..graph import Graph, edge_key
from ..schedule import PhaseSchedule, ceil_frac
from .clusters import Cluster, ClusterCollection
from .interconnect import interconnect
from .popular import KnowledgeEntry, detect_popular
from .ruling import ruling_set
from .supercluster import supercluster


@dataclass
class PhaseArtifacts:
    phase: int
    collection: ClusterCollection
    deg: int
    delta: Fraction
    W: frozenset[int] = frozenset()
    knowledge: list[list[KnowledgeEntry]] = field(default_factory=list, repr=False)
    q: int | None = None
    RS: frozenset[int] = frozenset()
    dominators: dict[int, int] = field(default_factory=dict)
    forest: dict[int, tuple[int, int, int]] = field(default_factory=dict, repr=False)
    absorbed: dict[int, int] = field(default_factory=dict)
    U: tuple[Cluster, ...] = ()
    forest_edges: frozenset[tuple[int, int]] = frozenset()
    interconnect_edges: frozenset[tuple[int, int]] = frozenset()
    rounds: dict[str, int] = field(default_factory=dict)

    @property
    def edges_added(self) -> frozenset[tuple[int, int]]:
        return self.forest_edges | self.interconnect_edges

    @property
    def rounds_used(self) -> int:
        return sum(self.rounds.values())

    @property
    def S(self) -> frozenset[int]:
        return self.collection.centers

    def summary(self) -> dict:
        return {
            "phase": self.phase,
            "clusters": len(self.collection),
            "deg": self.deg,
            "delta": str(self.delta),
            "popular": len(self.W),
            "ruling_set": len(self.RS),
            "q": self.q,
            "unclustered": len(self.U),
            "forest_edges": len(self.forest_edges),
            "interconnect_edges": len(self.interconnect_edges),
            "rounds": dict(self.rounds),
            "rounds_used": self.rounds_used,
        }

    def to_json(self) -> dict:
        data = self.summary()
        data.update(
            {
                "collection": self.collection.to_json(),
                "W": sorted(self.W),
                "RS": sorted(self.RS),
                "dominators": {str(k): v for k, v in sorted(self.dominators.items())},
                "forest": {str(v): list(t) for v, t in sorted(self.forest.items())},
                "absorbed": {str(k): v for k, v in sorted(self.absorbed.items())},
                "U": sorted(cl.center for cl in self.U),
                "forest_edge_list": sorted(self.forest_edges),
                "interconnect_edge_list": sorted(self.interconnect_edges),
                "knowledge": [[[e.center, e.distance, e.predecessor] for e in row] for row in self.knowledge],
            }
        )
        return data

    @classmethod
    def from_json(cls, data: dict) -> "PhaseArtifacts":
        collection = ClusterCollection.from_mapping(
            data["phase"], {int(k): v for k, v in data["collection"].items()}
        )
        by_center = collection.by_center()
        return cls(
            phase=data["phase"],
            collection=collection,
            deg=data["deg"],
            delta=Fraction(data["delta"]),
            W=frozenset(data["W"]),
            knowledge=[[KnowledgeEntry(*e) for e in row] for row in data["knowledge"]],
            q=data["q"],
            RS=frozenset(data["RS"]),
            dominators={int(k): v for k, v in data["dominators"].items()},
            forest={int(k): tuple(v) for k, v in data["forest"].items()},
            absorbed={int(k): v for k, v in data["absorbed"].items()},
            U=tuple(by_center[c] for c in data["U"]),
            forest_edges=frozenset(tuple(e) for e in data["forest_edge_list"]),
            interconnect_edges=frozenset(tuple(e) for e in data["interconnect_edge_list"]),
            rounds=dict(data["rounds"]),
        )


@dataclass
class ExecutionTrace:
    schedule: PhaseSchedule
    phases: list[PhaseArtifacts] = field(default_factory=list)
    spanner: frozenset[tuple[int, int]] = frozenset()
    total_messages: int = 0
    max_words: int = 0
    max_per_edge_round: int = 0
    bandwidth_violations: list[str] = field(default_factory=list)
    engine_digests: list[str] = field(default_factory=list, repr=False)
    status: str = "complete"

    @property
    def rounds_total(self) -> int:
        return sum(p.rounds_used for p in self.phases)

    def digest(self) -> str:
        h = hashlib.sha256()
        for d in self.engine_digests:
            h.update(d.encode())
        h.update(repr(sorted(self.spanner)).encode())
        return h.hexdigest()

    def to_json(self, verbose: bool = False) -> dict:
        return {
            "status": self.status,
            "full": verbose,
            "schedule": self.schedule.to_json(),
            "spanner_edges": len(self.spanner),
            "rounds_total": self.rounds_total,
            "total_messages": self.total_messages,
            "max_words": self.max_words,
            "max_messages_per_edge_round": self.max_per_edge_round,
            "bandwidth_violations": list(self.bandwidth_violations),
            "digest": self.digest(),
            "phases": [p.to_json() if verbose else p.summary() for p in self.phases],
            "spanner": sorted(self.spanner) if verbose else None,
            "engine_digests": list(self.engine_digests) if verbose else None,
        }

    def dumps(self, verbose: bool = False) -> str:
        return json.dumps(self.to_json(verbose), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "ExecutionTrace":
        if not data.get("full"):
            raise ValueError("trace was written without --full-trace; it cannot be re-verified")
        return cls(
            schedule=PhaseSchedule.from_json(data["schedule"]),
            phases=[PhaseArtifacts.from_json(p) for p in data["phases"]],
            spanner=frozenset(tuple(e) for e in data["spanner"]),
            total_messages=data["total_messages"],
            max_words=data["max_words"],
            max_per_edge_round=data["max_messages_per_edge_round"],
            bandwidth_violations=list(data["bandwidth_violations"]),
            engine_digests=list(data["engine_digests"]),
            status=data.get("status", "complete"),
        )


def _absorb(trace: ExecutionTrace, engine_trace) -> None:
    trace.total_messages += engine_trace.total_messages
    trace.max_words = max(trace.max_words, engine_trace.max_words)
    trace.max_per_edge_round = max(trace.max_per_edge_round, engine_trace.max_per_edge_round)
    trace.bandwidth_violations.extend(engine_trace.bandwidth_violations)
    trace.engine_digests.append(engine_trace.digest)


def build_spanner(graph: Graph, schedule: PhaseSchedule, **engine_opts) -> tuple[frozenset, ExecutionTrace]:
    """Run phases ``0..ell`` and return the spanner edge set with the full trace.

    Phases below ``ell`` detect popular centers, pick a ruling set among
    them, grow superclusters and interconnect the rest; phase ``ell`` skips
    straight to interconnection with every remaining cluster.
    """
    if schedule.n != graph.n:
        raise ValueError(f"schedule was built for n={schedule.n}, graph has n={graph.n}")
    trace = ExecutionTrace(schedule)
    H: set[tuple[int, int]] = set()
    collection = ClusterCollection.singletons(graph.n)
    rho = schedule.rho
    for i in range(schedule.ell + 1):
        art = PhaseArtifacts(i, collection, schedule.deg[i], schedule.delta[i])
        try:
            pop = detect_popular(graph, collection, art.deg, art.delta, **engine_opts)
            _absorb(trace, pop.trace)
            art.W, art.knowledge = pop.W, pop.knowledge
            art.rounds["popular"] = pop.rounds
            if i < schedule.ell:
                art.q = ceil_frac(2 * art.delta)
                rs = ruling_set(graph, art.W, art.q, schedule.c, **engine_opts)
                _absorb(trace, rs.trace)
                art.RS, art.dominators = rs.RS, rs.dominators
                art.rounds["ruling"] = rs.rounds
                sc = supercluster(graph, collection, art.W, art.RS, art.delta, rho, **engine_opts)
                for t in sc.traces:
                    _absorb(trace, t)
                art.forest, art.absorbed, art.U = sc.forest, sc.absorbed, sc.U
                art.forest_edges = frozenset(sc.edges_added - H)
                H |= sc.edges_added
                art.rounds["supercluster"] = sc.rounds
                next_collection = sc.collection
            else:
                art.U = collection.clusters
                next_collection = ClusterCollection(i + 1, ())
            ic = interconnect(graph, collection, art.U, art.knowledge, art.delta, art.deg, **engine_opts)
            _absorb(trace, ic.trace)
            art.interconnect_edges = frozenset(ic.edges_added - H)
            H |= ic.edges_added
            art.rounds["interconnect"] = ic.rounds
        except ProtocolError as exc:
            if exc.phase is None:
                exc.phase = i
                exc.args = (f"phase {i}: {exc.args[0] if exc.args else exc}",)
            trace.phases.append(art)
            trace.status = f"failed: {exc}"
            trace.spanner = frozenset(H)
            exc.partial_trace = trace
            raise
        trace.phases.append(art)
        collection = next_collection
    for u, v in H:
        if not graph.has_edge(u, v):
            raise ProtocolError(f"spanner edge ({u}, {v}) is not in the input graph")
    trace.spanner = frozenset(edge_key(u, v) for u, v in H)
    return trace.spanner, trace
