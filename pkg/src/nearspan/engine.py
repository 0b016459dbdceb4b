"""Round-synchronous CONGEST simulator.

Every vertex runs its own :class:`VertexProgram`. In round ``r`` the engine
hands each program the messages its neighbours sent in round ``r - 1`` and
collects the messages it sends in round ``r``. At most one message may cross
each edge direction per round and a message is at most ``word_budget`` words
(tag included); anything else aborts the run with :class:`BandwidthViolation`.

Programs are only stepped when they have mail or asked to be woken, so long
silent stretches (fixed-length phases whose traffic died out) cost nothing
while still being counted as executed rounds.
"""

from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, NamedTuple, Sequence

from .errors import BandwidthViolation, DeterminismError, ProtocolError
from .graph import Graph

DEFAULT_WORD_BUDGET = 3


class Message(NamedTuple):
    tag: int
    payload: tuple[int, ...] = ()

    @property
    def words(self) -> int:
        return 1 + len(self.payload)


class VertexProgram:
    """Per-vertex behaviour. Subclasses keep all state on ``self``.

    ``step`` must be a function of the local state, the round index and the
    inbox only. ``wake_round`` tells the engine the earliest round ``>= rnd``
    at which the vertex must be stepped even with an empty inbox; ``None``
    means the vertex has finished and will only react to incoming mail.
    """

    vid: int
    neighbors: tuple[int, ...]

    def init(self, vid: int, neighbors: tuple[int, ...], globals_: Mapping[str, Any]) -> None:
        self.vid = vid
        self.neighbors = neighbors

    def step(self, rnd: int, inbox: list[tuple[int, Message]]):
        return None

    def wake_round(self, rnd: int) -> int | None:
        return None

    def snapshot(self) -> Any:
        """Canonical, hashable view of the final state (used for replay hashing)."""
        return None


@dataclass
class EngineTrace:
    rounds_executed: int = 0
    round_budget: int = 0
    completed: bool = True
    message_counts: dict[int, int] = field(default_factory=dict)  # only rounds with traffic
    total_messages: int = 0
    max_words: int = 0
    max_per_edge_round: int = 0
    bandwidth_violations: list[str] = field(default_factory=list)
    digest: str = ""
    message_log: list[tuple[int, int, int, Message]] | None = None

    @property
    def per_round_message_count(self) -> list[tuple[int, int]]:
        return sorted(self.message_counts.items())

    def dump(self) -> str:
        lines = [f"round {r}: msgs {k}" for r, k in self.per_round_message_count]
        lines.append(f"rounds executed: {self.rounds_executed}")
        if self.message_log is not None:
            lines.extend(
                f"  r{r} {src}->{dst} tag={msg.tag} payload={list(msg.payload)}"
                for r, src, dst, msg in self.message_log
            )
        return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    trace: EngineTrace
    programs: list[VertexProgram]

    @property
    def rounds(self) -> int:
        return self.trace.rounds_executed


def _normalise_outbox(out) -> list[tuple[int, Message]]:
    if not out:
        return []
    items = out.items() if isinstance(out, Mapping) else out
    flat = []
    for dst, value in items:
        if isinstance(value, Message):
            flat.append((dst, value))
        else:
            flat.extend((dst, msg) for msg in value)
    return flat


def _execute(
    graph: Graph,
    factory: Callable[[int], VertexProgram],
    max_rounds: int,
    globals_: Mapping[str, Any],
    word_budget: int,
    log_messages: bool,
) -> RunResult:
    if max_rounds < 0:
        raise ValueError("max_rounds must be nonnegative")
    n = graph.n
    word_limit = max(n, 2) ** 3
    programs = []
    for v in range(n):
        prog = factory(v)
        prog.init(v, graph.adj[v], globals_)
        programs.append(prog)

    trace = EngineTrace(round_budget=max_rounds)
    if log_messages:
        trace.message_log = []
    hasher = hashlib.sha256()
    neighbour_sets = [frozenset(a) for a in graph.adj]

    wake: list[int | None] = [None] * n
    heap: list[tuple[int, int]] = []

    def schedule(v: int, rnd: int) -> None:
        w = programs[v].wake_round(rnd)
        if w is not None and w < rnd:
            w = rnd
        wake[v] = w
        if w is not None:
            heapq.heappush(heap, (w, v))

    for v in range(n):
        schedule(v, 0)

    inflight: dict[int, list[tuple[int, Message]]] = {}
    rnd = 0
    last_active = 0
    while True:
        while heap and wake[heap[0][1]] != heap[0][0]:
            heapq.heappop(heap)  # stale entry
        if not inflight:
            if not heap:
                break
            rnd = max(rnd, heap[0][0])
        if rnd > max_rounds:
            trace.completed = False
            break
        active = set(inflight)
        while heap and heap[0][0] <= rnd:
            w, v = heapq.heappop(heap)
            if wake[v] == w:
                active.add(v)
        outgoing: dict[int, list[tuple[int, Message]]] = {}
        sent = 0
        for v in sorted(active):
            inbox = sorted(inflight.get(v, ()))
            wake[v] = None
            out = _normalise_outbox(programs[v].step(rnd, inbox))
            seen = set()
            for dst, msg in out:
                if dst not in neighbour_sets[v]:
                    raise BandwidthViolation(f"round {rnd}: vertex {v} sent to non-neighbour {dst}")
                if dst in seen:
                    trace.bandwidth_violations.append(f"round {rnd}: {v}->{dst} carries 2+ messages")
                    raise BandwidthViolation(trace.bandwidth_violations[-1])
                seen.add(dst)
                if not isinstance(msg, Message) or msg.words > word_budget:
                    trace.bandwidth_violations.append(
                        f"round {rnd}: {v}->{dst} message {msg!r} exceeds {word_budget} words"
                    )
                    raise BandwidthViolation(trace.bandwidth_violations[-1])
                for w in (msg.tag,) + tuple(msg.payload):
                    if not isinstance(w, int) or isinstance(w, bool) or abs(w) > word_limit:
                        trace.bandwidth_violations.append(
                            f"round {rnd}: {v}->{dst} word {w!r} is not an O(log n)-bit integer"
                        )
                        raise BandwidthViolation(trace.bandwidth_violations[-1])
                trace.max_words = max(trace.max_words, msg.words)
                outgoing.setdefault(dst, []).append((v, msg))
                hasher.update(f"{rnd},{v},{dst},{msg.tag},{msg.payload};".encode())
                if trace.message_log is not None:
                    trace.message_log.append((rnd, v, dst, msg))
            sent += len(out)
            schedule(v, rnd + 1)
        if active:
            last_active = rnd
        if sent:
            trace.message_counts[rnd] = sent
            trace.total_messages += sent
            trace.max_per_edge_round = 1
        inflight = outgoing
        rnd += 1

    trace.rounds_executed = last_active
    if not trace.completed:
        trace.rounds_executed = max_rounds
    for prog in programs:
        hasher.update(repr(prog.snapshot()).encode())
    trace.digest = hasher.hexdigest()
    return RunResult(trace, programs)


def run(
    graph: Graph,
    factory: Callable[[int], VertexProgram],
    max_rounds: int,
    globals_: Mapping[str, Any] | None = None,
    *,
    word_budget: int = DEFAULT_WORD_BUDGET,
    log_messages: bool = False,
    replay_check: bool = False,
) -> RunResult:
    """Run ``factory(v)`` at every vertex until quiescence or ``max_rounds``.

    The run ends once no message is in flight and no vertex asked to be woken;
    ``rounds_executed`` is the index of the last round in which any vertex was
    stepped. If traffic or wake-ups remain past ``max_rounds`` the trace is
    marked incomplete; callers treat that as a protocol bug.
    """
    globals_ = dict(globals_ or {})
    result = _execute(graph, factory, max_rounds, globals_, word_budget, log_messages)
    if replay_check:
        again = _execute(graph, factory, max_rounds, globals_, word_budget, False)
        if again.trace.digest != result.trace.digest:
            raise DeterminismError(
                f"replay digest mismatch: {result.trace.digest[:12]} != {again.trace.digest[:12]}"
            )
    return result


def require_complete(result: RunResult, what: str) -> None:
    if not result.trace.completed:
        raise ProtocolError(f"{what} did not finish within {result.trace.round_budget} rounds")


def broadcast(neighbors: Sequence[int], msg: Message, skip: int | None = None) -> dict[int, Message]:
    return {u: msg for u in neighbors if u != skip}
