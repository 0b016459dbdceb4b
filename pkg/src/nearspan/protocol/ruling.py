"""Deterministic (q+1, c*q)-ruling sets by digit elimination.

Ids are written as ``c`` digits in base ``b = ceil(n ** (1/c))``. Positions
are scanned most significant first and, within a position, digit values from
``b - 1`` down to ``0``; each (position, value) pair owns a block of ``q``
rounds. At the start of a block every still-active candidate whose digit
equals the value floods a one-word ``dominate`` token to hop distance ``q``;
an active candidate reached by the token with a smaller digit at that
position drops out and remembers who knocked it out.

Two survivors within distance ``q`` would agree on every digit, so survivors
are ``q + 1`` separated. A knocked-out candidate is within ``q`` of someone
active at that position, and that someone can only lose at a later
position, so chains have at most ``c`` links.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import engine
from ..engine import Message, VertexProgram
from ..errors import ProtocolError
from ..graph import Graph
from ..schedule import ceil_root_power

DOMINATE = 2


def digit_base(n: int, c: int) -> int:
    return max(2, ceil_root_power(n, 1, c))


def ruling_rounds(n: int, q: int, c: int) -> int:
    return c * digit_base(n, c) * q


def id_digit(vid: int, position: int, base: int, width: int) -> int:
    return (vid // base ** (width - 1 - position)) % base


class RulingProgram(VertexProgram):
    def __init__(self, candidate: bool):
        self.candidate = candidate

    def init(self, vid, neighbors, globals_):
        super().init(vid, neighbors, globals_)
        self.q = globals_["q"]
        self.c = globals_["c"]
        self.base = globals_["base"]
        self.length = self.c * self.base * self.q
        self.active = self.candidate
        self.eliminator: int | None = None
        self.relayed_block = -1
        self.finished = False
        self.digits = [id_digit(vid, p, self.base, self.c) for p in range(self.c)]

    def _block(self, block: int) -> tuple[int, int]:
        position, offset = divmod(block, self.base)
        return position, self.base - 1 - offset

    def step(self, rnd, inbox):
        out = None
        if inbox:
            block = (rnd - 1) // self.q
            hop = rnd - block * self.q
            position, value = self._block(block)
            origin = min(msg.payload[0] for _, msg in inbox)
            if self.active and self.digits[position] < value:
                self.active = False
                self.eliminator = origin
            if hop < self.q and self.relayed_block != block:
                self.relayed_block = block
                out = engine.broadcast(self.neighbors, Message(DOMINATE, (origin,)))
        if rnd >= self.length:
            self.finished = True
            return out
        if rnd % self.q == 0 and self.active:
            block = rnd // self.q
            position, value = self._block(block)
            if self.digits[position] == value:
                self.relayed_block = block
                return engine.broadcast(self.neighbors, Message(DOMINATE, (self.vid,)))
        return out

    def wake_round(self, rnd):
        if self.finished:
            return None
        if self.active:
            first_block = -(-rnd // self.q)
            for position in range(first_block // self.base, self.c):
                block = position * self.base + (self.base - 1 - self.digits[position])
                if block >= first_block:
                    return block * self.q
        return self.length

    def snapshot(self):
        return (self.active, self.eliminator)


@dataclass
class RulingResult:
    RS: frozenset[int]
    dominators: dict[int, int]  # W vertex -> the survivor its elimination chain ends at
    eliminated_by: dict[int, int]
    rounds: int
    trace: engine.EngineTrace = field(repr=False)


def ruling_set(graph: Graph, W, q: int, c: int, **engine_opts) -> RulingResult:
    """Pick a ``(q+1)``-separated subset of ``W`` that ``c*q``-dominates it.

    Takes exactly ``c * ceil(n ** (1/c)) * q`` rounds.
    """
    if q < 1 or c < 1:
        raise ValueError(f"need q >= 1 and c >= 1, got q={q}, c={c}")
    W = frozenset(W)
    base = digit_base(graph.n, c)
    length = c * base * q
    result = engine.run(
        graph,
        lambda v: RulingProgram(v in W),
        length,
        {"q": q, "c": c, "base": base},
        **engine_opts,
    )
    engine.require_complete(result, "ruling set")
    progs: list[RulingProgram] = result.programs  # type: ignore[assignment]
    RS = frozenset(w for w in W if progs[w].active)
    eliminated_by = {w: progs[w].eliminator for w in W if not progs[w].active}
    dominators = {}
    for w in sorted(W):
        x, hops = w, 0
        while x not in RS:
            x = eliminated_by[x]
            hops += 1
            if hops > c:
                raise ProtocolError(f"elimination chain from {w} exceeds {c} links")
        dominators[w] = x
    return RulingResult(RS, dominators, eliminated_by, result.rounds, result.trace)
