"""Simple undirected graphs, exact BFS distances and edge-list I/O."""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

UNREACHABLE = -1


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Unweighted undirected graph on vertices ``0..n-1``.

    Adjacency lists are sorted and the graph is treated as read-only once
    built, so one instance can be shared by the engine and the verifier.
    """

    __slots__ = ("n", "adj", "_edges")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        self.n = n
        nbrs: list[set[int]] = [set() for _ in range(n)]
        count = 0
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise InputError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            count += 1
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self._edges = count

    @property
    def m(self) -> int:
        return self._edges

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.adj[u]
        # adjacency rows are sorted
        lo, hi = 0, len(row)
        while lo < hi:
            mid = (lo + hi) // 2
            if row[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(row) and row[lo] == v

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def subgraph(self, edges: Iterable[Sequence[int]]) -> "Graph":
        """Spanning subgraph on the same vertex set; every edge must exist here."""
        edges = [edge_key(int(u), int(v)) for u, v in edges]
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or not self.has_edge(u, v):
                raise InputError(f"({u}, {v}) is not an edge of the host graph")
        return Graph(self.n, edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _check_vertex(graph: Graph, v: int) -> None:
    if not (0 <= v < graph.n):
        raise InputError(f"vertex {v} out of range [0, {graph.n})")


def bfs(graph: Graph, source: int, depth_limit: int | None = None) -> list[int]:
    """Hop distances from ``source``; ``UNREACHABLE`` beyond the limit or component."""
    _check_vertex(graph, source)
    if depth_limit is not None and depth_limit < 0:
        raise InputError(f"depth limit must be nonnegative, got {depth_limit}")
    dist = [UNREACHABLE] * graph.n
    dist[source] = 0
    frontier = deque([source])
    adj = graph.adj
    while frontier:
        x = frontier.popleft()
        dx = dist[x]
        if depth_limit is not None and dx >= depth_limit:
            continue
        for y in adj[x]:
            if dist[y] == UNREACHABLE:
                dist[y] = dx + 1
                frontier.append(y)
    return dist


def multi_source_bfs(graph: Graph, sources: Iterable[int]) -> list[int]:
    dist = [UNREACHABLE] * graph.n
    frontier = deque()
    for s in sources:
        _check_vertex(graph, s)
        if dist[s] == UNREACHABLE:
            dist[s] = 0
            frontier.append(s)
    while frontier:
        x = frontier.popleft()
        for y in graph.adj[x]:
            if dist[y] == UNREACHABLE:
                dist[y] = dist[x] + 1
                frontier.append(y)
    return dist


def threshold(delta) -> int:
    """Integer cutoff for ``d <= delta`` when ``d`` is a hop count."""
    delta = Fraction(delta)
    if delta < 0:
        raise InputError(f"distance threshold must be nonnegative, got {delta}")
    return math.floor(delta)


def ball_centers(graph: Graph, centers: Iterable[int], v: int, delta) -> set[int]:
    """Members of ``centers`` within hop distance ``delta`` of ``v`` (``v`` included if a center)."""
    limit = threshold(delta)
    dist = bfs(graph, v, limit)
    return {c for c in centers if dist[c] != UNREACHABLE}


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InputError(f"{path}: empty edge list")
    try:
        header = [int(t) for t in lines[0]]
        body = [(int(a), int(b)) for a, b in lines[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: malformed edge list ({exc})") from None
    if len(header) != 2:
        raise InputError(f"{path}: header must be 'n m'")
    n, m = header
    if m != len(body):
        raise InputError(f"{path}: header announces {m} edges, found {len(body)}")
    return Graph(n, body)


def format_edge_list(n: int, edges: Iterable[Sequence[int]]) -> str:
    edges = sorted(edge_key(int(u), int(v)) for u, v in edges)
    lines = [f"{n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def write_edge_list(path, n: int, edges: Iterable[Sequence[int]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(n, edges))
