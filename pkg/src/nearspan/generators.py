"""Reproducible graph families for experiments and tests.

``gnp`` draws edge ``{u, v}`` iff the 64-bit blake2b hash of ``"seed:u:v"``
falls below ``p * 2**64``. The comparison is done in exact integers, so a
given (n, p, seed) yields the same graph on every platform and Python version.
"""

from __future__ import annotations

import hashlib

from .errors import ConfigError
from .graph import Graph
from .schedule import to_fraction

KINDS = ("gnp", "cycle", "path", "grid", "barbell", "complete")


def _int_param(params: dict, name: str, minimum: int) -> int:
    if name not in params:
        raise ConfigError("generator", f"missing parameter {name!r}")
    value = params[name]
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            value = int(str(value))
        except ValueError:
            raise ConfigError("generator", f"{name} must be an integer, got {value!r}") from None
    if value < minimum:
        raise ConfigError("generator", f"{name} must be at least {minimum}, got {value}")
    return value


def edge_hash(seed: int, u: int, v: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{u}:{v}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def gnp(n: int, p, seed: int) -> Graph:
    p = to_fraction(p)
    if not 0 <= p <= 1:
        raise ConfigError("generator", f"p must lie in [0, 1], got {p}")
    cutoff = p.numerator << 64
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if edge_hash(seed, u, v) * p.denominator < cutoff
    ]
    return Graph(n, edges)


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def grid(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for col in range(cols):
            v = r * cols + col
            if col + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def complete(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def barbell(k: int, length: int) -> Graph:
    """Two copies of ``K_k`` whose last and first vertices are joined by a path of ``length`` edges."""
    n = 2 * k + length - 1
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    second = k + length - 1
    edges += [(second + u, second + v) for u in range(k) for v in range(u + 1, k)]
    chain = [k - 1, *range(k, second), second]
    edges += list(zip(chain, chain[1:]))
    return Graph(n, edges)


def generate(kind: str, params: dict, seed: int = 0) -> Graph:
    """Build a graph of the given family; ``seed`` only matters for ``gnp``."""
    if kind == "gnp":
        if "p" not in params:
            raise ConfigError("generator", "gnp needs p")
        return gnp(_int_param(params, "n", 1), params["p"], seed)
    if kind == "cycle":
        return cycle(_int_param(params, "n", 3))
    if kind == "path":
        return path(_int_param(params, "n", 1))
    if kind == "grid":
        return grid(_int_param(params, "rows", 1), _int_param(params, "cols", 1))
    if kind == "complete":
        return complete(_int_param(params, "n", 1))
    if kind == "barbell":
        return barbell(_int_param(params, "k", 2), _int_param(params, "length", 1))
    raise ConfigError("generator", f"unknown graph kind {kind!r}; choose from {', '.join(KINDS)}")

