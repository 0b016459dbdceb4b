"""Exact oracles for every structural claim about a construction run.

Every check recomputes its ground truth by plain BFS on the input graph or
on the spanner and compares it against what the trace recorded. Inequalities
are evaluated with integers and Fractions only. Bounds that are asymptotic
rather than exact are reported with a slack factor and never fail a run.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .graph import UNREACHABLE, Graph, bfs, multi_source_bfs, threshold
from .protocol.clusters import ClusterCollection
from .protocol.construction import ExecutionTrace
from .protocol.popular import KnowledgeEntry
from .schedule import GUARANTEED, PhaseSchedule, ceil_frac, ceil_root_power

LEVELS = ("fast", "full", "deep")
ALL_PAIRS_LIMIT = 2048
DEFAULT_SOURCES = 256
FAST_SOURCES = 32
ROUND_CONSTANT = 4


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness, "detail": self.detail}


@dataclass
class BoundComparison:
    quantity: str
    measured: Fraction | int
    bound: Fraction | int
    asserted: bool

    @property
    def slack(self) -> Fraction | None:
        return Fraction(self.measured) / Fraction(self.bound) if self.bound else None

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound

    def to_json(self) -> dict:
        slack = self.slack
        return {
            "quantity": self.quantity,
            "measured": str(self.measured),
            "bound": str(self.bound),
            "slack_factor": None if slack is None else round(float(slack), 6),
            "asserted": self.asserted,
            "holds": self.holds,
        }


@dataclass
class StretchSummary:
    pairs_checked: int = 0
    sources: int = 0
    all_pairs: bool = True
    worst_surplus: int = 0
    worst_surplus_pair: tuple[int, int] | None = None
    worst_ratio: Fraction = Fraction(1)
    worst_ratio_pair: tuple[int, int] | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None
    asserted: bool = False

    def to_json(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "sources": self.sources,
            "all_pairs": self.all_pairs,
            "worst_additive_surplus": self.worst_surplus,
            "worst_additive_pair": self.worst_surplus_pair,
            "worst_multiplicative": str(self.worst_ratio),
            "worst_multiplicative_pair": self.worst_ratio_pair,
            "alpha": None if self.alpha is None else str(self.alpha),
            "beta": None if self.beta is None else str(self.beta),
            "asserted": self.asserted,
        }


@dataclass
class VerificationReport:
    level: str
    checks: list[Check] = field(default_factory=list)
    bounds: list[BoundComparison] = field(default_factory=list)
    stretch: StretchSummary | None = None
    edge_count: int = 0
    round_total: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(b.holds for b in self.bounds if b.asserted)

    def failures(self) -> list[str]:
        out = [f"{c.name}: {c.detail} (witness {c.witness})" for c in self.checks if not c.passed]
        out += [
            f"bound {b.quantity}: {b.measured} > {b.bound}" for b in self.bounds if b.asserted and not b.holds
        ]
        return out

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "passed": self.passed,
            "edge_count": self.edge_count,
            "round_total": self.round_total,
            "checks": [c.to_json() for c in self.checks],
            "bound_comparisons": [b.to_json() for b in self.bounds],
            "max_stretch_observed": None if self.stretch is None else self.stretch.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def _ok(name: str, detail: str = "") -> Check:
    return Check(name, True, None, detail)


def _fail(name: str, witness, detail: str) -> Check:
    return Check(name, False, witness, detail)


def _center_distances(graph: Graph, centers: Iterable[int], limit: int) -> dict[int, list[int]]:
    return {c: bfs(graph, c, limit) for c in sorted(centers)}


def power_at_most(x: int, n: int, exponent: Fraction) -> bool:
    """Exact test of ``x <= n ** exponent`` for integers ``x >= 0`` and ``n >= 1``."""
    exponent = Fraction(exponent)
    p, q = exponent.numerator, exponent.denominator
    if p >= 0:
        return x**q <= n**p
    return x**q * n ** (-p) <= 1


# Per-phase checks.


def check_popular_oracle(graph: Graph, collection: ClusterCollection, deg: int, delta, W, name="popular-oracle") -> Check:
    """``W`` must equal the set of centers with at least ``deg`` other centers within ``delta``."""
    centers = collection.centers
    limit = threshold(delta)
    dist = _center_distances(graph, centers, limit)
    oracle = {
        r for r in centers if sum(1 for s in centers if s != r and dist[r][s] != UNREACHABLE) >= deg
    }
    W = set(W)
    diff = sorted(oracle ^ W)
    if diff:
        c = diff[0]
        side = "missed by the protocol" if c in oracle else "wrongly marked popular"
        return _fail(name, {"center": c}, f"center {c} {side}")
    return _ok(name, f"{len(W)} popular of {len(centers)}")


def check_knowledge(
    graph: Graph,
    collection: ClusterCollection,
    delta,
    deg: int,
    knowledge: list[list[KnowledgeEntry]],
    W,
    name="knowledge",
) -> Check:
    """Exact knowledge at unpopular centers, enough knowledge everywhere, sound pointer chains."""
    centers = collection.centers
    limit = threshold(delta)
    dist = _center_distances(graph, centers, limit)
    W = set(W)
    tables = [{e.center: e for e in rows} for rows in knowledge]
    for u in range(graph.n):
        table = tables[u]
        ball = {c for c in centers if dist[c][u] != UNREACHABLE}
        if len(table) < min(deg, len(ball)):
            return _fail(name, {"vertex": u}, f"vertex {u} knows {len(table)} centers, needs {min(deg, len(ball))}")
        if u in centers and u not in W:
            if set(table) != ball:
                missing = sorted(ball ^ set(table))
                return _fail(name, {"center": u, "other": missing[0]}, f"unpopular center {u} has an incomplete list")
        for c, e in table.items():
            if c not in centers:
                return _fail(name, {"vertex": u, "center": c}, f"vertex {u} knows non-center {c}")
            true = dist[c][u]
            if true == UNREACHABLE or e.distance < true or e.distance > limit:
                return _fail(name, {"vertex": u, "center": c}, f"recorded distance {e.distance}, true {true}")
            if u in centers and u not in W and e.distance != true:
                return _fail(name, {"vertex": u, "center": c}, f"recorded distance {e.distance}, true {true}")
            x, d = u, e.distance
            while x != c:
                nxt = tables[x][c].predecessor
                if not graph.has_edge(x, nxt) or c not in tables[nxt] or tables[nxt][c].distance >= d:
                    return _fail(name, {"vertex": u, "center": c, "at": x}, "predecessor chain is broken")
                x, d = nxt, tables[nxt][c].distance
            if d != 0:
                return _fail(name, {"vertex": u, "center": c}, "chain ends at a nonzero distance")
    return _ok(name)


def check_ruling(graph: Graph, W, RS, q: int, cq: int, name="ruling-set") -> Check:
    """``RS`` is a ``(q+1)``-separated subset of ``W`` that ``cq``-dominates it."""
    W, RS = set(W), sorted(RS)
    if not set(RS) <= W:
        return _fail(name, {"vertex": sorted(set(RS) - W)[0]}, "ruling-set vertex outside W")
    for a in RS:
        dist = bfs(graph, a, q)
        for b in RS:
            if b != a and dist[b] != UNREACHABLE:
                return _fail(name, {"pair": [a, b], "distance": dist[b]}, f"ruling vertices within {q}")
    if W:
        reach = multi_source_bfs(graph, RS)
        for w in sorted(W):
            if reach[w] == UNREACHABLE or reach[w] > cq:
                return _fail(name, {"vertex": w, "distance": reach[w]}, f"not dominated within {cq}")
    return _ok(name, f"|W|={len(W)}, |RS|={len(RS)}")


# Whole-run checks.


def _spanner_graph(graph: Graph, edges) -> Graph:
    return Graph(graph.n, sorted(edges))


def check_structure(trace: ExecutionTrace, schedule: PhaseSchedule, graph: Graph) -> list[Check]:
    n, kappa, rho = schedule.n, schedule.kappa, schedule.rho
    i0, ell = schedule.i0, schedule.ell
    phases = trace.phases
    out: list[Check] = []

    name = "radius"
    bad = None
    H_edges: set = set()
    for art in phases:
        H = _spanner_graph(graph, H_edges)
        bound = schedule.R[art.phase]
        for cl in art.collection.clusters:
            if len(cl.members) == 1:
                continue
            dist = bfs(H, cl.center)
            far = max((dist[v] if dist[v] != UNREACHABLE else n for v in cl.members))
            if far > bound:
                bad = {"phase": art.phase, "cluster": cl.center, "radius": far, "bound": str(bound)}
                break
        if bad:
            break
        H_edges |= art.edges_added
    out.append(_fail(name, bad, "cluster radius exceeds R_i in H") if bad else _ok(name))

    name = "popular-superclustered"
    bad = None
    for art in phases:
        if art.phase < ell:
            missing = sorted(set(art.W) - set(art.absorbed))
        else:
            missing = sorted(art.W)
        if missing:
            bad = {"phase": art.phase, "center": missing[0]}
            break
    out.append(_fail(name, bad, "popular center was not superclustered") if bad else _ok(name))

    name = "phase-identities"
    bad = None
    for art, nxt in zip(phases, phases[1:] + [None]):
        spanned = set(art.absorbed)
        u_centers = {cl.center for cl in art.U}
        if spanned & u_centers or spanned | u_centers != set(art.S):
            bad = {"phase": art.phase, "detail": "U_i and the absorbed centers do not split S_i"}
            break
        if nxt is None:
            continue
        if set(nxt.S) != set(art.RS):
            bad = {"phase": art.phase, "detail": "next centers differ from the ruling set"}
            break
        by_center = art.collection.by_center()
        covered = set().union(*(by_center[c].members for c in spanned)) if spanned else set()
        if covered != nxt.collection.vertices():
            bad = {"phase": art.phase, "detail": "P_{i+1} does not cover exactly the absorbed clusters"}
            break
    out.append(_fail(name, bad, "per-phase bookkeeping is inconsistent") if bad else _ok(name))

    name = "partition"
    owner: dict[int, int] = {}
    bad = None
    for art in phases:
        for cl in art.U:
            for v in cl.members:
                if v in owner:
                    bad = {"vertex": v, "phases": [owner[v], art.phase]}
                    break
                owner[v] = art.phase
            if bad:
                break
        if bad:
            break
    if bad is None and len(owner) != n:
        bad = {"vertex": min(set(range(n)) - set(owner))}
    out.append(_fail(name, bad, "U_0..U_ell is not a partition of V") if bad else _ok(name))

    name = "size-decay"
    bad = None
    for art in phases:
        i, size = art.phase, len(art.collection)
        if i <= i0 + 1 and not power_at_most(size, n, 1 - Fraction(2**i - 1, kappa)):
            bad = {"phase": i, "clusters": size, "stage": "exponential"}
            break
        if i0 + 1 <= i <= ell and not power_at_most(size, n, 1 + Fraction(1, kappa) - (i - i0) * rho):
            bad = {"phase": i, "clusters": size, "stage": "fixed"}
            break
    out.append(_fail(name, bad, "|P_i| exceeds its decay bound") if bad else _ok(name))

    name = "last-collection-size"
    last = len(phases[ell].collection) if len(phases) > ell else None
    cap = ceil_root_power(n, 1, schedule.c)
    if last is None or last > cap:
        out.append(_fail(name, {"clusters": last, "bound": cap}, "|P_ell| exceeds ceil(n^rho)"))
    else:
        out.append(_ok(name, f"{last} <= {cap}"))
    return out


def check_interconnection_completeness(trace: ExecutionTrace, graph: Graph, name="interconnection") -> Check:
    """Every unclustered center keeps exact distances in H to all centers within ``delta_i``."""
    H = _spanner_graph(graph, trace.spanner)
    for art in trace.phases:
        limit = threshold(art.delta)
        centers = art.S
        for cl in art.U:
            r = cl.center
            dg = bfs(graph, r, limit)
            dh = bfs(H, r, limit)
            for s in sorted(centers):
                if s != r and dg[s] != UNREACHABLE and dh[s] != dg[s]:
                    return _fail(
                        name,
                        {"phase": art.phase, "pair": [r, s], "d_G": dg[s], "d_H": dh[s]},
                        "shortest path between cluster centers missing from H",
                    )
    return _ok(name)


def check_neighbor_cluster_distance(trace: ExecutionTrace, graph: Graph, name="neighbor-clusters") -> Check:
    """Members of an earlier unclustered cluster stay close in H to a later neighbouring center."""
    R = trace.schedule.R
    H = _spanner_graph(graph, trace.spanner)
    home: dict[int, tuple[int, int]] = {}
    members: dict[int, frozenset[int]] = {}
    for art in trace.phases:
        for cl in art.U:
            members[cl.center] = cl.members
            for v in cl.members:
                home[v] = (art.phase, cl.center)
    pairs: dict[int, set[int]] = {}
    for x, y in graph.edges():
        (jx, cx), (jy, cy) = home[x], home[y]
        if jx < jy:
            pairs.setdefault(cy, set()).add(cx)
        elif jy < jx:
            pairs.setdefault(cx, set()).add(cy)
    for later in sorted(pairs):
        i = home[later][0]
        dist = bfs(H, later)
        for earlier in sorted(pairs[later]):
            j = home[earlier][0]
            bound = min(3 * R[j] + 1 + R[i], 2 * R[i] + 1)
            for w in sorted(members[earlier]):
                d = dist[w]
                if d == UNREACHABLE or d > bound:
                    return _fail(
                        name,
                        {"vertex": w, "center": later, "d_H": d, "bound": str(bound)},
                        "neighbouring cluster too far in H",
                    )
    return _ok(name, f"{sum(len(v) for v in pairs.values())} neighbouring cluster pairs")


def stretch_bound(schedule: PhaseSchedule) -> tuple[Fraction, Fraction] | None:
    """The asserted ``(alpha, beta)`` for a schedule, or None if no bound applies."""
    if schedule.mode == GUARANTEED:
        return 1 + schedule.eps_user, schedule.beta
    if schedule.stretch_bound_guaranteed:
        return schedule.internal_stretch()
    return None


def check_stretch(
    graph: Graph,
    edges,
    alpha: Fraction | None,
    beta: Fraction | None,
    sources: int | None = None,
    seed: int = 0,
    name="stretch",
) -> tuple[Check, StretchSummary]:
    """Compare BFS distances in ``G`` and ``H`` from every (or a sample of) source.

    Pairs disconnected in ``G`` are skipped. With ``alpha`` and ``beta`` None
    the check only records the worst observed stretch.
    """
    H = _spanner_graph(graph, edges)
    n = graph.n
    summary = StretchSummary(alpha=alpha, beta=beta, asserted=alpha is not None)
    if sources is None or sources >= n:
        chosen = list(range(n))
    else:
        chosen = sorted(random.Random(seed).sample(range(n), sources))
        summary.all_pairs = False
    summary.sources = len(chosen)
    if alpha is not None:
        alpha, beta = Fraction(alpha), Fraction(beta)
        scale = alpha.denominator * beta.denominator
        a_num = alpha.numerator * beta.denominator
        b_num = beta.numerator * alpha.denominator
    failure = None
    for u in chosen:
        dg = bfs(graph, u)
        dh = bfs(H, u)
        for v in range(n):
            if v == u or dg[v] == UNREACHABLE or (summary.all_pairs and v < u):
                continue
            summary.pairs_checked += 1
            if dh[v] == UNREACHABLE:
                failure = failure or {"pair": [u, v], "d_G": dg[v], "d_H": None}
                continue
            surplus = dh[v] - dg[v]
            if surplus > summary.worst_surplus or summary.worst_surplus_pair is None:
                summary.worst_surplus, summary.worst_surplus_pair = surplus, (u, v)
            ratio = Fraction(dh[v], dg[v])
            if ratio > summary.worst_ratio or summary.worst_ratio_pair is None:
                summary.worst_ratio, summary.worst_ratio_pair = ratio, (u, v)
            if alpha is not None and failure is None and dh[v] * scale > a_num * dg[v] + b_num:
                failure = {"pair": [u, v], "d_G": dg[v], "d_H": dh[v]}
    if failure is not None and (alpha is not None or failure["d_H"] is None):
        return _fail(name, failure, "stretch bound violated"), summary
    detail = f"worst surplus {summary.worst_surplus}"
    if alpha is None:
        detail += " (no bound asserted for these parameters)"
    return _ok(name, detail), summary


def check_budgets(trace: ExecutionTrace, schedule: PhaseSchedule, n: int) -> tuple[list[Check], list[BoundComparison]]:
    checks: list[Check] = []
    bounds: list[BoundComparison] = []
    c = schedule.c
    cap = ceil_root_power(n, 1, c)
    total_bound = Fraction(0)
    for art in trace.phases:
        i, deg, delta = art.phase, art.deg, art.delta
        expected = 1 + threshold(delta) * deg
        got = art.rounds.get("popular")
        if got != expected:
            checks.append(_fail(f"popular-rounds[{i}]", {"phase": i, "rounds": got}, f"expected exactly {expected}"))
        if "ruling" in art.rounds:
            q = art.q
            bounds.append(BoundComparison(f"ruling_rounds[{i}]", art.rounds["ruling"], c * cap * q + 4 * c * q, True))
        phase_bound = ROUND_CONSTANT * (deg * delta + c * cap * delta + c * delta)
        total_bound += phase_bound
        bounds.append(BoundComparison(f"phase_rounds[{i}]", art.rounds_used, phase_bound, True))
        edge_bound = n + len(art.collection) * deg * ceil_frac(delta)
        bounds.append(BoundComparison(f"edges_added[{i}]", len(art.edges_added), edge_bound, True))
    if not any(ch.name.startswith("popular-rounds") for ch in checks):
        checks.append(_ok("popular-rounds", "every phase matched 1 + floor(delta) * deg"))
    bounds.append(BoundComparison("total_rounds", trace.rounds_total, total_bound, True))
    beta = schedule.beta
    bounds.append(BoundComparison("total_rounds_vs_beta_n^rho/rho", trace.rounds_total, beta * cap * c, False))
    size_shape = beta * n * ceil_root_power(n, 1, schedule.kappa)
    bounds.append(BoundComparison("spanner_size_vs_beta_n^(1+1/kappa)", len(trace.spanner), size_shape, False))
    return checks, bounds


def check_accounting(trace: ExecutionTrace, graph: Graph, name="edge-accounting") -> Check:
    seen: dict[tuple[int, int], str] = {}
    for art in trace.phases:
        for step, edges in (("forest", art.forest_edges), ("interconnect", art.interconnect_edges)):
            for e in edges:
                if e in seen:
                    return _fail(name, {"edge": list(e), "steps": [seen[e], f"{step}[{art.phase}]"]}, "edge added twice")
                seen[e] = f"{step}[{art.phase}]"
    if set(seen) != set(trace.spanner):
        extra = sorted(set(seen) ^ set(trace.spanner))
        return _fail(name, {"edge": list(extra[0])}, "per-step edges do not sum to E_H")
    for u, v in sorted(trace.spanner):
        if not graph.has_edge(u, v):
            return _fail(name, {"edge": [u, v]}, "spanner edge not in G")
    return _ok(name, f"{len(seen)} edges, each from one step")


def check_engine(trace: ExecutionTrace, word_budget: int = 3, name="bandwidth") -> Check:
    if trace.bandwidth_violations:
        return _fail(name, trace.bandwidth_violations[0], f"{len(trace.bandwidth_violations)} violations")
    if trace.max_words > word_budget or trace.max_per_edge_round > 1:
        return _fail(name, {"max_words": trace.max_words, "per_edge": trace.max_per_edge_round}, "limits exceeded")
    return _ok(name, f"max {trace.max_words} words, {trace.total_messages} messages")


def verify(
    graph: Graph,
    trace: ExecutionTrace,
    level: str = "full",
    stretch_sources: int | None = None,
    seed: int = 0,
) -> VerificationReport:
    """Run every check appropriate to ``level`` against a finished construction.

    ``fast`` skips knowledge and interconnection checks and samples stretch
    from a few sources; ``full`` adds them and checks stretch over all pairs
    up to ``ALL_PAIRS_LIMIT`` vertices; ``deep`` adds the neighbouring-cluster
    distance bound.
    """
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    schedule = trace.schedule
    report = VerificationReport(level, edge_count=len(trace.spanner), round_total=trace.rounds_total)
    checks = report.checks
    checks.append(check_engine(trace))
    checks.append(check_accounting(trace, graph))
    for art in trace.phases:
        i = art.phase
        checks.append(check_popular_oracle(graph, art.collection, art.deg, art.delta, art.W, f"popular-oracle[{i}]"))
        if level != "fast":
            checks.append(
                check_knowledge(graph, art.collection, art.delta, art.deg, art.knowledge, art.W, f"knowledge[{i}]")
            )
        if art.q is not None:
            checks.append(check_ruling(graph, art.W, art.RS, art.q, schedule.c * art.q, f"ruling-set[{i}]"))
    checks.extend(check_structure(trace, schedule, graph))
    if level != "fast":
        checks.append(check_interconnection_completeness(trace, graph))
    if level == "deep":
        checks.append(check_neighbor_cluster_distance(trace, graph))
    budget_checks, report.bounds = check_budgets(trace, schedule, graph.n)
    checks.extend(budget_checks)

    if stretch_sources is None:
        stretch_sources = FAST_SOURCES if level == "fast" else (None if graph.n <= ALL_PAIRS_LIMIT else DEFAULT_SOURCES)
    bound = stretch_bound(schedule)
    alpha, beta = bound if bound else (None, None)
    stretch_check, report.stretch = check_stretch(graph, trace.spanner, alpha, beta, stretch_sources, seed)
    checks.append(stretch_check)
    return report
