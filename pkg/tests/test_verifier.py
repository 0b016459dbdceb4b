import dataclasses
import json
from fractions import Fraction

import pytest

from nearspan.generators import barbell, gnp
from nearspan.graph import Graph, bfs
from nearspan.protocol import ClusterCollection, build_spanner, detect_popular, interconnect
from nearspan.protocol.popular import KnowledgeEntry
from nearspan.schedule import build_schedule
from nearspan.verifier import (
    check_budgets,
    check_interconnection_completeness,
    check_knowledge,
    check_neighbor_cluster_distance,
    check_popular_oracle,
    check_ruling,
    check_stretch,
    check_structure,
    power_at_most,
    verify,
)


def run(g, mode="exploratory", eps="1/2", kappa=4, c=3):
    return build_spanner(g, build_schedule(g.n, kappa, c, mode, eps))[1]


def test_popular_oracle_examples(star6):
    singles = ClusterCollection.singletons(6)
    assert check_popular_oracle(star6, singles, 3, 1, {0}).passed
    bad = check_popular_oracle(star6, singles, 3, 1, {0, 1})
    assert not bad.passed and bad.witness == {"center": 1}
    pair = Graph(2, [(0, 1)])
    assert check_popular_oracle(pair, ClusterCollection.singletons(2), 1, 1, {0, 1}).passed
    assert check_popular_oracle(pair, ClusterCollection(0, ()), 1, 1, set()).passed


def test_knowledge_examples(c64, path10):
    singles = ClusterCollection.singletons(64)
    pop = detect_popular(c64, singles, 3, 1)
    assert check_knowledge(c64, singles, 1, 3, pop.knowledge, pop.W).passed

    lonely = Graph(3, [(0, 1)])
    coll = ClusterCollection.from_mapping(0, {2: [2]})
    assert check_knowledge(lonely, coll, 5, 2, [[], [], [KnowledgeEntry(2, 0, 2)]], set()).passed

    ends = ClusterCollection.from_mapping(0, {0: [0], 9: [9]})
    pop = detect_popular(path10, ends, 10, 9)
    assert check_knowledge(path10, ends, 9, 10, pop.knowledge, pop.W).passed


def test_knowledge_detects_corruption(c64):
    singles = ClusterCollection.singletons(64)
    pop = detect_popular(c64, singles, 3, 1)
    knowledge = [list(rows) for rows in pop.knowledge]
    knowledge[5] = [e for e in knowledge[5] if e.center != 6]
    bad = check_knowledge(c64, singles, 1, 3, knowledge, pop.W)
    assert not bad.passed and 5 in bad.witness.values()

    knowledge = [list(rows) for rows in pop.knowledge]
    knowledge[5] = [KnowledgeEntry(e.center, 1, 4) if e.center == 6 else e for e in knowledge[5]]
    assert not check_knowledge(c64, singles, 1, 3, knowledge, pop.W).passed


def test_ruling_examples(path10):
    assert check_ruling(path10, set(), set(), 2, 4).passed
    assert check_ruling(path10, {3}, {3}, 2, 4).passed
    assert check_ruling(path10, range(10), {0, 3, 6, 9}, 2, 4).passed
    assert not check_ruling(path10, range(10), {0, 2, 6, 9}, 2, 4).passed  # too close
    assert not check_ruling(path10, range(10), {0}, 2, 4).passed  # 9 undominated


def test_structure_on_golden_runs(k16, c64):
    trace = run(k16)
    assert all(ch.passed for ch in check_structure(trace, trace.schedule, k16))
    p1 = trace.phases[1].collection.clusters[0]
    assert p1.center == 15 and trace.schedule.R[1] == 6
    trace = run(c64)
    assert all(ch.passed for ch in check_structure(trace, trace.schedule, c64))
    assert len(trace.phases[1].collection) == 0


def test_structure_detects_broken_partition(k16):
    trace = run(k16)
    trace.phases[1] = dataclasses.replace(trace.phases[1], U=())
    failed = {ch.name for ch in check_structure(trace, trace.schedule, k16) if not ch.passed}
    assert "partition" in failed


def test_structure_detects_radius_violation(k16):
    trace = run(k16)
    trace.phases[0] = dataclasses.replace(trace.phases[0], forest_edges=frozenset({(0, 15)}))
    failed = {ch.name for ch in check_structure(trace, trace.schedule, k16) if not ch.passed}
    assert "radius" in failed


def test_power_at_most_is_exact():
    assert power_at_most(4, 16, Fraction(1, 2))
    assert not power_at_most(5, 16, Fraction(1, 2))
    assert power_at_most(0, 16, Fraction(-1, 3))
    assert not power_at_most(1, 16, Fraction(-1, 3))


def test_interconnection_examples(c64, path10):
    trace = run(c64)
    assert check_interconnection_completeness(trace, c64).passed
    trace = dataclasses.replace(trace, spanner=trace.spanner - {(0, 1)})
    bad = check_interconnection_completeness(trace, c64)
    assert not bad.passed and bad.witness["pair"] in ([0, 1], [1, 0])

    coll = ClusterCollection.from_mapping(0, {0: [0, 1, 2], 4: [3, 4, 5, 6, 7, 8, 9]})
    pop = detect_popular(path10, coll, 5, 4)
    edges = interconnect(path10, coll, coll.clusters, pop.knowledge, 4, 5).edges_added
    H = Graph(10, sorted(edges))
    assert bfs(H, 0)[4] == 4


def test_neighbor_cluster_distance_on_barbell():
    g = barbell(8, 30)
    trace = run(g)
    res = check_neighbor_cluster_distance(trace, g)
    assert res.passed
    assert not res.detail.startswith("0 ")  # some pairs actually qualify


def test_neighbor_cluster_distance_is_vacuous_on_golden_runs(k16, c64):
    for g in (k16, c64):
        res = check_neighbor_cluster_distance(run(g), g)
        assert res.passed and res.detail.startswith("0 ")


def test_stretch_examples(k16):
    edges = k16.edges()
    ok, summary = check_stretch(k16, edges, Fraction(1), Fraction(0))
    assert ok.passed and summary.worst_surplus == 0 and summary.worst_ratio == 1
    star = [(v, 15) for v in range(15)]
    ok, summary = check_stretch(k16, star, Fraction(1), Fraction(1))
    assert ok.passed and summary.worst_surplus == 1 and summary.worst_ratio == 2
    bad, _ = check_stretch(k16, star, Fraction(1), Fraction(0))
    assert not bad.passed and bad.witness["d_H"] == 2
    split = Graph(4, [(0, 1), (2, 3)])
    ok, summary = check_stretch(split, split.edges(), Fraction(1), Fraction(0))
    assert ok.passed and summary.pairs_checked == 2
    broken, _ = check_stretch(split, [(0, 1)], None, None)
    assert not broken.passed


def test_stretch_sampling_is_reproducible():
    g = gnp(80, "1/10", 2)
    _, a = check_stretch(g, g.edges(), None, None, sources=10, seed=4)
    _, b = check_stretch(g, g.edges(), None, None, sources=10, seed=4)
    assert not a.all_pairs and a.sources == 10 and a.to_json() == b.to_json()


def test_budget_examples(k16, c64):
    trace = run(k16)
    checks, bounds = check_budgets(trace, trace.schedule, 16)
    assert all(ch.passed for ch in checks)
    edges0 = next(b for b in bounds if b.quantity == "edges_added[0]")
    assert edges0.measured == 15 and edges0.bound == 16 + 16 * 2 * 1

    trace = run(c64)
    _, bounds = check_budgets(trace, trace.schedule, 64)
    edges0 = next(b for b in bounds if b.quantity == "edges_added[0]")
    assert edges0.measured == 64 and edges0.bound == 64 + 64 * 3 * 1
    assert all(b.holds for b in bounds if b.asserted)


def test_budget_detects_wrong_round_count(k16):
    trace = run(k16)
    trace.phases[0].rounds["popular"] += 1
    checks, _ = check_budgets(trace, trace.schedule, 16)
    assert not checks[0].passed and checks[0].witness["phase"] == 0


@pytest.mark.parametrize("level", ["fast", "full", "deep"])
def test_full_report_passes_and_serialises(level):
    g = gnp(64, "1/10", 9)
    report = verify(g, run(g, eps="1/30"), level)
    assert report.passed, report.failures()
    data = json.loads(report.dumps())
    assert data["passed"] and data["max_stretch_observed"]["asserted"]
    assert ("deep" == level) == any(c["name"] == "neighbor-clusters" for c in data["checks"])


def test_report_flags_missing_edge(k16):
    trace = run(k16)
    trace = dataclasses.replace(trace, spanner=trace.spanner - {(0, 15)})
    report = verify(k16, trace, "full")
    assert not report.passed
    assert not report.check("edge-accounting").passed
    assert not report.check("stretch").passed


def test_wrong_popular_set_is_reported(k16):
    trace = run(k16)
    trace.phases[0] = dataclasses.replace(trace.phases[0], W=frozenset(range(15)))
    report = verify(k16, trace, "fast")
    assert not report.check("popular-oracle[0]").passed
