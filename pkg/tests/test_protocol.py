from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearspan.errors import ProtocolError
from nearspan.generators import complete, gnp, grid, path
from nearspan.graph import Graph, bfs
from nearspan.protocol import (
    ClusterCollection,
    build_spanner,
    construction,
    detect_popular,
    interconnect,
    ruling_set,
    supercluster,
)
from nearspan.protocol.popular import popularity_rounds
from nearspan.protocol.ruling import ruling_rounds
from nearspan.schedule import build_schedule
from nearspan.verifier import check_knowledge, check_popular_oracle, check_ruling


def centers_only(n, centers):
    """A collection whose clusters are the given centers as singletons."""
    return ClusterCollection.from_mapping(0, {c: [c] for c in centers})


# popularity detection


def test_star_hub_is_the_only_popular_center(star6):
    res = detect_popular(star6, ClusterCollection.singletons(6), 3, 1)
    assert res.W == {0}
    assert res.rounds == 1 + 1 * 3 == popularity_rounds(3, 1)


def test_nobody_is_popular_when_deg_exceeds_n(k16):
    assert detect_popular(k16, ClusterCollection.singletons(16), 17, 3).W == frozenset()


def test_cycle_knowledge(c64):
    res = detect_popular(c64, ClusterCollection.singletons(64), 3, 1)
    assert res.W == frozenset()
    for v in range(64):
        others = {(e.center, e.distance, e.predecessor) for e in res.knowledge[v] if e.center != v}
        a, b = (v - 1) % 64, (v + 1) % 64
        assert others == {(a, 1, a), (b, 1, b)}


def test_far_ends_of_a_path_know_each_other(path10):
    res = detect_popular(path10, centers_only(10, [0, 9]), 10, 9)
    assert [(e.center, e.distance) for e in res.knowledge[0]] == [(0, 0), (9, 9)]
    assert [(e.center, e.distance) for e in res.knowledge[9]] == [(9, 0), (0, 9)]


def test_rounds_follow_floor_of_delta(path10):
    res = detect_popular(path10, ClusterCollection.singletons(10), 2, Fraction(7, 2))
    assert res.rounds == 1 + 3 * 2


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(2, 40),
    p=st.sampled_from(["1/20", "1/10", "1/5", "1/3"]),
    seed=st.integers(0, 10**6),
    deg=st.integers(1, 6),
    delta=st.fractions(min_value=1, max_value=6),
    stride=st.integers(1, 3),
)
def test_popularity_matches_brute_force(n, p, seed, deg, delta, stride):
    g = gnp(n, p, seed)
    coll = centers_only(n, range(0, n, stride))
    res = detect_popular(g, coll, deg, delta)
    assert check_popular_oracle(g, coll, deg, delta, res.W).passed
    assert check_knowledge(g, coll, delta, deg, res.knowledge, res.W).passed


# ruling sets


def test_singleton_ruling_set(path10):
    assert ruling_set(path10, {4}, 3, 3).RS == {4}


def test_empty_ruling_set(path10):
    assert ruling_set(path10, set(), 3, 3).RS == frozenset()


def test_complete_graph_keeps_the_maximum_id(k16):
    res = ruling_set(k16, range(16), 2, 3)
    assert res.RS == {15}
    assert res.rounds == ruling_rounds(16, 2, 3) == 3 * 3 * 2


def test_path_ruling_set_properties(path10):
    res = ruling_set(path10, range(10), 2, 2)
    assert check_ruling(path10, range(10), res.RS, 2, 4).passed
    for w, r in res.dominators.items():
        assert bfs(path10, w)[r] <= 4


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 60),
    p=st.sampled_from(["1/20", "1/10", "1/4"]),
    seed=st.integers(0, 10**6),
    q=st.integers(1, 5),
    c=st.integers(1, 4),
    stride=st.integers(1, 3),
)
def test_ruling_set_contract(n, p, seed, q, c, stride):
    g = gnp(n, p, seed)
    W = set(range(0, n, stride))
    res = ruling_set(g, W, q, c)
    assert check_ruling(g, W, res.RS, q, c * q).passed
    assert res.rounds == ruling_rounds(n, q, c)


@pytest.mark.parametrize("g", [path(50), grid(7, 7), grid(3, 20)], ids=["path50", "grid7x7", "grid3x20"])
def test_ruling_set_on_adversarial_layouts(g):
    for q in (1, 2, 4):
        res = ruling_set(g, range(g.n), q, 3)
        assert check_ruling(g, range(g.n), res.RS, q, 3 * q).passed


# superclustering


def test_no_ruling_set_means_nothing_is_absorbed(k16):
    coll = ClusterCollection.singletons(16)
    res = supercluster(k16, coll, set(), set(), 1, Fraction(1, 3))
    assert len(res.collection) == 0 and res.U == coll.clusters and not res.edges_added


def test_complete_graph_forms_one_star(k16):
    res = supercluster(k16, ClusterCollection.singletons(16), range(16), {15}, 1, Fraction(1, 3))
    (cl,) = res.collection.clusters
    assert cl.center == 15 and cl.members == frozenset(range(16))
    assert res.edges_added == {(v, 15) for v in range(15)}
    assert res.U == ()
    assert res.rounds == 2 * 3 * 2


def test_far_apart_roots_do_not_absorb_each_other():
    # two triangles joined by a path much longer than the forest depth (6)
    edges = [(0, 1), (1, 2), (0, 2), (2, 3)]
    edges += [(v, v + 1) for v in range(3, 20)]
    edges += [(20, 21), (21, 22), (20, 22)]
    g = Graph(23, edges)
    coll = ClusterCollection.singletons(23)
    res = supercluster(g, coll, {0, 22}, {0, 22}, 1, Fraction(1, 3))
    by_center = res.collection.by_center()
    assert set(by_center) == {0, 22}
    assert by_center[0].members == frozenset(range(0, 8))
    assert by_center[22].members == frozenset(range(15, 23))


def test_supercluster_rejects_inconsistent_input(k16):
    with pytest.raises(ProtocolError):
        supercluster(k16, ClusterCollection.singletons(16), {1}, {2}, 1, Fraction(1, 3))


# interconnection


def test_empty_interconnection(c64):
    coll = ClusterCollection.singletons(64)
    pop = detect_popular(c64, coll, 3, 1)
    res = interconnect(c64, coll, (), pop.knowledge, 1, 3)
    assert res.edges_added == frozenset()
    assert res.trace.total_messages == 0


def test_cycle_interconnection_adds_every_edge(c64):
    coll = ClusterCollection.singletons(64)
    pop = detect_popular(c64, coll, 3, 1)
    res = interconnect(c64, coll, coll.clusters, pop.knowledge, 1, 3)
    assert res.edges_added == frozenset(c64.edges())


def test_path_interconnection_traces_one_shortest_path(path10):
    coll = ClusterCollection.from_mapping(0, {0: [0, 1, 2], 4: [3, 4, 5, 6, 7, 8, 9]})
    pop = detect_popular(path10, coll, 5, 4)
    assert pop.W == frozenset()
    res = interconnect(path10, coll, coll.clusters, pop.knowledge, 4, 5)
    assert res.edges_added == {(0, 1), (1, 2), (2, 3), (3, 4)}
    assert res.trace.total_messages == 8  # each direction crosses each path edge once


# whole construction


def test_edgeless_graph_gives_empty_spanner():
    g = Graph(5, [])
    H, trace = build_spanner(g, build_schedule(5, 4, 3, "exploratory", "1/2"))
    assert H == frozenset() and len(trace.phases) == 4


def test_complete_graph_golden(k16):
    H, trace = build_spanner(k16, build_schedule(16, 4, 3, "exploratory", "1/2"))
    assert H == {(v, 15) for v in range(15)}
    assert [len(p.collection) for p in trace.phases] == [16, 1, 0, 0]
    assert trace.phases[0].RS == {15}


def test_cycle_golden(c64):
    H, trace = build_spanner(c64, build_schedule(64, 4, 3, "exploratory", "1/2"))
    assert H == frozenset(c64.edges())
    assert trace.phases[0].rounds["popular"] == 4
    assert trace.phases[0].W == frozenset()


def test_construction_is_deterministic():
    g = gnp(96, "1/10", 5)
    s = build_schedule(96, 4, 3, "exploratory", "1/30")
    H1, t1 = build_spanner(g, s)
    H2, t2 = build_spanner(g, s, replay_check=True)
    assert H1 == H2 and t1.dumps(True) == t2.dumps(True)


def test_schedule_must_match_graph(k16):
    with pytest.raises(ValueError):
        build_spanner(k16, build_schedule(17, 4, 3, "exploratory", "1/2"))


def test_protocol_errors_carry_the_phase(k16, monkeypatch):
    def broken(*args, **kwargs):
        raise ProtocolError("trace-back lost its way")

    monkeypatch.setattr(construction, "interconnect", broken)
    with pytest.raises(ProtocolError, match="^phase 0: trace-back") as info:
        build_spanner(k16, build_schedule(16, 4, 3, "exploratory", "1/2"))
    assert info.value.phase == 0
    assert info.value.partial_trace.status.startswith("failed")


def test_full_trace_round_trips(k16):
    _, trace = build_spanner(k16, build_schedule(16, 4, 3, "exploratory", "1/2"))
    again = construction.ExecutionTrace.from_json(trace.to_json(verbose=True))
    assert again.dumps(True) == trace.dumps(True)
    with pytest.raises(ValueError):
        construction.ExecutionTrace.from_json(trace.to_json(verbose=False))
