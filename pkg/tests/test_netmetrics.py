import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkfraud import netmetrics as nm
from linkfraud.errors import EstimateUndefinedError, UndefinedMetricError
from linkfraud.graph_store import DirectedGraph
from linkfraud.subnet import extract_boomerang

import oracles

NODE = st.sampled_from([f"n{i}" for i in range(9)])


@st.composite
def graphs(draw):
    pairs = draw(st.lists(st.tuples(NODE, NODE), max_size=40))
    return DirectedGraph({(u, w) for u, w in pairs if u != w}, [f"n{i}" for i in range(9)])


def complete(n):
    nodes = [f"k{i}" for i in range(n)]
    return DirectedGraph([(u, w) for u in nodes for w in nodes if u != w])


def test_density_examples():
    assert nm.density(complete(5)) == 1.0
    assert nm.density(DirectedGraph([], ["a", "b", "c"])) == 0.0
    nodes = [f"v{i}" for i in range(1066)]
    edges = [(nodes[i], nodes[(i + k) % 1066]) for k in (1, 2, 3) for i in range(1066)][:2289]
    assert nm.density(DirectedGraph(edges, nodes)) == pytest.approx(0.00202, abs=5e-6)
    with pytest.raises(UndefinedMetricError):
        nm.density(DirectedGraph([], ["a"]))


def test_bipartite_examples():
    assert nm.bipartite_density(12, 3, 4) == 1.0
    assert nm.bipartite_density(0, 3, 4) == 0.0
    with pytest.raises(UndefinedMetricError):
        nm.bipartite_density(0, 0, 4)
    with pytest.raises(ValueError):
        nm.bipartite_density(13, 3, 4)


def test_boomerang_bipartite_complete():
    followers, friends = ["a", "b", "c"], ["x", "y", "z", "w"]
    edges = [(f, "h") for f in followers] + [(f, w) for f in followers for w in friends]
    view = extract_boomerang(DirectedGraph(edges), {"h"})
    assert nm.boomerang_bipartite_density(view) == 1.0
    assert nm.metric_report(view).bipartite_density == 1.0


def test_transitivity_examples():
    assert nm.transitivity(DirectedGraph([("a", "b"), ("b", "c"), ("c", "a")])) == 1.0
    assert nm.transitivity(DirectedGraph([("a", "b"), ("b", "c")])) == 0.0
    with pytest.raises(UndefinedMetricError):
        nm.transitivity(DirectedGraph([("a", "b")]))


def test_transitivity_random_n25_matches_triples():
    rnd = random.Random(25)
    nodes = [f"v{i}" for i in range(25)]
    edges = {(u, w) for u in nodes for w in nodes if u != w and rnd.random() < 0.15}
    assert nm.transitivity(DirectedGraph(edges, nodes)) == float(oracles.transitivity(nodes, edges))


def test_reciprocity_examples():
    assert nm.reciprocity(DirectedGraph([("a", "b"), ("b", "a")])) == 1.0
    assert nm.reciprocity(DirectedGraph([("a", "b")])) == 0.0
    assert nm.reciprocity(DirectedGraph([("a", "b"), ("b", "a"), ("a", "c")])) == pytest.approx(2 / 3)
    with pytest.raises(UndefinedMetricError):
        nm.reciprocity(DirectedGraph([], ["a", "b"]))


def test_overlap_examples():
    assert nm.overlap_coefficient({1, 2}, {1, 2, 3}) == 1.0
    assert nm.overlap_coefficient({1}, {2}) == 0.0
    with pytest.raises(UndefinedMetricError):
        nm.overlap_coefficient(set(), {1})


def test_mse_examples():
    a = set(range(100))
    assert nm.mse_estimate(a, a) == 100
    assert nm.mse_estimate(set(range(10)), set(range(8, 18))) == 50
    with pytest.raises(EstimateUndefinedError):
        nm.mse_estimate({1}, {2})


def test_mse_rounds_half_up():
    # 3 * 3 / 2 = 4.5 -> 5
    assert nm.mse_estimate({1, 2, 3}, {1, 2, 4}) == 5


def test_mse_low_reuse_pair():
    # 1360 and 1354 followers sharing 33 accounts: overlap 33/1354 = .024
    a = set(range(1360))
    b = set(range(1360 - 33, 1360 - 33 + 1354))
    assert nm.overlap_coefficient(a, b) == pytest.approx(0.024, abs=5e-4)
    assert nm.mse_estimate(a, b) == pytest.approx(55719, rel=0.02)


def test_metric_report_marks_undefined():
    rep = nm.metric_report(DirectedGraph([], ["a"]))
    assert rep.density is None and rep.transitivity is None and rep.reciprocity is None
    assert rep.asdict()["n_nodes"] == 1


def _relabel(g, perm):
    return DirectedGraph({(perm[u], perm[w]) for u, w in g.edges}, {perm[v] for v in g.nodes})


@given(graphs(), st.randoms(use_true_random=False))
def test_metrics_in_unit_interval_and_label_free(g, rnd):
    names = sorted(g.nodes)
    shuffled = names[:]
    rnd.shuffle(shuffled)
    h = _relabel(g, dict(zip(names, shuffled)))
    a, b = nm.metric_report(g), nm.metric_report(h)
    assert a == b
    for v in (a.density, a.transitivity, a.reciprocity):
        assert v is None or 0.0 <= v <= 1.0


@given(graphs())
def test_metrics_match_oracle(g):
    nodes, edges = g.nodes, g.edges
    assert nm.density(g) == float(oracles.density(nodes, edges))
    t = oracles.transitivity(nodes, edges)
    assert nm.metric_report(g).transitivity == (None if t is None else float(t))
    r = oracles.reciprocity(edges)
    assert nm.metric_report(g).reciprocity == (None if r is None else float(r))


@given(st.sets(st.integers(0, 30), min_size=1), st.sets(st.integers(0, 30), min_size=1))
def test_mse_at_least_largest_sample(a, b):
    if a & b:
        assert nm.mse_estimate(a, b) >= max(len(a), len(b))
        assert nm.mse_estimate(a, b) == oracles.mse(a, b)
    assert 0.0 <= nm.overlap_coefficient(a, b) <= 1.0


def test_complete_graph_transitivity_equals_density():
    for n in (3, 4, 6):
        assert nm.transitivity(complete(n)) == nm.density(complete(n)) == 1.0
