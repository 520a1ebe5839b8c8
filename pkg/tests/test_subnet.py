import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkfraud.errors import UnknownNodeError, ValidationError
from linkfraud.graph_store import DirectedGraph, load_edges
from linkfraud.subnet import extract_boomerang, extract_egonet, write_view

import oracles

NODE = st.sampled_from([f"n{i}" for i in range(10)])


@st.composite
def graph_and_egos(draw):
    pairs = draw(st.lists(st.tuples(NODE, NODE), max_size=40))
    g = DirectedGraph({(u, w) for u, w in pairs if u != w}, [f"n{i}" for i in range(10)])
    e1 = draw(st.sets(NODE, min_size=1, max_size=3))
    e2 = draw(st.sets(NODE, min_size=1, max_size=3))
    return g, e1, e2


def test_star():
    v = extract_egonet(DirectedGraph([("a", "h"), ("b", "h"), ("c", "h")]), {"h"})
    assert v.n_nodes == 4 and v.n_edges == 3
    assert not [e for e in v.edges if "h" not in e]


def test_shared_follower_conjoins():
    v = extract_egonet(DirectedGraph([("a", "h1"), ("a", "h2")]), {"h1", "h2"})
    assert v.members == {"h1", "h2", "a"}
    assert v.n_edges == 2


def test_follower_follower_edge_kept():
    v = extract_egonet(DirectedGraph([("a", "h"), ("b", "h"), ("a", "b")]), {"h"})
    assert ("a", "b") in v.edges


def test_boomerang_one_step_forward():
    v = extract_boomerang(DirectedGraph([("a", "h"), ("a", "c")]), {"h"})
    assert v.members == {"h", "a", "c"}
    assert v.edges == {("a", "h"), ("a", "c")}
    assert v.roles["c"] == "friend"


def test_boomerang_degenerate_equals_egonet():
    g = DirectedGraph([("a", "h"), ("b", "h"), ("a", "b")])
    ego, boom = extract_egonet(g, {"h"}), extract_boomerang(g, {"h"})
    assert ego.roles == boom.roles and ego.edges == boom.edges


# Four-node fixture, roles worked out by hand:
#   a -> h1, b -> h1, a -> h2, a -> b, h2 -> b
# egos {h1}:     h1 ego; a, b followers; h2 reached only via a's out-link -> friend.
#                b is also a's friend but keeps the stronger follower role.
#                h2 -> b is not collected because friend nodes are terminal.
# egos {h1, h2}: h2 is an ego, a and b followers, every edge is induced.
FOUR = DirectedGraph([("a", "h1"), ("b", "h1"), ("a", "h2"), ("a", "b"), ("h2", "b")])


def test_role_precedence_single_ego():
    v = extract_boomerang(FOUR, {"h1"})
    assert v.roles == {"h1": "ego", "a": "follower", "b": "follower", "h2": "friend"}
    assert v.edges == {("a", "h1"), ("b", "h1"), ("a", "b"), ("a", "h2")}


def test_role_precedence_two_egos():
    v = extract_boomerang(FOUR, {"h1", "h2"})
    assert v.roles == {"h1": "ego", "h2": "ego", "a": "follower", "b": "follower"}
    assert v.edges == FOUR.edges


def test_unknown_ego():
    with pytest.raises(UnknownNodeError):
        extract_egonet(FOUR, {"zz"})
    with pytest.raises(UnknownNodeError):
        extract_boomerang(FOUR, {"h1", "zz"})
    with pytest.raises(ValidationError):
        extract_egonet(FOUR, set())


def test_direction_flag():
    g = DirectedGraph([("a", "h"), ("h", "b")])
    assert extract_egonet(g, {"h"}, "out").members == {"h", "b"}
    assert extract_egonet(g, {"h"}, "both").members == {"h", "a", "b"}
    with pytest.raises(ValueError):
        extract_egonet(g, {"h"}, "sideways")


def test_write_view(tmp_path):
    write_view(extract_boomerang(FOUR, {"h1"}), tmp_path)
    assert load_edges(tmp_path / "edges.csv").n_edges == 4
    lines = (tmp_path / "members.csv").read_text().splitlines()
    assert lines[0] == "node,role" and lines[1] == "h1,ego" and lines[-1] == "h2,friend"


def test_egonet_matches_brute_force_on_random_graphs():
    rnd = random.Random(11)
    for _ in range(150):
        n = rnd.randint(2, 30)
        nodes = [f"v{i}" for i in range(n)]
        p = rnd.random() * 0.3
        edges = {(u, w) for u in nodes for w in nodes if u != w and rnd.random() < p}
        egos = set(rnd.sample(nodes, rnd.randint(1, min(3, n))))
        g = DirectedGraph(edges, nodes)
        view = extract_egonet(g, egos)
        members, induced = oracles.egonet(nodes, edges, egos)
        assert view.members == members
        assert view.edges == induced


@given(graph_and_egos())
def test_egonet_union_property(case):
    g, e1, e2 = case
    a, b = extract_egonet(g, e1), extract_egonet(g, e2)
    both = extract_egonet(g, e1 | e2)
    assert a.members | b.members == both.members
    assert a.edges | b.edges <= both.edges


@given(graph_and_egos())
def test_boomerang_contains_egonet(case):
    g, egos, _ = case
    ego, boom = extract_egonet(g, egos), extract_boomerang(g, egos)
    assert ego.members <= boom.members
    assert ego.edges <= boom.edges
    assert boom.edges <= g.edges
    assert egos <= ego.with_role("ego")
