import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkfraud.errors import DataError, ParseError, UnknownNodeError, ValidationError
from linkfraud.graph_store import (
    ATTRIBUTE_HEADER,
    AccountAttributes,
    DirectedGraph,
    compare_snapshots,
    followers_of,
    friends_of,
    load_attributes,
    load_edges,
    load_labels,
    write_attributes,
    write_edges,
)

NODE = st.sampled_from([f"n{i}" for i in range(8)])


@st.composite
def graphs(draw):
    pairs = draw(st.lists(st.tuples(NODE, NODE), max_size=30))
    edges = {(u, w) for u, w in pairs if u != w}
    extra = draw(st.sets(NODE, max_size=3))
    stamps = draw(st.lists(st.integers(0, 10**9), min_size=len(edges), max_size=len(edges)))
    keep = draw(st.lists(st.booleans(), min_size=len(edges), max_size=len(edges)))
    obs = {e: t for e, t, k in zip(sorted(edges), stamps, keep) if k}
    return DirectedGraph(edges, extra, obs)


def _edges_file(tmp_path, text):
    p = tmp_path / "edges.csv"
    p.write_text(text, encoding="utf-8")
    return p


def _attr_file(tmp_path, rows):
    p = tmp_path / "attributes.csv"
    p.write_text(",".join(ATTRIBUTE_HEADER) + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")
    return p


ROW = "a,2012,true,false,{fav},10,5,0,100,false,en,false,UTC,{ver},hello"


def test_reciprocal_pair_loads(tmp_path):
    g = load_edges(_edges_file(tmp_path, "src,dst,observed_at\na,b,\nb,a,\n"))
    assert g.n_nodes == 2 and g.n_edges == 2


def test_self_loop_rejected_with_line(tmp_path):
    with pytest.raises(ValidationError, match="self-loop at line 2"):
        load_edges(_edges_file(tmp_path, "src,dst,observed_at\na,a,\n"))


def test_duplicate_rows_collapse(tmp_path):
    g = load_edges(_edges_file(tmp_path, "src,dst,observed_at\na,b,5\na,b,3\n"))
    assert g.n_edges == 1
    assert g.observed_at[("a", "b")] == 3


def test_two_column_header_accepted(tmp_path):
    assert load_edges(_edges_file(tmp_path, "src,dst\na,b\n")).edges == {("a", "b")}


@pytest.mark.parametrize(
    "text",
    ["", "from,to\na,b\n", "src,dst,observed_at\na,b,c,d\n", "src,dst,observed_at\na,b,xyz\n"],
)
def test_malformed_edges(tmp_path, text):
    with pytest.raises(ParseError):
        load_edges(_edges_file(tmp_path, text))


def test_malformed_row_reports_line(tmp_path):
    with pytest.raises(ParseError, match="line 3"):
        load_edges(_edges_file(tmp_path, "src,dst,observed_at\na,b,\nb,c,oops\n"))


def test_missing_edges_file(tmp_path):
    with pytest.raises(DataError):
        load_edges(tmp_path / "nope.csv")


def test_missing_attribute_cell(tmp_path):
    attrs = load_attributes(_attr_file(tmp_path, [ROW.format(fav="", ver="false")]))
    assert attrs["a"].favorites_count is None
    assert attrs["a"].followers_count == 10


def test_boolean_parsed(tmp_path):
    attrs = load_attributes(_attr_file(tmp_path, [ROW.format(fav=3, ver="true")]))
    assert attrs["a"].verified is True
    assert attrs["a"].default_profile is True and attrs["a"].geo_enabled is False


def test_duplicate_account(tmp_path):
    row = ROW.format(fav=1, ver="false")
    with pytest.raises(ValidationError, match="duplicate account"):
        load_attributes(_attr_file(tmp_path, [row, row]))


def test_unknown_attribute_column(tmp_path):
    p = tmp_path / "attributes.csv"
    p.write_text(",".join(ATTRIBUTE_HEADER + ["shoe_size"]) + "\n", encoding="utf-8")
    with pytest.raises(ParseError, match="unknown column"):
        load_attributes(p)


def test_negative_count_rejected(tmp_path):
    with pytest.raises(ValidationError):
        load_attributes(_attr_file(tmp_path, [ROW.format(fav=-1, ver="false")]))


def test_long_description_rejected():
    with pytest.raises(ValidationError):
        AccountAttributes("a", description="x" * 161)


def test_attribute_round_trip(tmp_path):
    attrs = load_attributes(_attr_file(tmp_path, [ROW.format(fav="", ver="true")]))
    out = tmp_path / "again.csv"
    write_attributes(attrs, out)
    assert load_attributes(out) == attrs


def test_labels(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("account_id,label\na,fraud\nb,genuine\n", encoding="utf-8")
    assert load_labels(p) == {"a": "fraud", "b": "genuine"}
    p.write_text("account_id,label\na,spam\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_labels(p)


def test_followers_examples():
    g = DirectedGraph([("a", "h"), ("b", "h")], ["z"])
    assert followers_of(g, "h") == {"a", "b"}
    assert followers_of(g, "z") == set()
    assert followers_of(DirectedGraph([("h", "a")]), "h") == set()
    with pytest.raises(UnknownNodeError):
        followers_of(g, "nobody")


def test_graph_rejects_self_loop():
    with pytest.raises(ValidationError):
        DirectedGraph([("a", "a")])


def test_snapshot_examples():
    t0 = {f"f{i}" for i in range(1060)}
    d = compare_snapshots(t0, t0 - {"f0"})
    assert (d.delivered, d.remaining, d.lost) == (1060, 1059, 1)
    assert compare_snapshots(t0, t0).lost == 0
    empty = compare_snapshots(set(), {"x"})
    assert (empty.delivered, empty.lost) == (0, 0)


@given(graphs())
def test_edges_round_trip(tmp_path_factory, g):
    p = tmp_path_factory.mktemp("rt") / "edges.csv"
    write_edges(g, p)
    back = load_edges(p)
    assert back == g
    assert back.observed_at == g.observed_at


@given(graphs())
def test_followers_and_friends_partition_incident_edges(g):
    for v in g.nodes:
        fol, fri = followers_of(g, v), friends_of(g, v)
        incident = {e for e in g.edges if v in e}
        assert {(u, v) for u in fol} | {(v, w) for w in fri} == incident
        assert len(fol) == g.in_degree(v)


@given(st.sets(NODE))
def test_snapshot_self_compare_loses_nothing(s):
    assert compare_snapshots(s, s).lost == 0
