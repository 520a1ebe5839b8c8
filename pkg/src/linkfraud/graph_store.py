"""Directed follow-graph, account attribute tables and snapshot comparison.

Edges are ordered pairs ``(src, dst)`` meaning *src follows dst*, so the
followers of ``v`` are its in-neighbours and its friends are its
out-neighbours.
"""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError, ParseError, UnknownNodeError, ValidationError

NodeId = str
Edge = tuple[str, str]

EDGE_HEADER = ["src", "dst", "observed_at"]

COUNT_FIELDS = (
    "favorites_count",
    "followers_count",
    "friends_count",
    "listed_count",
    "statuses_count",
)
BOOL_FIELDS = (
    "default_profile",
    "default_profile_image",
    "geo_enabled",
    "protected",
    "verified",
)
ATTRIBUTE_HEADER = [
    "account_id",
    "created_year",
    "default_profile",
    "default_profile_image",
    "favorites_count",
    "followers_count",
    "friends_count",
    "listed_count",
    "statuses_count",
    "geo_enabled",
    "lang",
    "protected",
    "utc_offset",
    "verified",
    "description",
]
LABELS = ("genuine", "fraud")
MAX_DESCRIPTION = 160


class DirectedGraph:
    """Immutable simple digraph with out/in adjacency.

    ``observed_at`` optionally maps an edge to the epoch second at which
    it was first seen.
    """

    __slots__ = ("_nodes", "_edges", "_out", "_in", "_observed_at")

    def __init__(
        self,
        edges: Iterable[Edge] = (),
        nodes: Iterable[NodeId] = (),
        observed_at: Mapping[Edge, int] | None = None,
    ):
        node_set = set(nodes)
        edge_set = set()
        for src, dst in edges:
            if src == dst:
                raise ValidationError(f"self-loop on node {src!r}")
            edge_set.add((src, dst))
            node_set.add(src)
            node_set.add(dst)
        for v in node_set:
            if not isinstance(v, str) or v == "":
                raise ValidationError(f"invalid node id {v!r}")
        out: dict[str, set] = {v: set() for v in node_set}
        inn: dict[str, set] = {v: set() for v in node_set}
        for src, dst in edge_set:
            out[src].add(dst)
            inn[dst].add(src)
        self._nodes = frozenset(node_set)
        self._edges = frozenset(edge_set)
        self._out = {v: frozenset(s) for v, s in out.items()}
        self._in = {v: frozenset(s) for v, s in inn.items()}
        obs = {}
        for e, ts in (observed_at or {}).items():
            if e not in edge_set:
                raise ValidationError(f"observed_at given for unknown edge {e!r}")
            obs[e] = int(ts)
        self._observed_at = obs

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    @property
    def edges(self) -> frozenset:
        return self._edges

    @property
    def observed_at(self) -> dict:
        return dict(self._observed_at)

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def __contains__(self, v) -> bool:
        return v in self._nodes

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._edges == other._edges
            and self._observed_at == other._observed_at
        )

    def __hash__(self):
        return hash((self._nodes, self._edges))

    def __repr__(self):
        return f"DirectedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    def _check(self, v):
        if v not in self._nodes:
            raise UnknownNodeError(f"unknown node {v!r}")

    def out_neighbors(self, v: NodeId) -> frozenset:
        self._check(v)
        return self._out[v]

    def in_neighbors(self, v: NodeId) -> frozenset:
        self._check(v)
        return self._in[v]

    def in_degree(self, v: NodeId) -> int:
        return len(self.in_neighbors(v))

    def out_degree(self, v: NodeId) -> int:
        return len(self.out_neighbors(v))

    def has_edge(self, src: NodeId, dst: NodeId) -> bool:
        return (src, dst) in self._edges

    def subgraph(self, nodes: Iterable[NodeId]) -> "DirectedGraph":
        """Induced subgraph on ``nodes``."""
        keep = set(nodes)
        for v in keep:
            self._check(v)
        edges = [(u, w) for u in keep for w in self._out[u] if w in keep]
        obs = {e: self._observed_at[e] for e in edges if e in self._observed_at}
        return DirectedGraph(edges, keep, obs)


def followers_of(g: DirectedGraph, v: NodeId) -> set:
    return set(g.in_neighbors(v))


def friends_of(g: DirectedGraph, v: NodeId) -> set:
    return set(g.out_neighbors(v))


def load_edges(path) -> DirectedGraph:
    """Read ``src,dst[,observed_at]`` rows.

    Duplicate rows collapse to one edge (the earliest ``observed_at`` wins).
    A row with an empty ``dst`` declares an isolated node.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"edges file not found: {path}")
    edges: dict[Edge, int | None] = {}
    nodes: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty edges file", line=1)
        header = [h.strip() for h in header]
        if header not in (EDGE_HEADER, EDGE_HEADER[:2]):
            raise ParseError(f"bad edges header {header!r}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2 or len(row) > 3:
                raise ParseError(f"expected 2 or 3 fields, got {len(row)}", line=lineno)
            src, dst = row[0].strip(), row[1].strip()
            ts_raw = row[2].strip() if len(row) == 3 else ""
            if not src:
                raise ParseError("empty src", line=lineno)
            if not dst:
                if ts_raw:
                    raise ParseError("observed_at on a node-only row", line=lineno)
                nodes.add(src)
                continue
            if src == dst:
                raise ValidationError(f"self-loop at line {lineno}: {src},{dst}")
            ts = None
            if ts_raw:
                try:
                    ts = int(ts_raw)
                except ValueError:
                    raise ParseError(f"observed_at {ts_raw!r} is not an integer", line=lineno) from None
            key = (src, dst)
            if key in edges:
                prev = edges[key]
                if ts is not None and (prev is None or ts < prev):
                    edges[key] = ts
            else:
                edges[key] = ts
    observed = {e: ts for e, ts in edges.items() if ts is not None}
    return DirectedGraph(edges.keys(), nodes, observed)


def write_edges(g: DirectedGraph, path) -> None:
    obs = g.observed_at
    touched = set()
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        for src, dst in sorted(g.edges):
            ts = obs.get((src, dst))
            w.writerow([src, dst, "" if ts is None else ts])
            touched.add(src)
            touched.add(dst)
        for v in sorted(g.nodes - touched):
            w.writerow([v, "", ""])


@dataclass(frozen=True)
class AccountAttributes:
    """The thirteen profile attributes plus description. ``None`` = missing."""

    account: NodeId
    created_year: int | None = None
    default_profile: bool | None = None
    default_profile_image: bool | None = None
    favorites_count: int | None = None
    followers_count: int | None = None
    friends_count: int | None = None
    listed_count: int | None = None
    statuses_count: int | None = None
    geo_enabled: bool | None = None
    lang: str | None = None
    protected: bool | None = None
    utc_offset: str | None = None
    verified: bool | None = None
    description: str | None = None

    def __post_init__(self):
        if not self.account:
            raise ValidationError("empty account id")
        for f in COUNT_FIELDS:
            v = getattr(self, f)
            if v is not None and v < 0:
                raise ValidationError(f"{self.account}: {f} must be >= 0, got {v}")
        if self.created_year is not None and self.created_year < 2006:
            raise ValidationError(f"{self.account}: created_year {self.created_year} < 2006")
        if self.description is not None and len(self.description) > MAX_DESCRIPTION:
            raise ValidationError(
                f"{self.account}: description longer than {MAX_DESCRIPTION} characters"
            )

    def to_row(self) -> dict:
        row = {}
        for f in ATTRIBUTE_HEADER:
            v = getattr(self, "account" if f == "account_id" else f)
            if v is None:
                row[f] = ""
            elif isinstance(v, bool):
                row[f] = "true" if v else "false"
            else:
                row[f] = str(v)
        return row


def _parse_bool(raw: str, field: str, lineno: int) -> bool:
    low = raw.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ParseError(f"{field}: expected true/false, got {raw!r}", line=lineno)


def _parse_int(raw: str, field: str, lineno: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{field}: expected integer, got {raw!r}", line=lineno) from None


def load_attributes(path) -> dict[NodeId, AccountAttributes]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"attributes file not found: {path}")
    out: dict[str, AccountAttributes] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        unknown = [h for h in header if h not in ATTRIBUTE_HEADER]
        if unknown:
            raise ParseError(f"unknown column(s) {unknown}", line=1)
        missing = [h for h in ATTRIBUTE_HEADER if h not in header]
        if missing:
            raise ParseError(f"missing column(s) {missing}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if None in row:
                raise ParseError("too many fields", line=lineno)
            vals = {k.strip(): (v if v is not None else "") for k, v in row.items()}
            acc = vals["account_id"].strip()
            if not acc:
                raise ParseError("empty account_id", line=lineno)
            if acc in out:
                raise ValidationError(f"duplicate account {acc!r} at line {lineno}")
            kwargs: dict = {"account": acc}
            for f in ATTRIBUTE_HEADER[1:]:
                raw = vals[f]
                if f != "description":
                    raw = raw.strip()
                if raw == "":
                    kwargs[f] = None
                elif f in BOOL_FIELDS:
                    kwargs[f] = _parse_bool(raw, f, lineno)
                elif f in COUNT_FIELDS or f == "created_year":
                    kwargs[f] = _parse_int(raw, f, lineno)
                else:
                    kwargs[f] = raw
            try:
                out[acc] = AccountAttributes(**kwargs)
            except ValidationError as exc:
                raise ValidationError(f"{exc} (line {lineno})") from None
    return out


def write_attributes(attrs: Mapping[NodeId, AccountAttributes], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=ATTRIBUTE_HEADER, lineterminator="\n")
        w.writeheader()
        for acc in sorted(attrs):
            w.writerow(attrs[acc].to_row())


def load_labels(path) -> dict[NodeId, str]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"labels file not found: {path}")
    out = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if [h.strip() for h in (reader.fieldnames or [])] != ["account_id", "label"]:
            raise ParseError("labels header must be account_id,label", line=1)
        for lineno, row in enumerate(reader, start=2):
            acc, lab = row["account_id"].strip(), (row["label"] or "").strip()
            if lab not in LABELS:
                raise ParseError(f"label must be one of {LABELS}, got {lab!r}", line=lineno)
            if acc in out:
                raise ValidationError(f"duplicate account {acc!r} at line {lineno}")
            out[acc] = lab
    return out


def write_labels(labels: Mapping[NodeId, str], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "label"])
        for acc in sorted(labels):
            w.writerow([acc, labels[acc]])


@dataclass(frozen=True)
class SnapshotDelta:
    delivered: int
    remaining: int
    lost: int

    def asdict(self):
        return dataclasses.asdict(self)


def compare_snapshots(t0: Iterable[NodeId], t1: Iterable[NodeId]) -> SnapshotDelta:
    """Followers delivered at ``t0`` versus those present at ``t1``.

    ``remaining`` counts everyone present at ``t1``, new arrivals included.
    """
    a, b = set(t0), set(t1)
    return SnapshotDelta(delivered=len(a), remaining=len(b), lost=len(a - b))
