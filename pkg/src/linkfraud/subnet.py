"""Egonet and boomerang-network extraction around one or more egos."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import UnknownNodeError, ValidationError
from .graph_store import DirectedGraph, NodeId, write_edges

EGO, FOLLOWER, FRIEND = "ego", "follower", "friend"
_PRECEDENCE = {EGO: 0, FOLLOWER: 1, FRIEND: 2}
DIRECTIONS = ("in", "out", "both")


@dataclass(frozen=True)
class SubnetView:
    kind: str  # "egonet" or "boomerang"
    egos: frozenset
    roles: dict  # node -> ego | follower | friend
    edges: frozenset

    @property
    def members(self) -> frozenset:
        return frozenset(self.roles)

    def with_role(self, role: str) -> frozenset:
        return frozenset(v for v, r in self.roles.items() if r == role)

    @property
    def followers(self) -> frozenset:
        return self.with_role(FOLLOWER)

    @property
    def friends(self) -> frozenset:
        return self.with_role(FRIEND)

    @property
    def n_nodes(self) -> int:
        return len(self.roles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_graph(self) -> DirectedGraph:
        return DirectedGraph(self.edges, self.roles.keys())


def _assign(roles: dict, node, role):
    cur = roles.get(node)
    if cur is None or _PRECEDENCE[role] < _PRECEDENCE[cur]:
        roles[node] = role


def _check_egos(g: DirectedGraph, egos: Iterable[NodeId]) -> frozenset:
    egos = frozenset(egos)
    if not egos:
        raise ValidationError("at least one ego is required")
    for e in sorted(egos):
        if e not in g:
            raise UnknownNodeError(f"unknown ego {e!r}")
    return egos


def _ego_roles(g: DirectedGraph, egos: frozenset, direction: str) -> dict:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    roles: dict = {}
    for e in egos:
        roles[e] = EGO
    for e in egos:
        if direction in ("in", "both"):
            for u in g.in_neighbors(e):
                _assign(roles, u, FOLLOWER)
        if direction in ("out", "both"):
            for w in g.out_neighbors(e):
                _assign(roles, w, FRIEND)
    return roles


def _induced_edges(g: DirectedGraph, members) -> set:
    members = set(members)
    return {(u, w) for u in members for w in g.out_neighbors(u) if w in members}


def extract_egonet(g: DirectedGraph, egos: Iterable[NodeId], direction: str = "in") -> SubnetView:
    """Egos plus their neighbours (followers by default) and every edge among them.

    With several egos the per-ego egonets are merged, so shared followers
    conjoin them.
    """
    egos = _check_egos(g, egos)
    roles = _ego_roles(g, egos, direction)
    return SubnetView("egonet", egos, roles, frozenset(_induced_edges(g, roles)))


def extract_boomerang(g: DirectedGraph, egos: Iterable[NodeId], direction: str = "in") -> SubnetView:
    """Egonet plus every out-link of follower members.

    Nodes reached only through those out-links are tagged ``friend`` and are
    not expanded further.
    """
    ego = extract_egonet(g, egos, direction)
    roles = dict(ego.roles)
    edges = set(ego.edges)
    for f in ego.followers:
        for w in g.out_neighbors(f):
            _assign(roles, w, FRIEND)
            edges.add((f, w))
    return SubnetView("boomerang", ego.egos, roles, frozenset(edges))


def write_view(view: SubnetView, out_dir) -> None:
    """Write ``edges.csv`` and ``members.csv`` (node,role) into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_edges(view.to_graph(), out_dir / "edges.csv")
    with (out_dir / "members.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "role"])
        for v in sorted(view.roles, key=lambda v: (_PRECEDENCE[view.roles[v]], v)):
            w.writerow([v, view.roles[v]])
