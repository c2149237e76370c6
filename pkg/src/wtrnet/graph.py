"""Directed acyclic multigraph shared by the coding and resilience analyses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

ROLES = ("source", "user", "intermediate")


class GraphError(ValueError):
    pass


class NotAcyclic(GraphError):
    pass


class UnknownNode(GraphError, KeyError):
    def __str__(self):
        return GraphError.__str__(self)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class NetworkGraph:
    """Nodes with role tags and an ordered list of unit-capacity edges.

    Build instances with :func:`build_graph`, which validates the edge
    endpoints and caches a deterministic topological order.
    """

    nodes: tuple[str, ...]
    roles: dict[str, str]
    edges: tuple[Edge, ...]
    order: tuple[str, ...] = field(default=(), compare=False)

    @property
    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edges]

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(f"unknown edge {edge_id!r}")

    def in_edges(self, node: str) -> list[Edge]:
        self._require(node)
        return [e for e in self.edges if e.head == node]

    def out_edges(self, node: str) -> list[Edge]:
        self._require(node)
        return [e for e in self.edges if e.tail == node]

    def nodes_with_role(self, role: str) -> list[str]:
        return [n for n in self.nodes if self.roles[n] == role]

    def edges_in_topological_order(self) -> list[Edge]:
        rank = {n: i for i, n in enumerate(self.order)}
        # stable sort keeps insertion order among edges leaving the same node
        return sorted(self.edges, key=lambda e: rank[e.tail])

    def _require(self, node: str) -> None:
        if node not in self.roles:
            raise UnknownNode(f"unknown node {node!r}")


def _topological_order(nodes: list[str], edges: list[Edge]) -> list[str]:
    # Kahn's algorithm; the ready set is scanned in insertion order.
    indeg = {n: 0 for n in nodes}
    for e in edges:
        indeg[e.head] += 1
    done: list[str] = []
    placed: set[str] = set()
    while len(done) < len(nodes):
        nxt = next((n for n in nodes if n not in placed and indeg[n] == 0), None)
        if nxt is None:
            stuck = [n for n in nodes if n not in placed]
            raise NotAcyclic(f"cycle among nodes {stuck}")
        done.append(nxt)
        placed.add(nxt)
        for e in edges:
            if e.tail == nxt:
                indeg[e.head] -= 1
    return done


def build_graph(nodes: Iterable, edges: Iterable) -> NetworkGraph:
    """Validate and freeze a multigraph.

    ``nodes`` holds ids or ``(id, role)`` pairs (role defaults to
    ``intermediate``); ``edges`` holds :class:`Edge` objects or
    ``(tail, head)`` / ``(id, tail, head)`` tuples.  Edge ids default to
    ``"tail>head"`` with a ``#n`` suffix for parallel copies.
    """
    ids: list[str] = []
    roles: dict[str, str] = {}
    for n in nodes:
        nid, role = (n, "intermediate") if isinstance(n, str) else (n[0], n[1])
        if role not in ROLES:
            raise GraphError(f"node {nid!r}: unknown role {role!r}")
        if nid in roles:
            raise GraphError(f"duplicate node id {nid!r}")
        ids.append(nid)
        roles[nid] = role

    built: list[Edge] = []
    seen: set[str] = set()
    for e in edges:
        if isinstance(e, Edge):
            eid, tail, head = e.id, e.tail, e.head
        elif len(e) == 2:
            tail, head = e
            eid = f"{tail}>{head}"
            k = 2
            while eid in seen:
                eid = f"{tail}>{head}#{k}"
                k += 1
        else:
            eid, tail, head = e
        for end in (tail, head):
            if end not in roles:
                raise UnknownNode(f"edge {eid!r} references unknown node {end!r}")
        if eid in seen:
            raise GraphError(f"duplicate edge id {eid!r}")
        if tail == head:
            raise NotAcyclic(f"self-loop on {tail!r}")
        seen.add(eid)
        built.append(Edge(eid, tail, head))

    order = _topological_order(ids, built)
    return NetworkGraph(tuple(ids), roles, tuple(built), tuple(order))


def adjacency(graph: NetworkGraph, node: str) -> set[str]:
    """Ids of all edges having ``node`` as tail or head."""
    graph._require(node)
    return {e.id for e in graph.edges if node in (e.tail, e.head)}
