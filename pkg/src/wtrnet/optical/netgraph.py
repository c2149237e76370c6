"""Abstract a physical topology into a network-coding graph.

Every emitter/receiver pair that can run QKD within the loss budget is a
private link.  For each requested (source emitter, user emitter) pairing we
pick a set of internally node-disjoint link paths and orient them from the
source to the user; receivers, and any emitters relaying on the way, become
intermediate (weakly trusted) nodes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..graph import NetworkGraph, build_graph
from .topology import OpticalTopology, UnknownEmitter, reachable_receivers

DEFAULT_MAX_LINKS = 4
DEFAULT_MAX_PATHS = 2
MIN_PATHS = 2


class InsufficientPaths(RuntimeError):
    pass


@dataclass(frozen=True)
class NetcodePlanGraph:
    graph: NetworkGraph
    pairings: tuple[tuple[str, str], ...]
    paths: dict[tuple[str, str], list[list[str]]]
    link_losses: dict[str, tuple[float, float]] = field(default_factory=dict)
    insufficient: tuple[tuple[str, str], ...] = ()

    @property
    def roles(self) -> dict[str, str]:
        return dict(self.graph.roles)


def qkd_links(topo: OpticalTopology, loss_budget_db: float) -> dict[frozenset, tuple[float, float]]:
    """Undirected emitter-receiver links usable within the budget."""
    links = {}
    for tx in topo.emitters:
        for rx, (wl, db) in reachable_receivers(topo, tx, loss_budget_db).items():
            links[frozenset((tx, rx))] = (wl, db)
    return links


def _simple_paths(adj: dict[str, list[str]], s: str, u: str, max_links: int) -> list[list[str]]:
    out: list[list[str]] = []

    def extend(path: list[str]) -> None:
        last = path[-1]
        if last == u:
            out.append(list(path))
            return
        if len(path) - 1 == max_links:
            return
        for nxt in adj.get(last, []):
            if nxt not in path:
                path.append(nxt)
                extend(path)
                path.pop()

    extend([s])
    return out


def disjoint_link_paths(
    links, s: str, u: str, max_links: int = DEFAULT_MAX_LINKS, max_paths: int = DEFAULT_MAX_PATHS
) -> list[list[str]]:
    """Largest set (up to ``max_paths``) of internally disjoint paths, fewest total links first."""
    adj: dict[str, set[str]] = {}
    for pair in links:
        a, b = sorted(pair)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    ordered = {k: sorted(v) for k, v in adj.items()}
    candidates = sorted(_simple_paths(ordered, s, u, max_links), key=lambda p: (len(p), p))
    for k in range(min(max_paths, len(candidates)), 0, -1):
        best = None
        for combo in itertools.combinations(candidates, k):
            inner = [set(p[1:-1]) for p in combo]
            if any(a & b for a, b in itertools.combinations(inner, 2)):
                continue
            key = (sum(len(p) for p in combo), combo)
            if best is None or key < best:
                best = key
        if best is not None:
            return [list(p) for p in best[1]]
    return []


def to_netcode_graph(
    topo: OpticalTopology,
    pairing: list[tuple[str, str]],
    loss_budget_db: float,
    max_links: int = DEFAULT_MAX_LINKS,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> NetcodePlanGraph:
    """Build the coding graph for the requested pairings.

    Pairings with fewer than two disjoint paths are listed in
    ``insufficient``; their partial paths are still included.
    """
    for s, u in pairing:
        for tx in (s, u):
            if tx not in topo.emitters:
                raise UnknownEmitter(f"unknown emitter {tx!r}")
        if s == u:
            raise ValueError(f"pairing ({s}, {u}) needs two distinct emitters")
    links = qkd_links(topo, loss_budget_db)

    roles: dict[str, str] = {}
    rank = {"source": 0, "user": 1, "intermediate": 2}

    def assign(node: str, role: str) -> None:
        if node not in roles or rank[role] < rank[roles[node]]:
            roles[node] = role

    edges: list[tuple[str, str, str]] = []
    seen: set[str] = set()
    chosen: dict[tuple[str, str], list[list[str]]] = {}
    losses: dict[str, tuple[float, float]] = {}
    short: list[tuple[str, str]] = []
    for s, u in pairing:
        assign(s, "source")
        assign(u, "user")
        paths = disjoint_link_paths(links, s, u, max_links, max_paths)
        chosen[(s, u)] = paths
        if len(paths) < MIN_PATHS:
            short.append((s, u))
        for p in paths:
            for v in p[1:-1]:
                assign(v, "intermediate")
            for a, b in zip(p, p[1:]):
                eid = f"{a}>{b}"
                if eid not in seen:
                    seen.add(eid)
                    edges.append((eid, a, b))
                    losses[eid] = links[frozenset((a, b))]
    order = list(dict.fromkeys([n for s, u in pairing for n in (s, u)] + [v for _, a, b in edges for v in (a, b)]))
    graph = build_graph([(n, roles[n]) for n in order], edges)
    return NetcodePlanGraph(graph, tuple(map(tuple, pairing)), chosen, losses, tuple(short))
