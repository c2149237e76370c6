"""Disjoint-path counting and the resilience bounds that follow from it."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import NetworkGraph
from .netcode import EavesdropPattern


@dataclass(frozen=True)
class DisjointPaths:
    count: int
    paths: tuple[tuple[str, ...], ...]


def _split_network(graph: NetworkGraph, s: str, u: str):
    # node v becomes (v, "in") -> (v, "out") with capacity 1, except s and u
    arcs: list[list] = []  # [tail, head, cap, flow]
    adj: dict = {}

    def add(a, b, cap):
        arcs.append([a, b, cap, 0])
        arcs.append([b, a, 0, 0])
        adj.setdefault(a, []).append(len(arcs) - 2)
        adj.setdefault(b, []).append(len(arcs) - 1)

    big = len(graph.edges) + 1
    for v in graph.nodes:
        add((v, "in"), (v, "out"), big if v in (s, u) else 1)
    for e in graph.edges:
        add((e.tail, "out"), (e.head, "in"), 1)
    return arcs, adj


def node_disjoint_paths(graph: NetworkGraph, s: str, u: str) -> DisjointPaths:
    """Maximum set of internally node-disjoint directed ``s``-``u`` paths.

    Unit-capacity max-flow (shortest augmenting paths) on the node-split
    graph.  Arcs are scanned in edge insertion order, so the witness paths
    are deterministic.  A direct ``s -> u`` edge counts as one path.
    """
    graph._require(s)
    graph._require(u)
    if s == u:
        raise ValueError("source and user must differ")
    arcs, adj = _split_network(graph, s, u)
    src, dst = (s, "out"), (u, "in")
    while True:
        prev = {src: None}
        queue = deque([src])
        while queue and dst not in prev:
            x = queue.popleft()
            for i in adj.get(x, []):
                a = arcs[i]
                if a[2] - a[3] > 0 and a[1] not in prev:
                    prev[a[1]] = i
                    queue.append(a[1])
        if dst not in prev:
            break
        x = dst
        while prev[x] is not None:
            i = prev[x]
            arcs[i][3] += 1
            arcs[i ^ 1][3] -= 1
            x = arcs[i][0]

    # decompose the flow, consuming used edge arcs in insertion order
    used = {}
    for i in range(0, len(arcs), 2):
        a = arcs[i]
        if a[3] > 0 and a[0][1] == "out" and a[1][1] == "in":
            used.setdefault(a[0][0], []).append(i)
    paths = []
    while used.get(s):
        path = [s]
        v = s
        while v != u:
            i = used[v].pop(0)
            v = arcs[i][1][0]
            path.append(v)
        paths.append(tuple(path))
    return DisjointPaths(len(paths), tuple(paths))


def byzantine_bound(path_count: int) -> int | None:
    """Largest ``t`` with ``3t + 1 <= path_count``; ``None`` when there is no path."""
    if path_count < 0:
        raise ValueError("path count must be non-negative")
    if path_count == 0:
        return None
    return (path_count - 1) // 3


def secure_rate_bound(capacity: int, t: int) -> int:
    if capacity < 0 or t < 0:
        raise ValueError("capacity and t must be non-negative")
    return max(0, capacity - t)


def authenticity_feasible(
    paths: Iterable[Sequence[str]], patterns: Iterable[EavesdropPattern | Iterable[str]]
) -> tuple[dict[str, bool], bool]:
    """Per pattern: does some path avoid every tapped node internally?

    Patterns may be :class:`EavesdropPattern` objects or plain node sets
    (keyed by their position in that case).
    """
    inner = [set(p[1:-1]) for p in paths]
    out = {}
    for i, pat in enumerate(patterns):
        if isinstance(pat, EavesdropPattern):
            key, nodes = pat.id, set(pat.nodes)
        else:
            key, nodes = str(i), set(pat)
        out[key] = (not nodes) or any(not (mid & nodes) for mid in inner)
    return out, all(out.values())


@dataclass
class ResilienceReport:
    source: str
    user: str
    disjoint_path_count: int
    paths: list[list[str]]
    max_byzantine_t: int | None
    secure_rate_bound: int
    authenticity: dict[str, bool] = field(default_factory=dict)
    authenticity_feasible: bool = True

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "user": self.user,
            "disjoint_path_count": self.disjoint_path_count,
            "paths": self.paths,
            "max_byzantine_t": self.max_byzantine_t,
            "secure_rate_bound": self.secure_rate_bound,
            "authenticity": self.authenticity,
            "authenticity_feasible": self.authenticity_feasible,
        }


def resilience_report(
    graph: NetworkGraph, s: str, u: str, patterns: Sequence[EavesdropPattern] = (), t: int | None = None
) -> ResilienceReport:
    """Path count, Byzantine bound and authenticity check for one pair.

    The rate bound uses ``t`` when given, else the Byzantine bound itself.
    """
    dp = node_disjoint_paths(graph, s, u)
    tmax = byzantine_bound(dp.count)
    per, overall = authenticity_feasible(dp.paths, patterns)
    rate_t = t if t is not None else (tmax or 0)
    return ResilienceReport(
        s, u, dp.count, [list(p) for p in dp.paths], tmax, secure_rate_bound(dp.count, rate_t), per, overall
    )
