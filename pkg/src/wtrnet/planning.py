"""End-to-end planning: topology -> coding graph -> searched code -> resilience."""

from __future__ import annotations

from dataclasses import dataclass

from .io import NetworkSpec, Plan
from .netcode import (
    DEFAULT_SEARCH_CAP,
    AdmissibilityReport,
    EavesdropPattern,
    LinearNetworkCode,
    Source,
    SourceSpec,
    UserSpec,
    check_admissible,
    search_code,
)
from .optical.netgraph import (
    DEFAULT_MAX_LINKS,
    DEFAULT_MAX_PATHS,
    MIN_PATHS,
    InsufficientPaths,
    NetcodePlanGraph,
    to_netcode_graph,
)
from .optical.topology import OpticalTopology
from .resilience import ResilienceReport, resilience_report


class NoCodeFound(RuntimeError):
    pass


@dataclass
class PlanResult:
    netgraph: NetcodePlanGraph
    network: NetworkSpec
    code: LinearNetworkCode
    admissibility: AdmissibilityReport
    resilience: list[ResilienceReport]

    @property
    def plan(self) -> Plan:
        meta = {
            "pairings": [list(p) for p in self.netgraph.pairings],
            "link_losses_db": {e: v[1] for e, v in self.netgraph.link_losses.items()},
            "link_wavelengths_nm": {e: v[0] for e, v in self.netgraph.link_losses.items()},
        }
        return Plan(self.network, self.code, meta)

    def to_dict(self) -> dict:
        return {
            "pairings": [list(p) for p in self.netgraph.pairings],
            "paths": {f"{s}->{u}": p for (s, u), p in self.netgraph.paths.items()},
            "graph": {
                "nodes": {n: self.network.graph.roles[n] for n in self.network.graph.nodes},
                "edges": self.network.graph.edge_ids,
            },
            "code": {e: {k: v for k, v in c.items() if v} for e, c in self.code.coefficients.items()},
            "admissibility": self.admissibility.to_dict(),
            "resilience": [r.to_dict() for r in self.resilience],
        }


def coding_requirements(ng: NetcodePlanGraph, q: int) -> NetworkSpec:
    """Messages, keys, users and single-node patterns for the planned pairings.

    Pairing ``i`` sends message ``m`` (``m{i}`` when there are several) padded
    with one key per extra path.  Every repeater on a pairing's paths is a
    separate eavesdropping pattern targeting that pairing's message.
    """
    multi = len(ng.pairings) > 1
    by_source: dict[str, tuple[list[str], list[str]]] = {}
    users = []
    watchers: dict[str, list[str]] = {}
    for i, (s, u) in enumerate(ng.pairings, start=1):
        m = f"m{i}" if multi else "m"
        n_paths = len(ng.paths[(s, u)])
        keys = [f"k{i}_{j}" if multi else f"k{j}" for j in range(1, n_paths)]
        msgs, ks = by_source.setdefault(s, ([], []))
        msgs.append(m)
        ks.extend(keys)
        users.append(UserSpec(u, (m,)))
        for p in ng.paths[(s, u)]:
            for v in p[1:-1]:
                watchers.setdefault(v, [])
                if m not in watchers[v]:
                    watchers[v].append(m)
    sources = SourceSpec(q, tuple(Source(n, tuple(ms), tuple(ks)) for n, (ms, ks) in by_source.items()))
    patterns = tuple(EavesdropPattern(f"tap-{v}", (v,), tuple(ms)) for v, ms in watchers.items())
    return NetworkSpec(ng.graph, sources, tuple(users), patterns)


def plan_network(
    topo: OpticalTopology,
    pairing: list[tuple[str, str]],
    loss_budget_db: float,
    q: int = 3,
    max_links: int = DEFAULT_MAX_LINKS,
    max_paths: int = DEFAULT_MAX_PATHS,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> PlanResult:
    """Run the planning pipeline; raises :class:`InsufficientPaths` or :class:`NoCodeFound`."""
    ng = to_netcode_graph(topo, pairing, loss_budget_db, max_links=max_links, max_paths=max_paths)
    if ng.insufficient:
        detail = ", ".join(f"{s}->{u} has {len(ng.paths[(s, u)])}" for s, u in ng.insufficient)
        raise InsufficientPaths(
            f"need {MIN_PATHS} node-disjoint repeater paths within {loss_budget_db:g} dB: {detail}"
        )
    net = coding_requirements(ng, q)
    code = search_code(net.graph, net.sources, net.users, net.patterns, cap=search_cap)
    if code is None:
        raise NoCodeFound(f"no admissible linear code over GF({q}) for this graph")
    report = check_admissible(code, net.users, net.patterns)
    res = [resilience_report(net.graph, s, u, net.patterns) for s, u in ng.pairings]
    return PlanResult(ng, net, code, report, res)
