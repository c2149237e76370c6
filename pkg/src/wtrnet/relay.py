"""Key relay simulation: hop-by-hop trusted repeaters versus weakly trusted coding.

Messages are symbols of GF(q).  A trusted chain pads the message with a
fresh QKD key on every link, so each repeater decrypts it.  A weakly trusted
exchange runs a linear network code; no single tapped pattern learns more
than the code allows.  Leakage is audited exactly with the rank machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .netcode import (
    EavesdropPattern,
    LinearNetworkCode,
    UserSpec,
    check_admissible,
    decoding_matrix,
    rank_entropy,
    verdict,
)
from .qkd import QkdSystemParams, key_rate_per_second


class NotAdmissible(RuntimeError):
    pass


class MissingRate(KeyError):
    pass


@dataclass(frozen=True)
class AuditEntry:
    pattern: str
    nodes: tuple[str, ...]
    targets: tuple[str, ...]
    prior: float
    posterior: float
    verdict: str


@dataclass
class LeakageAudit:
    entries: list[AuditEntry] = field(default_factory=list)

    def by_pattern(self) -> dict[str, AuditEntry]:
        return {e.pattern: e for e in self.entries}

    def to_dict(self) -> list[dict]:
        return [
            {
                "pattern": e.pattern,
                "nodes": list(e.nodes),
                "targets": list(e.targets),
                "prior": e.prior,
                "posterior": e.posterior,
                "verdict": e.verdict,
            }
            for e in self.entries
        ]


@dataclass
class RelaySession:
    mode: str
    q: int
    seed: int | None
    message: dict[str, int]
    keys: dict[str, int]
    transmissions: dict[str, int]
    views: dict[str, dict[str, int]]
    delivered: dict[str, dict[str, int]]
    audit: LeakageAudit

    @property
    def correct(self) -> bool:
        return all(v == self.message[k] for got in self.delivered.values() for k, v in got.items())

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "field_q": self.q,
            "seed": self.seed,
            "message": self.message,
            "keys": self.keys,
            "transmissions": self.transmissions,
            "views": self.views,
            "delivered": self.delivered,
            "audit": self.audit.to_dict(),
        }

    def transcript(self) -> str:
        """Plain-text transcript: edge symbols, node views, audit table."""
        lines = [f"mode {self.mode}  q={self.q}  seed={self.seed}", "", "[transmissions]"]
        lines += [f"{e}\t{v}" for e, v in self.transmissions.items()]
        lines += ["", "[views]"]
        for node, view in self.views.items():
            lines.append(f"{node}\t" + " ".join(f"{k}={v}" for k, v in view.items()))
        lines += ["", "[delivered]"]
        for node, got in self.delivered.items():
            lines.append(f"{node}\t" + " ".join(f"{k}={v}" for k, v in got.items()))
        lines += ["", "[audit]", "pattern\tnodes\ttargets\tprior\tposterior\tverdict"]
        for e in self.audit.entries:
            lines.append(
                f"{e.pattern}\t{','.join(e.nodes)}\t{','.join(e.targets)}\t{e.prior:g}\t{e.posterior:g}\t{e.verdict}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


# -- trusted chain ---------------------------------------------------------------


def simulate_trusted_chain(nodes: Sequence[str], message: int, seed: int | None = None, q: int = 3) -> RelaySession:
    """Relay ``message`` hop by hop along ``nodes`` with a fresh pad per link.

    Link ``i`` joins ``nodes[i]`` and ``nodes[i+1]``; its key is ``r{i+1}``
    and its public symbol is ``m + r{i+1}``.  Each repeater knows the keys
    of both of its links, so it recovers ``m``.
    """
    nodes = list(nodes)
    if len(nodes) < 2:
        raise ValueError("a chain needs at least one link")
    if len(set(nodes)) != len(nodes):
        raise ValueError("chain nodes must be distinct")
    m = int(message) % q
    n = len(nodes) - 1
    draws = _rng(seed).integers(0, q, size=n)
    keys = {f"r{i + 1}": int(draws[i]) for i in range(n)}
    links = [f"{nodes[i]}>{nodes[i + 1]}" for i in range(n)]
    sent = {links[i]: (m + keys[f"r{i + 1}"]) % q for i in range(n)}

    # extended vector (m, r1..rn); rows are the linear forms a node knows
    d = n + 1

    def key_row(i):
        row = np.zeros(d, dtype=np.int64)
        row[i + 1] = 1
        return row

    def link_row(i):
        row = key_row(i)
        row[0] = 1
        return row

    views: dict[str, dict[str, int]] = {}
    audit = LeakageAudit()
    target = np.eye(1, d, 0, dtype=np.int64)
    for j in range(1, n):
        node = nodes[j]
        views[node] = {
            f"r{j}": keys[f"r{j}"],
            f"r{j + 1}": keys[f"r{j + 1}"],
            links[j - 1]: sent[links[j - 1]],
            links[j]: sent[links[j]],
        }
        rows = np.array([key_row(j - 1), key_row(j), link_row(j - 1), link_row(j)])
        post = float(rank_entropy(rows, target, q))
        audit.entries.append(AuditEntry(f"tap-{node}", (node,), ("m",), 1.0, post, verdict(1.0, post)))

    # the user strips the last pad
    got = (sent[links[-1]] - keys[f"r{n}"]) % q
    return RelaySession(
        "trusted_chain", q, seed, {"m": m}, keys, sent, views, {nodes[-1]: {"m": got}}, audit
    )


# -- weakly trusted exchange -----------------------------------------------------------


def _message_vector(code: LinearNetworkCode, message) -> dict[str, int]:
    labels = code.sources.message_labels
    q = code.q
    if isinstance(message, Mapping):
        missing = set(labels) - set(message)
        extra = set(message) - set(labels)
        if missing or extra:
            raise ValueError(f"message must give exactly {labels}")
        return {k: int(message[k]) % q for k in labels}
    if isinstance(message, (int, np.integer)):
        if len(labels) != 1:
            raise ValueError(f"code carries {len(labels)} messages; pass a mapping")
        return {labels[0]: int(message) % q}
    vals = list(message)
    if len(vals) != len(labels):
        raise ValueError(f"expected {len(labels)} message symbols")
    return {k: int(v) % q for k, v in zip(labels, vals)}


def simulate_wtr_exchange(
    code: LinearNetworkCode,
    users: Sequence[UserSpec],
    patterns: Sequence[EavesdropPattern],
    message,
    seed: int | None = None,
    override: bool = False,
    audit_only: Sequence[EavesdropPattern] = (),
) -> RelaySession:
    """One use of ``code`` with uniform keys drawn from a seeded generator.

    ``audit_only`` patterns are audited like the others but play no part in
    the admissibility gate (useful for joint targets a code is not meant to
    protect).
    """
    report = check_admissible(code, users, patterns)
    if not report.admissible and not override:
        raise NotAdmissible("code is not admissible for the given users and patterns")
    extra = check_admissible(code, (), audit_only).patterns if audit_only else []
    q = code.q
    src = code.sources
    msg = _message_vector(code, message)
    draws = _rng(seed).integers(0, q, size=len(src.key_labels))
    keys = {k: int(v) for k, v in zip(src.key_labels, draws)}
    x = np.array([msg.get(lab, keys.get(lab)) for lab in src.labels], dtype=np.int64)

    graph = code.graph
    sent = {e: int(code.global_maps[e] @ x % q) for e in graph.edge_ids}
    views = {}
    for node in graph.nodes:
        adj = [e for e in graph.edge_ids if graph.edge(e).tail == node or graph.edge(e).head == node]
        views[node] = {e: sent[e] for e in adj}

    delivered = {}
    for u in users:
        x_dec = decoding_matrix(code, u)
        if x_dec is None:
            delivered[u.node] = {}
            continue
        y = np.array([sent[e.id] for e in graph.in_edges(u.node)], dtype=np.int64)
        vals = x_dec @ y % q
        delivered[u.node] = {w: int(v) for w, v in zip(u.wants, vals)}

    audit = LeakageAudit(
        [
            AuditEntry(p.id, p.nodes, p.targets, float(p.prior), float(p.posterior), p.verdict)
            for p in [*report.patterns, *extra]
        ]
    )
    return RelaySession("wtr", q, seed, msg, keys, sent, views, delivered, audit)


# -- throughput --------------------------------------------------------------------


@dataclass
class ThroughputReport:
    link_rates: dict[str, float]
    edge_limits: dict[str, float]
    effective_rate: float
    bottleneck: str | None

    def to_dict(self) -> dict:
        return {
            "link_rates_bps": self.link_rates,
            "edge_limits_bps": self.edge_limits,
            "effective_rate_bps": self.effective_rate,
            "bottleneck": self.bottleneck,
        }


def effective_rate(code: LinearNetworkCode | Sequence[str], per_link_rates: Mapping[str, float]) -> ThroughputReport:
    """Secret message throughput limited by the slowest edge.

    Every edge carries one symbol per code use, and one use delivers one
    symbol of each message stream, so an edge with rate ``r`` sustains
    ``r * n_messages`` message bits per second in aggregate.  Passing a plain
    list of link ids models a trusted chain (one message stream).
    """
    if isinstance(code, LinearNetworkCode):
        edges = code.graph.edge_ids
        streams = len(code.sources.message_labels)
    else:
        edges = list(code)
        streams = 1
    missing = [e for e in edges if e not in per_link_rates]
    if missing:
        raise MissingRate(f"no link rate for {missing}")
    limits = {e: float(per_link_rates[e]) * streams for e in edges}
    if not limits:
        return ThroughputReport({}, {}, 0.0, None)
    bottleneck = min(limits, key=lambda e: (limits[e], edges.index(e)))
    return ThroughputReport({e: float(per_link_rates[e]) for e in edges}, limits, limits[bottleneck], bottleneck)


def link_key_rates(
    link_losses: Mapping[str, float | tuple[float, float]], params: QkdSystemParams, frequency_hz: float
) -> dict[str, float]:
    """Secret key bits per second per link from its loss in dB.

    Values may be a loss or a ``(wavelength, loss)`` pair as produced by
    the topology planner.
    """
    out = {}
    for e, v in link_losses.items():
        loss = v[1] if isinstance(v, tuple) else v
        out[e] = key_rate_per_second(params, float(loss), frequency_hz)
    return out


def symbol_bits(q: int) -> float:
    return math.log2(q)
