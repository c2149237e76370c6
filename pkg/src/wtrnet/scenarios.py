"""Canonical small networks: two disjoint relay paths, multicast, crossed exchange."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import NetworkGraph, build_graph
from .netcode import (
    EavesdropPattern,
    LinearNetworkCode,
    Source,
    SourceSpec,
    UserSpec,
    propagate_code,
)

SCENARIOS = ("two_path", "multicast", "crossed", "naive")


@dataclass(frozen=True)
class Scenario:
    name: str
    graph: NetworkGraph
    code: LinearNetworkCode
    users: tuple[UserSpec, ...]
    patterns: tuple[EavesdropPattern, ...]

    @property
    def sources(self) -> SourceSpec:
        return self.code.sources


def two_path_graph() -> NetworkGraph:
    return build_graph(
        [("s", "source"), ("t1", "intermediate"), ("t2", "intermediate"), ("u", "user")],
        [("s", "t1"), ("s", "t2"), ("t1", "u"), ("t2", "u")],
    )


def _two_path(q: int, naive: bool) -> Scenario:
    g = two_path_graph()
    if naive:
        src = SourceSpec(q, (Source("s", ("m",)),))
        local = {"s>t1": {"m": 1}, "s>t2": {"m": 1}, "t1>u": {"s>t1": 1}, "t2>u": {"s>t2": 1}}
    else:
        src = SourceSpec(q, (Source("s", ("m",), ("k",)),))
        local = {"s>t1": {"m": 1, "k": 1}, "s>t2": {"k": 1}, "t1>u": {"s>t1": 1}, "t2>u": {"s>t2": 1}}
    code = propagate_code(g, src, local)
    patterns = (
        EavesdropPattern("tap-t1", ("t1",), ("m",)),
        EavesdropPattern("tap-t2", ("t2",), ("m",)),
    )
    return Scenario("naive" if naive else "two_path", g, code, (UserSpec("u", ("m",)),), patterns)


def _multicast(q: int) -> Scenario:
    g = build_graph(
        [("s", "source"), ("t1", "intermediate"), ("t2", "intermediate"), ("u1", "user"), ("u2", "user")],
        [("s", "t1"), ("s", "t2"), ("t1", "u1"), ("t2", "u1"), ("t1", "u2"), ("t2", "u2")],
    )
    src = SourceSpec(q, (Source("s", ("m",), ("k",)),))
    local = {
        "s>t1": {"m": 1, "k": 1},
        "s>t2": {"k": 1},
        "t1>u1": {"s>t1": 1},
        "t2>u1": {"s>t2": 1},
        "t1>u2": {"s>t1": 1},
        "t2>u2": {"s>t2": 1},
    }
    code = propagate_code(g, src, local)
    users = (UserSpec("u1", ("m",)), UserSpec("u2", ("m",)))
    patterns = (
        EavesdropPattern("tap-t1", ("t1",), ("m",)),
        EavesdropPattern("tap-t2", ("t2",), ("m",)),
    )
    return Scenario("multicast", g, code, users, patterns)


def _crossed(q: int) -> Scenario:
    # t1 is a key-only source; t2 sees both padded messages.
    g = build_graph(
        [
            ("s1", "source"),
            ("s2", "source"),
            ("t1", "source"),
            ("t2", "intermediate"),
            ("u1", "user"),
            ("u2", "user"),
        ],
        [
            ("t1", "s1"),
            ("t1", "s2"),
            ("s1", "t2"),
            ("s2", "t2"),
            ("t2", "u1"),
            ("t2", "u2"),
            ("t1", "u1"),
            ("t1", "u2"),
        ],
    )
    src = SourceSpec(q, (Source("s1", ("m1",)), Source("s2", ("m2",)), Source("t1", (), ("k",))))
    local = {
        "t1>s1": {"k": 1},
        "t1>s2": {"k": 1},
        "s1>t2": {"m1": 1, "t1>s1": 1},
        "s2>t2": {"m2": 1, "t1>s2": 1},
        "t2>u1": {"s2>t2": 1},
        "t2>u2": {"s1>t2": 1},
        "t1>u1": {"k": 1},
        "t1>u2": {"k": 1},
    }
    code = propagate_code(g, src, local)
    users = (UserSpec("u1", ("m2",)), UserSpec("u2", ("m1",)))
    patterns = (
        EavesdropPattern("tap-t1", ("t1",), ("m1", "m2")),
        EavesdropPattern("tap-t2-m1", ("t2",), ("m1",)),
        EavesdropPattern("tap-t2-m2", ("t2",), ("m2",)),
        EavesdropPattern("tap-u1-m1", ("u1",), ("m1",)),
        EavesdropPattern("tap-u2-m2", ("u2",), ("m2",)),
    )
    return Scenario("crossed", g, code, users, patterns)


def builtin_scenario(name: str, q: int = 3) -> Scenario:
    """Return one of the bundled scenarios over GF(q).

    ``naive`` is the two-path network with plain forwarding of ``m`` on both
    paths, kept as the insecure counterpart of ``two_path``.
    """
    if name == "two_path":
        return _two_path(q, naive=False)
    if name == "naive":
        return _two_path(q, naive=True)
    if name == "multicast":
        return _multicast(q)
    if name == "crossed":
        return _crossed(q)
    raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
