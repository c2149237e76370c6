"""JSON file formats for networks, codes, plans and optical topologies.

Every document carries ``schema_version`` (currently 1) and ``kind``
(``network``, ``code``, ``plan`` or ``topology``).  Parsing validates the
structure and raises :class:`InputError` with a readable message.

network::

    {"schema_version": 1, "kind": "network", "field_q": 3,
     "nodes": [{"id": "s", "role": "source"}, ...],
     "edges": [{"id": "s>t1", "tail": "s", "head": "t1"}, ...],
     "sources": [{"node": "s", "messages": ["m"], "keys": ["k"]}],
     "users": [{"node": "u", "wants": ["m"]}],
     "patterns": [{"id": "tap-t1", "nodes": ["t1"], "targets": ["m"]}]}

code::

    {"schema_version": 1, "kind": "code", "field_q": 3,
     "coefficients": {"s>t1": {"m": 1, "k": 1}, ...}}

Coefficient keys name an edge's local inputs: incoming edge ids of the tail
node and components generated there.  Omitted inputs are zero.

plan::

    {"schema_version": 1, "kind": "plan", "network": {...}, "code": {...},
     "meta": {...}}

topology::

    {"schema_version": 1, "kind": "topology", "name": ..., "prototype": ...,
     "elements": [{"id", "kind", "node", "band", "ports", "loss_db"}],
     "links": [{"a": "elem:port", "b": "elem:port", "km": 0, "connectors": 0}],
     "emitters": {"Tx1": [1540.0, ...]}, "plan": {"Rx1": [1540.0]},
     "params": {...}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .graph import NetworkGraph, build_graph
from .netcode import (
    CodeError,
    EavesdropPattern,
    LinearNetworkCode,
    Source,
    SourceSpec,
    UserSpec,
    propagate_code,
)
from .optical.catalog import OpticalComponent
from .optical.topology import Element, Link, OpticalTopology, TopologyError

SCHEMA_VERSION = 1
KINDS = ("network", "code", "plan", "topology")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkSpec:
    graph: NetworkGraph
    sources: SourceSpec
    users: tuple[UserSpec, ...]
    patterns: tuple[EavesdropPattern, ...]

    @property
    def q(self) -> int:
        return self.sources.q


@dataclass(frozen=True)
class Plan:
    network: NetworkSpec
    code: LinearNetworkCode
    meta: dict = field(default_factory=dict)


# -- helpers ------------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _need(doc: dict, key: str, kind: type | tuple, where: str) -> Any:
    if key not in doc:
        raise InputError(f"{where}: missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise InputError(f"{where}: field {key!r} has the wrong type")
    return val


def check_header(doc: Any, kind: str) -> dict:
    if not isinstance(doc, dict):
        raise InputError(f"{kind} document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    if doc.get("kind") != kind:
        raise InputError(f"expected a {kind!r} document, got kind {doc.get('kind')!r}")
    return doc


def read_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def bundled_names() -> list[str]:
    root = resources.files("wtrnet.data").joinpath("fixtures")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_document(name_or_path: str | Path) -> dict:
    """Read a JSON file, or a bundled fixture by name (e.g. ``two_path.network``)."""
    p = Path(name_or_path)
    if p.exists():
        return read_json(p)
    fixture = resources.files("wtrnet.data").joinpath("fixtures", f"{name_or_path}.json")
    if fixture.is_file():
        return json.loads(fixture.read_text())
    raise InputError(f"no such file or bundled fixture: {name_or_path}")


# -- network ------------------------------------------------------------------


def parse_network(doc: Any) -> NetworkSpec:
    check_header(doc, "network")
    try:
        q = _need(doc, "field_q", int, "network")
        nodes = [(_need(n, "id", str, "node"), n.get("role", "intermediate")) for n in _need(doc, "nodes", list, "network")]
        edges = []
        for e in _need(doc, "edges", list, "network"):
            tail, head = _need(e, "tail", str, "edge"), _need(e, "head", str, "edge")
            edges.append((e.get("id", f"{tail}>{head}"), tail, head))
        graph = build_graph(nodes, edges)
        sources = SourceSpec(
            q,
            tuple(
                Source(_need(s, "node", str, "source"), tuple(s.get("messages", [])), tuple(s.get("keys", [])))
                for s in _need(doc, "sources", list, "network")
            ),
        )
        users = tuple(
            UserSpec(_need(u, "node", str, "user"), tuple(_need(u, "wants", list, "user"))) for u in doc.get("users", [])
        )
        patterns = tuple(
            EavesdropPattern(
                _need(p, "id", str, "pattern"), tuple(_need(p, "nodes", list, "pattern")), tuple(_need(p, "targets", list, "pattern"))
            )
            for p in doc.get("patterns", [])
        )
    except InputError:
        raise
    except (ValueError, TypeError, AttributeError) as exc:
        raise InputError(f"network: {exc}") from exc
    for s in sources.sources:
        if s.node not in graph.roles:
            raise InputError(f"network: source node {s.node!r} not in graph")
    return NetworkSpec(graph, sources, users, patterns)


def network_to_doc(net: NetworkSpec) -> dict:
    g = net.graph
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "network",
        "field_q": net.q,
        "nodes": [{"id": n, "role": g.roles[n]} for n in g.nodes],
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in g.edges],
        "sources": [{"node": s.node, "messages": list(s.messages), "keys": list(s.keys)} for s in net.sources.sources],
        "users": [{"node": u.node, "wants": list(u.wants)} for u in net.users],
        "patterns": [{"id": p.id, "nodes": list(p.nodes), "targets": list(p.targets)} for p in net.patterns],
    }


# -- code ---------------------------------------------------------------------


def parse_code(doc: Any, net: NetworkSpec) -> LinearNetworkCode:
    check_header(doc, "code")
    q = doc.get("field_q", net.q)
    if q != net.q:
        raise InputError(f"code is over GF({q}) but the network declares GF({net.q})")
    coeffs = _need(doc, "coefficients", dict, "code")
    try:
        return propagate_code(net.graph, net.sources, coeffs)
    except (CodeError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"code: {exc}") from exc


def code_to_doc(code: LinearNetworkCode) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "code",
        "field_q": code.q,
        "coefficients": {e: {k: v for k, v in c.items() if v} for e, c in code.coefficients.items()},
    }


# -- plan ---------------------------------------------------------------------


def parse_plan(doc: Any) -> Plan:
    check_header(doc, "plan")
    net = parse_network(_need(doc, "network", dict, "plan"))
    code = parse_code(_need(doc, "code", dict, "plan"), net)
    return Plan(net, code, dict(doc.get("meta", {})))


def plan_to_doc(plan: Plan) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "plan",
        "network": network_to_doc(plan.network),
        "code": code_to_doc(plan.code),
        "meta": _jsonable(plan.meta),
    }


# -- topology -----------------------------------------------------------------


def _port_ref(ref: Any) -> tuple[str, str]:
    if not isinstance(ref, str) or ref.count(":") != 1:
        raise InputError(f"port reference {ref!r} must look like 'element:port'")
    el, port = ref.split(":")
    return el, port


def parse_topology(doc: Any, catalog: dict[str, OpticalComponent] | None = None) -> OpticalTopology:
    check_header(doc, "topology")
    try:
        elements = {}
        for raw in _need(doc, "elements", list, "topology"):
            el = Element(
                id=_need(raw, "id", str, "element"),
                kind=_need(raw, "kind", str, "element"),
                node=raw.get("node"),
                band=tuple(tuple(float(x) for x in b) for b in raw.get("band", [])),
                ports=raw.get("ports", {}),
                loss_db=raw.get("loss_db"),
            )
            if el.id in elements:
                raise InputError(f"duplicate element id {el.id!r}")
            elements[el.id] = el
        links = tuple(
            Link(_port_ref(ln.get("a")), _port_ref(ln.get("b")), float(ln.get("km", 0.0)), int(ln.get("connectors", 0)))
            for ln in _need(doc, "links", list, "topology")
        )
        emitters = {k: tuple(float(w) for w in v) for k, v in _need(doc, "emitters", dict, "topology").items()}
        plan = {k: tuple(float(w) for w in v) for k, v in doc.get("plan", {}).items()}
        extra = {"catalog": catalog} if catalog is not None else {}
        return OpticalTopology(
            doc.get("name", "topology"), doc.get("prototype", "custom"), elements, links, emitters, plan, doc.get("params", {}), **extra
        )
    except (TopologyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"topology: {exc}") from exc


def topology_to_doc(topo: OpticalTopology) -> dict:
    elements = []
    for el in topo.elements.values():
        d = {"id": el.id, "kind": el.kind, "node": el.node}
        if el.band:
            d["band"] = [list(b) for b in el.band]
        if el.ports:
            d["ports"] = _jsonable(dict(el.ports))
        if el.loss_db is not None:
            d["loss_db"] = el.loss_db
        elements.append(d)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "topology",
        "name": topo.name,
        "prototype": topo.prototype,
        "elements": elements,
        "links": [
            {"a": f"{ln.a[0]}:{ln.a[1]}", "b": f"{ln.b[0]}:{ln.b[1]}", "km": ln.km, "connectors": ln.connectors}
            for ln in topo.links
        ],
        "emitters": {k: list(v) for k, v in topo.emitters.items()},
        "plan": {k: list(v) for k, v in topo.plan.items()},
        "params": _jsonable(dict(topo.params)),
    }


PARSERS = {"network": parse_network, "plan": parse_plan, "topology": parse_topology}
