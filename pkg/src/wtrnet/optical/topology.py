"""Physical PON model: elements with ports, fiber links, wavelength routing, loss budgets.

Light is traced port to port.  Entering an element on a port at a given
wavelength yields zero or more exit ports according to the element kind;
every link is bidirectional and adds fiber and connector loss.  A trace
ends successfully at a receiver and unsuccessfully at an emitter, an
unconnected port, a rejected wavelength, or a revisited port.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping

from .catalog import OpticalComponent, load_catalog

TERMINALS = ("emitter", "receiver")
SPLITTERS = {"splitter_1x2": 2, "splitter_1x4": 4}
OADMS = ("cwdm_oadm", "dwdm_oadm")


class TopologyError(ValueError):
    pass


class UnknownEmitter(TopologyError, KeyError):
    def __str__(self):
        return TopologyError.__str__(self)


Band = tuple[tuple[float, float], ...]


def in_band(band: Band, wavelength: float) -> bool:
    return any(lo <= wavelength <= hi for lo, hi in band)


def channel_band(wavelengths, half_width: float = 0.2) -> Band:
    return tuple((round(w - half_width, 6), round(w + half_width, 6)) for w in wavelengths)


@dataclass(frozen=True)
class Element:
    """A placed component.

    ``band`` is the drop band of an OADM or the filtered band of a bandpass
    filter.  ``ports`` carries kind-specific wiring rules:

    * OADM: ``line`` (line ports), ``pass`` (directed pairs passing
      out-of-band light) and ``local`` (port -> ``{"drop_from": [...],
      "add_to": port | None}``).
    * AWG: ``channels`` (output port -> wavelengths it carries).
    """

    id: str
    kind: str
    node: str | None = None
    band: Band = ()
    ports: Mapping = field(default_factory=dict)
    loss_db: float | None = None

    def __post_init__(self):
        for lo, hi in self.band:
            if not lo < hi:
                raise TopologyError(f"{self.id}: band ({lo}, {hi}) is not ordered")


@dataclass(frozen=True)
class Link:
    a: tuple[str, str]
    b: tuple[str, str]
    km: float = 0.0
    connectors: int = 0

    def __post_init__(self):
        if self.km < 0 or self.connectors < 0:
            raise TopologyError(f"link {self.a}-{self.b}: negative length or connector count")

    def other(self, end: tuple[str, str]) -> tuple[str, str]:
        return self.b if end == self.a else self.a

    @property
    def label(self) -> str:
        return f"{self.a[0]}.{self.a[1]}-{self.b[0]}.{self.b[1]}"


@dataclass(frozen=True)
class OpticalTopology:
    name: str
    prototype: str
    elements: Mapping[str, Element]
    links: tuple[Link, ...]
    emitters: Mapping[str, tuple[float, ...]]
    plan: Mapping[str, tuple[float, ...]]
    params: Mapping = field(default_factory=dict)
    catalog: Mapping[str, OpticalComponent] = field(default_factory=load_catalog, compare=False, repr=False)

    def __post_init__(self):
        ports: dict[tuple[str, str], Link] = {}
        for ln in self.links:
            for end in (ln.a, ln.b):
                if end[0] not in self.elements:
                    raise TopologyError(f"link references unknown element {end[0]!r}")
                if end in ports:
                    raise TopologyError(f"port {end[0]}.{end[1]} has two links")
                ports[end] = ln
        object.__setattr__(self, "_port_links", ports)
        for tx in self.emitters:
            el = self.elements.get(tx)
            if el is None or el.kind != "emitter":
                raise TopologyError(f"{tx!r} is not an emitter element")
            attached = [p for p in ports if p[0] == tx]
            if len(attached) != 1:
                raise TopologyError(f"emitter {tx} must attach to exactly one port, has {len(attached)}")
        for rx in self.receivers:
            peers = {self.elements[ports[p].other(p)[0]].node for p in ports if p[0] == rx}
            if len(peers) != 1:
                raise TopologyError(f"receiver {rx} must attach to exactly one backbone node, has {sorted(map(str, peers))}")
        for rx in self.plan:
            if rx not in self.elements or self.elements[rx].kind != "receiver":
                raise TopologyError(f"wavelength plan names unknown receiver {rx!r}")

    @property
    def receivers(self) -> list[str]:
        return [e.id for e in self.elements.values() if e.kind == "receiver"]

    def link_at(self, element: str, port: str) -> Link | None:
        return self._port_links.get((element, port))

    def component(self, kind: str) -> OpticalComponent:
        try:
            return self.catalog[kind]
        except KeyError:
            raise TopologyError(f"catalog has no entry for {kind!r}") from None

    def element_loss(self, el: Element) -> float:
        if el.kind in TERMINALS:
            return 0.0
        if el.loss_db is not None:
            return el.loss_db
        return self.component(el.kind).insertion_loss_db


# -- element transfer rules ---------------------------------------------------


def _oadm_exits(el: Element, port: str, wl: float) -> tuple[list[str], str]:
    line = el.ports.get("line", ["a", "b"])
    passes = el.ports.get("pass", [["a", "b"], ["b", "a"]])
    local = el.ports.get("local", {"d": {"drop_from": list(line), "add_to": None}})
    hit = in_band(el.band, wl)
    if port in line:
        if hit:
            outs = [p for p, rule in local.items() if port in rule.get("drop_from", [])]
            return outs, "" if outs else f"dropped band has no local port from {port}"
        outs = [dst for src, dst in passes if src == port]
        return outs, "" if outs else f"no pass-through from {port}"
    if port in local:
        dst = local[port].get("add_to")
        if dst is None:
            return [], f"{port} is drop-only"
        if not hit:
            return [], f"{wl:g} nm outside add band"
        return [dst], ""
    raise TopologyError(f"{el.id}: unknown OADM port {port!r}")


def exits(topo: OpticalTopology, el: Element, port: str, wl: float) -> tuple[list[str], str]:
    """Exit ports for light entering ``el`` on ``port``, plus a reason when none."""
    kind = el.kind
    if kind == "emitter":
        return [], "absorbed by emitter"
    if kind not in SPLITTERS and kind != "receiver" and not topo.component(kind).in_band(wl):
        return [], f"{wl:g} nm outside operating band"
    if kind in SPLITTERS:
        n = SPLITTERS[kind]
        if port == "c":
            return [f"o{i}" for i in range(1, n + 1)], ""
        return ["c"], ""
    if kind == "bandpass_filter":
        hit = in_band(el.band, wl)
        if port == "c":
            return (["f"] if hit else ["r"]), ""
        if port == "f":
            return (["c"], "") if hit else ([], f"{wl:g} nm rejected at filtered port")
        if port == "r":
            return (["c"], "") if not hit else ([], f"{wl:g} nm rejected at reflected port")
    if kind == "circulator":
        nxt = {"p1": "p2", "p2": "p3"}.get(port)
        return ([nxt], "") if nxt else ([], f"circulator forbids exit after {port}")
    if kind in OADMS:
        return _oadm_exits(el, port, wl)
    if kind == "awg":
        channels = el.ports.get("channels", {})
        if port == "c":
            outs = [p for p, wls in channels.items() if any(abs(wl - w) <= 0.05 for w in wls)]
            return outs, "" if outs else f"{wl:g} nm matches no AWG port"
        wls = channels.get(port, [])
        if any(abs(wl - w) <= 0.05 for w in wls):
            return ["c"], ""
        return [], f"{wl:g} nm not carried by AWG port {port}"
    raise TopologyError(f"{el.id}: no port semantics for kind {kind!r}")


# -- routing ------------------------------------------------------------------


@dataclass(frozen=True)
class Hop:
    element: str
    kind: str
    in_port: str
    out_port: str | None


@dataclass(frozen=True)
class PhysicalPath:
    tx: str
    wavelength: float
    receiver: str
    steps: tuple  # alternating Link and Hop, starting with a Link

    @property
    def elements(self) -> list[str]:
        return [s.element for s in self.steps if isinstance(s, Hop)]


@dataclass(frozen=True)
class DeadEnd:
    element: str
    port: str
    reason: str


@dataclass(frozen=True)
class Route:
    tx: str
    wavelength: float
    paths: tuple[PhysicalPath, ...]
    dead_ends: tuple[DeadEnd, ...]

    @property
    def blocked(self) -> bool:
        return not self.paths

    @property
    def path(self) -> PhysicalPath:
        if not self.paths:
            raise TopologyError(f"{self.tx} at {self.wavelength:g} nm is blocked")
        return self.paths[0]

    @property
    def blocking(self) -> DeadEnd | None:
        """The dead end reached farthest into the network when nothing is delivered."""
        if self.paths or not self.dead_ends:
            return None
        return self.dead_ends[-1]


def route_wavelength(topo: OpticalTopology, tx: str, wavelength: float) -> Route:
    """Trace the light of emitter ``tx`` at ``wavelength`` through every branch.

    Splitters broadcast, so several receivers may be reached; paths come
    back sorted by loss, then receiver id.
    """
    if tx not in topo.emitters:
        raise UnknownEmitter(f"unknown emitter {tx!r}")
    start = next(p for p in topo._port_links if p[0] == tx)
    paths: list[PhysicalPath] = []
    dead: list[DeadEnd] = []
    seen: set[tuple[str, str]] = set()

    def walk(at: tuple[str, str], steps: list) -> None:
        link = topo.link_at(*at)
        if link is None:
            dead.append(DeadEnd(at[0], at[1], "unconnected port"))
            return
        entry = link.other(at)
        el = topo.elements[entry[0]]
        trail = steps + [link]
        if el.kind == "receiver":
            paths.append(PhysicalPath(tx, wavelength, el.id, tuple(trail + [Hop(el.id, el.kind, entry[1], None)])))
            return
        if entry in seen:
            dead.append(DeadEnd(el.id, entry[1], "loop"))
            return
        seen.add(entry)
        outs, why = exits(topo, el, entry[1], wavelength)
        if not outs:
            dead.append(DeadEnd(el.id, entry[1], why))
            return
        for out in outs:
            walk((el.id, out), trail + [Hop(el.id, el.kind, entry[1], out)])

    walk(start, [])
    paths.sort(key=lambda p: (path_loss(topo, p).total, p.receiver))
    return Route(tx, wavelength, tuple(paths), tuple(dead))


# -- loss budgets -------------------------------------------------------------


@dataclass(frozen=True)
class BudgetItem:
    label: str
    kind: str
    db: float


@dataclass(frozen=True)
class PathLossBudget:
    items: tuple[BudgetItem, ...]
    wavelength: float | None = None
    receiver: str | None = None

    @property
    def total(self) -> float:
        return round(math.fsum(i.db for i in self.items), 9)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["item", "kind", "db", "cumulative_db"])
        run = []
        for it in self.items:
            run.append(it.db)
            w.writerow([it.label, it.kind, f"{it.db:.3f}", f"{math.fsum(run):.3f}"])
        w.writerow(["total", "", f"{self.total:.3f}", f"{self.total:.3f}"])
        return buf.getvalue()


def path_loss(topo: OpticalTopology, path: PhysicalPath | None) -> PathLossBudget:
    """Itemize fiber, connector and component losses along ``path``."""
    if path is None:
        return PathLossBudget(())
    fiber = topo.component("fiber").insertion_loss_db
    pair = topo.component("connector_pair").insertion_loss_db
    items: list[BudgetItem] = []
    for s in path.steps:
        if isinstance(s, Link):
            if s.km:
                items.append(BudgetItem(f"fiber {s.label} ({s.km:g} km)", "fiber", round(s.km * fiber, 9)))
            if s.connectors:
                items.append(BudgetItem(f"connectors {s.label} (x{s.connectors})", "connector_pair", round(s.connectors * pair, 9)))
        else:
            el = topo.elements[s.element]
            if el.kind in TERMINALS:
                continue
            action = f"{s.in_port}->{s.out_port}"
            items.append(BudgetItem(f"{el.id} {action}", el.kind, topo.element_loss(el)))
    return PathLossBudget(tuple(items), path.wavelength, path.receiver)


def reachable_receivers(topo: OpticalTopology, tx: str, loss_budget_db: float) -> dict[str, tuple[float, float]]:
    """Receivers reachable from ``tx`` within budget: ``rx -> (wavelength, total dB)``.

    The lowest-loss wavelength wins; ties go to the shorter wavelength.
    """
    if loss_budget_db < 0:
        raise ValueError("loss budget must be non-negative")
    if tx not in topo.emitters:
        raise UnknownEmitter(f"unknown emitter {tx!r}")
    best: dict[str, tuple[float, float]] = {}
    for wl in sorted(topo.emitters[tx]):
        for p in route_wavelength(topo, tx, wl).paths:
            total = path_loss(topo, p).total
            if total > loss_budget_db + 1e-9:
                continue
            cur = best.get(p.receiver)
            if cur is None or total < cur[1] - 1e-9:
                best[p.receiver] = (wl, total)
    return dict(sorted(best.items()))


def component_tally(topo: OpticalTopology) -> dict[str, dict[str, int]]:
    """Per backbone node, count of passive components by kind."""
    out: dict[str, dict[str, int]] = {}
    for el in topo.elements.values():
        if el.kind in TERMINALS or el.node is None:
            continue
        out.setdefault(el.node, {})
        out[el.node][el.kind] = out[el.node].get(el.kind, 0) + 1
    return out
