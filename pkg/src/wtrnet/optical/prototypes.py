"""Builders for the three metropolitan QKD-PON prototypes.

All three share a ring backbone of ``branches`` nodes, each node homing one
access network of emitters and one receiver.  Node ``n`` is ``N{n}``; its
receiver is ``Rx{n}`` and its emitters ``Tx{n}`` (or ``Tx{n}.{k}`` when a
branch has several).

p1
    access splitter, bandpass filter F_a, east/west DWDM OADMs, one CWDM
    OADM on a bidirectional ring.  F_a sends the east neighbour's channel
    (and, on odd nodes, the node's own channel) through its filtered port
    towards the east-facing DWDM; everything else is reflected west.
p2
    access splitter, circulator, one DWDM and one CWDM OADM on a one-way
    (eastbound) ring.  ``ring_mode`` selects ``open`` (through traffic is
    dumped at the next circulator), ``closed`` (the circulator's third
    port re-enters the ring) or ``dual`` (a second, westbound ring fed by a
    1:2 splitter).
p3
    access AWG, a 1:4 splitter joining access and backbone, and one DWDM
    OADM per node acting as the receiver's channel filter.  Spans run
    point-to-point from a node's splitter to its neighbours' OADMs, so
    light never travels past the nearest backbone nodes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .topology import Element, Link, OpticalTopology, TopologyError, channel_band

PROTOTYPES = ("p1", "p2", "p3")
RING_MODES = ("open", "closed", "dual")


@dataclass(frozen=True)
class PrototypeConfig:
    """Dimensions and plant allocation for a prototype build.

    Defaults form the reference configuration: with the standard catalog
    an own-node key link costs 10.6 dB and a neighbour link 15.5 dB in p1.

    * own-node p1 path: splitter 7 + F_a 0.7 + DWDM drop 0.6 = 8.3 dB of
      components, plus 5.2 km access fiber (1.3 dB) and five connector
      pairs (emitter patch, two at the feeder, filter patch, receiver patch).
    * neighbour p1 path adds DWDM pass, CWDM add and CWDM drop (3 x 0.6),
      a 10 km span with one connector pair (2.7 dB) and two more patches.
    """

    branches: int = 5
    tx_per_branch: int = 1
    access_km: float = 5.2
    feeder_connectors: int = 2
    patch_connectors: int = 1
    span_km: float = 10.0
    span_connectors: int = 1
    channel_base_nm: float = 1535.0
    channel_spacing_nm: float = 5.0
    cwdm_band_nm: tuple[float, float] = (1530.0, 1565.0)
    ring_mode: str = "open"
    awg_bands: int = 2
    awg_band_base_nm: float = 1530.0
    awg_band_step_nm: float = 20.0
    awg_spacing_nm: float = 0.4
    channels: tuple[float, ...] = field(default=())

    def channel(self, n: int) -> float:
        if self.channels:
            return self.channels[n - 1]
        return round(self.channel_base_nm + self.channel_spacing_nm * n, 6)


def _check(kind: str, cfg: PrototypeConfig) -> None:
    if kind not in PROTOTYPES:
        raise TopologyError(f"unknown prototype {kind!r}")
    if cfg.branches < 2:
        raise TopologyError("a prototype needs at least 2 branches")
    limit = 40 if kind == "p3" else 4
    if not 1 <= cfg.tx_per_branch <= limit:
        raise TopologyError(f"{kind} supports 1..{limit} emitters per branch")
    if cfg.ring_mode not in RING_MODES:
        raise TopologyError(f"unknown ring mode {cfg.ring_mode!r}")
    if cfg.channels and len(cfg.channels) != cfg.branches:
        raise TopologyError("explicit channel list must have one entry per branch")
    if kind != "p3":
        chans = [cfg.channel(n) for n in range(1, cfg.branches + 1)]
        if len(set(chans)) != len(chans):
            raise TopologyError("receiver channels must be distinct")
        lo, hi = cfg.cwdm_band_nm
        if not all(lo <= c <= hi for c in chans):
            raise TopologyError(f"channels {chans} leave the CWDM band {cfg.cwdm_band_nm}")
    if kind == "p3" and cfg.awg_bands < 1:
        raise TopologyError("AWG needs at least one band")


def _tx_names(n: int, cfg: PrototypeConfig) -> list[str]:
    if cfg.tx_per_branch == 1:
        return [f"Tx{n}"]
    return [f"Tx{n}.{k}" for k in range(1, cfg.tx_per_branch + 1)]


def _east(n: int, cfg: PrototypeConfig) -> int:
    return n % cfg.branches + 1


def _west(n: int, cfg: PrototypeConfig) -> int:
    return (n - 2) % cfg.branches + 1


class _Builder:
    def __init__(self, cfg: PrototypeConfig):
        self.cfg = cfg
        self.elements: dict[str, Element] = {}
        self.links: list[Link] = []

    def add(self, el: Element) -> None:
        self.elements[el.id] = el

    def link(self, a: str, b: str, km: float = 0.0, connectors: int | None = None) -> None:
        ea, pa = a.split(":")
        eb, pb = b.split(":")
        conns = self.cfg.patch_connectors if connectors is None else connectors
        self.links.append(Link((ea, pa), (eb, pb), km, conns))

    def access(self, n: int, head: str) -> list[str]:
        """Emitters behind a 1:4 splitter whose common port feeds ``head``."""
        node = f"N{n}"
        self.add(Element(f"ACC{n}", "splitter_1x4", node))
        txs = _tx_names(n, self.cfg)
        for k, tx in enumerate(txs, start=1):
            self.add(Element(tx, "emitter", None))
            self.link(f"{tx}:out", f"ACC{n}:o{k}")
        self.link(f"ACC{n}:c", head, self.cfg.access_km, self.cfg.feeder_connectors)
        return txs


def _build_p1(cfg: PrototypeConfig) -> tuple[_Builder, dict, dict]:
    b = _Builder(cfg)
    emitters, plan = {}, {}
    all_channels = tuple(cfg.channel(n) for n in range(1, cfg.branches + 1))
    for n in range(1, cfg.branches + 1):
        node, own = f"N{n}", cfg.channel(n)
        eastbound = [cfg.channel(_east(n, cfg))] + ([own] if n % 2 else [])
        b.add(Element(f"FA{n}", "bandpass_filter", node, channel_band(sorted(set(eastbound)))))
        for side in ("E", "W"):
            b.add(Element(f"D{side}{n}", "dwdm_oadm", node, channel_band([own])))
        b.add(
            Element(
                f"CW{n}",
                "cwdm_oadm",
                node,
                (cfg.cwdm_band_nm,),
                {
                    "line": ["a", "b"],
                    "pass": [["a", "b"], ["b", "a"]],
                    "local": {
                        "da": {"drop_from": ["a"], "add_to": "a"},
                        "db": {"drop_from": ["b"], "add_to": "b"},
                    },
                },
            )
        )
        b.add(Element(f"Rx{n}", "receiver", node))
        for tx in b.access(n, f"FA{n}:c"):
            emitters[tx] = all_channels
        plan[f"Rx{n}"] = (own,)
        b.link(f"FA{n}:f", f"DE{n}:a")
        b.link(f"FA{n}:r", f"DW{n}:a")
        b.link(f"DE{n}:b", f"CW{n}:db")
        b.link(f"DW{n}:b", f"CW{n}:da")
        b.link(f"DE{n}:d", f"Rx{n}:east")
        b.link(f"DW{n}:d", f"Rx{n}:west")
    for n in range(1, cfg.branches + 1):
        b.link(f"CW{n}:b", f"CW{_east(n, cfg)}:a", cfg.span_km, cfg.span_connectors)
    return b, emitters, plan


def _p2_ring(b: _Builder, n: int, suffix: str, cfg: PrototypeConfig) -> None:
    node, own = f"N{n}", cfg.channel(n)
    local = {"d": {"drop_from": ["a"], "add_to": "b"}}
    if cfg.ring_mode == "closed":
        local["t"] = {"drop_from": [], "add_to": "b"}
    b.add(Element(f"CI{suffix}{n}", "circulator", node))
    b.add(Element(f"DD{suffix}{n}", "dwdm_oadm", node, channel_band([own])))
    b.add(
        Element(
            f"CW{suffix}{n}",
            "cwdm_oadm",
            node,
            (cfg.cwdm_band_nm,),
            {"line": ["a", "b"], "pass": [["a", "b"]], "local": local},
        )
    )
    b.link(f"CI{suffix}{n}:p2", f"DD{suffix}{n}:a")
    b.link(f"DD{suffix}{n}:b", f"CW{suffix}{n}:d")
    b.link(f"DD{suffix}{n}:d", f"Rx{n}:{'in' if not suffix else 'in2'}")
    if cfg.ring_mode == "closed":
        b.link(f"CI{suffix}{n}:p3", f"CW{suffix}{n}:t")


def _build_p2(cfg: PrototypeConfig) -> tuple[_Builder, dict, dict]:
    b = _Builder(cfg)
    emitters, plan = {}, {}
    all_channels = tuple(cfg.channel(n) for n in range(1, cfg.branches + 1))
    dual = cfg.ring_mode == "dual"
    for n in range(1, cfg.branches + 1):
        node = f"N{n}"
        b.add(Element(f"Rx{n}", "receiver", node))
        _p2_ring(b, n, "", cfg)
        if dual:
            _p2_ring(b, n, "B", cfg)
            b.add(Element(f"J{n}", "splitter_1x2", node))
            b.link(f"J{n}:o1", f"CI{n}:p1")
            b.link(f"J{n}:o2", f"CIB{n}:p1")
            head = f"J{n}:c"
        else:
            head = f"CI{n}:p1"
        for tx in b.access(n, head):
            emitters[tx] = all_channels
        plan[f"Rx{n}"] = (cfg.channel(n),)
    for n in range(1, cfg.branches + 1):
        b.link(f"CW{n}:b", f"CW{_east(n, cfg)}:a", cfg.span_km, cfg.span_connectors)
        if dual:
            b.link(f"CWB{n}:b", f"CWB{_west(n, cfg)}:a", cfg.span_km, cfg.span_connectors)
    return b, emitters, plan


def _awg_channel(cfg: PrototypeConfig, port: int, band: int) -> float:
    return round(cfg.awg_band_base_nm + cfg.awg_band_step_nm * band + cfg.awg_spacing_nm * (port - 1), 6)


def _build_p3(cfg: PrototypeConfig) -> tuple[_Builder, dict, dict]:
    b = _Builder(cfg)
    emitters, plan = {}, {}
    width = cfg.awg_spacing_nm * 40
    for n in range(1, cfg.branches + 1):
        node = f"N{n}"
        band_idx = (n - 1) % cfg.awg_bands
        lo = cfg.awg_band_base_nm + cfg.awg_band_step_nm * band_idx - cfg.awg_spacing_nm / 2
        b.add(
            Element(
                f"OA{n}",
                "dwdm_oadm",
                node,
                ((round(lo, 6), round(lo + width, 6)),),
                {"line": ["own", "west", "east"], "pass": [], "local": {"d": {"drop_from": ["own", "west", "east"], "add_to": None}}},
            )
        )
        b.add(Element(f"SP{n}", "splitter_1x4", node))
        b.add(Element(f"Rx{n}", "receiver", node))
        txs = _tx_names(n, cfg)
        chans = {
            f"o{k}": [_awg_channel(cfg, k, band) for band in range(cfg.awg_bands)] for k in range(1, len(txs) + 1)
        }
        b.add(Element(f"AWG{n}", "awg", node, (), {"channels": chans}))
        for k, tx in enumerate(txs, start=1):
            b.add(Element(tx, "emitter", None))
            b.link(f"{tx}:out", f"AWG{n}:o{k}")
            emitters[tx] = tuple(chans[f"o{k}"])
        b.link(f"AWG{n}:c", f"SP{n}:c", cfg.access_km, cfg.feeder_connectors)
        b.link(f"SP{n}:o1", f"OA{n}:own")
        b.link(f"OA{n}:d", f"Rx{n}:in")
        plan[f"Rx{n}"] = tuple(_awg_channel(cfg, k, band_idx) for k in range(1, len(txs) + 1))
    for n in range(1, cfg.branches + 1):
        b.link(f"SP{n}:o2", f"OA{_east(n, cfg)}:west", cfg.span_km, cfg.span_connectors)
        b.link(f"SP{n}:o3", f"OA{_west(n, cfg)}:east", cfg.span_km, cfg.span_connectors)
    return b, emitters, plan


def build_prototype(kind: str, config: PrototypeConfig | None = None, catalog=None) -> OpticalTopology:
    cfg = config or PrototypeConfig()
    _check(kind, cfg)
    builder = {"p1": _build_p1, "p2": _build_p2, "p3": _build_p3}[kind]
    b, emitters, plan = builder(cfg)
    name = f"{kind}-{cfg.ring_mode}" if kind == "p2" else kind
    params = asdict(cfg)
    params["kind"] = kind
    extra = {} if catalog is None else {"catalog": catalog}
    return OpticalTopology(name, kind, dict(b.elements), tuple(b.links), emitters, plan, params, **extra)
