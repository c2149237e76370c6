import json

import pytest

from wtrnet.optical.catalog import CatalogError, default_catalog, load_catalog, parse_catalog
from wtrnet.optical.prototypes import PROTOTYPES, RING_MODES, PrototypeConfig, build_prototype
from wtrnet.optical.topology import (
    Element,
    Link,
    OpticalTopology,
    TopologyError,
    UnknownEmitter,
    channel_band,
    component_tally,
    in_band,
    path_loss,
    reachable_receivers,
    route_wavelength,
)


@pytest.fixture(scope="module")
def p1():
    return build_prototype("p1")


def test_catalog_table_values():
    cat = {c.kind: c for c in default_catalog()}
    expected = {
        "fiber": 0.25,
        "splitter_1x2": 3.5,
        "splitter_1x4": 7.0,
        "cwdm_oadm": 0.6,
        "dwdm_oadm": 0.6,
        "bandpass_filter": 0.7,
        "circulator": 0.5,
        "connector_pair": 0.2,
        "awg": 3.0,
    }
    assert {k: v.insertion_loss_db for k, v in cat.items()} == expected
    assert cat["awg"].channels == 40
    assert cat["dwdm_oadm"].in_band(1550) and not cat["dwdm_oadm"].in_band(1300)


def test_catalog_rejects_bad_entries():
    with pytest.raises(CatalogError):
        parse_catalog({"components": [{"kind": "laser", "insertion_loss_db": 1}]})
    with pytest.raises(CatalogError):
        parse_catalog({"components": [{"kind": "awg", "insertion_loss_db": -1}]})
    with pytest.raises(CatalogError):
        parse_catalog({})


def test_catalog_override_changes_budget(tmp_path, monkeypatch):
    f = tmp_path / "cat.json"
    f.write_text(json.dumps({"components": [{"kind": "splitter_1x4", "insertion_loss_db": 6.0}]}))
    assert load_catalog(f)["splitter_1x4"].insertion_loss_db == 6.0
    assert load_catalog(f)["fiber"].insertion_loss_db == 0.25
    monkeypatch.setenv("WTRNET_CATALOG", str(f))
    topo = build_prototype("p1")
    assert path_loss(topo, route_wavelength(topo, "Tx1", 1540).path).total == pytest.approx(9.6)


@pytest.mark.parametrize(
    "tx,wl,rx,total",
    [("Tx1", 1540, "Rx1", 10.6), ("Tx2", 1545, "Rx2", 10.6), ("Tx1", 1545, "Rx2", 15.5), ("Tx2", 1540, "Rx1", 15.5)],
)
def test_p1_reference_budgets(p1, tx, wl, rx, total):
    route = route_wavelength(p1, tx, wl)
    assert route.path.receiver == rx
    budget = path_loss(p1, route.path)
    assert budget.total == pytest.approx(total, abs=0.05)
    assert sum(i.db for i in budget.items) == pytest.approx(budget.total, abs=1e-9)


def test_budget_csv(p1):
    csv_text = path_loss(p1, route_wavelength(p1, "Tx1", 1545).path).to_csv()
    rows = [r.split(",") for r in csv_text.strip().splitlines()]
    assert rows[0] == ["item", "kind", "db", "cumulative_db"]
    assert rows[-1][0] == "total" and float(rows[-1][2]) == pytest.approx(15.5)
    assert float(rows[-2][3]) == pytest.approx(15.5)
    assert {r[1] for r in rows[1:-1]} >= {"fiber", "connector_pair", "splitter_1x4", "cwdm_oadm", "dwdm_oadm"}


def test_blocked_route_names_component(p1):
    route = route_wavelength(p1, "Tx1", 1550)
    assert route.blocked
    assert route.blocking.element.startswith("FA")
    with pytest.raises(TopologyError):
        route.path


def test_unknown_emitter(p1):
    with pytest.raises(UnknownEmitter):
        route_wavelength(p1, "Tx99", 1540)
    with pytest.raises(UnknownEmitter):
        reachable_receivers(p1, "Tx99", 20)


def test_p1_reachability(p1):
    assert set(reachable_receivers(p1, "Tx2", 20)) == {"Rx1", "Rx2", "Rx3"}
    assert reachable_receivers(p1, "Tx2", 0) == {}
    assert set(reachable_receivers(p1, "Tx2", 12)) == {"Rx2"}


def test_p1_wavelength_addresses_receiver(p1):
    # the channel that reaches a receiver does not depend on the emitter
    for tx in p1.emitters:
        for rx, (wl, _) in reachable_receivers(p1, tx, 30).items():
            assert wl in p1.plan[rx]


def test_routing_deterministic(p1):
    a = route_wavelength(p1, "Tx3", 1550)
    b = route_wavelength(p1, "Tx3", 1550)
    assert a == b


def test_p2_modes():
    for mode, expected in (("open", 2), ("dual", 3)):
        topo = build_prototype("p2", PrototypeConfig(ring_mode=mode))
        for tx in topo.emitters:
            assert len(reachable_receivers(topo, tx, 30)) == expected, (mode, tx)
    closed = build_prototype("p2", PrototypeConfig(ring_mode="closed"))
    open_ = build_prototype("p2")
    for tx in closed.emitters:
        assert set(reachable_receivers(closed, tx, 30)) > set(reachable_receivers(open_, tx, 30))


@pytest.mark.parametrize("budget", [10, 15, 20, 25, 30])
def test_p3_nearest_only(budget):
    topo = build_prototype("p3")
    n = len(topo.emitters)
    for i, tx in enumerate(topo.emitters, start=1):
        allowed = {f"Rx{i}", f"Rx{i % n + 1}", f"Rx{(i - 2) % n + 1}"}
        assert set(reachable_receivers(topo, tx, budget)) <= allowed


def test_p3_awg_periodic_channels():
    topo = build_prototype("p3", PrototypeConfig(tx_per_branch=3))
    assert len(topo.emitters) == 15
    for wls in topo.emitters.values():
        assert len(wls) == 2 and wls[1] - wls[0] == pytest.approx(20)
    assert len(set(topo.emitters["Tx1.1"]) & set(topo.emitters["Tx1.2"])) == 0


def test_component_tallies_rank_prototypes():
    counts = {k: sum(component_tally(build_prototype(k))["N1"].values()) for k in PROTOTYPES}
    assert counts == {"p1": 5, "p2": 4, "p3": 3}
    assert component_tally(build_prototype("p3"))["N1"] == {"dwdm_oadm": 1, "splitter_1x4": 1, "awg": 1}


def test_all_modes_build_and_terminate():
    for kind in PROTOTYPES:
        for mode in RING_MODES:
            topo = build_prototype(kind, PrototypeConfig(ring_mode=mode))
            for tx, wls in topo.emitters.items():
                for wl in wls:
                    route_wavelength(topo, tx, wl)


def test_topology_validation():
    els = {
        "T": Element("T", "emitter"),
        "R": Element("R", "receiver"),
        "S": Element("S", "splitter_1x2", node="N"),
    }
    ok = OpticalTopology("t", "custom", els, (Link(("T", "out"), ("S", "o1")), Link(("S", "c"), ("R", "in"))), {"T": (1550.0,)}, {})
    assert route_wavelength(ok, "T", 1550).path.receiver == "R"
    with pytest.raises(TopologyError):
        OpticalTopology("t", "custom", els, (Link(("T", "out"), ("S", "o1")), Link(("S", "o1"), ("R", "in"))), {"T": (1550.0,)}, {})
    with pytest.raises(TopologyError):
        OpticalTopology("t", "custom", els, (), {"T": (1550.0,)}, {})
    with pytest.raises(TopologyError):
        Link(("T", "out"), ("S", "o1"), km=-1)


def test_band_helpers():
    assert not in_band((), 1234)  # an element with no band drops nothing
    assert in_band(((1530, 1565),), 1550)
    assert not in_band(((1530, 1565),), 1570)
    assert channel_band([1540]) == ((1539.8, 1540.2),)
