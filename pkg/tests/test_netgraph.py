import pytest

from wtrnet.graph import build_graph
from wtrnet.optical.netgraph import InsufficientPaths, disjoint_link_paths, to_netcode_graph
from wtrnet.optical.prototypes import build_prototype
from wtrnet.optical.topology import UnknownEmitter


@pytest.fixture(scope="module")
def p1():
    return build_prototype("p1")


def test_neighbour_pairing_has_two_path_shape(p1):
    ng = to_netcode_graph(p1, [("Tx1", "Tx2")], 20)
    g = ng.graph
    assert ng.insufficient == ()
    assert g.roles == {"Tx1": "source", "Tx2": "user", "Rx1": "intermediate", "Rx2": "intermediate"}
    assert {(e.tail, e.head) for e in g.edges} == {("Tx1", "Rx1"), ("Rx1", "Tx2"), ("Tx1", "Rx2"), ("Rx2", "Tx2")}
    assert set(ng.link_losses) == set(g.edge_ids)
    assert ng.link_losses["Tx1>Rx1"] == (1540.0, pytest.approx(10.6))


def test_second_neighbour_uses_relay_chain(p1):
    ng = to_netcode_graph(p1, [("Tx1", "Tx3")], 20)
    paths = ng.paths[("Tx1", "Tx3")]
    assert [len(p) - 1 for p in paths] == [2, 4]
    assert paths[0] == ["Tx1", "Rx2", "Tx3"]
    assert ng.graph.roles["Tx2"] == "intermediate"


def test_tight_budget_is_insufficient(p1):
    ng = to_netcode_graph(p1, [("Tx1", "Tx2")], 12)
    assert ng.insufficient == (("Tx1", "Tx2"),)


def test_direct_only_mode_limits_reach():
    # without emitter relays only receivers shared by both ends qualify
    for kind in ("p1", "p3"):
        topo = build_prototype(kind)
        ng = to_netcode_graph(topo, [("Tx1", "Tx3")], 30, max_links=2)
        assert ng.insufficient == (("Tx1", "Tx3"),)
        assert ng.paths[("Tx1", "Tx3")] == [["Tx1", "Rx2", "Tx3"]]


def test_unknown_or_degenerate_pairing(p1):
    with pytest.raises(UnknownEmitter):
        to_netcode_graph(p1, [("Tx1", "Tx42")], 20)
    with pytest.raises(ValueError):
        to_netcode_graph(p1, [("Tx1", "Tx1")], 20)


@pytest.mark.parametrize("budget", [15.5, 20, 30])
def test_every_pairing_builds_valid_graph(p1, budget):
    txs = list(p1.emitters)
    for s in txs:
        for u in txs:
            if s != u:
                ng = to_netcode_graph(p1, [(s, u)], budget)
                g = ng.graph
                # rebuilding validates acyclicity and endpoints again
                build_graph([(n, g.roles[n]) for n in g.nodes], [(e.id, e.tail, e.head) for e in g.edges])
                for p in ng.paths[(s, u)]:
                    assert p[0] == s and p[-1] == u


def test_disjoint_selection_prefers_fewest_links():
    links = {frozenset(p): (0.0, 0.0) for p in [("s", "a"), ("a", "u"), ("s", "b"), ("b", "c"), ("c", "u"), ("s", "d"), ("d", "u")]}
    assert disjoint_link_paths(links, "s", "u") == [["s", "a", "u"], ["s", "d", "u"]]
    assert disjoint_link_paths(links, "s", "u", max_paths=3) == [["s", "a", "u"], ["s", "d", "u"], ["s", "b", "c", "u"]]


def test_insufficient_paths_is_an_exception_type():
    assert issubclass(InsufficientPaths, Exception)
