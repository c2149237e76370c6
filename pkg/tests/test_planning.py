import pytest

from wtrnet.io import parse_plan, plan_to_doc
from wtrnet.netcode import check_admissible
from wtrnet.optical.netgraph import InsufficientPaths
from wtrnet.optical.prototypes import build_prototype
from wtrnet.planning import plan_network


@pytest.fixture(scope="module")
def p1():
    return build_prototype("p1")


def test_neighbour_plan(p1):
    res = plan_network(p1, [("Tx1", "Tx2")], 20, q=3)
    assert res.admissibility.admissible
    (rep,) = res.resilience
    assert rep.disjoint_path_count == 2
    assert rep.max_byzantine_t == 0
    assert rep.authenticity_feasible
    assert {p.id for p in res.network.patterns} == {"tap-Rx1", "tap-Rx2"}
    # independent re-check with the enumeration oracle
    assert check_admissible(res.code, res.network.users, res.network.patterns, method="brute").admissible


def test_plan_is_deterministic(p1):
    a = plan_network(p1, [("Tx1", "Tx2")], 20).to_dict()
    b = plan_network(p1, [("Tx1", "Tx2")], 20).to_dict()
    assert a == b


def test_relay_chain_plan(p1):
    res = plan_network(p1, [("Tx1", "Tx3")], 20)
    assert res.admissibility.admissible
    assert "tap-Tx2" in {p.id for p in res.network.patterns}


def test_insufficient(p1):
    with pytest.raises(InsufficientPaths):
        plan_network(p1, [("Tx1", "Tx2")], 12)
    with pytest.raises(InsufficientPaths):
        plan_network(build_prototype("p3"), [("Tx1", "Tx3")], 30, max_links=2)


def test_plan_document_round_trip(p1):
    res = plan_network(p1, [("Tx1", "Tx2")], 20)
    doc = plan_to_doc(res.plan)
    again = parse_plan(doc)
    assert again.code.global_maps == res.code.global_maps
    assert plan_to_doc(again) == doc
    assert doc["meta"]["link_losses_db"]["Tx1>Rx1"] == pytest.approx(10.6)


def test_two_pairings_share_graph(p1):
    res = plan_network(p1, [("Tx1", "Tx2"), ("Tx3", "Tx4")], 20, q=2)
    assert res.admissibility.admissible
    assert res.network.sources.message_labels == ["m1", "m2"]
