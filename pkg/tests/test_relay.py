import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from wtrnet.netcode import EavesdropPattern
from wtrnet.qkd import preset, secret_key_rate
from wtrnet.relay import (
    MissingRate,
    NotAdmissible,
    effective_rate,
    link_key_rates,
    simulate_trusted_chain,
    simulate_wtr_exchange,
)
from wtrnet.scenarios import builtin_scenario


def test_trusted_two_link_chain_leaks():
    s = simulate_trusted_chain(["a", "t", "b"], 2, seed=1)
    assert set(s.views["t"]) == {"r1", "r2", "a>t", "t>b"}
    assert (s.views["t"]["a>t"] - s.views["t"]["r1"]) % 3 == 2
    entry = s.audit.by_pattern()["tap-t"]
    assert entry.posterior == 0 and entry.verdict == "fully_leaked"
    assert s.delivered == {"b": {"m": 2}}


def test_direct_link_has_no_audit():
    s = simulate_trusted_chain(["a", "b"], 1, seed=0, q=2)
    assert s.audit.entries == []
    assert s.correct


def test_five_link_chain_all_repeaters_leak():
    s = simulate_trusted_chain(list("abcdef"), 1, seed=3, q=5)
    assert [e.verdict for e in s.audit.entries] == ["fully_leaked"] * 4
    assert s.correct


def test_chain_errors():
    with pytest.raises(ValueError):
        simulate_trusted_chain(["a"], 1)
    with pytest.raises(ValueError):
        simulate_trusted_chain(["a", "b", "a"], 1)


def test_wtr_two_path_example():
    sc = builtin_scenario("two_path")
    s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 2, seed=7)
    assert s.delivered == {"u": {"m": 2}}
    assert {e.pattern: e.verdict for e in s.audit.entries} == {"tap-t1": "secure", "tap-t2": "secure"}
    # the pad is k on one path and m + k on the other
    k = s.keys["k"]
    assert s.transmissions == {"s>t1": (2 + k) % 3, "s>t2": k, "t1>u": (2 + k) % 3, "t2>u": k}
    assert s.seed == 7


def test_naive_code_needs_override():
    sc = builtin_scenario("naive")
    with pytest.raises(NotAdmissible):
        simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 1, seed=0)
    s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 1, seed=0, override=True)
    assert [e.verdict for e in s.audit.entries] == ["fully_leaked", "fully_leaked"]
    assert s.views["t1"]["s>t1"] == 1


def test_crossed_joint_target_partially_leaks():
    sc = builtin_scenario("crossed")
    joint = EavesdropPattern("t2-joint", ("t2",), ("m1", "m2"))
    s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, {"m1": 1, "m2": 2}, seed=5, audit_only=[joint])
    audit = s.audit.by_pattern()
    assert audit["tap-t2-m1"].verdict == "secure"
    assert audit["tap-t2-m2"].verdict == "secure"
    assert (audit["t2-joint"].prior, audit["t2-joint"].posterior) == (2, 1)
    assert audit["t2-joint"].verdict == "partially_leaked"
    assert s.delivered == {"u1": {"m2": 2}, "u2": {"m1": 1}}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["two_path", "multicast", "crossed"]), st.integers(0, 10**6), st.integers(0, 2))
def test_delivery_correct_for_any_seed(name, seed, m):
    sc = builtin_scenario(name)
    msg = {lab: (m + i) % 3 for i, lab in enumerate(sc.code.sources.message_labels)}
    s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, msg, seed=seed)
    assert s.correct
    for e in s.audit.entries:
        assert e.posterior <= e.prior


def test_same_seed_same_transcript():
    sc = builtin_scenario("two_path")
    a = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 2, seed=11).transcript()
    b = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 2, seed=11).transcript()
    assert a == b
    assert "[audit]" in a and "tap-t1\tt1\tm\t1\t1\tsecure" in a


def test_repeater_symbol_uniform():
    sc = builtin_scenario("two_path")
    seen = np.zeros(3, dtype=int)
    for seed in range(600):
        s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 2, seed=seed)
        seen[s.views["t2"]["s>t2"]] += 1
    assert chisquare(seen).pvalue > 0.01


def test_message_forms():
    sc = builtin_scenario("crossed")
    with pytest.raises(ValueError):
        simulate_wtr_exchange(sc.code, sc.users, sc.patterns, 1, seed=0)
    s = simulate_wtr_exchange(sc.code, sc.users, sc.patterns, [2, 1], seed=0)
    assert s.message == {"m1": 2, "m2": 1}


def test_effective_rate_examples():
    code = builtin_scenario("two_path").code
    even = effective_rate(code, {e: 1000.0 for e in code.graph.edge_ids})
    assert even.effective_rate == 1000.0
    slow = effective_rate(code, {"s>t1": 1000.0, "t1>u": 1000.0, "s>t2": 400.0, "t2>u": 400.0})
    assert slow.effective_rate == 400.0 and slow.bottleneck == "s>t2"
    chain = effective_rate(["a>t", "t>b"], {"a>t": 1000.0, "t>b": 1000.0})
    assert chain.effective_rate == 1000.0
    with pytest.raises(MissingRate):
        effective_rate(code, {"s>t1": 1.0})


@given(st.lists(st.floats(1, 1e6), min_size=4, max_size=4))
def test_effective_rate_never_exceeds_slowest_link(rates):
    code = builtin_scenario("two_path").code
    rep = effective_rate(code, dict(zip(code.graph.edge_ids, rates)))
    assert rep.effective_rate <= min(rates)


def test_link_key_rates():
    p = preset("clavis")
    rates = link_key_rates({"a": 10.0, "b": (1540.0, 15.5)}, p, 5e6)
    assert rates["a"] == pytest.approx(secret_key_rate(p, 10.0) * 5e6)
    assert rates["b"] == pytest.approx(secret_key_rate(p, 15.5) * 5e6)
