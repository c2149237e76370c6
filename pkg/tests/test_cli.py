import json
import subprocess
import sys

import pytest

from wtrnet.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_two_path(capsys):
    code, out, _ = run(capsys, "check", "two_path")
    assert code == 0
    assert json.loads(out)["status"] == "admissible"


def test_check_naive(capsys):
    code, out, _ = run(capsys, "check", "naive")
    assert code == 1
    pats = {p["id"]: p["verdict"] for p in json.loads(out)["patterns"]}
    assert pats["tap-t1"] == "fully_leaked"


def test_check_brute_method_and_field(capsys):
    code, out, _ = run(capsys, "check", "crossed", "--method", "brute", "--field-q", "5")
    assert code == 0
    assert json.loads(out)["field_q"] == 5
    code, _, err = run(capsys, "check", "crossed", "--method", "brute", "--cap-enum", "10")
    assert code == 2 and "cap" in err


def test_check_files_and_malformed(capsys, tmp_path):
    net = tmp_path / "net.json"
    code_file = tmp_path / "code.json"
    main(["search", "two_path", "-o", str(code_file)])
    capsys.readouterr()
    from wtrnet.io import load_document

    net.write_text(json.dumps(load_document("two_path.network")))
    assert run(capsys, "check", str(net), str(code_file))[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(capsys, "check", str(bad), str(code_file))
    assert code == 2 and "invalid JSON" in err
    assert run(capsys, "check", "nothing_here")[0] == 2


def test_rate(capsys):
    code, out, _ = run(capsys, "rate", "--preset", "clavis", "--max", "30")
    assert code == 0
    lines = out.strip().splitlines()
    rows = [ln for ln in lines[1:] if not ln.startswith("#")]
    assert len(rows) == 61
    cutoff = float(lines[-1].split("=")[1])
    assert 17 <= cutoff <= 23
    code, out, _ = run(capsys, "rate", "--preset", "gys")
    rates = [float(r.split(",")[1]) for r in out.strip().splitlines()[1:] if not r.startswith("#")]
    assert all(b <= a for a, b in zip(rates, rates[1:]))


def test_rate_errors(capsys):
    assert run(capsys, "rate", "--preset", "nope")[0] == 2
    assert run(capsys, "rate", "--preset", "clavis", "--e-det", "0.3")[0] == 1
    assert run(capsys, "rate", "--step", "0")[0] == 2


def test_budget(capsys):
    code, out, _ = run(capsys, "budget", "p1", "--tx", "Tx1", "--wavelength", "1540")
    assert code == 0
    assert out.strip().splitlines()[-1] == "total,,10.600,10.600"
    code, out, _ = run(capsys, "budget", "p1", "--tx", "Tx2", "--wavelength", "1540")
    assert out.strip().splitlines()[-1].split(",")[2] == "15.500"
    code, out, _ = run(capsys, "budget", "p1", "--tx", "Tx2", "--rx", "Rx3")
    assert code == 0 and "Rx3" in out.splitlines()[0]
    assert run(capsys, "budget", "p1", "--tx", "Tx9", "--wavelength", "1540")[0] == 2
    code, _, err = run(capsys, "budget", "p1", "--tx", "Tx1", "--wavelength", "1550")
    assert code == 1 and "FA5" in err


def test_budget_ring_mode(capsys):
    assert run(capsys, "budget", "p2", "--tx", "Tx1", "--rx", "Rx4")[0] == 1
    assert run(capsys, "budget", "p2", "--tx", "Tx1", "--rx", "Rx4", "--ring-mode", "closed")[0] == 0


def test_plan_and_simulate(capsys, tmp_path):
    plan_file = tmp_path / "plan.json"
    code, out, _ = run(capsys, "plan", "p1", "--pair", "Tx1,Tx2", "--budget-db", "20", "--field-q", "3", "-o", str(plan_file))
    assert code == 0
    rep = json.loads(out)
    assert rep["admissibility"]["status"] == "admissible"
    assert rep["resilience"][0]["disjoint_path_count"] == 2
    assert rep["throughput"]["effective_rate_bps"] > 0
    code, out, _ = run(capsys, "simulate", str(plan_file), "--message", "2", "--seed", "7")
    assert code == 0 and "[throughput]" in out


def test_plan_negative(capsys):
    code, _, err = run(capsys, "plan", "p3", "--pair", "Tx1,Tx3", "--budget-db", "30", "--max-links", "2")
    assert code == 1 and "node-disjoint" in err
    assert run(capsys, "plan", "p1", "--pair", "Tx1-Tx2")[0] == 2
    assert run(capsys, "plan", "p1", "--pair", "Tx1,Tx77")[0] == 2


def test_plan_relay_chain(capsys):
    code, out, _ = run(capsys, "plan", "p1", "--pair", "Tx1,Tx3")
    assert code == 0
    paths = json.loads(out)["paths"]["Tx1->Tx3"]
    assert max(len(p) for p in paths) == 5


def test_simulate_examples(capsys):
    code, out, _ = run(capsys, "simulate", "two_path", "--message", "2", "--seed", "7", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["delivered"] == {"u": {"m": 2}}
    assert {a["verdict"] for a in doc["audit"]} == {"secure"}
    code, out, _ = run(capsys, "simulate", "two_path", "--message", "2", "--seed", "7", "--mode", "trusted", "--format", "json")
    sessions = json.loads(out)
    assert [a["verdict"] for s in sessions for a in s["audit"]] == ["fully_leaked", "fully_leaked"]


def test_simulate_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["simulate", "two_path", "--message", "1", "--seed", "3", "-o", str(a)])
    main(["simulate", "two_path", "--message", "1", "--seed", "3", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_simulate_not_admissible(capsys, tmp_path):
    from wtrnet.io import load_document

    plan = load_document("two_path.plan")
    plan["code"]["coefficients"]["s>t2"] = {"m": 1}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(plan))
    assert run(capsys, "simulate", str(f))[0] == 1
    assert run(capsys, "simulate", str(f), "--override")[0] == 0


def test_search(capsys):
    code, out, _ = run(capsys, "search", "two_path")
    assert code == 0 and json.loads(out)["kind"] == "code"
    assert run(capsys, "search", "two_path", "--cap-search", "5")[0] == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wtrnet.cli", "check", "two_path"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert '"admissible"' in proc.stdout


def test_check_accepts_full_fixture_names(capsys):
    assert main(["check", "two_path.network", "two_path.code"]) == 0
    assert main(["check", "two_path.network"]) == 0
    capsys.readouterr()
