"""Regenerate the bundled JSON fixtures from the in-code scenarios and prototypes."""

from __future__ import annotations

from pathlib import Path

from wtrnet.io import NetworkSpec, Plan, code_to_doc, dumps, network_to_doc, plan_to_doc, topology_to_doc
from wtrnet.optical.prototypes import PROTOTYPES, build_prototype
from wtrnet.scenarios import SCENARIOS, builtin_scenario

OUT = Path(__file__).resolve().parents[1] / "src" / "wtrnet" / "data" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name in SCENARIOS:
        sc = builtin_scenario(name)
        net = NetworkSpec(sc.graph, sc.sources, sc.users, sc.patterns)
        (OUT / f"{name}.network.json").write_text(dumps(network_to_doc(net)))
        (OUT / f"{name}.code.json").write_text(dumps(code_to_doc(sc.code)))
        if name == "two_path":
            plan = Plan(net, sc.code, {"link_rates_bps": {e: 1000.0 for e in sc.graph.edge_ids}})
            (OUT / f"{name}.plan.json").write_text(dumps(plan_to_doc(plan)))
    for kind in PROTOTYPES:
        (OUT / f"{kind}.topology.json").write_text(dumps(topology_to_doc(build_prototype(kind))))


if __name__ == "__main__":
    main()
