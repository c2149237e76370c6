"""Command-line front end.

Exit codes: 0 success, 1 analysis-negative (not admissible, blocked route,
insufficient paths, nonviable system), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .field import NotPrime
from .graph import GraphError
from .io import (
    InputError,
    bundled_names,
    NetworkSpec,
    code_to_doc,
    dumps,
    load_document,
    parse_code,
    parse_network,
    parse_plan,
    parse_topology,
    plan_to_doc,
)
from .netcode import (
    DEFAULT_ENUM_CAP,
    DEFAULT_SEARCH_CAP,
    CodeError,
    EnumerationCapExceeded,
    SearchCapExceeded,
    check_admissible,
    search_code,
)
from .optical.netgraph import DEFAULT_MAX_LINKS, InsufficientPaths
from .optical.prototypes import PROTOTYPES, RING_MODES, PrototypeConfig, build_prototype
from .optical.topology import TopologyError, path_loss, route_wavelength
from .planning import NoCodeFound, plan_network
from .qkd import (
    InvalidLoss,
    InvalidParams,
    SystemNonviable,
    curve_to_csv,
    load_presets,
    max_tolerable_loss,
    preset,
    rate_curve,
    with_overrides,
)
from .relay import NotAdmissible, effective_rate, link_key_rates, simulate_trusted_chain, simulate_wtr_exchange
from .resilience import node_disjoint_paths

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
DEFAULT_FREQUENCY_HZ = 5e6

INPUT_ERRORS = (InputError, GraphError, CodeError, TopologyError, InvalidParams, InvalidLoss, NotPrime, KeyError, ValueError)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(msg: str, code: int) -> int:
    print(f"wtrnet: {msg}", file=sys.stderr)
    return code


def _with_q(net: NetworkSpec, q: int | None) -> NetworkSpec:
    if q is None or q == net.q:
        return net
    doc_sources = type(net.sources)(q, net.sources.sources)
    return NetworkSpec(net.graph, doc_sources, net.users, net.patterns)


def _resolve(ref: str, suffix: str) -> dict:
    """A file path, else the bundled fixture ``<ref>.<suffix>`` (or ``ref`` itself)."""
    if Path(ref).exists() or ref in bundled_names():
        return load_document(ref)
    return load_document(f"{ref}.{suffix}")


def _load_network(ref: str) -> NetworkSpec:
    return parse_network(_resolve(ref, "network"))


def _load_code_doc(ref: str | None, network_ref: str) -> dict:
    if ref is None and network_ref.endswith(".network") and not Path(network_ref).exists():
        network_ref = network_ref[: -len(".network")]
    return _resolve(ref or network_ref, "code")


def _load_topology(ref: str, ring_mode: str | None):
    if ref in PROTOTYPES and not Path(ref).exists():
        cfg = PrototypeConfig(ring_mode=ring_mode or "open")
        return build_prototype(ref, cfg)
    if ring_mode:
        print("wtrnet: --ring-mode applies to bundled prototypes only; ignored", file=sys.stderr)
    return parse_topology(load_document(ref))


# -- subcommands --------------------------------------------------------------


def cmd_check(args) -> int:
    net = _with_q(_load_network(args.network), args.field_q)
    doc = _load_code_doc(args.code, args.network)
    doc = dict(doc, field_q=net.q)
    code = parse_code(doc, net)
    report = check_admissible(code, net.users, net.patterns, method=args.method, cap=args.cap_enum)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.output)
    return EXIT_OK if report.admissible else EXIT_NEGATIVE


def cmd_rate(args) -> int:
    params = preset(args.preset)
    params = with_overrides(params, mu=args.mu, eta_det=args.eta_det, y0=args.y0, e_det=args.e_det, f=args.f)
    points = rate_curve(params, args.min, args.max, args.step)
    try:
        cutoff = max_tolerable_loss(params)
    except SystemNonviable as exc:
        _emit(curve_to_csv(points), args.output)
        return _fail(str(exc), EXIT_NEGATIVE)
    _emit(curve_to_csv(points, cutoff), args.output)
    return EXIT_OK


def cmd_budget(args) -> int:
    topo = _load_topology(args.topology, args.ring_mode)
    if args.tx not in topo.emitters:
        return _fail(f"unknown emitter {args.tx!r}", EXIT_INPUT)
    if args.rx is not None and args.rx not in topo.receivers:
        return _fail(f"unknown receiver {args.rx!r}", EXIT_INPUT)
    wavelengths = [args.wavelength] if args.wavelength is not None else sorted(topo.emitters[args.tx])
    best, blocks = None, []
    for wl in wavelengths:
        route = route_wavelength(topo, args.tx, wl)
        for p in route.paths:
            if args.rx is None or p.receiver == args.rx:
                budget = path_loss(topo, p)
                if best is None or budget.total < best.total:
                    best = budget
                break
        if route.blocking is not None:
            blocks.append((wl, route.blocking))
    if best is None:
        if blocks:
            wl, b = blocks[-1]
            return _fail(f"{args.tx} at {wl:g} nm is blocked at {b.element}.{b.port} ({b.reason})", EXIT_NEGATIVE)
        target = args.rx or "any receiver"
        return _fail(f"{args.tx} does not reach {target}", EXIT_NEGATIVE)
    header = f"# {args.tx} -> {best.receiver} at {best.wavelength:g} nm\n"
    _emit(header + best.to_csv(), args.output)
    return EXIT_OK


def _pairs(raw: list[str]) -> list[tuple[str, str]]:
    out = []
    for item in raw:
        parts = [p.strip() for p in item.split(",")]
        if len(parts) != 2 or not all(parts):
            raise InputError(f"pairing {item!r} must look like 'Tx1,Tx2'")
        out.append((parts[0], parts[1]))
    return out


def cmd_plan(args) -> int:
    topo = _load_topology(args.topology, args.ring_mode)
    pairing = _pairs(args.pair)
    try:
        result = plan_network(
            topo, pairing, args.budget_db, q=args.field_q or 3, max_links=args.max_links, search_cap=args.cap_search
        )
    except (InsufficientPaths, NoCodeFound) as exc:
        return _fail(str(exc), EXIT_NEGATIVE)
    plan = result.plan
    rates = link_key_rates(result.netgraph.link_losses, preset(args.preset), args.frequency_hz)
    plan.meta["link_rates_bps"] = rates
    report = result.to_dict()
    report["throughput"] = effective_rate(result.code, rates).to_dict()
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    if args.output:
        Path(args.output).write_text(dumps(plan_to_doc(plan)))
    return EXIT_OK if result.admissibility.admissible else EXIT_NEGATIVE


def _message(raw: str):
    if "=" not in raw:
        return int(raw)
    out = {}
    for part in raw.split(","):
        k, _, v = part.partition("=")
        out[k.strip()] = int(v)
    return out


def cmd_simulate(args) -> int:
    plan = parse_plan(_resolve(args.plan, "plan"))
    net, code = plan.network, plan.code
    message = _message(args.message)
    rates = plan.meta.get("link_rates_bps")
    if args.mode == "trusted":
        # hop-by-hop relay of the message along every disjoint path
        sessions = []
        for u in net.users:
            src = next(s.node for s in net.sources.sources if set(u.wants) & set(s.messages))
            m = message if isinstance(message, int) else message[u.wants[0]]
            for i, path in enumerate(node_disjoint_paths(net.graph, src, u.node).paths):
                sessions.append(simulate_trusted_chain(path, m, seed=args.seed + i, q=net.q))
        if args.format == "json":
            text = json.dumps([s.to_dict() for s in sessions], indent=2) + "\n"
        else:
            text = "".join(s.transcript() + "\n" for s in sessions)
        _emit(text, args.output)
        return EXIT_OK
    try:
        session = simulate_wtr_exchange(code, net.users, net.patterns, message, seed=args.seed, override=args.override)
    except NotAdmissible as exc:
        return _fail(str(exc), EXIT_NEGATIVE)
    throughput = effective_rate(code, rates) if rates else None
    if args.format == "json":
        doc = session.to_dict()
        if throughput:
            doc["throughput"] = throughput.to_dict()
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = session.transcript()
        if throughput:
            text += f"\n[throughput]\neffective_bps\t{throughput.effective_rate:g}\nbottleneck\t{throughput.bottleneck}\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_search(args) -> int:
    net = _with_q(_load_network(args.network), args.field_q)
    code = search_code(net.graph, net.sources, net.users, net.patterns, cap=args.cap_search)
    if code is None:
        return _fail(f"no admissible linear code over GF({net.q})", EXIT_NEGATIVE)
    _emit(dumps(code_to_doc(code)), args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wtrnet", description="Secure network coding over QKD links.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, q=True):
        sp.add_argument("--output", "-o", help="write the main output to this file instead of stdout")
        if q:
            sp.add_argument("--field-q", type=int, help="prime field size q (overrides the file)")

    c = sub.add_parser("check", help="check the secure and decodable conditions of a code")
    c.add_argument("network", help="network file, or a bundled scenario name (two_path, naive, multicast, crossed)")
    c.add_argument("code", nargs="?", help="code file or bundled name (default: the scenario's own code)")
    c.add_argument("--method", choices=("rank", "brute"), default="rank")
    c.add_argument("--cap-enum", type=int, default=DEFAULT_ENUM_CAP, help="max vectors for --method brute")
    common(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("rate", help="secret-key rate curve as CSV")
    r.add_argument("--preset", default="clavis", help=f"one of: {', '.join(load_presets())}")
    r.add_argument("--min", type=float, default=0.0)
    r.add_argument("--max", type=float, default=40.0)
    r.add_argument("--step", type=float, default=0.5)
    for name in ("mu", "eta-det", "y0", "e-det", "f"):
        r.add_argument(f"--{name}", type=float)
    common(r, q=False)
    r.set_defaults(func=cmd_rate)

    b = sub.add_parser("budget", help="itemized loss budget of an optical path")
    b.add_argument("topology", help="topology file or bundled prototype (p1, p2, p3)")
    b.add_argument("--tx", required=True)
    b.add_argument("--rx")
    b.add_argument("--wavelength", type=float)
    b.add_argument("--ring-mode", choices=RING_MODES)
    common(b, q=False)
    b.set_defaults(func=cmd_budget)

    pl = sub.add_parser("plan", help="derive a coding graph, search a code and report resilience")
    pl.add_argument("topology", help="topology file or bundled prototype (p1, p2, p3)")
    pl.add_argument("--pair", action="append", required=True, help="source,user emitter pair; repeatable")
    pl.add_argument("--budget-db", type=float, default=20.0)
    pl.add_argument("--max-links", type=int, default=DEFAULT_MAX_LINKS, help="longest repeater path, in QKD links")
    pl.add_argument("--cap-search", type=int, default=DEFAULT_SEARCH_CAP)
    pl.add_argument("--ring-mode", choices=RING_MODES)
    pl.add_argument("--field-q", type=int, default=3)
    pl.add_argument("--preset", default="clavis", help="QKD system used for the link key rates")
    pl.add_argument("--frequency-hz", type=float, default=DEFAULT_FREQUENCY_HZ, help="emitter pulse rate")
    pl.add_argument("--output", "-o", help="write the plan document (input for 'simulate') here")
    pl.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", help="run one key relay and audit leakage")
    s.add_argument("plan", help="plan file or bundled name (two_path)")
    s.add_argument("--message", default="1", help="symbol, or name=value pairs for several messages")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=("wtr", "trusted"), default="wtr")
    s.add_argument("--override", action="store_true", help="simulate even if the code is not admissible")
    s.add_argument("--format", choices=("text", "json"), default="text")
    common(s, q=False)
    s.set_defaults(func=cmd_simulate)

    se = sub.add_parser("search", help="search an admissible linear code for a network")
    se.add_argument("network", help="network file or bundled scenario name")
    se.add_argument("--cap-search", type=int, default=DEFAULT_SEARCH_CAP)
    common(se)
    se.set_defaults(func=cmd_search)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SearchCapExceeded, EnumerationCapExceeded) as exc:
        return _fail(f"{exc}; raise the cap to continue", EXIT_INPUT)
    except INPUT_ERRORS as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
