"""Linear network codes over an extended message space and their security.

The extended source vector stacks every source's message symbols followed by
its key symbols, in source declaration order.  Each edge carries one field
symbol, a fixed linear function of that vector (its *global map*).  Because
every component is uniform and independent, the conditional entropy of any
set of components given a set of edge symbols is a rank difference; all
entropies here are measured in log_q units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import as_matrix, check_modulus, rank, solve_left
from .graph import NetworkGraph, adjacency

DEFAULT_ENUM_CAP = 3**12
DEFAULT_SEARCH_CAP = 10**7


class CodeError(ValueError):
    pass


class IncompleteCode(CodeError):
    pass


class EnumerationCapExceeded(RuntimeError):
    pass


class SearchCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Source:
    node: str
    messages: tuple[str, ...] = ()
    keys: tuple[str, ...] = ()


@dataclass(frozen=True)
class SourceSpec:
    q: int
    sources: tuple[Source, ...]

    def __post_init__(self):
        check_modulus(self.q)
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise CodeError(f"duplicate component labels in {labels}")
        if not labels:
            raise CodeError("extended message space is empty")

    @property
    def labels(self) -> list[str]:
        return [lab for s in self.sources for lab in (*s.messages, *s.keys)]

    @property
    def message_labels(self) -> list[str]:
        return [m for s in self.sources for m in s.messages]

    @property
    def key_labels(self) -> list[str]:
        return [k for s in self.sources for k in s.keys]

    @property
    def d(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise CodeError(f"unknown component {label!r}") from None

    def owned_by(self, node: str) -> list[str]:
        return [lab for s in self.sources if s.node == node for lab in (*s.messages, *s.keys)]


@dataclass(frozen=True)
class UserSpec:
    node: str
    wants: tuple[str, ...]


@dataclass(frozen=True)
class EavesdropPattern:
    id: str
    nodes: tuple[str, ...]
    targets: tuple[str, ...]


@dataclass(frozen=True)
class LinearNetworkCode:
    graph: NetworkGraph
    sources: SourceSpec
    coefficients: Mapping[str, Mapping[str, int]]
    global_maps: Mapping[str, tuple[int, ...]] = field(compare=False)

    @property
    def q(self) -> int:
        return self.sources.q

    def rows(self, edge_ids: Iterable[str]) -> np.ndarray:
        ids = list(edge_ids)
        if not ids:
            return np.zeros((0, self.sources.d), dtype=np.int64)
        return np.array([self.global_maps[e] for e in ids], dtype=np.int64)

    def selector(self, targets: Iterable) -> np.ndarray:
        idx = [t if isinstance(t, (int, np.integer)) else self.sources.index(t) for t in targets]
        sel = np.zeros((len(idx), self.sources.d), dtype=np.int64)
        for r, i in enumerate(idx):
            if not 0 <= i < self.sources.d:
                raise CodeError(f"component index {i} out of range")
            sel[r, i] = 1
        return sel


def edge_inputs(graph: NetworkGraph, sources: SourceSpec, edge_id: str) -> list[str]:
    """Names of the local inputs an edge's coefficients refer to.

    Incoming edges of the tail node (graph order) followed by the extended
    components generated at the tail node.
    """
    tail = graph.edge(edge_id).tail
    return [e.id for e in graph.in_edges(tail)] + sources.owned_by(tail)


def _validate_sources(graph: NetworkGraph, sources: SourceSpec) -> None:
    clash = set(sources.labels) & set(graph.edge_ids)
    if clash:
        raise CodeError(f"component labels collide with edge ids: {sorted(clash)}")
    for s in sources.sources:
        if s.node not in graph.roles:
            raise CodeError(f"source node {s.node!r} not in graph")


def propagate_code(
    graph: NetworkGraph,
    sources: SourceSpec,
    local_coefficients: Mapping[str, Mapping[str, int] | Sequence[int]],
) -> LinearNetworkCode:
    """Compute every edge's global map by forward substitution.

    ``local_coefficients[e]`` is either a mapping from input name (see
    :func:`edge_inputs`) to coefficient, with absent inputs meaning zero, or
    a sequence in input order.
    """
    _validate_sources(graph, sources)
    q, d = sources.q, sources.d
    missing = [e for e in graph.edge_ids if e not in local_coefficients]
    if missing:
        raise IncompleteCode(f"no coefficients for edges {missing}")
    extra = set(local_coefficients) - set(graph.edge_ids)
    if extra:
        raise CodeError(f"coefficients given for unknown edges {sorted(extra)}")

    coeffs: dict[str, dict[str, int]] = {}
    maps: dict[str, np.ndarray] = {}
    for e in graph.edges_in_topological_order():
        inputs = edge_inputs(graph, sources, e.id)
        given = local_coefficients[e.id]
        if isinstance(given, Mapping):
            unknown = set(given) - set(inputs)
            if unknown:
                raise CodeError(f"edge {e.id!r}: inputs {sorted(unknown)} not available (have {inputs})")
            local = {name: int(given.get(name, 0)) % q for name in inputs}
        else:
            given = list(given)
            if len(given) != len(inputs):
                raise CodeError(f"edge {e.id!r}: expected {len(inputs)} coefficients, got {len(given)}")
            local = {name: int(c) % q for name, c in zip(inputs, given)}
        row = np.zeros(d, dtype=np.int64)
        for name, c in local.items():
            if c == 0:
                continue
            if name in maps:
                row += c * maps[name]
            else:
                row[sources.index(name)] += c
        maps[e.id] = row % q
        coeffs[e.id] = local

    ordered = {e: tuple(int(v) for v in maps[e]) for e in graph.edge_ids}
    return LinearNetworkCode(graph, sources, {e: coeffs[e] for e in graph.edge_ids}, ordered)


# -- entropy ------------------------------------------------------------------


def rank_entropy(observed: np.ndarray, target: np.ndarray, q: int) -> int:
    """H(target | observed) for uniform inputs, in log_q units."""
    observed = as_matrix(observed, q, width=target.shape[1])
    both = np.concatenate([observed, target], axis=0)
    return rank(both, q) - rank(observed, q)


def enumerated_entropy(observed: np.ndarray, target: np.ndarray, q: int, cap: int = DEFAULT_ENUM_CAP) -> float:
    """H(target | observed) by tabulating every input vector, in log_q units."""
    d = target.shape[1]
    if q**d > cap:
        raise EnumerationCapExceeded(f"{q}^{d} states exceeds enumeration cap {cap}")
    observed = as_matrix(observed, q, width=d)
    grid = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64).reshape(-1, d)
    obs = (grid @ observed.T) % q
    tgt = (grid @ target.T) % q

    def shannon(symbols):
        if symbols.shape[1] == 0:
            return 0.0
        _, counts = np.unique(symbols, axis=0, return_counts=True)
        p = counts / symbols.shape[0]
        return float(-(p * np.log(p)).sum() / math.log(q))

    return shannon(np.concatenate([obs, tgt], axis=1)) - shannon(obs)


def _target_rows(code: LinearNetworkCode, target) -> np.ndarray:
    return code.selector(target)


def conditional_entropy_rank(code: LinearNetworkCode, target, observed: Iterable[str]) -> int:
    return rank_entropy(code.rows(observed), _target_rows(code, target), code.q)


def brute_force_entropy(code: LinearNetworkCode, target, observed: Iterable[str], cap: int = DEFAULT_ENUM_CAP) -> float:
    return enumerated_entropy(code.rows(observed), _target_rows(code, target), code.q, cap)


def to_bits(entropy: float, q: int) -> float:
    return entropy * math.log2(q)


def verdict(prior: float, posterior: float) -> str:
    if posterior <= 0:
        return "fully_leaked" if prior > 0 else "secure"
    if posterior >= prior:
        return "secure"
    return "partially_leaked"


# -- admissibility ------------------------------------------------------------


def pattern_view(graph: NetworkGraph, pattern: EavesdropPattern) -> list[str]:
    """Edges adjacent to any tapped node, in graph order."""
    seen: set[str] = set()
    for v in pattern.nodes:
        seen |= adjacency(graph, v)
    return [e for e in graph.edge_ids if e in seen]


def user_view(graph: NetworkGraph, user: UserSpec) -> list[str]:
    return [e.id for e in graph.in_edges(user.node)]


@dataclass
class UserResult:
    node: str
    wants: tuple[str, ...]
    conditional_entropy: float
    decodable: bool


@dataclass
class PatternResult:
    id: str
    nodes: tuple[str, ...]
    targets: tuple[str, ...]
    prior: float
    posterior: float
    secure: bool
    verdict: str


@dataclass
class AdmissibilityReport:
    q: int
    users: list[UserResult]
    patterns: list[PatternResult]

    @property
    def admissible(self) -> bool:
        return all(u.decodable for u in self.users) and all(p.secure for p in self.patterns)

    def to_dict(self) -> dict:
        bits = math.log2(self.q)
        return {
            "status": "admissible" if self.admissible else "not admissible",
            "admissible": self.admissible,
            "field_q": self.q,
            "entropy_unit": f"log{self.q} symbols",
            "users": [
                {
                    "node": u.node,
                    "wants": list(u.wants),
                    "conditional_entropy": u.conditional_entropy,
                    "decodable": u.decodable,
                }
                for u in self.users
            ],
            "patterns": [
                {
                    "id": p.id,
                    "nodes": list(p.nodes),
                    "targets": list(p.targets),
                    "target_entropy": p.prior,
                    "conditional_entropy": p.posterior,
                    "conditional_entropy_bits": round(p.posterior * bits, 12),
                    "secure": p.secure,
                    "verdict": p.verdict,
                }
                for p in self.patterns
            ],
        }


def validate_requirements(code: LinearNetworkCode, users: Sequence[UserSpec], patterns: Sequence[EavesdropPattern]) -> None:
    msgs = set(code.sources.message_labels)
    for u in users:
        code.graph._require(u.node)
        bad = set(u.wants) - msgs
        if bad:
            raise CodeError(f"user {u.node!r} wants non-message components {sorted(bad)}")
    for p in patterns:
        for v in p.nodes:
            code.graph._require(v)
        bad = set(p.targets) - msgs
        if bad:
            raise CodeError(f"pattern {p.id!r} targets non-message components {sorted(bad)}")


def check_admissible(
    code: LinearNetworkCode,
    users: Sequence[UserSpec],
    patterns: Sequence[EavesdropPattern],
    method: str = "rank",
    cap: int = DEFAULT_ENUM_CAP,
) -> AdmissibilityReport:
    """Evaluate the decodable condition per user and the secure condition per pattern."""
    validate_requirements(code, users, patterns)
    if method == "rank":
        entropy = conditional_entropy_rank
    elif method == "brute":
        def entropy(c, t, o):
            return brute_force_entropy(c, t, o, cap)
    else:
        raise ValueError(f"unknown entropy method {method!r}")

    user_results = []
    for u in users:
        h = entropy(code, u.wants, user_view(code.graph, u))
        user_results.append(UserResult(u.node, tuple(u.wants), h, abs(h) < 1e-9))
    pattern_results = []
    for p in patterns:
        prior = float(len(p.targets))
        post = entropy(code, p.targets, pattern_view(code.graph, p))
        secure = abs(post - prior) < 1e-9
        pattern_results.append(
            PatternResult(p.id, tuple(p.nodes), tuple(p.targets), prior, post, secure, verdict(prior, round(post, 9)))
        )
    return AdmissibilityReport(code.q, user_results, pattern_results)


def is_admissible(code: LinearNetworkCode, users, patterns) -> bool:
    """Rank-only shortcut used by the search loop."""
    q = code.q
    for u in users:
        if rank_entropy(code.rows(user_view(code.graph, u)), code.selector(u.wants), q) != 0:
            return False
    for p in patterns:
        if rank_entropy(code.rows(pattern_view(code.graph, p)), code.selector(p.targets), q) != len(p.targets):
            return False
    return True


def decoding_matrix(code: LinearNetworkCode, user: UserSpec) -> np.ndarray | None:
    """Matrix ``X`` with ``X @ Y_u == wanted components``, or ``None`` if undecodable."""
    rows = code.rows(user_view(code.graph, user))
    return solve_left(rows, code.selector(user.wants), code.q)


# -- search -------------------------------------------------------------------


def free_coefficients(graph: NetworkGraph, sources: SourceSpec) -> list[tuple[str, str]]:
    return [(e, name) for e in graph.edge_ids for name in edge_inputs(graph, sources, e)]


def search_code(
    graph: NetworkGraph,
    sources: SourceSpec,
    users: Sequence[UserSpec],
    patterns: Sequence[EavesdropPattern],
    cap: int = DEFAULT_SEARCH_CAP,
) -> LinearNetworkCode | None:
    """Lexicographically first admissible assignment of local coefficients.

    Assignments are enumerated over ``[0, q)^n`` with positions ordered by
    edge, then by input (see :func:`free_coefficients`).  Returns ``None``
    when no admissible code exists.
    """
    _validate_sources(graph, sources)
    q = sources.q
    slots = free_coefficients(graph, sources)
    if q ** len(slots) > cap:
        raise SearchCapExceeded(f"{q}^{len(slots)} assignments exceeds search cap {cap}")
    per_edge: dict[str, list[int]] = {}
    for i, (e, _) in enumerate(slots):
        per_edge.setdefault(e, []).append(i)
    probe = propagate_code(graph, sources, {e: [0] * len(per_edge.get(e, [])) for e in graph.edge_ids})
    validate_requirements(probe, users, patterns)

    for assignment in itertools.product(range(q), repeat=len(slots)):
        local = {e: [assignment[i] for i in per_edge.get(e, [])] for e in graph.edge_ids}
        code = propagate_code(graph, sources, local)
        if is_admissible(code, users, patterns):
            return code
    return None
