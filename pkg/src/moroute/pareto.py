"""Classical ground truth and post-processing for routing QUBOs.

Path enumeration is the independent feasibility oracle: it never looks at the
penalty polynomial. Everything Pareto-related is computed on the feasible set
produced by that oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import Graph, canonical
from .qubo import (Bits, EncodingError, QuboProblem, VariableMap, bits_to_int, bits_to_str,
                   check_weights, int_to_bits, scalarize, to_bits)


def enumerate_paths(g: Graph, s: int, d: int) -> list[tuple[int, ...]]:
    """All simple ``s``-``d`` paths, depth first with neighbors in ascending order."""
    if s not in g.adjacency or d not in g.adjacency:
        raise EncodingError(f"endpoints {s}, {d} must be graph nodes")
    out: list[tuple[int, ...]] = []
    path = [s]
    on_path = {s}

    def visit(u):
        if u == d:
            out.append(tuple(path))
            return
        for v in g.neighbors(u):
            if v not in on_path:
                path.append(v)
                on_path.add(v)
                visit(v)
                path.pop()
                on_path.discard(v)

    visit(s)
    return out


def path_to_bits(path: Sequence[int], vmap: VariableMap) -> tuple[int, ...]:
    if len(path) < 2 or path[0] != vmap.source or path[-1] != vmap.destination:
        raise EncodingError(f"path {path} must run from {vmap.source} to {vmap.destination}")
    if len(set(path)) != len(path):
        raise EncodingError(f"path {path} is not simple")
    bits = [0] * vmap.n
    for u in path[1:-1]:
        bits[vmap.node_var(u)] = 1
    for u, v in zip(path, path[1:]):
        if canonical(u, v) not in vmap.edges:
            raise EncodingError(f"path uses missing edge {(u, v)}")
        bits[vmap.edge_var(u, v)] = 1
    return tuple(bits)


def path_to_bitstring(path: Sequence[int], vmap: VariableMap) -> str:
    return bits_to_str(path_to_bits(path, vmap))


def bitstring_to_path(x: Bits, vmap: VariableMap) -> tuple[int, ...]:
    """Decode a bitstring to the route it encodes; raises if it is not a single path."""
    bits = to_bits(x, vmap.n)
    k = len(vmap.nodes)
    chosen = [e for e, b in zip(vmap.edges, bits[k:]) if b]
    used = {u for u, b in zip(vmap.nodes, bits[:k]) if b}
    adj: dict[int, list[int]] = {}
    for u, v in chosen:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    bad = EncodingError(f"{bits_to_str(bits)} does not encode a simple path")
    if len(adj.get(vmap.source, [])) != 1 or len(adj.get(vmap.destination, [])) != 1:
        raise bad
    path = [vmap.source, adj[vmap.source][0]]
    while path[-1] != vmap.destination:
        nbrs = adj[path[-1]]
        if len(nbrs) != 2:
            raise bad
        nxt = nbrs[0] if nbrs[1] == path[-2] else nbrs[1]
        if nxt in path:
            raise bad
        path.append(nxt)
    if len(chosen) != len(path) - 1 or set(path[1:-1]) != used:
        raise bad
    return tuple(path)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """``a`` dominates ``b`` under minimization."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated(vectors: Sequence[Sequence[float]]) -> list[bool]:
    """Flag each vector that no other vector dominates. Equal vectors keep each other."""
    vecs = np.asarray(vectors, dtype=float)
    flags = []
    for i, v in enumerate(vecs):
        flags.append(not any(dominates(vecs[j], v) for j in range(len(vecs)) if j != i))
    return flags


@dataclass(frozen=True)
class ParetoRecord:
    bitstring: str
    objectives: tuple[float, ...]
    r: tuple[float, ...]
    feasible: bool
    pareto_optimal: bool = False
    probability: float = 0.0

    @property
    def index(self) -> int:
        return bits_to_int(to_bits(self.bitstring, len(self.bitstring)))


def projection(q: QuboProblem, x: Bits) -> np.ndarray:
    """Pareto-plot coordinates: the penalty added to every objective."""
    return q.penalty_value(x) + q.objective_vector(x)


def _record(q: QuboProblem, bits, feasible: bool, optimal: bool = False, prob: float = 0.0):
    obj = q.objective_vector(bits)
    pen = q.penalty_value(bits)
    return ParetoRecord(bits_to_str(bits), tuple(obj.tolist()), tuple((pen + obj).tolist()),
                        feasible, optimal, prob)


def feasible_bitstrings(q: QuboProblem) -> list[tuple[int, ...]]:
    """Bit patterns of all routes, from the path oracle."""
    paths = enumerate_paths(q.graph, q.vmap.source, q.vmap.destination)
    return [path_to_bits(p, q.vmap) for p in paths]


def brute_force_front(q: QuboProblem, max_qubits: int = 24) -> list[ParetoRecord]:
    """Every feasible state with its Pareto flag, sorted by basis integer."""
    if q.n > max_qubits:
        raise ValueError(f"{q.n} variables exceeds the cap of {max_qubits}")
    feas = sorted(feasible_bitstrings(q), key=bits_to_int)
    if not feas:
        raise ValueError("instance has no feasible route")
    vecs = [q.objective_vector(b) for b in feas]
    flags = nondominated(vecs)
    return [_record(q, b, True, f) for b, f in zip(feas, flags)]


def pareto_front(q: QuboProblem) -> list[ParetoRecord]:
    return [r for r in brute_force_front(q) if r.pareto_optimal]


def front_indices(q: QuboProblem) -> list[int]:
    return [r.index for r in pareto_front(q)]


def all_records(q: QuboProblem, probabilities: np.ndarray | None = None,
                indices: Iterable[int] | None = None) -> list[ParetoRecord]:
    """Records for every basis state (or the given subset), vectorized."""
    n = q.n
    feas = {bits_to_int(b): False for b in feasible_bitstrings(q)}
    for rec in brute_force_front(q):
        feas[rec.index] = rec.pareto_optimal
    idx = np.arange(2**n) if indices is None else np.asarray(sorted(set(indices)), dtype=np.int64)
    objt = q.objective_table(idx)
    pen = q.penalty_polynomial().energies(idx)
    out = []
    for col, b in enumerate(idx.tolist()):
        obj = objt[:, col]
        prob = float(probabilities[b]) if probabilities is not None else 0.0
        out.append(ParetoRecord(bits_to_str(int_to_bits(b, n)), tuple(obj.tolist()),
                                tuple((pen[col] + obj).tolist()), b in feas, feas.get(b, False), prob))
    return out


# ---------------------------------------------------------------------------
# candidates from QAOA output
# ---------------------------------------------------------------------------

@dataclass
class CandidateSet:
    records: list[ParetoRecord]
    origin: list[tuple[float, ...]] = field(default_factory=list)


def top_k(probs: np.ndarray | Mapping[str, int], k: int, n: int | None = None) -> list[int]:
    """Indices of the ``k`` most probable states, ties broken by ascending index.

    ``probs`` is a probability vector indexed by basis integer, or sampled
    counts keyed by bitstring.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(probs, Mapping):
        items = [(bits_to_int(to_bits(b, len(b))), c) for b, c in probs.items()]
    else:
        p = np.asarray(probs)
        items = list(enumerate(p.tolist()))
    items.sort(key=lambda t: (-t[1], t[0]))
    return [i for i, _ in items[:k]]


def candidates(q: QuboProblem, indices: Iterable[int], probs: np.ndarray | None = None,
               weights: Sequence[float] = ()) -> CandidateSet:
    recs = all_records(q, probs, indices)
    return CandidateSet(recs, [tuple(weights)] if weights else [])


def aggregate(q: QuboProblem, sets: Sequence[CandidateSet]) -> tuple[CandidateSet, list[ParetoRecord]]:
    """Union of candidate sets and the feasible states non-dominated within that union."""
    seen: dict[str, ParetoRecord] = {}
    origin = []
    for cs in sets:
        origin.extend(cs.origin)
        for rec in cs.records:
            old = seen.get(rec.bitstring)
            if old is None or rec.probability > old.probability:
                seen[rec.bitstring] = rec
    union = sorted(seen.values(), key=lambda r: r.index)
    feas = [r for r in union if r.feasible]
    flags = nondominated([r.objectives for r in feas]) if feas else []
    front = [r for r, f in zip(feas, flags) if f]
    return CandidateSet(union, origin), front


def simplex_grid(m: int, L: int) -> list[tuple[float, ...]]:
    """All weight vectors ``c / m`` with non-negative integer ``c`` summing to ``m``."""
    if m < 1 or L < 1:
        raise ValueError("grid needs m >= 1 and L >= 1")
    out = []
    for cuts in itertools.combinations(range(m + L - 1), L - 1):
        parts = []
        prev = -1
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(m + L - 2 - prev)
        out.append(tuple(p / m for p in parts))
    return out


def dirichlet_weights(count: int, L: int, seed: int) -> list[tuple[float, ...]]:
    rng = np.random.default_rng(seed)
    return [tuple(float(v) for v in row) for row in rng.dirichlet(np.ones(L), size=count)]


def scalarized_optimum(q: QuboProblem, w: Sequence[float]) -> int:
    """Feasible basis state minimizing the scalarized cost (lowest index on ties)."""
    check_weights(w, q.num_objectives)
    cost = scalarize(q, w)
    feas = sorted(bits_to_int(b) for b in feasible_bitstrings(q))
    vals = [cost(int_to_bits(b, q.n)) for b in feas]
    return feas[int(np.argmin(vals))]


def feasible_fraction(g: Graph, s: int, d: int) -> Fraction:
    """Share of the ``2**n`` encoded states that are routes."""
    n = g.num_nodes + g.num_edges - 2
    return Fraction(len(enumerate_paths(g, s, d)), 2**n)
