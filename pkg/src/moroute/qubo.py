"""QUBO encoding of the multi-objective shortest path problem.

Variables are the intermediate nodes (ascending id) followed by the edges in
canonical order. Source and destination are fixed to 1 and eliminated before
expansion, so an instance on ``|V|`` nodes and ``|E|`` edges uses
``|V| + |E| - 2`` binary variables.

Bit convention: variable ``i`` is bit ``i`` of a basis-state integer, and
bitstrings are written with variable 0 leftmost.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import Edge, Graph, build_graph, canonical

Bits = Sequence[int] | str


class EncodingError(ValueError):
    pass


def to_bits(x: Bits, n: int) -> tuple[int, ...]:
    if isinstance(x, str):
        bits = tuple(int(ch) for ch in x)
    else:
        bits = tuple(int(b) for b in x)
    if len(bits) != n:
        raise EncodingError(f"bitstring has length {len(bits)}, expected {n}")
    if any(b not in (0, 1) for b in bits):
        raise EncodingError(f"bitstring entries must be 0/1, got {x!r}")
    return bits


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def int_to_bits(b: int, n: int) -> tuple[int, ...]:
    return tuple((b >> i) & 1 for i in range(n))


def bits_to_int(bits: Sequence[int]) -> int:
    return sum(int(x) << i for i, x in enumerate(bits))


def basis_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` uint8 matrix whose row ``b`` is the bit pattern of ``b``."""
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Polynomial:
    """``constant + sum linear[i] x_i + sum quadratic[i, j] x_i x_j`` over ``n`` binaries.

    Quadratic keys are ordered pairs ``i < j``.
    """

    n: int
    constant: float = 0.0
    linear: Mapping[int, float] = field(default_factory=dict)
    quadratic: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __call__(self, x: Bits) -> float:
        return evaluate(self, x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if other.n != self.n:
            raise EncodingError("polynomials over different variable counts")
        lin = dict(self.linear)
        for i, c in other.linear.items():
            lin[i] = lin.get(i, 0.0) + c
        quad = dict(self.quadratic)
        for k, c in other.quadratic.items():
            quad[k] = quad.get(k, 0.0) + c
        return Polynomial(self.n, self.constant + other.constant, lin, quad)

    def scale(self, a: float) -> "Polynomial":
        return Polynomial(self.n, a * self.constant,
                          {i: a * c for i, c in self.linear.items()},
                          {k: a * c for k, c in self.quadratic.items()})

    def pruned(self) -> "Polynomial":
        """Copy without exact-zero coefficients, keys sorted."""
        return Polynomial(self.n, self.constant,
                          {i: c for i, c in sorted(self.linear.items()) if c != 0.0},
                          {k: c for k, c in sorted(self.quadratic.items()) if c != 0.0})

    def energies(self, indices: np.ndarray | None = None) -> np.ndarray:
        """Value on every basis state (or on ``indices``), indexed by basis integer."""
        return _diagonal(self.n, self.constant, self.linear, self.quadratic, spins=False,
                         indices=indices)


def evaluate(poly: Polynomial, x: Bits) -> float:
    bits = to_bits(x, poly.n)
    total = poly.constant
    for i, c in poly.linear.items():
        if bits[i]:
            total += c
    for (i, j), c in poly.quadratic.items():
        if bits[i] and bits[j]:
            total += c
    return total


def _diagonal(n, constant, linear, quadratic, spins: bool, indices=None) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.int64) if indices is None else np.asarray(indices, dtype=np.int64)
    out = np.full(idx.shape[0], float(constant))
    cache: dict[int, np.ndarray] = {}

    def var(i):
        if i not in cache:
            b = ((idx >> i) & 1).astype(np.float64)
            cache[i] = 2.0 * b - 1.0 if spins else b
        return cache[i]

    for i, c in linear.items():
        out += c * var(i)
    for (i, j), c in quadratic.items():
        out += c * var(i) * var(j)
    return out


@dataclass(frozen=True)
class Hamiltonian:
    """Ising form over spins ``s_i = 2 x_i - 1``; diagonal in the computational basis."""

    n: int
    constant: float
    h: Mapping[int, float]
    J: Mapping[tuple[int, int], float]

    def evaluate(self, x: Bits) -> float:
        s = [2 * b - 1 for b in to_bits(x, self.n)]
        total = self.constant
        for i, c in self.h.items():
            total += c * s[i]
        for (i, j), c in self.J.items():
            total += c * s[i] * s[j]
        return total

    def energies(self) -> np.ndarray:
        return _diagonal(self.n, self.constant, self.h, self.J, spins=True)


def to_ising(poly: Polynomial) -> Hamiltonian:
    const = poly.constant
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    for i, a in poly.linear.items():
        const += a / 2
        h[i] = h.get(i, 0.0) + a / 2
    for (i, j), b in poly.quadratic.items():
        const += b / 4
        h[i] = h.get(i, 0.0) + b / 4
        h[j] = h.get(j, 0.0) + b / 4
        J[(i, j)] = J.get((i, j), 0.0) + b / 4
    return Hamiltonian(poly.n, const,
                       {i: c for i, c in sorted(h.items()) if c != 0.0},
                       {k: c for k, c in sorted(J.items()) if c != 0.0})


# ---------------------------------------------------------------------------
# problem data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariableMap:
    source: int
    destination: int
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return len(self.nodes) + len(self.edges)

    def node_var(self, u: int) -> int:
        return self.nodes.index(u)

    def edge_var(self, u: int, v: int) -> int:
        return len(self.nodes) + self.edges.index(canonical(u, v))

    def describe(self, i: int) -> tuple[str, object]:
        if i < len(self.nodes):
            return ("node", self.nodes[i])
        return ("edge", self.edges[i - len(self.nodes)])

    @classmethod
    def for_graph(cls, g: Graph, s: int, d: int) -> "VariableMap":
        return cls(s, d, tuple(u for u in g.nodes if u not in (s, d)), tuple(g.edges))


@dataclass(frozen=True)
class ObjectiveTerms:
    """A linear objective ``constant + sum linear[i] x_i``.

    ``scale`` is the factor dividing the original coefficients when the objective
    was normalized (1 otherwise), so ``value * scale`` is in original units.
    """

    label: str
    linear: Mapping[int, float]
    constant: float = 0.0
    scale: float = 1.0

    def polynomial(self, n: int) -> Polynomial:
        return Polynomial(n, self.constant, dict(self.linear), {})


@dataclass(frozen=True)
class PenaltyTerms:
    constant: float
    linear: Mapping[int, float]
    quadratic: Mapping[tuple[int, int], float]

    def polynomial(self, n: int) -> Polynomial:
        return Polynomial(n, self.constant, dict(self.linear), dict(self.quadratic))


@dataclass(frozen=True)
class QuboProblem:
    graph: Graph
    vmap: VariableMap
    objectives: tuple[ObjectiveTerms, ...]
    penalty: PenaltyTerms
    penalty_weight: float = 1.0

    def __post_init__(self):
        if not self.objectives:
            raise EncodingError("at least one objective is required")

    @property
    def n(self) -> int:
        return self.vmap.n

    @property
    def num_objectives(self) -> int:
        return len(self.objectives)

    @property
    def labels(self) -> list[str]:
        return [o.label for o in self.objectives]

    def penalty_polynomial(self) -> Polynomial:
        return self.penalty.polynomial(self.n)

    def penalty_value(self, x: Bits) -> float:
        return evaluate(self.penalty_polynomial(), x)

    def objective_vector(self, x: Bits) -> np.ndarray:
        return np.array([evaluate(o.polynomial(self.n), x) for o in self.objectives])

    def objective_table(self, indices: np.ndarray | None = None) -> np.ndarray:
        """``(L, 2**n)`` objective values on every basis state, or ``(L, len(indices))``."""
        return np.stack([o.polynomial(self.n).energies(indices) for o in self.objectives])

    def normalized(self) -> "QuboProblem":
        """Rescale each objective so its largest absolute coefficient is 1.

        Pareto dominance is invariant under positive per-objective scaling, so
        the feasible set and the front are unchanged.
        """
        objs = []
        for o in self.objectives:
            m = max((abs(c) for c in o.linear.values()), default=0.0)
            if m == 0.0:
                objs.append(o)
                continue
            objs.append(ObjectiveTerms(o.label, {i: c / m for i, c in o.linear.items()},
                                       o.constant / m, o.scale * m))
        return QuboProblem(self.graph, self.vmap, tuple(objs), self.penalty, self.penalty_weight)


def _square_of_linear(terms: dict[int, float], const: float):
    """Expand ``(const + sum terms[i] x_i)**2`` using ``x_i**2 = x_i``."""
    c0 = const * const
    lin = {i: a * a + 2 * const * a for i, a in terms.items()}
    quad = {}
    keys = sorted(terms)
    for a, b in itertools.combinations(keys, 2):
        quad[(a, b)] = 2 * terms[a] * terms[b]
    return c0, lin, quad


def penalty_terms(g: Graph, vmap: VariableMap) -> PenaltyTerms:
    """Source, destination and path-continuity penalties with ``x_s = x_d = 1``."""
    s, d = vmap.source, vmap.destination
    const = 0.0
    lin: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}

    def add(c0, l, q):
        nonlocal const
        const += c0
        for i, c in l.items():
            lin[i] = lin.get(i, 0.0) + c
        for k, c in q.items():
            quad[k] = quad.get(k, 0.0) + c

    for end in (s, d):
        # -x_end^2 + (x_end - sum_j x_end,j)^2 with x_end = 1
        terms = {vmap.edge_var(*e): -1.0 for e in g.incident_edges(end)}
        c0, l, q = _square_of_linear(terms, 1.0)
        add(c0 - 1.0, l, q)
    for u in vmap.nodes:
        # (2 x_u - sum_j x_uj)^2
        terms = {vmap.node_var(u): 2.0}
        for e in g.incident_edges(u):
            terms[vmap.edge_var(*e)] = -1.0
        add(*_square_of_linear(terms, 0.0))
    return PenaltyTerms(const,
                        {i: c for i, c in sorted(lin.items()) if c != 0.0},
                        {k: c for k, c in sorted(quad.items()) if c != 0.0})


def encode_shortest_path(g: Graph, s: int, d: int,
                         objectives: Sequence[tuple[Mapping[int, float], Mapping[tuple[int, int], float]]] = (),
                         labels: Sequence[str] | None = None,
                         penalty_weight: float = 1.0) -> QuboProblem:
    """Encode routing from ``s`` to ``d`` over ``g``.

    Each objective is a pair ``(node_weights, edge_weights)``. Node weights on
    ``s`` and ``d`` become constant offsets since both endpoints are always on
    the route. With no objectives a zero objective is used so the problem still
    has ``L >= 1``.
    """
    if s == d:
        raise EncodingError("source and destination must differ")
    for end in (s, d):
        if end not in g.adjacency:
            raise EncodingError(f"node {end} is not in the graph")
    vmap = VariableMap.for_graph(g, s, d)
    if not objectives:
        objectives = [({}, {})]
        labels = labels or ["zero"]
    labels = list(labels) if labels is not None else [f"obj_{i + 1}" for i in range(len(objectives))]
    if len(labels) != len(objectives):
        raise EncodingError("one label per objective required")
    terms = []
    for label, (node_w, edge_w) in zip(labels, objectives):
        lin: dict[int, float] = {}
        const = 0.0
        for u, w in node_w.items():
            if u not in g.adjacency:
                raise EncodingError(f"objective {label!r} weights unknown node {u}")
            if u in (s, d):
                const += float(w)
            else:
                lin[vmap.node_var(u)] = float(w)
        for (u, v), w in edge_w.items():
            if not g.has_edge(u, v):
                raise EncodingError(f"objective {label!r} weights unknown edge {(u, v)}")
            lin[vmap.edge_var(u, v)] = float(w)
        terms.append(ObjectiveTerms(label, dict(sorted(lin.items())), const))
    return QuboProblem(g, vmap, tuple(terms), penalty_terms(g, vmap), penalty_weight)


def check_weights(w: Sequence[float], count: int) -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if arr.shape != (count,):
        raise EncodingError(f"expected {count} scalarization weights, got {len(arr)}")
    if np.any(arr < 0):
        raise EncodingError(f"scalarization weights must be non-negative, got {list(w)}")
    if not np.all(np.isfinite(arr)):
        raise EncodingError("scalarization weights must be finite")
    return arr


def scalarize(q: QuboProblem, w: Sequence[float]) -> Polynomial:
    """``sum_i w_i E_i + w_P * penalty`` as one polynomial.

    Weights need not sum to one here; sweep code normalizes its grids.
    """
    weights = check_weights(w, q.num_objectives)
    total = q.penalty_polynomial().scale(q.penalty_weight)
    for wi, obj in zip(weights, q.objectives):
        if wi != 0.0:
            total = total + obj.polynomial(q.n).scale(float(wi))
    return total


def quadratic_graph(poly: Polynomial | Hamiltonian) -> Graph:
    """Interaction graph: one node per variable, one edge per nonzero coupling."""
    couplings = poly.quadratic if isinstance(poly, Polynomial) else poly.J
    return build_graph(range(poly.n), [k for k, c in couplings.items() if c != 0.0])


def feasibility(q: QuboProblem, x: Bits, atol: float = 1e-9) -> bool:
    """True when the penalty sits at its floor of -2."""
    return math.isclose(q.penalty_value(x), -2.0, abs_tol=atol)


def feasible_mask(q: QuboProblem, atol: float = 1e-9) -> np.ndarray:
    return np.abs(q.penalty_polynomial().energies() + 2.0) <= atol
