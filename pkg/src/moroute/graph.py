"""Undirected simple graphs, derived graphs and edge coloring.

Graphs are small, immutable and keyed by non-negative integer node ids.
Edges are stored canonically as ``(min, max)`` tuples in sorted order, which
gives every derived construction (middle graph ids, variable ordering in the
QUBO encoder) a reproducible labeling.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)

Edge = tuple[int, int]

FAMILIES = ("complete", "square_lattice", "triangular_lattice", "cycle")


class GraphError(ValueError):
    """Raised for malformed graph input; ``element`` holds the offending item."""

    def __init__(self, message: str, element=None):
        super().__init__(message)
        self.element = element


def canonical(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    node_attrs: Mapping[int, object] = field(default_factory=dict, compare=False, repr=False)
    edge_attrs: Mapping[Edge, object] = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {u: [] for u in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {u: tuple(sorted(nbrs)) for u, nbrs in adj.items()}

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def incident_edges(self, u: int) -> list[Edge]:
        return [canonical(u, v) for v in self.adjacency[u]]

    def has_edge(self, u: int, v: int) -> bool:
        return canonical(u, v) in self.edge_index

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> dict[int, int]:
        return {u: len(n) for u, n in self.adjacency.items()}

    def remove_nodes(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        return build_graph(
            [u for u in self.nodes if u not in drop],
            [e for e in self.edges if e[0] not in drop and e[1] not in drop],
            node_attrs={u: a for u, a in self.node_attrs.items() if u not in drop},
        )

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            for v in self.adjacency[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.nodes)


def build_graph(nodes: Iterable[int], edges: Iterable[tuple[int, int]],
                node_attrs: Mapping | None = None, edge_attrs: Mapping | None = None) -> Graph:
    """Validate and canonicalize a node/edge listing into a :class:`Graph`."""
    node_list = list(nodes)
    node_set = set(node_list)
    if len(node_set) != len(node_list):
        dup = next(u for u in node_list if node_list.count(u) > 1)
        raise GraphError(f"duplicate node {dup}", dup)
    for u in node_list:
        if not isinstance(u, int) or u < 0:
            raise GraphError(f"node ids must be non-negative integers, got {u!r}", u)
    seen: set[Edge] = set()
    for u, v in edges:
        if u == v:
            raise GraphError(f"self-loop on node {u}", (u, v))
        for end in (u, v):
            if end not in node_set:
                raise GraphError(f"edge {(u, v)} has undeclared endpoint {end}", (u, v))
        e = canonical(u, v)
        if e in seen:
            raise GraphError(f"duplicate edge {e}", e)
        seen.add(e)
    attrs = {}
    for key, val in (edge_attrs or {}).items():
        e = canonical(*key)
        if e not in seen:
            raise GraphError(f"attributes given for missing edge {e}", e)
        attrs[e] = val
    return Graph(tuple(sorted(node_set)), tuple(sorted(seen)), dict(node_attrs or {}), attrs)


def max_degree(g: Graph) -> int:
    return max((len(n) for n in g.adjacency.values()), default=0)


def _next_id(g: Graph) -> int:
    return max(g.nodes, default=-1) + 1


def middle_graph(g: Graph) -> Graph:
    """Middle graph M(G) on V(G) ∪ E(G).

    Edge ``e`` of ``g`` becomes node ``max(node id) + 1 + rank(e)``. A vertex is
    joined to each edge incident on it, and two edges are joined when they share
    an endpoint. ``node_attrs`` records the origin of each node as
    ``("vertex", u)`` or ``("edge", (u, v))``.
    """
    base = _next_id(g)
    eid = {e: base + i for i, e in enumerate(g.edges)}
    new_edges = []
    for e, i in eid.items():
        new_edges.append((e[0], i))
        new_edges.append((e[1], i))
    for u in g.nodes:
        inc = g.incident_edges(u)
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                new_edges.append((eid[inc[a]], eid[inc[b]]))
    attrs: dict[int, object] = {u: ("vertex", u) for u in g.nodes}
    attrs.update({i: ("edge", e) for e, i in eid.items()})
    return build_graph(list(g.nodes) + list(eid.values()), new_edges, node_attrs=attrs)


def line_graph(g: Graph) -> Graph:
    """Line graph L(G); node ``i`` is the ``i``-th edge of ``g`` in canonical order."""
    new_edges = []
    for u in g.nodes:
        inc = [g.edge_index[e] for e in g.incident_edges(u)]
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                new_edges.append((inc[a], inc[b]))
    lg = build_graph(range(g.num_edges), new_edges,
                     node_attrs={i: e for i, e in enumerate(g.edges)})
    if g.num_edges:
        assert max_degree(lg) <= 2 * max_degree(g) - 2
    return lg


def endline_graph(g: Graph) -> Graph:
    """G+ : attach one pendant vertex to every node of ``g``."""
    base = _next_id(g)
    pend = {u: base + i for i, u in enumerate(g.nodes)}
    out = build_graph(list(g.nodes) + list(pend.values()),
                      list(g.edges) + [(u, p) for u, p in pend.items()],
                      node_attrs={p: ("pendant", u) for u, p in pend.items()})
    if g.nodes:
        assert max_degree(out) == max_degree(g) + 1
    return out


# ---------------------------------------------------------------------------
# edge coloring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeColoring:
    color_of: Mapping[Edge, int]
    num_colors: int

    def classes(self) -> list[list[Edge]]:
        out: list[list[Edge]] = [[] for _ in range(self.num_colors)]
        for e, c in sorted(self.color_of.items()):
            out[c].append(e)
        return out


def is_proper(g: Graph, coloring: EdgeColoring) -> bool:
    if set(coloring.color_of) != set(g.edges):
        return False
    for u in g.nodes:
        cols = [coloring.color_of[e] for e in g.incident_edges(u)]
        if len(cols) != len(set(cols)):
            return False
    return all(0 <= c < coloring.num_colors for c in coloring.color_of.values())


class _Palette:
    """Per-vertex map color -> neighbor, the working state of Misra–Gries."""

    def __init__(self, g: Graph, ncolors: int):
        self.ncolors = ncolors
        self.at: dict[int, dict[int, int]] = {u: {} for u in g.nodes}
        self.color: dict[Edge, int] = {}

    def set(self, u: int, v: int, c: int | None) -> None:
        e = canonical(u, v)
        old = self.color.pop(e, None)
        if old is not None:
            del self.at[u][old]
            del self.at[v][old]
        if c is not None:
            self.color[e] = c
            self.at[u][c] = v
            self.at[v][c] = u

    def get(self, u: int, v: int) -> int | None:
        return self.color.get(canonical(u, v))

    def free(self, u: int, c: int) -> bool:
        return c not in self.at[u]

    def first_free(self, u: int) -> int:
        used = self.at[u]
        return next(c for c in range(self.ncolors) if c not in used)


def misra_gries(g: Graph, order: Iterable[Edge] | None = None) -> EdgeColoring:
    """Proper edge coloring with at most ``max_degree + 1`` colors."""
    delta = max_degree(g)
    pal = _Palette(g, delta + 1)
    for u, v in (order if order is not None else g.edges):
        fan = [v]
        in_fan = {v}
        extended = True
        while extended:
            extended = False
            for w in g.neighbors(u):
                if w in in_fan:
                    continue
                c = pal.get(u, w)
                if c is not None and pal.free(fan[-1], c):
                    fan.append(w)
                    in_fan.add(w)
                    extended = True
                    break
        c = pal.first_free(u)
        d = pal.first_free(fan[-1])
        if c != d:
            # invert the cd-path that starts at u with a d-colored edge
            path = []
            x, want, other = u, d, c
            while want in pal.at[x]:
                y = pal.at[x][want]
                path.append((x, y, want))
                x, want, other = y, other, want
            for x, y, _ in path:
                pal.set(x, y, None)
            for x, y, col in path:
                pal.set(x, y, c if col == d else d)
        # shortest prefix that is still a fan and ends on a vertex where d is free
        stop = None
        for i, w in enumerate(fan):
            if i > 0:
                ci = pal.get(u, w)
                if ci is None or not pal.free(fan[i - 1], ci):
                    break
            if pal.free(w, d):
                stop = i
                break
        if stop is None:
            raise AssertionError("Misra–Gries invariant violated")
        for i in range(stop):
            nxt = pal.get(u, fan[i + 1])
            pal.set(u, fan[i + 1], None)
            pal.set(u, fan[i], nxt)
        pal.set(u, fan[stop], d)
    used = sorted(set(pal.color.values()))
    remap = {c: i for i, c in enumerate(used)}
    return EdgeColoring({e: remap[c] for e, c in sorted(pal.color.items())}, len(used))


def reduce_coloring(g: Graph, coloring: EdgeColoring, target: int | None = None,
                    seed: int = 0, max_steps: int = 20000) -> EdgeColoring:
    """Try to recolor with ``target`` colors (default ``max_degree``) by local search.

    Uncolored edges are placed by Kempe-chain swaps with a random walk fallback.
    Returns the input unchanged when the budget runs out, so the result is never
    worse than what was passed in.
    """
    delta = max_degree(g)
    target = delta if target is None else target
    if coloring.num_colors <= target or target < delta or not g.edges:
        return coloring
    rng = random.Random(seed)
    pal = _Palette(g, target)
    pending = []
    for e, c in sorted(coloring.color_of.items()):
        if c < target:
            pal.set(e[0], e[1], c)
        else:
            pending.append(e)
    steps = 0
    while pending and steps < max_steps:
        steps += 1
        u, v = pending.pop()
        common = [c for c in range(target) if pal.free(u, c) and pal.free(v, c)]
        if common:
            pal.set(u, v, common[0])
            continue
        a = rng.choice([c for c in range(target) if pal.free(u, c)])
        b = rng.choice([c for c in range(target) if pal.free(v, c)])
        # swap the a/b Kempe chain starting at v; if it does not reach u, a becomes free at v
        chain = []
        x, want = v, a
        while want in pal.at[x]:
            y = pal.at[x][want]
            chain.append((x, y, want))
            x, want = y, (b if want == a else a)
        if chain and chain[-1][1] != u:
            for x, y, _ in chain:
                pal.set(x, y, None)
            for x, y, col in chain:
                pal.set(x, y, b if col == a else a)
            pal.set(u, v, a)
            continue
        # evict the a-edge at v and retry later
        w = pal.at[v].get(a)
        if w is not None:
            pal.set(v, w, None)
            pending.insert(0, canonical(v, w))
        pal.set(u, v, a)
    if pending:
        return coloring
    return EdgeColoring(dict(sorted(pal.color.items())), len(set(pal.color.values())))


def edge_color(g: Graph, reduce: bool = False) -> EdgeColoring:
    """Misra–Gries coloring, optionally followed by a search for a ``Δ``-coloring."""
    col = misra_gries(g)
    assert is_proper(g, col)
    if reduce and col.num_colors > max_degree(g):
        col = reduce_coloring(g, col)
        assert is_proper(g, col)
    return col


# ---------------------------------------------------------------------------
# topology families
# ---------------------------------------------------------------------------

def complete_graph(n: int) -> Graph:
    return build_graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def square_lattice(rows: int, cols: int) -> Graph:
    """``rows x cols`` grid; node ``r * cols + c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return build_graph(range(rows * cols), edges)


def triangular_lattice(rows: int, cols: int) -> Graph:
    """Triangular lattice with ``rows`` triangles along each of ``cols`` strips.

    Same shape as ``networkx.triangular_lattice_graph(cols, rows)``; nodes are
    relabeled ``0..N-1`` by sorted lattice coordinate.
    """
    import networkx as nx

    lat = nx.triangular_lattice_graph(cols, rows, with_positions=False)
    label = {p: i for i, p in enumerate(sorted(lat.nodes()))}
    return build_graph(range(len(label)), [(label[a], label[b]) for a, b in lat.edges()])


def cycle_family(k: int) -> Graph:
    """Source 0 and destination ``k + 1`` joined by two arcs through ``k`` nodes.

    The first arc visits ``1..ceil(k/2)``, the second the rest.
    """
    half = (k + 1) // 2
    arc_a = [0, *range(1, half + 1), k + 1]
    arc_b = [0, *range(half + 1, k + 1), k + 1]
    edges = list(zip(arc_a, arc_a[1:])) + list(zip(arc_b, arc_b[1:]))
    return build_graph(range(k + 2), edges)


def generate_topology(family: str, *size: int) -> Graph:
    """Deterministic member of a topology family.

    ``complete n`` | ``square_lattice rows cols`` | ``triangular_lattice rows cols``
    | ``cycle k`` (``k`` intermediate nodes).
    """
    if family not in FAMILIES:
        raise GraphError(f"unknown topology family {family!r}", family)
    arity = {"complete": 1, "cycle": 1, "square_lattice": 2, "triangular_lattice": 2}[family]
    if len(size) != arity:
        raise GraphError(f"{family} takes {arity} size parameter(s), got {len(size)}", size)
    if any(int(s) != s or s <= 0 for s in size):
        raise GraphError(f"size parameters must be positive integers, got {size}", size)
    if family == "complete":
        return complete_graph(*size)
    if family == "square_lattice":
        return square_lattice(*size)
    if family == "triangular_lattice":
        return triangular_lattice(*size)
    return cycle_family(*size)


def random_connected_graph(num_nodes: int, extra_edges: int, rng: random.Random) -> Graph:
    """Random spanning tree plus ``extra_edges`` uniformly chosen chords."""
    order = list(range(num_nodes))
    rng.shuffle(order)
    edges = {canonical(order[i], order[rng.randrange(i)]) for i in range(1, num_nodes)}
    chords = [(i, j) for i in range(num_nodes) for j in range(i + 1, num_nodes)
              if (i, j) not in edges]
    rng.shuffle(chords)
    edges.update(chords[:extra_edges])
    return build_graph(range(num_nodes), edges)
