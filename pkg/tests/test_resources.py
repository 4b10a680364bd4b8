import math

import numpy as np
import pytest

from moroute.graph import build_graph, cycle_family, generate_topology, middle_graph, square_lattice
from moroute.qaoa import build_energy_table
from moroute.qubo import encode_shortest_path, scalarize
from moroute.resources import (depth_estimate, endpoint_terms, estimate, n_repetitions, qubit_count,
                               term_bound, term_counts, time_proxy)


def test_qubit_counts(k4, square, triangular):
    assert qubit_count(k4.graph) == 8
    assert qubit_count(square.graph) == 11
    assert qubit_count(triangular.graph) == 13
    for inst in (k4, square, triangular):
        q = inst.problem()
        assert build_energy_table(scalarize(q, [0.25] * 4)).n == qubit_count(inst.graph)


def test_single_edge_terms_and_depth():
    q = encode_shortest_path(build_graph([0, 1], [(0, 1)]), 0, 1)
    assert term_counts(q.penalty_polynomial()) == (1, 0, 1)
    assert depth_estimate(q.penalty_polynomial()).depth == 0


def test_k4_quadratic_terms_follow_middle_graph(k4):
    q = k4.problem()
    _, quad, _ = term_counts(q.penalty_polynomial())
    m = middle_graph(k4.graph).remove_nodes([0, 3])
    assert quad == m.num_edges == 18


def test_term_bound_with_correction(random_graphs):
    rng = np.random.default_rng(0)
    for g, s, d in random_graphs:
        objs = [({u: float(x) for u, x in zip(g.nodes, rng.uniform(0.1, 1, g.num_nodes))},
                 {e: float(x) for e, x in zip(g.edges, rng.uniform(0.1, 1, g.num_edges))})]
        q = encode_shortest_path(g, s, d, objs)
        rep = estimate(q, [1.0])
        assert rep.term_bound_corrected_ok
        assert rep.L_total <= term_bound(g) + g.num_edges


def test_closed_form_bound_can_be_exceeded_on_long_cycles():
    g = cycle_family(6)
    # generic weights keep every single-qubit term nonzero
    objs = [({u: 0.1 + 0.01 * u for u in g.nodes}, {e: 0.3 + 0.01 * i for i, e in enumerate(g.edges)})]
    rep = estimate(encode_shortest_path(g, 0, 7, objs))
    assert (rep.L_linear, rep.L_quadratic) == (14, 20)
    assert rep.L_total == 34
    assert rep.term_bound == 32
    assert not rep.term_bound_ok and rep.term_bound_corrected_ok


def test_endpoint_terms():
    g = generate_topology("complete", 4)
    assert endpoint_terms(g, 0, 3) == 6


def test_depth_on_families():
    k4 = generate_topology("complete", 4)
    dep = depth_estimate(encode_shortest_path(k4, 0, 3).penalty_polynomial())
    assert dep.depth <= 6
    assert dep.raw_colors <= dep.max_degree_h + 1
    for k in (2, 4, 6, 8):
        g = cycle_family(k)
        dep = depth_estimate(encode_shortest_path(g, 0, k + 1).penalty_polynomial())
        assert dep.depth <= 4


def test_n_repetitions():
    assert n_repetitions(1, 1.0) == 1
    assert n_repetitions(100, 0.1) == 10000
    with pytest.raises(ValueError):
        n_repetitions(10, 0.0)


def test_k4_report(k4):
    rep = estimate(k4.problem(), [0.25] * 4, p=1, epsilon=0.05)
    assert rep.n_qubits == 8
    assert rep.n_rep == math.ceil(rep.L_total / 0.05**2)
    assert rep.total_2q_layers == rep.depth_per_layer
    assert rep.vizing_ok and rep.depth_bound_ok
    assert set(rep.record()) >= {"n_qubits", "L_total", "depth_per_layer", "n_rep"}


def test_time_proxy_linear_in_p():
    g = generate_topology("complete", 4)
    c1, a1 = time_proxy(1, g, 0.1, 6, 26)
    c2, a2 = time_proxy(2, g, 0.1, 6, 26)
    assert (c2, a2) == (2 * c1, 2 * a1)


def test_time_proxy_bounded_on_fixed_degree_family():
    ratios = []
    for cols in range(2, 7):
        g = square_lattice(3, cols)
        q = encode_shortest_path(g, 0, g.num_nodes - 1)
        rep = estimate(q, [1.0], p=1, epsilon=0.1)
        ratios.append(rep.time_concrete / rep.time_asymptotic)
        assert rep.time_concrete / g.num_nodes < 50 * rep.max_degree_g**3 / 0.1**2
    assert max(ratios) <= 2.0
