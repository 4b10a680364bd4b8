import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moroute.graph import build_graph, generate_topology, middle_graph
from moroute.qubo import (EncodingError, Polynomial, VariableMap, basis_bits, bits_to_int,
                          encode_shortest_path, evaluate, feasibility, feasible_mask, int_to_bits,
                          quadratic_graph, scalarize, to_bits, to_ising)


def single_edge():
    return encode_shortest_path(build_graph([0, 1], [(0, 1)]), 0, 1)


def test_single_edge_penalty_by_hand():
    q = single_edge()
    assert q.n == 1
    assert q.penalty_polynomial().energies().tolist() == [0.0, -2.0]


def test_bit_order_convention():
    assert int_to_bits(6, 4) == (0, 1, 1, 0)
    assert bits_to_int((0, 1, 1, 0)) == 6
    assert basis_bits(3)[5].tolist() == [1, 0, 1]


def test_to_bits_validation():
    assert to_bits("101", 3) == (1, 0, 1)
    with pytest.raises(EncodingError):
        to_bits("10", 3)
    with pytest.raises(EncodingError):
        to_bits([0, 2, 1], 3)


def test_k4_variable_map():
    g = generate_topology("complete", 4)
    vm = VariableMap.for_graph(g, 0, 3)
    assert vm.n == 8
    assert [vm.describe(i) for i in range(3)] == [("node", 1), ("node", 2), ("edge", (0, 1))]
    assert vm.edge_var(3, 2) == 7


def test_single_variable_ising():
    h = to_ising(Polynomial(1, 0.0, {0: 1.0}, {}))
    assert h.constant == 0.5 and dict(h.h) == {0: 0.5} and dict(h.J) == {}


def test_two_variable_ising_by_hand():
    # x0 x1 = (1 + s0 + s1 + s0 s1) / 4
    h = to_ising(Polynomial(2, 0.0, {}, {(0, 1): 1.0}))
    assert h.constant == 0.25
    assert dict(h.h) == {0: 0.25, 1: 0.25}
    assert dict(h.J) == {(0, 1): 0.25}


@st.composite
def polynomials(draw):
    n = draw(st.integers(1, 6))
    coef = st.floats(-5, 5, allow_nan=False)
    lin = {i: draw(coef) for i in range(n) if draw(st.booleans())}
    quad = {(i, j): draw(coef) for i, j in itertools.combinations(range(n), 2) if draw(st.booleans())}
    return Polynomial(n, draw(coef), lin, quad)


@given(polynomials())
@settings(max_examples=100, deadline=None)
def test_ising_agrees_with_qubo_on_every_state(poly):
    ham = to_ising(poly)
    table = poly.energies()
    for b in range(2**poly.n):
        x = int_to_bits(b, poly.n)
        assert table[b] == pytest.approx(evaluate(poly, x), abs=1e-12)
        assert ham.evaluate(x) == pytest.approx(evaluate(poly, x), abs=1e-12)
    assert np.allclose(ham.energies(), table, atol=1e-12)


@given(polynomials(), polynomials())
@settings(max_examples=50, deadline=None)
def test_polynomial_addition(a, b):
    if a.n != b.n:
        with pytest.raises(EncodingError):
            a + b
        return
    assert np.allclose((a + b).energies(), a.energies() + b.energies())


def test_energies_on_subset():
    poly = Polynomial(3, 1.0, {0: 2.0, 2: -1.0}, {(0, 1): 3.0})
    full = poly.energies()
    assert poly.energies(np.array([5, 3])).tolist() == [full[5], full[3]]


def test_k4_paths_sit_on_penalty_floor(k4):
    q = k4.problem()
    assert q.n == 8
    assert q.penalty_value("00001000") == pytest.approx(-2.0)
    assert q.penalty_value("10100010") == pytest.approx(-2.0)
    # a dangling edge from the source costs more
    assert q.penalty_value("00100000") > -2.0


def test_penalty_minimum_is_minus_two(random_graphs):
    for g, s, d in random_graphs[:20]:
        q = encode_shortest_path(g, s, d)
        assert q.penalty_polynomial().energies().min() == pytest.approx(-2.0)


def test_quadratic_graph_is_middle_graph_without_endpoints(random_graphs):
    g, s, d = random_graphs[0]
    q = encode_shortest_path(g, s, d)
    gh = quadratic_graph(q.penalty_polynomial())
    m = middle_graph(g).remove_nodes([s, d])
    assert gh.num_edges == m.num_edges


def test_endpoint_weights_become_constants():
    g = build_graph([0, 1, 2], [(0, 1), (1, 2)])
    q = encode_shortest_path(g, 0, 2, [({0: 1.5, 1: 2.0, 2: 0.5}, {(0, 1): 1.0})])
    obj = q.objectives[0]
    assert obj.constant == 2.0
    assert dict(obj.linear) == {0: 2.0, 1: 1.0}


@pytest.mark.parametrize("args", [
    ((0, 0), {}),
    ((0, 9), {}),
    ((0, 2), {"objectives": [({7: 1.0}, {})]}),
    ((0, 2), {"objectives": [({}, {(0, 2): 1.0})]}),
    ((0, 2), {"objectives": [({}, {})], "labels": ["a", "b"]}),
])
def test_encode_errors(args):
    g = build_graph([0, 1, 2], [(0, 1), (1, 2)])
    (s, d), kw = args
    with pytest.raises(EncodingError):
        encode_shortest_path(g, s, d, **kw)


@pytest.mark.parametrize("w", [[0.5], [0.5, -0.1, 0.6], [0.5, float("nan"), 0.5]])
def test_weight_validation(w):
    g = build_graph([0, 1, 2], [(0, 1), (1, 2)])
    q = encode_shortest_path(g, 0, 2, [({1: 1.0}, {}), ({}, {(0, 1): 1.0}), ({}, {})])
    with pytest.raises(EncodingError):
        scalarize(q, w)


def test_scalarize_is_weighted_sum(k4):
    q = k4.problem()
    w = [0.1, 0.2, 0.3, 0.4]
    table = scalarize(q, w).energies()
    expected = q.penalty_polynomial().energies() + np.dot(w, q.objective_table())
    assert np.allclose(table, expected, atol=1e-12)


def test_penalty_weight_scales_penalty(k4):
    q1 = k4.problem(1.0)
    q3 = k4.problem(3.0)
    w = [0.25] * 4
    diff = scalarize(q3, w).energies() - scalarize(q1, w).energies()
    assert np.allclose(diff, 2.0 * q1.penalty_polynomial().energies())


def test_normalization_keeps_scale(k4):
    inst = k4
    raw = inst.problem()
    assert all(max(abs(c) for c in o.linear.values()) == pytest.approx(1.0) for o in raw.objectives)
    assert any(o.scale != 1.0 for o in raw.objectives)


def test_feasibility_mask_single_edge():
    q = single_edge()
    assert feasible_mask(q).tolist() == [False, True]
    assert feasibility(q, "1") and not feasibility(q, "0")
