import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockflow import InvalidNetwork, Network, edge_residual, node_residual, validate_network
from blockflow.network import Edge, ideal, linear, node, offset, pipe, slack

from helpers import has_cycle_bruteforce, series


def test_edge_residual_pipe():
    # 100 - 96 - 1 * 2 * |2|
    assert edge_residual(pipe("e", "a", "b", 1.0), 100.0, 96.0, 2.0) == 0.0


def test_edge_residual_ideal_equal_potentials():
    assert edge_residual(ideal("e", "a", "b", 1.0), 5.0, 5.0, 123.4) == 0.0


def test_edge_residual_linear():
    assert edge_residual(linear("e", "a", "b", 2.0), 3.0, 1.0, 1.0) == 0.0


def test_edge_residual_offset_and_gain():
    assert edge_residual(offset("e", "a", "b", -3.0), 1.0, 4.0, 9.0) == 0.0
    assert edge_residual(ideal("e", "a", "b", 1.5), 10.0, 15.0, 7.0) == 0.0


def _star(inflows, outflows, q):
    js = [slack("s", 1.0), node("j", q)]
    es = []
    for k, f in enumerate(inflows):
        js.append(slack(f"i{k}", 1.0))
        es.append((pipe(f"in{k}", f"i{k}", "j", 1.0), f))
    for k, f in enumerate(outflows):
        js.append(slack(f"o{k}", 1.0))
        es.append((pipe(f"out{k}", "j", f"o{k}", 1.0), f))
    es.append((pipe("tie", "s", "j", 1.0), 0.0))
    net = Network(tuple(js), tuple(e for e, _ in es))
    return net, {e.id: f for e, f in es}


def test_node_residual_leaf():
    net, flows = _star([5.0], [], 5.0)
    assert node_residual(net, "j", flows) == 0.0


def test_node_residual_pass_through():
    net, flows = _star([2.0], [2.0], 0.0)
    assert node_residual(net, "j", flows) == 0.0


def test_node_residual_hand_sum():
    # inflows 3 + 1, outflow 2, demand 1 -> 4 - 2 - 1
    net, flows = _star([3.0, 1.0], [2.0], 1.0)
    assert node_residual(net, "j", flows) == 1.0


def test_node_residual_rejects_slack():
    net = series()
    with pytest.raises(InvalidNetwork):
        node_residual(net, "a", {"e1": 1.0, "e2": 1.0})


def test_validate_single_slack_pipes():
    assert validate_network(series()).ok


def test_validate_two_slacks_over_compressor():
    net = Network((slack("a", 10.0), slack("b", 12.0)), (ideal("c", "a", "b", 1.2),))
    report = validate_network(net)
    assert "A2" in report.codes()


def test_validate_ideal_triangle():
    net = Network(
        (slack("a", 1.0), node("b"), node("c")),
        (ideal("x", "a", "b"), ideal("y", "b", "c"), ideal("z", "c", "a")),
    )
    assert report_codes(net) == {"A3"}


def test_validate_no_slack_and_disconnected():
    net = Network((node("a"), node("b"), node("c")), (pipe("e", "a", "b", 1.0),))
    assert report_codes(net) == {"A1", "DISCONNECTED"}


def test_validate_two_slacks_with_pipe_between_is_fine():
    net = Network((slack("a", 10.0), node("m"), slack("b", 12.0)), (ideal("c", "a", "m", 1.2), pipe("p", "m", "b", 1.0)))
    assert validate_network(net).ok


def test_offset_cycle_is_only_a_warning():
    net = Network(
        (slack("a", 1.0), node("b"), node("c")),
        (offset("x", "a", "b", 1.0), offset("y", "b", "c", 1.0), ideal("z", "c", "a")),
    )
    report = validate_network(net)
    assert report.ok
    assert {c for c, _ in report.warnings} == {"A3-flowless"}


def report_codes(net):
    return validate_network(net).codes()


@pytest.mark.parametrize(
    "bad",
    [
        lambda: Edge("e", "a", "a", "pipe", alpha=1.0),
        lambda: Edge("e", "a", "b", "pipe", alpha=0.0),
        lambda: Edge("e", "a", "b", "linear", r=-1.0),
        lambda: Edge("e", "a", "b", "ideal", gamma=0.0),
        lambda: Edge("e", "a", "b", "pipe", alpha=1.0, r=2.0),
        lambda: Edge("e", "a", "b", "valve"),
        lambda: Network((node("a"),), (pipe("e", "a", "zz", 1.0),)),
        lambda: Network((node("a"), node("a")), ()),
        lambda: slack("a", math.nan),
    ],
)
def test_structural_errors(bad):
    with pytest.raises(InvalidNetwork):
        bad()


EDGE_STRATEGY = st.sampled_from(
    [pipe("e", "a", "b", 1.7), linear("e", "a", "b", 0.3), ideal("e", "a", "b", 1.4), offset("e", "a", "b", -2.0)]
)
FLOAT = st.floats(-1e3, 1e3, allow_nan=False)


@given(EDGE_STRATEGY, FLOAT, FLOAT)
def test_g_is_monotone(edge, f1, f2):
    lo, hi = sorted((f1, f2))
    assert edge.g(lo) <= edge.g(hi)
    if edge.kind in ("pipe", "linear") and hi - lo > 1e-6:  # avoid f*|f| underflow
        assert edge.g(lo) < edge.g(hi)


@given(EDGE_STRATEGY, FLOAT, FLOAT, FLOAT, FLOAT, FLOAT)
def test_edge_residual_is_affine_in_potentials(edge, p1, p2, q1, q2, f):
    lam = 0.3
    mixed = edge_residual(edge, lam * p1 + (1 - lam) * q1, lam * p2 + (1 - lam) * q2, f)
    combo = lam * edge_residual(edge, p1, p2, f) + (1 - lam) * edge_residual(edge, q1, q2, f)
    assert mixed == pytest.approx(combo, rel=1e-9, abs=1e-6)


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 8), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=0, max_size=9), st.data())
def test_a3_matches_bruteforce_cycles(n, raw, data):
    ideal_pairs = [(u % n, v % n) for u, v in raw if u % n != v % n]
    js = [slack("n0", 1.0)] + [node(f"n{i}") for i in range(1, n)]
    es = [pipe(f"t{i}", f"n{i - 1}", f"n{i}", 1.0) for i in range(1, n)]
    es += [ideal(f"x{k}", f"n{u}", f"n{v}") for k, (u, v) in enumerate(ideal_pairs)]
    net = Network(tuple(js), tuple(es))
    violated = "A3" in validate_network(net).codes()
    assert violated == has_cycle_bruteforce(list(range(n)), ideal_pairs)
