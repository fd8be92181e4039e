"""The jitted kernels and their fallbacks must agree."""

import numpy as np
import pytest

from blockflow import kernels
from blockflow.block_solver import NewtonSystem
from blockflow.generate import random_network

from helpers import random_mixed


def test_flag_selects_a_backend():
    chosen = kernels.biconnected
    assert chosen is kernels.biconnected_jit or chosen is kernels.biconnected_py


@pytest.mark.parametrize("seed", range(10))
def test_biconnected_backends_agree(seed, backend):
    net = random_network(40, 6, seed)
    ref = kernels.biconnected_py(net.n_junctions, *net.csr, net.n_edges)
    got = backend["biconnected"](net.n_junctions, *net.csr, net.n_edges)
    assert got[0] == ref[0] == net.n_junctions
    assert np.array_equal(got[1], ref[1])
    assert np.array_equal(got[2], ref[2])
    assert np.array_equal(got[4], ref[4])


def test_biconnected_reports_unreached(backend):
    indptr = np.array([0, 1, 2, 2], dtype=np.int64)
    adj = np.array([1, 0], dtype=np.int64)
    eid = np.array([0, 0], dtype=np.int64)
    n_visited, *_ = backend["biconnected"](3, indptr, adj, eid, 1)
    assert n_visited == 2


def test_max_component_sizes(backend):
    # star with centre 0 and leaves 1..4, plus path 4-5-6
    pairs = [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (5, 6)]
    from blockflow.network import Network, node, pipe, slack

    net = Network(
        tuple([slack("n0", 1.0)] + [node(f"n{i}") for i in range(1, 7)]),
        tuple(pipe(f"e{k}", f"n{u}", f"n{v}", 1.0) for k, (u, v) in enumerate(pairs)),
    )
    _, is_cut, _, _, max_comp = backend["biconnected"](7, *net.csr, 6)
    assert list(np.flatnonzero(is_cut)) == [0, 4, 5]
    assert list(max_comp) == [3, 0, 0, 0, 4, 5, 0]


def test_peel_backends_agree(backend):
    rng = np.random.default_rng(0)
    n = 30
    parent = [int(rng.integers(0, v)) for v in range(1, n)]
    eu = np.array(parent, dtype=np.int64)
    ev = np.arange(1, n, dtype=np.int64)
    inj = rng.normal(size=n)
    fixed = np.zeros(n, dtype=np.bool_)
    fixed[0] = True
    ref = kernels.peel_tree_py(n, eu, ev, inj, fixed)
    assert np.allclose(backend["peel_tree"](n, eu, ev, inj, fixed), ref, atol=1e-14)


@pytest.mark.parametrize("seed", range(8))
def test_residual_and_jacobian_backends_agree(seed, backend):
    net = random_mixed(seed, n=15)
    s = NewtonSystem(net)
    x = np.random.default_rng(seed).normal(size=s.size)
    args = (x, s.n, s.src, s.dst, s.gamma, s.kind, s.coef, s.balance_rows, s.q_scaled, s.slack_rows,
            s.pi_scaled, s.pscale, s.qscale)
    assert np.allclose(backend["residual"](*args), kernels.residual_py(*args), atol=1e-13)
    jargs = (x, s.n, s.kind, s.coef, s.pscale, s.qscale, 1e-8)
    assert np.allclose(backend["jac_flow_entries"](*jargs), kernels.jac_flow_entries_py(*jargs), atol=1e-13)
