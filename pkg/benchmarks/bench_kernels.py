"""Compiled kernels against their pure-numpy/Python fallbacks.

Times every hot kernel on generated pipe networks of growing size, then the
end-to-end hierarchical and monolithic solves with each backend (the latter
in subprocesses, since the backend is picked at import time from
``BLOCKFLOW_DISABLE_NUMBA``).

    python benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from blockflow import kernels
from blockflow._jit import NUMBA_AVAILABLE
from blockflow.block_solver import NewtonSystem
from blockflow.generate import random_network

END_TO_END = """
import json, sys, time
from blockflow import SolverOptions
from blockflow.generate import random_network
from blockflow.hierarchical import solve_hierarchical, solve_monolithic
net = random_network({n}, {k}, seed=1)
solve_hierarchical(net); solve_monolithic(net)  # compile / warm caches
out = {{}}
for name, fn in (("hierarchical", solve_hierarchical), ("monolithic", solve_monolithic)):
    t = time.perf_counter()
    for _ in range({repeat}):
        fn(net, opts=SolverOptions())
    out[name] = (time.perf_counter() - t) / {repeat}
print(json.dumps(out))
"""


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(n, repeat):
    net = random_network(n, cycles=n // 10, seed=1)
    indptr, adj_v, adj_e = net.csr
    system = NewtonSystem(net)
    x = system.flat_start()
    x[system.n:] = np.random.default_rng(0).normal(size=system.m)
    rng = np.random.default_rng(0)
    tree_u = np.arange(1, n, dtype=np.int64)
    tree_v = np.array([rng.integers(0, v) for v in range(1, n)], dtype=np.int64)
    tree_q = rng.uniform(-1.0, 1.0, size=n)
    tree_fixed = np.zeros(n, dtype=np.bool_)
    tree_fixed[0] = True
    cases = {
        "peel_tree": lambda impl: impl(n, tree_u, tree_v, tree_q, tree_fixed),
        "biconnected": lambda impl: impl(net.n_junctions, indptr, adj_v, adj_e, net.n_edges),
        "residual": lambda impl: impl(
            x, system.n, system.src, system.dst, system.gamma, system.kind, system.coef,
            system.balance_rows, system.q_scaled, system.slack_rows, system.pi_scaled,
            system.pscale, system.qscale,
        ),
        "jac_flow_entries": lambda impl: impl(x, system.n, system.kind, system.coef, system.pscale, system.qscale, 1e-8),
    }
    rows = []
    for name, call in cases.items():
        jit, py = getattr(kernels, f"{name}_jit"), getattr(kernels, f"{name}_py")
        call(jit)  # compile
        t_jit = best(lambda: call(jit), repeat)
        t_py = best(lambda: call(py), repeat)
        rows.append((name, n, t_jit, t_py))
    return rows


def end_to_end(n, repeat):
    code = END_TO_END.format(n=n, k=n // 10, repeat=repeat)
    out = {}
    for backend, flag in (("numba", "0"), ("fallback", "1")):
        env = dict(os.environ, BLOCKFLOW_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[backend] = json.loads(res.stdout)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if not NUMBA_AVAILABLE:
        print("numba is not installed; both columns use the fallback")
    print(f"{'kernel':<18}{'n':>7}{'numba [ms]':>13}{'fallback [ms]':>15}{'speed-up':>10}")
    for n in args.sizes:
        for name, size, t_jit, t_py in kernel_rows(n, args.repeat):
            print(f"{name:<18}{size:>7}{1e3 * t_jit:>13.3f}{1e3 * t_py:>15.3f}{t_py / t_jit:>10.1f}")
    print()
    print(f"{'solve':<18}{'n':>7}{'numba [ms]':>13}{'fallback [ms]':>15}{'speed-up':>10}")
    for n in args.sizes:
        res = end_to_end(n, max(1, args.repeat // 2))
        for method in ("hierarchical", "monolithic"):
            t_jit, t_py = res["numba"][method], res["fallback"][method]
            print(f"{method:<18}{n:>7}{1e3 * t_jit:>13.3f}{1e3 * t_py:>15.3f}{t_py / t_jit:>10.1f}")


if __name__ == "__main__":
    main()
