"""Array kernels for the hot loops.

Every kernel exists twice: a jitted version (``*_jit``) and a fallback
(``*_py``). Graph traversals have no vectorized form, so their fallback is
the same source run by the interpreter; the residual/Jacobian fallbacks are
vectorized numpy. The unsuffixed names are the ones selected by
``BLOCKFLOW_DISABLE_NUMBA``.
"""

import numpy as np

from ._jit import USE_NUMBA, compile_kernel

PIPE = 0
LINEAR = 1
IDEAL = 2
OFFSET = 3


def _biconnected(n, indptr, adj_v, adj_e, m):
    """Iterative Hopcroft-Tarjan over a CSR multigraph.

    Returns ``(n_visited, is_cut, edge_block, n_blocks, max_comp)`` where
    ``max_comp[v]`` is the size of the largest component left after deleting
    the articulation point ``v`` (0 for non-articulation vertices).
    """
    disc = np.full(n, -1, np.int64)
    low = np.zeros(n, np.int64)
    size = np.ones(n, np.int64)
    parent = np.full(n, -1, np.int64)
    parent_edge = np.full(n, -1, np.int64)
    cursor = indptr[:-1].copy()
    n_sep = np.zeros(n, np.int64)
    sep_sum = np.zeros(n, np.int64)
    max_comp = np.zeros(n, np.int64)
    edge_block = np.full(m, -1, np.int64)
    estack = np.empty(max(m, 1), np.int64)
    vstack = np.empty(max(n, 1), np.int64)
    is_cut = np.zeros(n, np.bool_)
    if n == 0:
        return 0, is_cut, edge_block, 0, max_comp

    esp = 0
    vsp = 1
    vstack[0] = 0
    disc[0] = 0
    low[0] = 0
    clock = 1
    n_blocks = 0
    while vsp > 0:
        u = vstack[vsp - 1]
        if cursor[u] < indptr[u + 1]:
            k = cursor[u]
            cursor[u] += 1
            w = adj_v[k]
            e = adj_e[k]
            if e == parent_edge[u]:
                continue
            if disc[w] == -1:
                parent[w] = u
                parent_edge[w] = e
                disc[w] = clock
                low[w] = clock
                clock += 1
                estack[esp] = e
                esp += 1
                vstack[vsp] = w
                vsp += 1
            elif disc[w] < disc[u]:
                estack[esp] = e
                esp += 1
                if disc[w] < low[u]:
                    low[u] = disc[w]
        else:
            vsp -= 1
            p = parent[u]
            if p >= 0:
                size[p] += size[u]
                if low[u] < low[p]:
                    low[p] = low[u]
                if low[u] >= disc[p]:
                    while esp > 0:
                        esp -= 1
                        f = estack[esp]
                        edge_block[f] = n_blocks
                        if f == parent_edge[u]:
                            break
                    n_blocks += 1
                    n_sep[p] += 1
                    sep_sum[p] += size[u]
                    if size[u] > max_comp[p]:
                        max_comp[p] = size[u]

    n_visited = clock
    for v in range(n):
        if v == 0:
            is_cut[v] = n_sep[v] >= 2
        elif n_sep[v] >= 1:
            is_cut[v] = True
            rest = n_visited - 1 - sep_sum[v]
            if rest > max_comp[v]:
                max_comp[v] = rest
        if not is_cut[v]:
            max_comp[v] = 0
    return n_visited, is_cut, edge_block, n_blocks, max_comp


def _peel_tree(n_vertices, edge_u, edge_v, injection, fixed):
    """Leaf peeling on a tree with edges oriented ``edge_u -> edge_v``.

    Balance at vertex ``x``: inflow - outflow = ``injection[x]``. Vertices in
    ``fixed`` have unknown injection and are never peeled; edges that remain
    between them come back as NaN.
    """
    ne = edge_u.shape[0]
    deg = np.zeros(n_vertices, np.int64)
    for e in range(ne):
        deg[edge_u[e]] += 1
        deg[edge_v[e]] += 1
    indptr = np.zeros(n_vertices + 1, np.int64)
    for x in range(n_vertices):
        indptr[x + 1] = indptr[x] + deg[x]
    fill = indptr[:-1].copy()
    inc = np.empty(max(2 * ne, 1), np.int64)
    for e in range(ne):
        inc[fill[edge_u[e]]] = e
        fill[edge_u[e]] += 1
        inc[fill[edge_v[e]]] = e
        fill[edge_v[e]] += 1

    flow = np.full(ne, np.nan)
    done = np.zeros(ne, np.bool_)
    pending = injection.copy()
    queue = np.empty(max(n_vertices, 1), np.int64)
    head = 0
    tail = 0
    for x in range(n_vertices):
        if deg[x] == 1 and not fixed[x]:
            queue[tail] = x
            tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        if deg[x] != 1:
            continue
        e = -1
        for k in range(indptr[x], indptr[x + 1]):
            if not done[inc[k]]:
                e = inc[k]
                break
        if edge_v[e] == x:
            flow[e] = pending[x]
            w = edge_u[e]
        else:
            flow[e] = -pending[x]
            w = edge_v[e]
        pending[w] += pending[x]
        done[e] = True
        deg[x] = 0
        deg[w] -= 1
        if deg[w] == 1 and not fixed[w]:
            queue[tail] = w
            tail += 1
    return flow


def _edge_g_loop(kind, coef, f, deriv_floor, out_g, out_dg):
    for e in range(kind.shape[0]):
        k = kind[e]
        if k == PIPE:
            out_g[e] = coef[e] * f[e] * abs(f[e])
            d = 2.0 * coef[e] * abs(f[e])
            out_dg[e] = d if d > deriv_floor else deriv_floor
        elif k == LINEAR:
            out_g[e] = coef[e] * f[e]
            out_dg[e] = coef[e]
        elif k == OFFSET:
            out_g[e] = coef[e]
            out_dg[e] = 0.0
        else:
            out_g[e] = 0.0
            out_dg[e] = 0.0


def _residual_loop(x, n, src, dst, gamma, kind, coef, balance_rows, q_scaled, slack_rows, pi_scaled, pscale, qscale):
    m = src.shape[0]
    res = np.empty(m + balance_rows.shape[0] + slack_rows.shape[0])
    g = np.empty(m)
    dg = np.empty(m)
    fl = np.empty(m)
    for e in range(m):
        fl[e] = qscale * x[n + e]
    _edge_g_loop_inner(kind, coef, fl, 0.0, g, dg)
    for e in range(m):
        res[e] = gamma[e] * x[src[e]] - x[dst[e]] - g[e] / pscale
    net = np.zeros(n)
    for e in range(m):
        net[dst[e]] += x[n + e]
        net[src[e]] -= x[n + e]
    r = m
    for i in range(balance_rows.shape[0]):
        res[r] = net[balance_rows[i]] - q_scaled[i]
        r += 1
    for i in range(slack_rows.shape[0]):
        res[r] = x[slack_rows[i]] - pi_scaled[i]
        r += 1
    return res


def _jac_flow_entries_loop(x, n, kind, coef, pscale, qscale, deriv_floor):
    m = kind.shape[0]
    out = np.empty(m)
    for e in range(m):
        k = kind[e]
        f = qscale * x[n + e]
        if k == PIPE:
            d = 2.0 * coef[e] * abs(f) * qscale / pscale
            out[e] = -(d if d > deriv_floor else deriv_floor)
        elif k == LINEAR:
            out[e] = -coef[e] * qscale / pscale
        else:
            out[e] = 0.0
    return out


# numpy fallbacks


def edge_g_numpy(kind, coef, f, deriv_floor=0.0):
    f = np.asarray(f, dtype=float)
    pipe = kind == PIPE
    lin = kind == LINEAR
    off = kind == OFFSET
    g = np.zeros_like(f)
    g[pipe] = coef[pipe] * f[pipe] * np.abs(f[pipe])
    g[lin] = coef[lin] * f[lin]
    g[off] = coef[off]
    dg = np.zeros_like(f)
    dg[pipe] = np.maximum(2.0 * coef[pipe] * np.abs(f[pipe]), deriv_floor)
    dg[lin] = coef[lin]
    return g, dg


def _residual_numpy(x, n, src, dst, gamma, kind, coef, balance_rows, q_scaled, slack_rows, pi_scaled, pscale, qscale):
    pot = x[:n]
    fl = x[n:]
    g, _ = edge_g_numpy(kind, coef, qscale * fl)
    edge_res = gamma * pot[src] - pot[dst] - g / pscale
    net = np.bincount(dst, weights=fl, minlength=n) - np.bincount(src, weights=fl, minlength=n)
    return np.concatenate(
        (edge_res, net[balance_rows] - q_scaled, pot[slack_rows] - pi_scaled)
    )


def _jac_flow_entries_numpy(x, n, kind, coef, pscale, qscale, deriv_floor):
    fl = qscale * x[n:]
    out = np.zeros(kind.shape[0])
    pipe = kind == PIPE
    lin = kind == LINEAR
    out[pipe] = -np.maximum(2.0 * coef[pipe] * np.abs(fl[pipe]) * qscale / pscale, deriv_floor)
    out[lin] = -coef[lin] * qscale / pscale
    return out


biconnected_py = _biconnected
peel_tree_py = _peel_tree
residual_py = _residual_numpy
jac_flow_entries_py = _jac_flow_entries_numpy

biconnected_jit = compile_kernel(_biconnected)
peel_tree_jit = compile_kernel(_peel_tree)
_edge_g_loop_inner = compile_kernel(_edge_g_loop)
residual_jit = compile_kernel(_residual_loop)
jac_flow_entries_jit = compile_kernel(_jac_flow_entries_loop)

if USE_NUMBA:
    biconnected = biconnected_jit
    peel_tree = peel_tree_jit
    residual = residual_jit
    jac_flow_entries = jac_flow_entries_jit
else:
    biconnected = biconnected_py
    peel_tree = peel_tree_py
    residual = residual_py
    jac_flow_entries = jac_flow_entries_py
