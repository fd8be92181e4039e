"""Network builders and oracles shared by the test modules."""

import itertools

import numpy as np

from blockflow.network import Edge, Junction, Network, ideal, linear, node, offset, pipe, slack


def series():
    return Network(
        (slack("a", 100.0), node("b", 0.0), node("c", 2.0)),
        (pipe("e1", "a", "b", 1.0), pipe("e2", "b", "c", 1.0)),
        name="series",
    )


def path(k):
    js = [slack("v0", 50.0)] + [node(f"v{i}", 1.0) for i in range(1, k)]
    es = [pipe(f"e{i}", f"v{i}", f"v{i + 1}", 1.0) for i in range(k - 1)]
    return Network(tuple(js), tuple(es), name=f"path{k}")


def triangle():
    return Network(
        (slack("a", 10.0), node("b", 1.0), node("c", 1.0)),
        (pipe("ab", "a", "b", 1.0), pipe("bc", "b", "c", 1.0), pipe("ca", "c", "a", 1.0)),
    )


def four_arms():
    """A centre junction ``c`` joining four subnetworks N1..N4; the slack sits in N1.

    N1: triangle s-x-c, N2: path c-p-q, N3: 4-cycle c-u-w-y, N4: a single edge c-z.
    Interior demand sums: N1 1, N2 3, N3 1, N4 2.
    """
    js = (
        slack("s", 200.0), node("x", 1.0), node("c", 0.0),
        node("p", 1.0), node("q", 2.0),
        node("u", 0.5), node("w", 0.0), node("y", 0.5),
        node("z", 2.0),
    )
    es = (
        pipe("sx", "s", "x", 1.0), pipe("xc", "x", "c", 1.5), pipe("sc", "s", "c", 2.0),
        pipe("cp", "c", "p", 1.0), pipe("pq", "p", "q", 0.7),
        pipe("cu", "c", "u", 1.0), pipe("uw", "u", "w", 1.2), pipe("wy", "w", "y", 0.9), pipe("yc", "y", "c", 1.1),
        pipe("cz", "c", "z", 1.3),
    )
    return Network(js, es, name="four-arms")


def random_topology(rng, n, chords, multi=False):
    pairs = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    tree = len(pairs)
    tries = 0
    while len(pairs) < tree + chords and tries < 1000:
        tries += 1
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if not multi and ((u, v) in pairs or (v, u) in pairs):
            continue
        pairs.append((u, v))
    return pairs, tree


def random_mixed(seed, n=None, chords=None, slacks=1, kinds=("pipe", "linear", "ideal", "offset")):
    """Random valid network with mixed edge physics.

    Ideal and offset edges only sit on spanning-tree edges, so they never
    close a cycle and the flow-independent subgraph stays a forest.
    """
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(3, 20))
    chords = int(rng.integers(0, 5)) if chords is None else chords
    pairs, tree = random_topology(rng, n, chords, multi=True)
    edges = []
    for k, (u, v) in enumerate(pairs):
        kind = "pipe"
        if k < tree:
            kind = str(rng.choice(kinds, p=_kind_weights(kinds)))
        elif "linear" in kinds and rng.random() < 0.3:
            kind = "linear"
        a, b = f"n{u}", f"n{v}"
        if kind == "pipe":
            edges.append(pipe(f"e{k}", a, b, float(rng.uniform(0.5, 2.0))))
        elif kind == "linear":
            edges.append(linear(f"e{k}", a, b, float(rng.uniform(0.5, 2.0))))
        elif kind == "ideal":
            edges.append(ideal(f"e{k}", a, b, float(rng.uniform(0.9, 1.1))))
        else:
            edges.append(offset(f"e{k}", a, b, float(rng.uniform(-1.0, 1.0))))
    slack_set = set(range(slacks))
    js = []
    for i in range(n):
        if i in slack_set:
            js.append(slack(f"n{i}", float(rng.uniform(80.0, 120.0))))
        else:
            js.append(node(f"n{i}", float(rng.uniform(-0.5, 1.0))))
    return Network(tuple(js), tuple(edges), name=f"mixed-{seed}")


def _kind_weights(kinds):
    base = {"pipe": 0.55, "linear": 0.15, "ideal": 0.15, "offset": 0.15}
    w = np.array([base[k] for k in kinds])
    return w / w.sum()


def brute_force_articulation(net):
    out = set()
    for j in net.junctions:
        keep = [x.id for x in net.junctions if x.id != j.id]
        es = [e.id for e in net.edges if j.id not in (e.src, e.dst)]
        if not net.subnetwork(keep, es).is_connected():
            out.add(j.id)
    return out


def has_cycle_bruteforce(vertices, edges):
    """Enumerate every non-empty edge subset and look for a 2-regular connected one."""
    for r in range(2, len(edges) + 1):
        for subset in itertools.combinations(range(len(edges)), r):
            deg = {}
            for k in subset:
                u, v = edges[k]
                deg[u] = deg.get(u, 0) + 1
                deg[v] = deg.get(v, 0) + 1
            if any(d != 2 for d in deg.values()):
                continue
            # connected?
            seen = {edges[subset[0]][0]}
            grew = True
            while grew:
                grew = False
                for k in subset:
                    u, v = edges[k]
                    if (u in seen) != (v in seen):
                        seen |= {u, v}
                        grew = True
            if seen == set(deg):
                return True
    return False


def rel_close(a, b, rtol=1e-6):
    return all(abs(a[k] - b[k]) <= rtol * (1.0 + abs(b[k])) for k in b)


def max_rel(a, b):
    return max(abs(a[k] - b[k]) / (1.0 + abs(b[k])) for k in b)
