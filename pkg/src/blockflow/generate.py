"""Seeded random pipe networks for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .network import Edge, Junction, Network


def random_network(n: int, cycles: int = 0, seed: int = 0, name: str | None = None) -> Network:
    """Random spanning tree plus ``cycles`` chord edges, pipe physics only.

    Junction ``n0`` is the single slack. Withdrawals are uniform in [0, 1],
    rescaled to a total of ``n / 10``. The slack potential bounds the largest
    possible drop along any simple path, so every potential stays positive.
    """
    if n < 3:
        raise ValueError("need at least 3 junctions")
    if cycles < 0:
        raise ValueError("cycles must be non-negative")
    max_chords = n * (n - 1) // 2 - (n - 1)
    if cycles > max_chords:
        raise ValueError(f"at most {max_chords} chords fit in a simple graph on {n} junctions")
    rng = np.random.default_rng(seed)
    pairs = []
    present = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        pairs.append((u, v))
        present.add((u, v))
    while len(pairs) < n - 1 + cycles:
        u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (u, v) in present:
            continue
        present.add((u, v))
        pairs.append((u, v) if rng.random() < 0.5 else (v, u))
    alpha = rng.uniform(0.5, 2.0, size=len(pairs))
    demand = rng.uniform(0.0, 1.0, size=n - 1)
    demand *= (n / 10.0) / demand.sum()
    total = float(demand.sum())
    potential = float(np.ceil(2.0 * (n - 1) * alpha.max() * total**2)) + 1.0
    junctions = [Junction("n0", slack=True, potential=potential)]
    junctions += [Junction(f"n{i}", injection=round(float(demand[i - 1]), 12)) for i in range(1, n)]
    edges = [
        Edge(f"p{k}", f"n{u}", f"n{v}", "pipe", alpha=round(float(alpha[k]), 12)) for k, (u, v) in enumerate(pairs)
    ]
    return Network(tuple(junctions), tuple(edges), name=name or f"random-n{n}-k{cycles}-s{seed}")
