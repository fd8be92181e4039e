"""Network data model, edge physics and residuals of the steady-flow system.

Sign convention for injections: a positive ``injection`` at a non-slack
junction is net *inflow consumed* at that junction (a withdrawal/demand):

    sum(flow on edges into j) - sum(flow on edges out of j) = injection[j]

Many gas datasets publish supplies as positive numbers; flip them on import.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidNetwork

EDGE_KINDS = ("pipe", "linear", "ideal", "offset")
KIND_CODE = {"pipe": kernels.PIPE, "linear": kernels.LINEAR, "ideal": kernels.IDEAL, "offset": kernels.OFFSET}


@dataclass(frozen=True)
class Junction:
    id: str
    slack: bool = False
    injection: float | None = None
    potential: float | None = None

    def __post_init__(self):
        if self.slack:
            if self.potential is None or self.injection is not None:
                raise InvalidNetwork(f"slack junction {self.id!r} needs a potential and no injection")
            if not math.isfinite(self.potential):
                raise InvalidNetwork(f"junction {self.id!r}: potential must be finite")
        else:
            if self.injection is None or self.potential is not None:
                raise InvalidNetwork(f"non-slack junction {self.id!r} needs an injection and no potential")
            if not math.isfinite(self.injection):
                raise InvalidNetwork(f"junction {self.id!r}: injection must be finite")


@dataclass(frozen=True)
class Edge:
    """A directed edge element ``src -> dst``.

    Physics by kind, with ``gamma * pi_src - pi_dst = g(f)``:

    ========  =====  ===============
    kind      gamma  g(f)
    ========  =====  ===============
    pipe      1      alpha * f * |f|
    linear    1      r * f
    ideal     gamma  0
    offset    1      c
    ========  =====  ===============
    """

    id: str
    src: str
    dst: str
    kind: str = "pipe"
    alpha: float | None = None
    r: float | None = None
    gamma: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in KIND_CODE:
            raise InvalidNetwork(f"edge {self.id!r}: unknown kind {self.kind!r}")
        if self.src == self.dst:
            raise InvalidNetwork(f"edge {self.id!r}: self-loop at {self.src!r}")
        required = {"pipe": "alpha", "linear": "r", "ideal": "gamma", "offset": "c"}[self.kind]
        for name in ("alpha", "r", "gamma", "c"):
            value = getattr(self, name)
            if name == required:
                if value is None or not math.isfinite(value):
                    raise InvalidNetwork(f"edge {self.id!r}: {self.kind} edge needs finite {name}")
                if name != "c" and value <= 0:
                    raise InvalidNetwork(f"edge {self.id!r}: {name} must be positive")
            elif value is not None:
                raise InvalidNetwork(f"edge {self.id!r}: {name} is not a {self.kind} parameter")

    @property
    def gain(self) -> float:
        """The potential multiplier on the source side (1 except for ideal edges)."""
        return self.gamma if self.kind == "ideal" else 1.0

    @property
    def coef(self) -> float:
        return {"pipe": self.alpha, "linear": self.r, "ideal": 0.0, "offset": self.c}[self.kind]

    def g(self, f: float) -> float:
        if self.kind == "pipe":
            return self.alpha * f * abs(f)
        if self.kind == "linear":
            return self.r * f
        if self.kind == "offset":
            return self.c
        return 0.0

    def dg(self, f: float) -> float:
        if self.kind == "pipe":
            return 2.0 * self.alpha * abs(f)
        if self.kind == "linear":
            return self.r
        return 0.0

    @property
    def flow_sensitive(self) -> bool:
        return self.kind in ("pipe", "linear")


def pipe(id, src, dst, alpha):
    return Edge(id, src, dst, "pipe", alpha=alpha)


def linear(id, src, dst, r):
    return Edge(id, src, dst, "linear", r=r)


def ideal(id, src, dst, gamma=1.0):
    return Edge(id, src, dst, "ideal", gamma=gamma)


def offset(id, src, dst, c):
    return Edge(id, src, dst, "offset", c=c)


def slack(id, potential):
    return Junction(id, slack=True, potential=float(potential))


def node(id, injection=0.0):
    return Junction(id, injection=float(injection))


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable directed multigraph of junctions and edge elements.

    Junction and edge order is preserved and defines the index used by all
    array views (``src_idx``, ``dst_idx``, ...).
    """

    junctions: tuple[Junction, ...]
    edges: tuple[Edge, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "junctions", tuple(self.junctions))
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for j in self.junctions:
            if j.id in seen:
                raise InvalidNetwork(f"duplicate junction id {j.id!r}")
            seen.add(j.id)
        eseen = set()
        for e in self.edges:
            if e.id in eseen:
                raise InvalidNetwork(f"duplicate edge id {e.id!r}")
            eseen.add(e.id)
            for end in (e.src, e.dst):
                if end not in seen:
                    raise InvalidNetwork(f"edge {e.id!r} references unknown junction {end!r}")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.junctions == other.junctions and self.edges == other.edges

    __hash__ = None

    @cached_property
    def index(self) -> dict[str, int]:
        return {j.id: i for i, j in enumerate(self.junctions)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def junction_by_id(self) -> dict[str, Junction]:
        return {j.id: j for j in self.junctions}

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @property
    def n_junctions(self) -> int:
        return len(self.junctions)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def src_idx(self) -> np.ndarray:
        return np.array([self.index[e.src] for e in self.edges], dtype=np.int64)

    @cached_property
    def dst_idx(self) -> np.ndarray:
        return np.array([self.index[e.dst] for e in self.edges], dtype=np.int64)

    @cached_property
    def kind_code(self) -> np.ndarray:
        return np.array([KIND_CODE[e.kind] for e in self.edges], dtype=np.int64)

    @cached_property
    def gain(self) -> np.ndarray:
        return np.array([e.gain for e in self.edges], dtype=float)

    @cached_property
    def coef(self) -> np.ndarray:
        return np.array([e.coef for e in self.edges], dtype=float)

    @cached_property
    def slack_ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.junctions if j.slack)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Undirected adjacency as ``(indptr, neighbour, edge)`` arrays."""
        return csr_adjacency(self.n_junctions, self.src_idx, self.dst_idx)

    def incident(self, jid: str) -> list[Edge]:
        return [e for e in self.edges if e.src == jid or e.dst == jid]

    def is_connected(self) -> bool:
        if self.n_junctions == 0:
            return True
        return _n_components(self.n_junctions, self.src_idx, self.dst_idx) == 1

    def subnetwork(self, junction_ids: Iterable[str], edge_ids: Iterable[str], name: str = "") -> "Network":
        keep = set(junction_ids)
        ekeep = set(edge_ids)
        return Network(
            tuple(j for j in self.junctions if j.id in keep),
            tuple(e for e in self.edges if e.id in ekeep),
            name=name,
        )


def csr_adjacency(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Undirected multigraph adjacency ``(indptr, neighbour, edge)`` from edge end arrays."""
    m = len(src)
    ends = np.concatenate((src, dst))
    other = np.concatenate((dst, src))
    eid = np.concatenate((np.arange(m), np.arange(m)))
    order = np.argsort(ends, kind="stable")
    counts = np.bincount(ends, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, other[order].astype(np.int64), eid[order].astype(np.int64)


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _n_components(n, src, dst, mask=None):
    parent = list(range(n))
    count = n
    for k in range(len(src)):
        if mask is not None and not mask[k]:
            continue
        a, b = _find(parent, int(src[k])), _find(parent, int(dst[k]))
        if a != b:
            parent[a] = b
            count -= 1
    return count


# residuals


def edge_residual(e: Edge, pi_from: float, pi_to: float, f: float) -> float:
    return e.gain * pi_from - pi_to - e.g(f)


def node_residual(net: Network, j: str, flows: Mapping[str, float]) -> float:
    junction = net.junction_by_id[j]
    if junction.slack:
        raise InvalidNetwork(f"junction {j!r} is slack and has no balance equation")
    total = 0.0
    for e in net.incident(j):
        if e.dst == j:
            total += flows[e.id]
        if e.src == j:
            total -= flows[e.id]
    return total - junction.injection


@dataclass
class Solution:
    potentials: dict[str, float]
    flows: dict[str, float]
    residual_inf_norm: float = float("nan")
    iterations_total: int = 0


@dataclass
class VerificationReport:
    edge_residuals: dict[str, float]
    balance_residuals: dict[str, float]
    slack_residuals: dict[str, float]
    inf_norm: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.inf_norm < self.tol


def verify_solution(net: Network, sol: Solution, tol: float = 1e-8) -> VerificationReport:
    """Evaluate every equation of the system in unscaled units."""
    if set(sol.potentials) != set(net.index) or set(sol.flows) != set(net.edge_index):
        raise DimensionMismatch("solution keys do not match the network's junctions and edges")
    pot = np.array([sol.potentials[j.id] for j in net.junctions], dtype=float)
    fl = np.array([sol.flows[e.id] for e in net.edges], dtype=float)
    g, _ = kernels.edge_g_numpy(net.kind_code, net.coef, fl)
    edge_res = net.gain * pot[net.src_idx] - pot[net.dst_idx] - g
    n = net.n_junctions
    netflow = np.bincount(net.dst_idx, weights=fl, minlength=n) - np.bincount(net.src_idx, weights=fl, minlength=n)
    balance = {}
    slack_res = {}
    for i, j in enumerate(net.junctions):
        if j.slack:
            slack_res[j.id] = float(pot[i] - j.potential)
        else:
            balance[j.id] = float(netflow[i] - j.injection)
    edges = {e.id: float(edge_res[k]) for k, e in enumerate(net.edges)}
    values = list(edges.values()) + list(balance.values()) + list(slack_res.values())
    inf = max((abs(v) for v in values), default=0.0)
    if not math.isfinite(inf):
        inf = math.inf
    return VerificationReport(edges, balance, slack_res, inf, tol)


# assumption checks


@dataclass
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {code for code, _ in self.violations}


def _flowless_check(net: Network, edge_mask: np.ndarray):
    """Union-find over the masked subgraph; returns (cycle edge ids, slack pairs)."""
    parent = list(range(net.n_junctions))
    cycle_edges = []
    for k, e in enumerate(net.edges):
        if not edge_mask[k]:
            continue
        a, b = _find(parent, net.index[e.src]), _find(parent, net.index[e.dst])
        if a == b:
            cycle_edges.append(e.id)
        else:
            parent[a] = b
    by_root: dict[int, list[str]] = {}
    for sid in net.slack_ids:
        by_root.setdefault(_find(parent, net.index[sid]), []).append(sid)
    groups = [sorted(g) for g in by_root.values() if len(g) > 1]
    return cycle_edges, groups


def validate_network(net: Network) -> ValidationReport:
    """Check connectivity and the three standing assumptions.

    A1: at least one slack junction. A2: no two slacks joined by a path of
    ``ideal`` (g = 0) edges only. A3: the ``ideal`` edges form a forest.
    Offset edges have nonzero but flow-independent ``g``; the same checks run
    over ideal+offset edges are reported as warnings because such paths leave
    flows undetermined even though A2/A3 hold.
    """
    report = ValidationReport()
    if not net.is_connected():
        report.violations.append(("DISCONNECTED", "network is not connected"))
    if not net.slack_ids:
        report.violations.append(("A1", "no slack junction"))
    kinds = net.kind_code
    cycles, pairs = _flowless_check(net, kinds == kernels.IDEAL)
    for group in pairs:
        report.violations.append(("A2", f"slack junctions {', '.join(group)} are joined by ideal edges only"))
    if cycles:
        report.violations.append(("A3", f"cycle of ideal edges closed by {', '.join(cycles)}"))
    wcycles, wpairs = _flowless_check(net, (kinds == kernels.IDEAL) | (kinds == kernels.OFFSET))
    if not pairs:
        for group in wpairs:
            report.warnings.append(("A2-flowless", f"slacks {', '.join(group)} joined by flow-independent edges only"))
    if wcycles and not cycles:
        report.warnings.append(("A3-flowless", f"cycle of flow-independent edges closed by {', '.join(wcycles)}"))
    return report


def require_valid(net: Network) -> None:
    report = validate_network(net)
    if not report.ok:
        raise InvalidNetwork("; ".join(f"{c}: {m}" for c, m in report.violations))
