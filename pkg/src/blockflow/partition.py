"""Articulation points, (generalized) blocks, block-cut trees and the
augmented network with replicated cut vertices."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import DisconnectedNetwork, PartitionError
from .network import Edge, Junction, Network, _find, csr_adjacency, ideal


@dataclass(frozen=True)
class Block:
    id: str
    vertices: frozenset[str]
    edges: frozenset[str]

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class PartitionSet:
    blocks: tuple[Block, ...]
    cuts: frozenset[str]

    def block(self, block_id: str) -> Block:
        try:
            return self._by_id[block_id]
        except KeyError:
            raise PartitionError(f"no block {block_id!r}") from None

    @cached_property
    def _by_id(self) -> dict[str, Block]:
        return {b.id: b for b in self.blocks}

    def blocks_containing(self, jid: str) -> list[Block]:
        return [b for b in self.blocks if jid in b.vertices]

    @property
    def max_block_size(self) -> int:
        return max((b.size for b in self.blocks), default=0)


@dataclass(frozen=True)
class OversizedBlock:
    """Size control stopped at a non-separable block larger than the cap."""

    block: Block
    size: int
    partition: PartitionSet


class TreeNode(NamedTuple):
    sort: str  # "block" or "cut"
    id: str


@dataclass(frozen=True)
class BlockCutTree:
    nodes: tuple[TreeNode, ...]
    edges: tuple[tuple[TreeNode, TreeNode], ...]  # (block node, cut node)
    partition: PartitionSet | None = field(default=None, compare=False, repr=False)

    def neighbours(self) -> dict[TreeNode, list[TreeNode]]:
        adj: dict[TreeNode, list[TreeNode]] = {v: [] for v in self.nodes}
        for b, c in self.edges:
            adj[b].append(c)
            adj[c].append(b)
        return adj


def trivial_partition(net: Network) -> PartitionSet:
    return PartitionSet(
        (Block("B0", frozenset(net.index), frozenset(net.edge_index)),),
        frozenset(),
    )


def _run_biconnected(net: Network):
    indptr, adj_v, adj_e = net.csr
    n_visited, is_cut, edge_block, n_blocks, max_comp = kernels.biconnected(
        net.n_junctions, indptr, adj_v, adj_e, net.n_edges
    )
    if n_visited != net.n_junctions:
        raise DisconnectedNetwork(f"network is disconnected ({n_visited} of {net.n_junctions} junctions reachable)")
    return is_cut, edge_block, n_blocks, max_comp


def find_articulation_points(net: Network) -> set[str]:
    is_cut, *_ = _run_biconnected(net)
    return {net.junctions[i].id for i in np.flatnonzero(is_cut)}


def compute_blocks(net: Network) -> PartitionSet:
    """Full block decomposition; blocks ordered by their first edge."""
    if net.n_edges == 0:
        if net.n_junctions > 1:
            raise DisconnectedNetwork("network has several junctions and no edges")
        return trivial_partition(net)
    is_cut, edge_block, n_blocks, _ = _run_biconnected(net)
    members: dict[int, list[int]] = defaultdict(list)
    for k, b in enumerate(edge_block):
        members[int(b)].append(k)
    blocks = []
    for label in sorted(members, key=lambda b: members[b][0]):
        eks = members[label]
        verts = {net.edges[k].src for k in eks} | {net.edges[k].dst for k in eks}
        blocks.append(Block(f"B{len(blocks)}", frozenset(verts), frozenset(net.edges[k].id for k in eks)))
    cuts = frozenset(net.junctions[i].id for i in np.flatnonzero(is_cut))
    return PartitionSet(tuple(blocks), cuts)


def _block_arrays(net: Network, block: Block) -> tuple[np.ndarray, np.ndarray]:
    """Global junction and edge indices of ``block``, ascending."""
    verts = np.array(sorted(net.index[v] for v in block.vertices), dtype=np.int64)
    eidx = np.array(sorted(net.edge_index[e] for e in block.edges), dtype=np.int64)
    return verts, eidx


def _local_ends(net: Network, verts: np.ndarray, eidx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of the edges ``eidx`` as positions in ``verts``."""
    return np.searchsorted(verts, net.src_idx[eidx]), np.searchsorted(verts, net.dst_idx[eidx])


def _edges_connect(net: Network, block: Block) -> bool:
    """Whether the block's edges form one connected piece over its vertices."""
    if len(block.edges) < len(block.vertices) - 1:
        return False
    local = {v: i for i, v in enumerate(block.vertices)}
    parent = list(range(len(local)))
    pieces = len(local)
    for eid in block.edges:
        e = net.edge_by_id[eid]
        a, b = _find(parent, local[e.src]), _find(parent, local[e.dst])
        if a != b:
            parent[a] = b
            pieces -= 1
    return pieces == 1


def _split_arrays(net: Network, verts: np.ndarray, eidx: np.ndarray, c: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Components of the block minus its local vertex ``c``, each re-attached to ``c``.

    Components come ordered by their first junction in network order.
    """
    src, dst = _local_ends(net, verts, eidx)
    n = len(verts)
    inner = (src != c) & (dst != c)
    graph = coo_matrix((np.ones(int(inner.sum())), (src[inner], dst[inner])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    labels[c] = -1
    present = labels[labels >= 0]
    _, first = np.unique(present, return_index=True)
    order = present[np.sort(first)]
    edge_label = labels[np.where(src == c, dst, src)]
    parts = []
    for lab in order:
        members = np.flatnonzero(labels == lab)
        members = np.sort(np.append(members, c))
        parts.append((verts[members], eidx[edge_label == lab]))
    return parts


def _split_at(net: Network, block: Block, cut: str) -> list[tuple[set[str], set[str]]]:
    """Components of ``block - cut``, each with its edges plus the edges to ``cut``."""
    verts, eidx = _block_arrays(net, block)
    c = int(np.searchsorted(verts, net.index[cut]))
    return [
        ({net.junctions[i].id for i in pv}, {net.edges[k].id for k in pe})
        for pv, pe in _split_arrays(net, verts, eidx, c)
    ]


def refine_partition(net: Network, p: PartitionSet, target_block: str, cut: str) -> PartitionSet:
    """Split ``target_block`` at ``cut`` into its components, each re-attached to ``cut``."""
    block = p.block(target_block)
    if cut not in block.vertices:
        raise PartitionError(f"{cut!r} is not a vertex of block {target_block!r}")
    parts = _split_at(net, block, cut)
    if len(parts) < 2:
        raise PartitionError(f"{cut!r} is not an articulation point of block {target_block!r}")
    new_blocks = []
    for b in p.blocks:
        if b.id != target_block:
            new_blocks.append(b)
            continue
        for i, (verts, edges) in enumerate(parts):
            new_blocks.append(Block(f"{target_block}.{i}", frozenset(verts), frozenset(edges)))
    return PartitionSet(tuple(new_blocks), p.cuts | {cut})


def _balanced_point_arrays(net: Network, verts: np.ndarray, eidx: np.ndarray) -> int | None:
    """Local position of the most balanced articulation point, or ``None``."""
    src, dst = _local_ends(net, verts, eidx)
    indptr, adj_v, adj_e = csr_adjacency(len(verts), src, dst)
    n_visited, is_cut, _, _, max_comp = kernels.biconnected(len(verts), indptr, adj_v, adj_e, len(eidx))
    if n_visited != len(verts):
        raise DisconnectedNetwork("block is disconnected")
    candidates = [(int(max_comp[i]), net.junctions[verts[i]].id, int(i)) for i in np.flatnonzero(is_cut)]
    return min(candidates)[2] if candidates else None


def _balanced_articulation_point(net: Network, block: Block) -> str | None:
    verts, eidx = _block_arrays(net, block)
    i = _balanced_point_arrays(net, verts, eidx)
    return None if i is None else net.junctions[verts[i]].id


def partition_with_max_size(net: Network, max_vertices: int) -> PartitionSet | OversizedBlock:
    """Refine greedily until every block has at most ``max_vertices`` junctions.

    Returns an :class:`OversizedBlock` when a block over the cap turns out to
    be non-separable. The split point is the articulation point whose largest
    remaining component is smallest (ties: smallest junction id). Equivalent
    to repeated :func:`refine_partition`, but kept in index arrays throughout.
    """
    if max_vertices < 2:
        raise ValueError("max_vertices must be at least 2")
    if not net.is_connected():
        raise DisconnectedNetwork("network is disconnected")
    work = [("B0", np.arange(net.n_junctions, dtype=np.int64), np.arange(net.n_edges, dtype=np.int64))]
    cuts: set[int] = set()

    def materialize():
        blocks = tuple(
            Block(bid, frozenset(net.junctions[i].id for i in v), frozenset(net.edges[k].id for k in e))
            for bid, v, e in work
        )
        return PartitionSet(blocks, frozenset(net.junctions[i].id for i in cuts))

    start = 0
    while True:
        pos = next((k for k in range(start, len(work)) if len(work[k][1]) > max_vertices), None)
        if pos is None:
            return materialize()
        bid, verts, eidx = work[pos]
        c = _balanced_point_arrays(net, verts, eidx)
        if c is None:
            p = materialize()
            return OversizedBlock(p.block(bid), len(verts), p)
        cuts.add(int(verts[c]))
        parts = _split_arrays(net, verts, eidx, c)
        work[pos:pos + 1] = [(f"{bid}.{i}", v, e) for i, (v, e) in enumerate(parts)]
        start = pos  # every block before ``pos`` is already within the cap


def full_refinement_chain(net: Network, max_vertices: int = 2) -> list[PartitionSet]:
    """The nested sequence trivial > ... > size-capped partitions."""
    p = trivial_partition(net)
    chain = [p]
    while True:
        big = next((b for b in p.blocks if b.size > max_vertices and _balanced_articulation_point(net, b)), None)
        if big is None:
            return chain
        p = refine_partition(net, p, big.id, _balanced_articulation_point(net, big))
        chain.append(p)


def check_partition(net: Network, p: PartitionSet) -> None:
    """Raise :class:`PartitionError` unless ``p`` is a generalized block-cut set of ``net``."""
    owner: dict[str, str] = {}
    for b in p.blocks:
        for eid in b.edges:
            if eid not in net.edge_by_id:
                raise PartitionError(f"block {b.id}: unknown edge {eid!r}")
            if eid in owner:
                raise PartitionError(f"edge {eid!r} is in blocks {owner[eid]} and {b.id}")
            owner[eid] = b.id
        if not b.vertices:
            raise PartitionError(f"block {b.id} is empty")
        unknown = [v for v in b.vertices if v not in net.index]
        if unknown:
            raise PartitionError(f"block {b.id}: unknown junctions {sorted(unknown)}")
        ends = set()
        for eid in b.edges:
            e = net.edge_by_id[eid]
            ends.update((e.src, e.dst))
        if b.edges and ends != set(b.vertices):
            raise PartitionError(f"block {b.id}: vertex set does not match its edge endpoints")
        if len(b.vertices) > 1 and not _edges_connect(net, b):
            raise PartitionError(f"block {b.id} is not connected")
    if len(owner) != net.n_edges:
        missing = sorted(set(net.edge_by_id) - set(owner))
        raise PartitionError(f"edges not covered by any block: {missing[:5]}")
    if len({b.id for b in p.blocks}) != len(p.blocks):
        raise PartitionError("duplicate block ids")
    covered = set().union(*(b.vertices for b in p.blocks)) if p.blocks else set()
    if covered != set(net.index):
        raise PartitionError("blocks do not cover every junction")
    holders: dict[str, list[str]] = defaultdict(list)
    for b in p.blocks:
        for v in b.vertices:
            holders[v].append(b.id)
    pair_count: dict[tuple[str, str], list[str]] = defaultdict(list)
    for v, bids in holders.items():
        if len(bids) > 1 and v not in p.cuts:
            raise PartitionError(f"junction {v!r} is shared by blocks {bids} but is not a cut")
        for i in range(len(bids)):
            for k in range(i + 1, len(bids)):
                pair_count[(bids[i], bids[k])].append(v)
    for pair, shared in pair_count.items():
        if len(shared) > 1:
            raise PartitionError(f"blocks {pair[0]} and {pair[1]} share {len(shared)} junctions {sorted(shared)}")
    for c in p.cuts:
        if c not in holders:
            raise PartitionError(f"cut {c!r} is in no block")


def build_block_cut_tree(net: Network, p: PartitionSet) -> BlockCutTree:
    check_partition(net, p)
    nodes = [TreeNode("block", b.id) for b in p.blocks]
    nodes += [TreeNode("cut", c) for c in sorted(p.cuts, key=lambda c: net.index[c])]
    edges = []
    for b in p.blocks:
        for c in sorted(b.vertices & p.cuts, key=lambda c: net.index[c]):
            edges.append((TreeNode("block", b.id), TreeNode("cut", c)))
    # tree certificate: connected with |E| = |V| - 1
    pos = {v: i for i, v in enumerate(nodes)}
    parent = list(range(len(nodes)))
    for b, c in edges:
        x, y = _find(parent, pos[b]), _find(parent, pos[c])
        if x == y:
            raise PartitionError(f"block-cut graph has a cycle through {b.id} and {c.id}")
        parent[x] = y
    if len(edges) != len(nodes) - 1:
        raise PartitionError("block-cut graph is not connected")
    return BlockCutTree(tuple(nodes), tuple(edges), p)


@dataclass(frozen=True)
class AugmentedNetwork:
    network: Network
    replica_map: dict[str, tuple[str, str]]  # replica id -> (cut id, block id)
    tie_edges: frozenset[str]

    def replica_of(self, cut: str, block_id: str) -> str:
        return self._lookup[(cut, block_id)]

    @cached_property
    def _lookup(self) -> dict[tuple[str, str], str]:
        return {v: k for k, v in self.replica_map.items()}

    def merge(self) -> Network:
        """Drop tie edges and fold replicas back onto their cut vertex."""
        back = {r: c for r, (c, _) in self.replica_map.items()}
        junctions = tuple(j for j in self.network.junctions if j.id not in back)
        edges = []
        for e in self.network.edges:
            if e.id in self.tie_edges:
                continue
            src, dst = back.get(e.src, e.src), back.get(e.dst, e.dst)
            if (src, dst) != (e.src, e.dst):
                e = Edge(e.id, src, dst, e.kind, alpha=e.alpha, r=e.r, gamma=e.gamma, c=e.c)
            edges.append(e)
        return Network(junctions, tuple(edges), name=self.network.name)


def _fresh_id(base: str, taken: set[str]) -> str:
    cand = base
    while cand in taken:
        cand += "'"
    taken.add(cand)
    return cand


def replica_id(cut: str, block_id: str) -> str:
    return f"{cut}@{block_id}"


def build_augmented_network(net: Network, p: PartitionSet) -> AugmentedNetwork:
    """Replicate every cut once per containing block, tied by ideal gamma=1 edges.

    Tie edges point original -> replica. Replicas are plain zero-injection
    junctions here, also for a slack cut: in the whole augmented system the tie
    edge already pins their potential, and making them slack as well would
    leave the tie flows undetermined.
    """
    check_partition(net, p)
    taken_j = set(net.index)
    taken_e = set(net.edge_index)
    rehome: dict[tuple[str, str], str] = {}
    replica_map: dict[str, tuple[str, str]] = {}
    new_junctions: list[Junction] = list(net.junctions)
    ties: list[Edge] = []
    edge_block = {eid: b.id for b in p.blocks for eid in b.edges}
    holders: dict[str, list[Block]] = defaultdict(list)
    for b in p.blocks:
        for v in b.vertices & p.cuts:
            holders[v].append(b)
    for c in sorted(p.cuts, key=lambda c: net.index[c]):
        for b in holders[c]:
            rid = _fresh_id(replica_id(c, b.id), taken_j)
            replica_map[rid] = (c, b.id)
            rehome[(c, b.id)] = rid
            new_junctions.append(Junction(rid, injection=0.0))
            ties.append(ideal(_fresh_id(f"tie:{c}@{b.id}", taken_e), c, rid, 1.0))
    edges = []
    for e in net.edges:
        bid = edge_block[e.id]
        src = rehome.get((e.src, bid), e.src)
        dst = rehome.get((e.dst, bid), e.dst)
        if (src, dst) != (e.src, e.dst):
            e = Edge(e.id, src, dst, e.kind, alpha=e.alpha, r=e.r, gamma=e.gamma, c=e.c)
        edges.append(e)
    aug = Network(tuple(new_junctions), tuple(edges) + tuple(ties), name=net.name)
    return AugmentedNetwork(aug, replica_map, frozenset(t.id for t in ties))
