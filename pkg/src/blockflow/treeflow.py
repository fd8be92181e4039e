"""Flows on the edges of a (generalized) block-cut tree.

Tree edges are stored as ``(block, cut)`` pairs and their flow is positive
in the block -> cut direction. The tie edge ``cut -> replica`` of the
augmented network therefore carries minus the tree flow, and the replica of
``cut`` inside ``block`` acts as a junction with demand equal to the tree
flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SlacksSpanBlocks
from .network import Network
from .partition import BlockCutTree, PartitionSet, TreeNode


@dataclass(frozen=True)
class TreeFlowProblem:
    tree: BlockCutTree
    injections: dict[TreeNode, float]  # known agglomerated injections
    root: TreeNode
    unknown: frozenset[TreeNode]  # root plus any slack cut vertices


def find_root(tree: BlockCutTree, net: Network, p: PartitionSet) -> TreeNode:
    """The tree vertex that owns the slack junctions.

    Either the one block containing every slack, or (single slack sitting on
    a cut) that cut vertex.
    """
    slacks = set(net.slack_ids)
    if not slacks:
        raise SlacksSpanBlocks("network has no slack junction")
    if len(slacks) == 1:
        (s,) = slacks
        if s in p.cuts:
            return TreeNode("cut", s)
    holders = [b for b in p.blocks if slacks <= b.vertices]
    if not holders:
        spread = sorted({b.id for b in p.blocks if b.vertices & slacks})
        raise SlacksSpanBlocks(f"slack junctions are spread over blocks {spread}")
    return TreeNode("block", holders[0].id)


def agglomerate_injections(tree: BlockCutTree, net: Network, p: PartitionSet) -> TreeFlowProblem:
    root = find_root(tree, net, p)
    unknown = {root}
    inj: dict[TreeNode, float] = {}
    for b in p.blocks:
        node = TreeNode("block", b.id)
        total = 0.0
        for v in b.vertices - p.cuts:
            j = net.junction_by_id[v]
            if j.slack:
                unknown.add(node)
            else:
                total += j.injection
        if node not in unknown:
            inj[node] = total
    for c in p.cuts:
        j = net.junction_by_id[c]
        node = TreeNode("cut", c)
        if j.slack:
            unknown.add(node)
        else:
            inj[node] = j.injection
    # any extra unknown vertex is a slack cut inside the root block, whose
    # replica there is slack, so the edge between them needs no flow value
    return TreeFlowProblem(tree, inj, root, frozenset(unknown))


def solve_tree_flows(prob: TreeFlowProblem) -> dict[tuple[str, str], float]:
    """Leaf peeling; edges between unknown-injection vertices come back NaN."""
    nodes = prob.tree.nodes
    pos = {v: i for i, v in enumerate(nodes)}
    eu = np.array([pos[b] for b, _ in prob.tree.edges], dtype=np.int64)
    ev = np.array([pos[c] for _, c in prob.tree.edges], dtype=np.int64)
    inj = np.array([prob.injections.get(v, 0.0) for v in nodes], dtype=float)
    fixed = np.array([v in prob.unknown for v in nodes], dtype=np.bool_)
    flow = kernels.peel_tree(len(nodes), eu, ev, inj, fixed)
    return {(b.id, c.id): float(flow[k]) for k, (b, c) in enumerate(prob.tree.edges)}


def reduced_incidence(prob: TreeFlowProblem) -> tuple[np.ndarray, np.ndarray, list[TreeNode]]:
    """Dense ``(A, q, rows)`` with one row per known vertex; ``A f = q``."""
    rows = [v for v in prob.tree.nodes if v not in prob.unknown]
    pos = {v: i for i, v in enumerate(rows)}
    A = np.zeros((len(rows), len(prob.tree.edges)))
    for k, (b, c) in enumerate(prob.tree.edges):
        if b in pos:
            A[pos[b], k] -= 1.0
        if c in pos:
            A[pos[c], k] += 1.0
    q = np.array([prob.injections[v] for v in rows])
    return A, q, rows


def tree_balance_residual(prob: TreeFlowProblem, flows: dict[tuple[str, str], float]) -> float:
    A, q, _ = reduced_incidence(prob)
    f = np.array([flows[(b.id, c.id)] for b, c in prob.tree.edges])
    f = np.where(np.isnan(f), 0.0, f)
    r = A @ f - q if len(q) else np.zeros(0)
    return float(np.max(np.abs(r), initial=0.0))


def root_outflow(prob: TreeFlowProblem, flows: dict[tuple[str, str], float]) -> float:
    """Net flow leaving the root; equals the sum of the known (demand-positive) injections."""
    total = 0.0
    for b, c in prob.tree.edges:
        f = flows[(b.id, c.id)]
        if math.isnan(f):
            continue
        if c == prob.root:
            total -= f
        elif b == prob.root:
            total += f
    return total
