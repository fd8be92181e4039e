"""Summary statistics of a partition, mirroring the benchmark table columns."""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field

from .errors import SlacksSpanBlocks
from .network import Network
from .partition import BlockCutTree, OversizedBlock, PartitionSet, TreeNode, build_block_cut_tree
from .treeflow import agglomerate_injections, find_root, solve_tree_flows


@dataclass
class StatsReport:
    network: str
    junctions: int
    edges: int
    blocks: int
    two_node_blocks: int
    max_block_size: int
    max_block_pct: float
    cuts: int
    tree_depth: int | None
    oversized: dict | None = None
    block_list: list[dict] = field(default_factory=list)
    cut_list: list[str] = field(default_factory=list)
    tree_edges: list[list[str]] = field(default_factory=list)
    tree_flows: dict[str, float] | None = None

    def to_dict(self) -> dict:
        doc = asdict(self)
        if doc["tree_flows"] is None:
            del doc["tree_flows"]
        return doc

    def table(self) -> str:
        head = f"{'Network':<16}{'No. of blocks':>15}{'2-node Blocks':>15}{'Max Block size':>18}"
        maxcol = f"{self.max_block_size} ({self.max_block_pct:.1f}%)"
        row = f"{self.network:<16}{self.blocks:>15}{self.two_node_blocks:>15}{maxcol:>18}"
        lines = [head, row, "", f"junctions {self.junctions}, edges {self.edges}, cut vertices {self.cuts}, "
                 f"tree depth {self.tree_depth if self.tree_depth is not None else '-'}"]
        if self.oversized:
            lines.append(
                f"size cap not reachable: block {self.oversized['block']} has "
                f"{self.oversized['size']} junctions and no articulation point"
            )
        return "\n".join(lines)


def tree_depth(tree: BlockCutTree, root: TreeNode) -> int:
    adj = tree.neighbours()
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return max(dist.values())


def partition_stats(net: Network, result: PartitionSet | OversizedBlock, verbose: bool = False) -> StatsReport:
    oversized = None
    if isinstance(result, OversizedBlock):
        oversized = {"block": result.block.id, "size": result.size}
        p = result.partition
    else:
        p = result
    tree = build_block_cut_tree(net, p)
    try:
        depth = tree_depth(tree, find_root(tree, net, p))
    except SlacksSpanBlocks:
        depth = None
    biggest = p.max_block_size
    report = StatsReport(
        network=net.name or "network",
        junctions=net.n_junctions,
        edges=net.n_edges,
        blocks=len(p.blocks),
        two_node_blocks=sum(1 for b in p.blocks if b.size == 2),
        max_block_size=biggest,
        max_block_pct=100.0 * biggest / net.n_junctions if net.n_junctions else 0.0,
        cuts=len(p.cuts),
        tree_depth=depth,
        oversized=oversized,
        block_list=[
            {"id": b.id, "junctions": b.size, "edges": len(b.edges)} for b in sorted(p.blocks, key=lambda b: b.id)
        ],
        cut_list=sorted(p.cuts),
        tree_edges=sorted([b.id, c.id] for b, c in tree.edges),
    )
    if verbose and depth is not None:
        flows = solve_tree_flows(agglomerate_injections(tree, net, p))
        report.tree_flows = {f"{b}->{c}": (None if v != v else v) for (b, c), v in sorted(flows.items())}
    return report
