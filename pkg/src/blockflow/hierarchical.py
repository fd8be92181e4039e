"""Level-by-level solve over a generalized block-cut tree, plus the
monolithic whole-network baseline."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .block_solver import BlockProblem, SolverOptions, solve_block, solve_block_newton
from .errors import InvalidNetwork, NonConvergence, SingularJacobian
from .network import Junction, Network, Solution, require_valid, verify_solution
from .partition import (
    AugmentedNetwork,
    BlockCutTree,
    PartitionSet,
    TreeNode,
    build_augmented_network,
    build_block_cut_tree,
    compute_blocks,
    trivial_partition,
)
from .treeflow import agglomerate_injections, find_root, solve_tree_flows


@dataclass(frozen=True)
class LevelSchedule:
    levels: tuple[tuple[str, ...], ...]
    cut_waves: tuple[tuple[str, ...], ...]
    root: TreeNode


def level_schedule(tree: BlockCutTree, net: Network, p: PartitionSet | None = None) -> LevelSchedule:
    """Breadth-first waves of blocks outward from the slack junctions.

    Level one holds every block containing a slack junction; level ``m+1``
    holds the unscheduled blocks touching a cut of level ``m``.
    """
    p = p or tree.partition
    root = find_root(tree, net, p)
    slacks = set(net.slack_ids)
    blocks_of_cut: dict[str, list[str]] = {}
    cuts_of_block: dict[str, list[str]] = {}
    for b, c in tree.edges:
        blocks_of_cut.setdefault(c.id, []).append(b.id)
        cuts_of_block.setdefault(b.id, []).append(c.id)
    order = {b.id: k for k, b in enumerate(p.blocks)}
    first = [b.id for b in p.blocks if b.vertices & slacks]
    levels: list[tuple[str, ...]] = []
    waves: list[tuple[str, ...]] = []
    done = set(first)
    current = first
    while current:
        levels.append(tuple(current))
        wave = sorted({c for bid in current for c in cuts_of_block.get(bid, ())}, key=lambda c: net.index[c])
        waves.append(tuple(wave))
        nxt = {bid for c in wave for bid in blocks_of_cut[c] if bid not in done}
        current = sorted(nxt, key=order.__getitem__)
        done |= nxt
    if len(done) != len(p.blocks):  # pragma: no cover - tree is connected
        raise InvalidNetwork("level schedule did not reach every block")
    return LevelSchedule(tuple(levels), tuple(waves), root)


@dataclass
class SolveReport:
    method: str
    levels: list[list[str]] = field(default_factory=list)
    blocks: dict[str, dict] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    global_residual: float = float("nan")
    iterations_total: int = 0

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "levels": self.levels,
            "blocks": {k: self.blocks[k] for k in sorted(self.blocks)},
            "timings": self.timings,
            "global_residual": self.global_residual,
            "iterations_total": self.iterations_total,
        }


def block_network(
    net: Network,
    aug: AugmentedNetwork,
    p: PartitionSet,
    block_id: str,
    cut_potential: dict[str, float],
    tree_flows: dict[tuple[str, str], float],
) -> Network:
    """The block's piece of the augmented network with boundary data folded in.

    The replica of a cut whose potential is known becomes a slack junction;
    any other replica becomes a junction whose demand is the tree flow from
    this block into the cut.
    """
    block = p.block(block_id)
    junctions = []
    for v in sorted(block.vertices, key=lambda v: net.index[v]):
        if v not in p.cuts:
            junctions.append(net.junction_by_id[v])
            continue
        rid = aug.replica_of(v, block_id)
        if v in cut_potential:
            junctions.append(Junction(rid, slack=True, potential=cut_potential[v]))
        else:
            junctions.append(Junction(rid, injection=tree_flows[(block_id, v)]))
    edges = [aug.network.edge_by_id[eid] for eid in sorted(block.edges, key=net.edge_index.__getitem__)]
    return Network(tuple(junctions), tuple(edges), name=block_id)


def solve_hierarchical(
    net: Network,
    p: PartitionSet | None = None,
    opts: SolverOptions | None = None,
    report: SolveReport | None = None,
) -> Solution:
    """Solve the whole network one generalized block at a time.

    ``p`` defaults to the full block decomposition. Blocks of one level are
    independent; ``opts.workers > 1`` runs them in a thread pool and the
    result does not depend on the order they finish in.
    """
    opts = opts or SolverOptions()
    report = report if report is not None else SolveReport("hierarchical")
    clock = time.perf_counter()
    require_valid(net)
    if p is None:
        p = compute_blocks(net) if net.n_junctions >= 3 else trivial_partition(net)
    tree = build_block_cut_tree(net, p)
    aug = build_augmented_network(net, p)
    report.timings["partition"] = time.perf_counter() - clock

    clock = time.perf_counter()
    prob = agglomerate_injections(tree, net, p)
    tflows = solve_tree_flows(prob)
    sched = level_schedule(tree, net, p)
    report.timings["tree_flow"] = time.perf_counter() - clock

    clock = time.perf_counter()
    cut_potential = {c: net.junction_by_id[c].potential for c in p.cuts if net.junction_by_id[c].slack}
    potentials: dict[str, float] = {}
    flows: dict[str, float] = {}
    iterations = 0
    for level_no, level in enumerate(sched.levels, start=1):
        report.levels.append(list(level))
        subnets = {bid: block_network(net, aug, p, bid, cut_potential, tflows) for bid in level}

        def run(bid):
            try:
                return solve_block(BlockProblem(subnets[bid], opts))
            except (NonConvergence, SingularJacobian) as exc:
                if isinstance(exc, NonConvergence):
                    exc.block_id, exc.level = bid, level_no
                raise

        if opts.workers > 1 and len(level) > 1:
            with ThreadPoolExecutor(max_workers=opts.workers) as pool:
                results = dict(zip(level, pool.map(run, level)))
        else:
            results = {bid: run(bid) for bid in level}

        for bid in level:
            sol, method = results[bid]
            block = p.block(bid)
            iterations += sol.iterations_total
            report.blocks[bid] = {
                "level": level_no,
                "junctions": block.size,
                "edges": len(block.edges),
                "method": method,
                "iterations": sol.iterations_total,
                "residual": sol.residual_inf_norm,
            }
            for v in block.vertices:
                value = sol.potentials[aug.replica_of(v, bid) if v in p.cuts else v]
                if v in p.cuts:
                    cut_potential.setdefault(v, value)
                potentials.setdefault(v, value)
            for eid in block.edges:
                flows[eid] = sol.flows[eid]
    report.timings["solve"] = time.perf_counter() - clock

    clock = time.perf_counter()
    result = Solution(
        {j.id: potentials[j.id] for j in net.junctions},
        {e.id: flows[e.id] for e in net.edges},
        iterations_total=iterations,
    )
    result.residual_inf_norm = verify_solution(net, result, opts.tol).inf_norm
    report.timings["verify"] = time.perf_counter() - clock
    report.global_residual = result.residual_inf_norm
    report.iterations_total = iterations
    return result


def solve_monolithic(net: Network, opts: SolverOptions | None = None, report: SolveReport | None = None) -> Solution:
    """Newton-Raphson on the whole network at once."""
    opts = opts or SolverOptions()
    clock = time.perf_counter()
    require_valid(net)
    sol = solve_block_newton(BlockProblem(net, opts))
    if report is not None:
        report.levels = [["whole"]]
        report.blocks["whole"] = {
            "level": 1,
            "junctions": net.n_junctions,
            "edges": net.n_edges,
            "method": "newton",
            "iterations": sol.iterations_total,
            "residual": sol.residual_inf_norm,
        }
        report.timings["solve"] = time.perf_counter() - clock
        report.global_residual = sol.residual_inf_norm
        report.iterations_total = sol.iterations_total
    return sol


def project_augmented(net: Network, aug: AugmentedNetwork, sol: Solution) -> Solution:
    """Restrict a solution of the augmented network to the original junctions and edges."""
    out = Solution(
        {j.id: sol.potentials[j.id] for j in net.junctions},
        {e.id: sol.flows[e.id] for e in net.edges},
        iterations_total=sol.iterations_total,
    )
    out.residual_inf_norm = verify_solution(net, out).inf_norm
    return out
