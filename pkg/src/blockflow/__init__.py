"""Hierarchical solution of potential-driven steady network flow over block-cut trees."""

from .block_solver import (
    BlockProblem,
    SolverOptions,
    assemble_jacobian,
    solve_block_newton,
    solve_two_node_block,
)
from .errors import (
    BlockflowError,
    DimensionMismatch,
    DisconnectedNetwork,
    DocumentError,
    InconsistentBlock,
    InvalidNetwork,
    NonConvergence,
    PartitionError,
    SingularJacobian,
    SlacksSpanBlocks,
)
from .hierarchical import LevelSchedule, SolveReport, level_schedule, solve_hierarchical, solve_monolithic
from .network import (
    Edge,
    Junction,
    Network,
    Solution,
    ValidationReport,
    VerificationReport,
    edge_residual,
    node_residual,
    validate_network,
    verify_solution,
)
from .partition import (
    AugmentedNetwork,
    Block,
    BlockCutTree,
    OversizedBlock,
    PartitionSet,
    TreeNode,
    build_augmented_network,
    build_block_cut_tree,
    compute_blocks,
    find_articulation_points,
    partition_with_max_size,
    refine_partition,
    trivial_partition,
)
from .treeflow import TreeFlowProblem, agglomerate_injections, solve_tree_flows

__version__ = "0.1.0"
