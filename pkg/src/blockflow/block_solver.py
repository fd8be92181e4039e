"""Per-block solves: closed form for two-node blocks, Newton-Raphson otherwise."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import InconsistentBlock, InvalidNetwork, NonConvergence, SingularJacobian
from .network import Edge, Network, Solution, verify_solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8  # on the scaled residual inf-norm
    max_iter: int = 50
    deriv_floor: float = 1e-8
    flat_flow_init: float = 0.0
    multi_start_seeds: int = 1
    damping: float = 1.0  # 1.0 = full Newton steps
    scaled: bool = True
    workers: int = 1  # >1 solves the blocks of one level in a thread pool

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.deriv_floor > 0:
            raise ValueError("deriv_floor must be positive")
        if self.multi_start_seeds < 1:
            raise ValueError("multi_start_seeds must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class BlockProblem:
    network: Network
    options: SolverOptions = field(default_factory=SolverOptions)


class NewtonSystem:
    """Scaled residual and Jacobian of the steady-flow system on one network.

    Unknowns are ``x = [potentials / P, flows / Q]`` where ``P`` is the largest
    slack potential magnitude and ``Q = max(1, largest |injection|)``. Rows are
    ordered edges, non-slack balances, slack pins.
    """

    def __init__(self, net: Network, scaled: bool = True):
        self.net = net
        n, m = net.n_junctions, net.n_edges
        self.n, self.m = n, m
        slack_pot = [j.potential for j in net.junctions if j.slack]
        inj = [j.injection for j in net.junctions if not j.slack]
        if scaled:
            big = max((abs(v) for v in slack_pot), default=0.0)
            self.pscale = big if big > 0 else 1.0
            self.qscale = max([1.0] + [abs(v) for v in inj])
        else:
            self.pscale = self.qscale = 1.0
        self.largest_slack = max(slack_pot, key=abs) if slack_pot else 0.0
        self.balance_rows = np.array([i for i, j in enumerate(net.junctions) if not j.slack], dtype=np.int64)
        self.slack_rows = np.array([i for i, j in enumerate(net.junctions) if j.slack], dtype=np.int64)
        self.q_scaled = np.array(inj, dtype=float) / self.qscale
        self.pi_scaled = np.array(slack_pot, dtype=float) / self.pscale
        self.src, self.dst = net.src_idx, net.dst_idx
        self.gamma, self.kind, self.coef = net.gain, net.kind_code, net.coef

        # static sparsity pattern; edge-row flow entries are refreshed per iterate
        eidx = np.arange(m)
        rows = [eidx, eidx, eidx]
        cols = [self.src, self.dst, n + eidx]
        vals = [self.gamma, -np.ones(m), np.zeros(m)]
        brow = np.full(n, -1, dtype=np.int64)
        brow[self.balance_rows] = m + np.arange(len(self.balance_rows))
        into = brow[self.dst] >= 0
        outof = brow[self.src] >= 0
        rows += [brow[self.dst][into], brow[self.src][outof]]
        cols += [n + eidx[into], n + eidx[outof]]
        vals += [np.ones(into.sum()), -np.ones(outof.sum())]
        srow = m + len(self.balance_rows) + np.arange(len(self.slack_rows))
        rows.append(srow)
        cols.append(self.slack_rows)
        vals.append(np.ones(len(self.slack_rows)))
        self._rows = np.concatenate(rows).astype(np.int64)
        self._cols = np.concatenate(cols).astype(np.int64)
        self._vals = np.concatenate(vals).astype(float)
        self._flow_slot = slice(2 * m, 3 * m)
        self.size = n + m

    def residual(self, x: np.ndarray) -> np.ndarray:
        return kernels.residual(
            x, self.n, self.src, self.dst, self.gamma, self.kind, self.coef,
            self.balance_rows, self.q_scaled, self.slack_rows, self.pi_scaled,
            self.pscale, self.qscale,
        )

    def jacobian(self, x: np.ndarray, deriv_floor: float) -> sp.csc_matrix:
        vals = self._vals.copy()
        vals[self._flow_slot] = kernels.jac_flow_entries(
            x, self.n, self.kind, self.coef, self.pscale, self.qscale, deriv_floor
        )
        return sp.csc_matrix((vals, (self._rows, self._cols)), shape=(self.size, self.size))

    def flat_start(self, flat_flow_init: float = 0.0) -> np.ndarray:
        x = np.empty(self.size)
        x[: self.n] = self.largest_slack / self.pscale
        x[self.slack_rows] = self.pi_scaled
        x[self.n :] = flat_flow_init / self.qscale
        return x

    def pack(self, potentials: dict, flows: dict) -> np.ndarray:
        pot = [potentials[j.id] / self.pscale for j in self.net.junctions]
        fl = [flows[e.id] / self.qscale for e in self.net.edges]
        return np.array(pot + fl, dtype=float)

    def unpack(self, x: np.ndarray) -> tuple[dict[str, float], dict[str, float]]:
        pot = {j.id: float(x[i] * self.pscale) for i, j in enumerate(self.net.junctions)}
        fl = {e.id: float(x[self.n + k] * self.qscale) for k, e in enumerate(self.net.edges)}
        return pot, fl

    @property
    def unscaled_tol_factor(self) -> float:
        """Scaled tolerance times this factor bounds the unscaled residual."""
        return max(self.pscale, self.qscale)


def assemble_jacobian(prob: BlockProblem, state: Solution) -> sp.csr_matrix:
    system = NewtonSystem(prob.network, prob.options.scaled)
    x = system.pack(state.potentials, state.flows)
    return system.jacobian(x, prob.options.deriv_floor).tocsr()


def _newton(system: NewtonSystem, x: np.ndarray, opts: SolverOptions):
    trace = []
    for it in range(opts.max_iter + 1):
        r = system.residual(x)
        norm = float(np.max(np.abs(r), initial=0.0))
        trace.append(norm)
        if not math.isfinite(norm):
            raise NonConvergence("residual became non-finite", trace, norm)
        if norm < opts.tol:
            return x, it, trace
        if it == opts.max_iter:
            break
        J = system.jacobian(x, opts.deriv_floor)
        try:
            dx = spla.splu(J).solve(-r)
        except RuntimeError as exc:
            raise SingularJacobian(f"Newton linear solve failed at iteration {it}: {exc}") from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian(f"Newton step is not finite at iteration {it}")
        x = x + opts.damping * dx
    raise NonConvergence(
        f"no convergence in {opts.max_iter} iterations (residual {trace[-1]:.3e})", trace, trace[-1]
    )


def solve_block_newton(prob: BlockProblem, initial: Solution | None = None) -> Solution:
    """Newton-Raphson on the whole of ``prob.network``.

    Starts from ``initial`` if given, else from the flat start. With
    ``multi_start_seeds > 1`` failed attempts are retried from seeded random
    starts.
    """
    net, opts = prob.network, prob.options
    if not net.slack_ids:
        raise InvalidNetwork("block has no slack junction")
    system = NewtonSystem(net, opts.scaled)
    starts = [system.pack(initial.potentials, initial.flows) if initial else system.flat_start(opts.flat_flow_init)]
    for seed in range(1, opts.multi_start_seeds):
        rng = np.random.default_rng(seed)
        x = np.concatenate((1.0 + 0.5 * rng.standard_normal(system.n), rng.standard_normal(system.m)))
        x[system.slack_rows] = system.pi_scaled
        starts.append(x)
    failure = None
    for k, x0 in enumerate(starts):
        try:
            x, iters, _ = _newton(system, x0, opts)
        except (NonConvergence, SingularJacobian) as exc:
            logger.debug("start %d failed: %s", k, exc)
            failure = exc
            continue
        pot, fl = system.unpack(x)
        sol = Solution(pot, fl, iterations_total=iters)
        sol.residual_inf_norm = verify_solution(net, sol).inf_norm
        return sol
    raise failure


def _invert_drop(e: Edge, drop: float) -> float:
    if e.kind == "pipe":
        return math.copysign(math.sqrt(abs(drop) / e.alpha), drop)
    if e.kind == "linear":
        return drop / e.r
    raise InconsistentBlock(f"edge {e.id!r} ({e.kind}) cannot fix a flow between two pinned potentials")


def solve_two_node_block(prob: BlockProblem) -> Solution:
    """Direct substitution on a single edge between two junctions."""
    net = prob.network
    if net.n_junctions != 2 or net.n_edges != 1:
        raise InvalidNetwork("closed form needs exactly two junctions and one edge")
    e = net.edges[0]
    a, b = net.junction_by_id[e.src], net.junction_by_id[e.dst]
    if a.slack and b.slack:
        f = _invert_drop(e, e.gain * a.potential - b.potential)
        pa, pb = a.potential, b.potential
    elif a.slack:
        f = b.injection
        pa = a.potential
        pb = e.gain * pa - e.g(f)
    elif b.slack:
        f = -a.injection
        pb = b.potential
        pa = (pb + e.g(f)) / e.gain
    else:
        raise InvalidNetwork("two-node block has no slack junction")
    sol = Solution({a.id: float(pa), b.id: float(pb)}, {e.id: float(f)}, iterations_total=0)
    sol.residual_inf_norm = verify_solution(net, sol).inf_norm
    return sol


def solve_block(prob: BlockProblem) -> tuple[Solution, str]:
    """Dispatch to the closed form when possible; returns ``(solution, method)``."""
    net = prob.network
    if net.n_junctions == 2 and net.n_edges == 1:
        return solve_two_node_block(prob), "closed-form"
    if net.n_edges == 0 and net.n_junctions == 1:
        j = net.junctions[0]
        if not j.slack:
            raise InvalidNetwork("single-junction block has no slack")
        return Solution({j.id: j.potential}, {}, 0.0, 0), "closed-form"
    return solve_block_newton(prob), "newton"
