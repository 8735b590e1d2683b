"""Branch-and-cut for the VRPSD under classical recourse.

One LP holds the degree equations, every cut found so far, and the variable
bounds of the node being processed.  Nodes are explored best bound first.
Integer LP points are checked exactly (capacity, then recourse); fractional
points get heuristic capacity cuts and partial-route recourse cuts before
branching on an edge.
"""
from __future__ import annotations

import heapq
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cuts import ILSCut
from .instance import (
    Instance,
    RoutingPlan,
    edges,
    plan_is_feasible,
    preprocess_demands,
    rci_rhs,
    routing_plan_from_edges,
)
from .lp import INFEASIBLE, OPTIMAL, LpModel, dump_lp
from .recourse import Disaggregation, disaggregate, q_value
from .separation import (
    ACCEPT_TOL,
    VIOLATION_TOL,
    PathStats,
    separate_rci,
    separate_vrpsd,
    set_cut,
    verify_incumbent,
)

log = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
PRUNE_TOL = 1e-9
ACTIVATIONS = ("whs", "wof")


@dataclass
class Config:
    mode: Disaggregation | str = Disaggregation.D2
    use_set_cuts: bool = False
    activation: str = "whs"
    time_limit: float = 600.0
    node_limit: int | None = None
    root_rounds: int = 200
    node_rounds: int = 30
    fractional_separation: bool = True
    all_trees: bool = False
    gap_tol: float = 1e-6
    purge_threshold: int = 400
    lp_dump: str | None = None

    def __post_init__(self):
        self.mode = Disaggregation(self.mode)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if self.use_set_cuts and self.mode is not Disaggregation.D2:
            raise ValueError("set cuts require the per-customer disaggregation (d2)")

    @property
    def label(self) -> str:
        return self.mode.value + ("+set" if self.use_set_cuts else "")


@dataclass
class SolveResult:
    status: str  # optimal | infeasible | limit
    objective: Fraction | None
    bound: float
    gap: float
    plan: RoutingPlan | None
    theta: dict[int, Fraction] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "objective": None if self.objective is None else str(self.objective),
            "objective_float": None if self.objective is None else float(self.objective),
            "bound": self.bound,
            "gap": self.gap,
            "routes": None if self.plan is None else [list(r.customers) for r in self.plan.routes],
            "theta": {str(v): str(t) for v, t in sorted(self.theta.items())},
            "stats": self.stats,
        }


def select_branch_edge(x_bar: Sequence[float], costs: Sequence[float] | None = None) -> int:
    """Edge whose fractional part is closest to 1/2; ties go to the costlier edge, then the lower id."""
    best, best_key = None, None
    for e, val in enumerate(x_bar):
        frac = float(val) - math.floor(float(val))
        if frac <= INTEGRALITY_TOL or frac >= 1 - INTEGRALITY_TOL:
            continue
        key = (round(abs(frac - 0.5), 9), -(float(costs[e]) if costs is not None else 0.0), e)
        if best_key is None or key < best_key:
            best, best_key = e, key
    if best is None:
        raise ValueError("no fractional edge to branch on")
    return best


def is_integral(x_bar: Sequence[float]) -> bool:
    return bool(np.all(np.abs(np.asarray(x_bar) - np.round(x_bar)) <= INTEGRALITY_TOL))


@dataclass(order=True)
class _Node:
    bound: float
    ident: int
    depth: int = field(compare=False)
    overrides: dict[int, tuple[float, float]] = field(compare=False, default_factory=dict)


class _Master:
    """LP bookkeeping: variables, cut rows, pool of purged rows, node bounds."""

    def __init__(self, inst: Instance, config: Config):
        self.inst = inst
        self.config = config
        n = inst.n
        self.n_edges = len(edges(n))
        self.edge_cost = inst.edge_costs_float
        cost = np.concatenate([self.edge_cost, np.ones(n)])
        lo = np.zeros(self.n_edges + n)
        hi = np.concatenate([np.empty(self.n_edges), np.full(n, np.inf)])
        expected = [inst.expected_demand(v) for v in range(n + 1)] if n else []
        for e, (i, j) in enumerate(edges(n)):
            if i == 0:
                hi[e] = 2.0
            else:
                hi[e] = 0.0 if expected[i] + expected[j] > inst.capacity else 1.0
        self.root_lo, self.root_hi = lo.copy(), hi.copy()
        self.lp = LpModel(cost, lo, hi)
        degree = []
        for v in range(n + 1):
            coeffs = {e: 1.0 for e, (i, j) in enumerate(edges(n)) if v in (i, j)}
            degree.append((coeffs, "=", 2.0 * (inst.fleet if v == 0 else 1)))
        self.lp.add_rows(degree)
        self.n_fixed_rows = n + 1
        self.row_keys: list[tuple | None] = [None] * (n + 1)
        self.active_keys: set[tuple] = set()
        self.pool: dict[tuple, tuple] = {}
        self.applied: dict[int, tuple[float, float]] = {}
        self.cuts_by_tag: Counter = Counter()

    def theta_index(self, v: int) -> int:
        return self.n_edges + v - 1

    def _add(self, key: tuple, row: tuple, tag: str) -> bool:
        if key in self.active_keys:
            return False
        self.lp.add_rows([row])
        self.row_keys.append(key)
        self.active_keys.add(key)
        if key not in self.pool:
            self.cuts_by_tag[tag] += 1
        self.pool[key] = (row, tag)
        return True

    def add_rci(self, customers: frozenset[int]) -> bool:
        s = customers
        coeffs = {e: 1.0 for e, (i, j) in enumerate(edges(self.inst.n)) if i in s and j in s}
        rhs = float(len(s) - rci_rhs(s, self.inst))
        return self._add(("rci", tuple(sorted(s))), (coeffs, "<=", rhs), "rci")

    def add_cut(self, cut: ILSCut) -> bool:
        x_coef, t_coef, rhs = cut.row(self.inst.n)
        coeffs = dict(x_coef)
        for v, c in t_coef.items():
            coeffs[self.theta_index(v)] = c
        return self._add(cut.key(), (coeffs, ">=", rhs), cut.tag)

    def readd_violated(self, point: np.ndarray) -> int:
        """Bring back purged rows that the current point violates."""
        added = 0
        for key, (row, tag) in self.pool.items():
            if key in self.active_keys:
                continue
            coeffs, sense, rhs = row
            act = sum(c * point[j] for j, c in coeffs.items())
            if (sense == "<=" and act > rhs + VIOLATION_TOL) or (sense == ">=" and act < rhs - VIOLATION_TOL):
                self._add(key, row, tag)
                added += 1
        return added

    def purge(self, point: np.ndarray) -> int:
        if self.lp.n_rows <= self.config.purge_threshold:
            return 0
        act = self.lp.row_activity(point[: self.lp.n_vars])
        slack = np.abs(self.lp.b - act)
        old_rows = self.lp.n_rows
        drop = [i for i in range(self.n_fixed_rows, old_rows) if slack[i] > 1e-4]
        kept = self.lp.remove_rows(drop)
        removed = set(range(old_rows)) - set(kept)
        for i in removed:
            self.active_keys.discard(self.row_keys[i])
        self.row_keys = [self.row_keys[i] for i in kept]
        return len(removed)

    def apply_bounds(self, overrides: dict[int, tuple[float, float]]) -> None:
        for j in set(self.applied) - set(overrides):
            self.lp.set_bounds(j, self.root_lo[j], self.root_hi[j])
        for j, (lo, hi) in overrides.items():
            if self.applied.get(j) != (lo, hi):
                self.lp.set_bounds(j, lo, hi)
        self.applied = dict(overrides)


def _plan_value(plan: RoutingPlan, inst: Instance) -> Fraction:
    return inst.plan_cost(plan) + sum((q_value(r, inst) for r in plan.routes), Fraction(0)) + inst.objective_offset


def solve(inst: Instance, config: Config | None = None) -> SolveResult:
    """Solve to proven optimality or until a limit is hit."""
    config = config or Config()
    start = time.perf_counter()
    inst = preprocess_demands(inst)
    n = inst.n
    offset = float(inst.objective_offset)
    stats = {
        "nodes": 0,
        "lp_solves": 0,
        "lp_iterations": 0,
        "separation_rounds": 0,
        "fractional_points": 0,
        "path_points": 0,
        "path_trees_checked": 0,
        "path_violations": 0,
        "max_depth": 0,
        "exact_lp_fallbacks": 0,
    }
    path_stats = PathStats()
    if inst.fleet > n:
        return _finish("infeasible", None, math.inf, inst, config, stats, Counter(), path_stats, start)

    master = _Master(inst, config)
    incumbent: tuple[Fraction, RoutingPlan] | None = None
    heap: list[_Node] = [_Node(-math.inf, 0, 0, {})]
    next_id = 1
    limit_hit = False

    def cutoff(bound: float) -> bool:
        if incumbent is None:
            return False
        inc = float(incumbent[0])
        return bound + offset >= inc - PRUNE_TOL * max(1.0, abs(inc))

    while heap:
        if time.perf_counter() - start > config.time_limit or (
            config.node_limit is not None and stats["nodes"] >= config.node_limit
        ):
            limit_hit = True
            break
        node = heapq.heappop(heap)
        if cutoff(node.bound):
            continue
        stats["nodes"] += 1
        stats["max_depth"] = max(stats["max_depth"], node.depth)
        master.apply_bounds(node.overrides)
        rounds = 0
        max_rounds = config.root_rounds if node.depth == 0 else config.node_rounds
        history: list[float] = []
        added_here = 0
        branch_point = None
        while True:
            if time.perf_counter() - start > config.time_limit:
                limit_hit = True
                heapq.heappush(heap, node)
                break
            res = master.lp.solve()
            stats["lp_solves"] += 1
            if res.status == INFEASIBLE:
                break
            if res.status != OPTIMAL:
                raise RuntimeError(f"node LP ended with status {res.status}")
            node.bound = max(node.bound, res.objective)
            if cutoff(res.objective):
                break
            point = res.x
            x_bar, theta_bar = point[: master.n_edges], point[master.n_edges :]
            if master.readd_violated(point):
                continue
            if is_integral(x_bar):
                x_int = np.round(x_bar).astype(int)
                rcis = separate_rci(x_int, inst, at_integer=True)
                if rcis:
                    for s in rcis:
                        added_here += master.add_rci(s)
                        if config.use_set_cuts:
                            c = set_cut(s, inst)
                            if not c.trivial and c.violation(x_int, theta_bar) > VIOLATION_TOL:
                                added_here += master.add_cut(c)
                    continue
                plan = routing_plan_from_edges(x_int, n)
                value = _plan_value(plan, inst)
                if incumbent is None or value < incumbent[0]:
                    assert plan_is_feasible(plan, inst)
                    incumbent = (value, plan)
                    log.info("incumbent %.6f at node %d", float(value), node.ident)
                cuts = verify_incumbent(x_int, theta_bar, config.mode, inst, config.activation)
                new = sum(master.add_cut(c) for c in cuts)
                added_here += new
                if cuts and new:
                    continue
                break
            stats["fractional_points"] += 1
            rounds += 1
            history.append(res.objective)
            stalled = len(history) > 8 and history[-1] - history[-9] <= 1e-6 * max(1.0, abs(history[-1]))
            if config.fractional_separation and rounds <= max_rounds and not stalled:
                stats["separation_rounds"] += 1
                sep = separate_vrpsd(
                    x_bar,
                    theta_bar,
                    config.mode,
                    inst,
                    use_set_cuts=config.use_set_cuts,
                    activation=config.activation,
                    all_trees=config.all_trees,
                    stats=path_stats,
                )
                new = sum(master.add_rci(s) for s in sep.rcis) + sum(master.add_cut(c) for c in sep.cuts)
                added_here += new
                if new:
                    continue
            branch_point = x_bar
            break
        if limit_hit:
            break
        log.debug("node %d depth %d bound %.6f cuts %d", node.ident, node.depth, node.bound + offset, added_here)
        if branch_point is not None:
            e = select_branch_edge(branch_point, master.edge_cost)
            val = float(branch_point[e])
            lo, hi = master.lp.bounds(e)
            for new_lo, new_hi in ((lo, float(math.floor(val))), (float(math.ceil(val)), hi)):
                child = dict(node.overrides)
                child[e] = (new_lo, new_hi)
                heapq.heappush(heap, _Node(node.bound, next_id, node.depth + 1, child))
                next_id += 1
            master.purge(res.x)

    if config.lp_dump:
        names = [f"x_{i}_{j}" for i, j in edges(n)] + [f"theta_{v}" for v in inst.customers]
        with open(config.lp_dump, "w") as fh:
            fh.write(dump_lp(master.lp, names) + "\n")
    stats["lp_iterations"] = master.lp.total_iterations
    stats["exact_lp_fallbacks"] = master.lp.exact_fallbacks
    open_bound = min((nd.bound for nd in heap), default=math.inf)
    if limit_hit:
        status = "limit"
    elif incumbent is None:
        status = "infeasible"
    else:
        status = "optimal"
    bound = open_bound + offset if heap else (float(incumbent[0]) if incumbent else math.inf)
    if incumbent is not None:
        bound = min(bound, float(incumbent[0]))
    return _finish(status, incumbent, bound, inst, config, stats, master.cuts_by_tag, path_stats, start)


def _finish(status, incumbent, bound, inst, config, stats, cuts_by_tag, path_stats, start) -> SolveResult:
    stats["cuts_by_tag"] = dict(sorted(cuts_by_tag.items()))
    stats["path_points"] = path_stats.points
    stats["path_trees_checked"] = path_stats.trees_checked
    stats["path_violations"] = path_stats.violations
    stats["seconds"] = time.perf_counter() - start
    if incumbent is None:
        return SolveResult(status, None, bound, math.inf, None, {}, stats)
    value, plan = incumbent
    theta: dict[int, Fraction] = {}
    for r in plan.routes:
        theta.update(disaggregate(r, config.mode, inst))
    assert sum(theta.values(), Fraction(0)) >= sum((q_value(r, inst) for r in plan.routes), Fraction(0)) - Fraction(
        ACCEPT_TOL
    )
    obj = float(value)
    gap = max(0.0, (obj - bound) / max(1e-9, abs(obj)))
    if status == "optimal":
        gap = 0.0 if gap <= config.gap_tol else gap
        bound = obj if gap == 0.0 else bound
    return SolveResult(status, value, bound, gap, plan, theta, stats)
