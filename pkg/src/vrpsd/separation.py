"""Cut separation for the branch-and-cut master.

The support graph of a fractional point is augmented with one dummy leaf per
customer whose depot edge carries at least one unit; the block-cut forest of
that graph yields the partial routes used for recourse cuts.  Capacity
inequalities are separated exactly at integer points and by minimum cuts plus
greedy growth at fractional points.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .cuts import (
    ILSCut,
    PartialRoute,
    activation_set,
    activation_whs,
    activation_wof_exact,
    make_cut,
    route_cut,
)
from .instance import (
    Instance,
    InfeasiblePointError,
    SubtourError,
    edges,
    rci_rhs,
    routing_plan_from_edges,
)
from .recourse import Disaggregation, partial_route_lb, q_classical, set_lb

SUPPORT_TOL = 1e-6
VIOLATION_TOL = 1e-7
ACCEPT_TOL = 1e-9


class PathPropertyError(AssertionError):
    """A tree of the block-cut forest with depot flow 2 is not a path."""


# ---------------------------------------------------------------------------
# biconnectivity


def biconnected_blocks(adj: dict[int, list[int]]) -> tuple[list[frozenset[int]], frozenset[int]]:
    """Blocks and articulation points of a simple undirected graph (iterative Hopcroft-Tarjan).

    Isolated vertices form blocks of their own.
    """
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    blocks: list[frozenset[int]] = []
    cuts: set[int] = set()
    counter = 0
    for root in sorted(adj):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        if not adj[root]:
            blocks.append(frozenset([root]))
            continue
        root_children = 0
        edge_stack: list[tuple[int, int]] = []
        stack = [(root, None, iter(sorted(adj[root])))]
        while stack:
            v, parent, it = stack[-1]
            descended = False
            for w in it:
                if w == parent:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((v, w))
                    stack.append((w, v, iter(sorted(adj[w]))))
                    descended = True
                    break
                if index[w] < index[v]:
                    low[v] = min(low[v], index[w])
                    edge_stack.append((v, w))
            if descended:
                continue
            stack.pop()
            if not stack:
                break
            u = stack[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= index[u]:
                comp: set[int] = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (u, v):
                        break
                blocks.append(frozenset(comp))
                if u == root:
                    root_children += 1
                else:
                    cuts.add(u)
        if root_children > 1:
            cuts.add(root)
    return blocks, frozenset(cuts)


# ---------------------------------------------------------------------------
# block-cut forest


@dataclass(frozen=True)
class ForestNode:
    kind: str  # "block" or "cut"
    vertices: frozenset[int]  # graph vertices; dummies are negative
    customers: frozenset[int]  # what the node contributes to a partial route

    def order_key(self) -> tuple:
        real = sorted(v for v in self.vertices if v > 0)
        return (real[0] if real else math.inf, tuple(real), any(v < 0 for v in self.vertices))


@dataclass
class BlockCutTree:
    nodes: list[ForestNode]
    adjacency: dict[int, list[int]]
    customers: frozenset[int]
    depot_flow: float

    def is_path(self) -> bool:
        if len(self.nodes) == 1:
            return True
        return all(len(nb) <= 2 for nb in self.adjacency.values())

    def leaves(self) -> list[int]:
        if len(self.nodes) == 1:
            return [0]
        return sorted((i for i, nb in self.adjacency.items() if len(nb) == 1), key=lambda i: self.nodes[i].order_key())

    def path_between(self, a: int, b: int) -> list[int]:
        if a == b:
            return [a]
        prev = {a: None}
        queue = [a]
        for u in queue:
            for w in self.adjacency[u]:
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]


@dataclass
class BlockCutForest:
    trees: list[BlockCutTree] = field(default_factory=list)


def _depot_flows(x_bar: Sequence[float], n: int) -> np.ndarray:
    return np.asarray([float(x_bar[v - 1]) for v in range(1, n + 1)])  # edges (0, v) come first


def support_adjacency(x_bar: Sequence[float], n: int, tol: float = SUPPORT_TOL) -> dict[int, list[int]]:
    """Customer support graph plus one dummy ``-v`` per customer with ``x(0, v) >= 1``."""
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for (i, j), val in zip(edges(n), x_bar):
        val = float(val)
        if i == 0:
            if val >= 1 - tol:
                adj[-j] = [j]
                adj[j].append(-j)
        elif val > tol:
            adj[i].append(j)
            adj[j].append(i)
    return adj


def build_block_cut_forest(x_bar: Sequence[float], n: int) -> BlockCutForest:
    adj = support_adjacency(x_bar, n)
    blocks, cuts = biconnected_blocks(adj)
    depot = _depot_flows(x_bar, n)

    # connected components over customers and dummies
    comp_of: dict[int, int] = {}
    comps: list[set[int]] = []
    for start in sorted(adj):
        if start in comp_of:
            continue
        comp = {start}
        comp_of[start] = len(comps)
        queue = [start]
        for u in queue:
            for w in adj[u]:
                if w not in comp_of:
                    comp_of[w] = len(comps)
                    comp.add(w)
                    queue.append(w)
        comps.append(comp)

    trees = []
    for ci, comp in enumerate(comps):
        comp_blocks = sorted((b for b in blocks if comp_of[next(iter(b))] == ci), key=lambda b: sorted(b))
        comp_cuts = sorted(v for v in cuts if comp_of[v] == ci)
        nodes: list[ForestNode] = []
        for b in comp_blocks:
            nodes.append(ForestNode("block", b, frozenset(v for v in b if v > 0 and v not in cuts)))
        cut_index = {}
        for v in comp_cuts:
            cut_index[v] = len(nodes)
            nodes.append(ForestNode("cut", frozenset([v]), frozenset([v])))
        tree_adj: dict[int, list[int]] = {i: [] for i in range(len(nodes))}
        for bi, b in enumerate(comp_blocks):
            for v in b:
                if v in cut_index:
                    tree_adj[bi].append(cut_index[v])
                    tree_adj[cut_index[v]].append(bi)
        customers = frozenset(v for v in comp if v > 0)
        flow = float(sum(depot[v - 1] for v in customers))
        trees.append(BlockCutTree(nodes, tree_adj, customers, flow))
    trees.sort(key=lambda t: min(t.customers))
    return BlockCutForest(trees)


@dataclass
class PathStats:
    points: int = 0
    trees_checked: int = 0
    violations: int = 0


def get_partial_routes(
    x_bar: Sequence[float],
    n: int,
    *,
    all_trees: bool = False,
    stats: PathStats | None = None,
    strict: bool = True,
) -> list[PartialRoute]:
    """Partial routes read off leaf-to-leaf paths of the block-cut forest.

    Only trees whose customers receive depot flow 2 are used unless
    ``all_trees`` is set.  Those trees must be paths; a violation raises
    :class:`PathPropertyError` when ``strict``.
    """
    forest = build_block_cut_forest(x_bar, n)
    if stats is not None:
        stats.points += 1
    out: list[PartialRoute] = []
    seen: set[tuple] = set()
    for tree in forest.trees:
        flow_two = abs(tree.depot_flow - 2) <= SUPPORT_TOL
        if flow_two:
            if stats is not None:
                stats.trees_checked += 1
            if not tree.is_path():
                if stats is not None:
                    stats.violations += 1
                if strict:
                    raise PathPropertyError(f"tree over {sorted(tree.customers)} is not a path")
        elif not all_trees:
            continue
        leaves = tree.leaves()
        pairs = [(leaves[0], leaves[0])] if len(leaves) == 1 else itertools.combinations(leaves, 2)
        for a, b in pairs:
            sets = [tree.nodes[i].customers for i in tree.path_between(a, b)]
            sets = [s for s in sets if s]
            if not sets:
                continue
            h = PartialRoute(sets)
            key = tuple(tuple(sorted(s)) for s in h)
            if key in seen or key[::-1] in seen:
                continue
            seen.add(key)
            out.append(h)
    return out


# ---------------------------------------------------------------------------
# rounded capacity inequalities


def x_of_set(x_bar: Sequence[float], n: int, customers: Iterable[int]) -> float:
    s = set(customers)
    return float(sum(float(val) for (i, j), val in zip(edges(n), x_bar) if i in s and j in s))


def rci_violation(x_bar: Sequence[float], customers: Iterable[int], inst: Instance) -> float:
    s = sorted(customers)
    return x_of_set(x_bar, inst.n, s) - (len(s) - rci_rhs(s, inst))


class _SetScorer:
    """Fast ``x(S) - (|S| - ceil(d(S)/C))`` with exact integer rounding."""

    def __init__(self, x_bar: Sequence[float], inst: Instance):
        n = inst.n
        self.weight = np.zeros((n + 1, n + 1))
        for (i, j), val in zip(edges(n), x_bar):
            self.weight[i, j] = self.weight[j, i] = float(val)
        dem, cap = inst.scaled_demands
        nums, den = inst.prob_numerators
        # expected demand times den, as exact Python ints
        self.load = [0] + [int(sum(int(a) * int(b) for a, b in zip(nums, dem[:, v]))) for v in range(1, n + 1)]
        self.cap = int(cap) * int(den)

    def violation(self, s: frozenset[int]) -> float:
        idx = sorted(s)
        inside = float(self.weight[np.ix_(idx, idx)].sum()) / 2
        vehicles = -(-sum(self.load[v] for v in idx) // self.cap)
        return inside - (len(idx) - vehicles)


def _support_graph(x_bar: Sequence[float], n: int) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(n + 1))
    for (i, j), val in zip(edges(n), x_bar):
        if float(val) > SUPPORT_TOL:
            g.add_edge(i, j, capacity=float(val))
    return g


def _greedy_sets(weight: np.ndarray, members: Sequence[int]) -> Iterable[frozenset[int]]:
    """Sets grown from every seed by adding the vertex with the largest flow into the set."""
    pool = list(members)
    for seed in pool:
        current = [seed]
        inflow = weight[seed].copy()
        while len(current) < len(pool):
            rest = [v for v in pool if v not in current]
            best = max(rest, key=lambda v: (inflow[v], -v))
            if inflow[best] <= SUPPORT_TOL:
                break
            current.append(best)
            inflow += weight[best]
            yield frozenset(current)


def separate_rci(x_bar: Sequence[float], inst: Instance, at_integer: bool) -> list[frozenset[int]]:
    """Customer sets whose rounded capacity inequality is violated.

    At integer points the check is exact: subtours and overloaded routes.
    At fractional points subtour elimination is separated exactly with
    minimum cuts, and capacity violations are searched among connected
    components and greedily grown sets.
    """
    n = inst.n
    if at_integer:
        try:
            plan = routing_plan_from_edges(x_bar, n)
        except SubtourError as err:
            return sorted(err.components, key=lambda s: sorted(s))
        found = [r.customer_set for r in plan.routes if inst.expected_demand(r.customers) > inst.capacity]
        if len(plan) != inst.fleet:
            raise InfeasiblePointError(f"decoded {len(plan)} routes, expected {inst.fleet}")
        return sorted(found, key=lambda s: sorted(s))

    found: dict[frozenset[int], float] = {}
    scorer = _SetScorer(x_bar, inst)

    def consider(s: frozenset[int]) -> None:
        if s and s not in found:
            viol = scorer.violation(s)
            if viol > VIOLATION_TOL:
                found[s] = viol

    g = _support_graph(x_bar, n)
    components = [frozenset(c) for c in nx.connected_components(g.subgraph(range(1, n + 1)))]
    for comp in components:
        consider(comp)
        for s in _greedy_sets(scorer.weight, sorted(comp)):
            consider(s)

    # exact subtour elimination: a depot-to-customer cut below 2
    covered: set[int] = set()
    for t in range(1, n + 1):
        if t in covered:
            continue
        cut_value, (source_side, _) = nx.minimum_cut(g, t, 0)
        if cut_value < 2 - VIOLATION_TOL:
            s = frozenset(v for v in source_side if v != 0)
            consider(s)
            covered |= s
    return sorted(found, key=lambda s: (-found[s], sorted(s)))


# ---------------------------------------------------------------------------
# recourse cuts


def _activation(h: PartialRoute, n: int, activation: str):
    return activation_whs(h, n) if activation == "whs" else activation_wof_exact(h, n)


def set_cut(customers: Iterable[int], inst: Instance, k_tilde: int | None = None) -> ILSCut:
    s = frozenset(customers)
    k_tilde = rci_rhs(s, inst) if k_tilde is None else k_tilde
    return make_cut(s, set_lb(s, k_tilde, inst), activation_set(s, k_tilde, inst.n), "set")


def partial_route_cut(h: PartialRoute, mode: Disaggregation | str, inst: Instance, activation: str = "whs") -> ILSCut:
    """Exact-adherence cut of a partial route with the lower bound as coefficient."""
    mode = Disaggregation(mode)
    support = [min(h.customers)] if mode is Disaggregation.D1 else h.customers
    return make_cut(support, partial_route_lb(list(h), inst), _activation(h, inst.n, activation), "pr_ea")


@dataclass
class SeparationResult:
    rcis: list[frozenset[int]]
    cuts: list[ILSCut]


def separate_vrpsd(
    x_bar: Sequence[float],
    theta_bar: Sequence[float],
    mode: Disaggregation | str,
    inst: Instance,
    *,
    use_set_cuts: bool = False,
    activation: str = "whs",
    at_integer: bool = False,
    all_trees: bool = False,
    stats: PathStats | None = None,
) -> SeparationResult:
    """RCIs first; only when none is violated, recourse cuts from partial routes."""
    mode = Disaggregation(mode)
    if use_set_cuts and mode is not Disaggregation.D2:
        raise ValueError("set cuts are only valid with the per-customer disaggregation")
    rcis = separate_rci(x_bar, inst, at_integer)
    cuts: list[ILSCut] = []
    if use_set_cuts:
        for s in rcis:
            c = set_cut(s, inst)
            if not c.trivial and c.violation(x_bar, theta_bar) > VIOLATION_TOL:
                cuts.append(c)
    if rcis:
        return SeparationResult(rcis, cuts)
    for h in get_partial_routes(x_bar, inst.n, all_trees=all_trees, stats=stats):
        if use_set_cuts:
            c = set_cut(h.customers, inst)
            if not c.trivial and c.violation(x_bar, theta_bar) > VIOLATION_TOL:
                cuts.append(c)
                continue
        c = partial_route_cut(h, mode, inst, activation)
        if not c.trivial and c.violation(x_bar, theta_bar) > VIOLATION_TOL:
            cuts.append(c)
    return SeparationResult([], cuts)


def verify_incumbent(
    x_bar: Sequence[float],
    theta_bar: Sequence[float],
    mode: Disaggregation | str,
    inst: Instance,
    activation: str = "whs",
) -> list[ILSCut]:
    """Route cuts that the point violates; an empty list means the point is accepted.

    The point is accepted when the total of ``theta_bar`` covers the exact
    recourse of its plan up to ``1e-9``.
    """
    mode = Disaggregation(mode)
    plan = routing_plan_from_edges(x_bar, inst.n)
    values = {r: q_classical(r, inst)[0] for r in plan.routes}
    total = sum(values.values(), Fraction(0))
    if float(sum(float(t) for t in theta_bar)) >= float(total) - ACCEPT_TOL:
        return []
    cuts = []
    for r, q in values.items():
        if q == 0:
            continue
        support = [min(r.customers)] if mode is Disaggregation.D1 else r.customers
        c = route_cut(r, q, support, inst.n, activation)
        if c.violation(x_bar, theta_bar) > 0:
            cuts.append(c)
    return cuts
