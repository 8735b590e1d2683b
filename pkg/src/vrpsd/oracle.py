"""Brute-force reference implementations for small instances.

Nothing here shares code with the recourse evaluation used by the solver:
failures are counted by walking the load over every multiple of the
capacity, and plans are enumerated exhaustively.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .instance import Instance, Route, RoutingPlan

MAX_ENUMERATION_CUSTOMERS = 9


def brute_force_fail(alpha, demands: Sequence, capacity) -> int:
    """Failures counted as ``sum_j sum_t 1(load_before_j <= t*C < load_after_j)``."""
    cap = Fraction(capacity)
    before = Fraction(alpha)
    after_all = before + sum((Fraction(d) for d in demands), Fraction(0))
    t_max = math.floor(after_all / cap) + 1
    total = 0
    for d in demands:
        after = before + Fraction(d)
        total += sum(1 for t in range(1, t_max + 1) if before <= t * cap < after)
        before = after
    return total


def brute_force_directed_q(seq: Sequence[int], inst: Instance) -> Fraction:
    """Expected classical recourse of a directed route via explicit failure indicators."""
    cap = inst.capacity
    value = Fraction(0)
    for xi, p in enumerate(inst.probs):
        before = Fraction(0)
        for v in seq:
            after = before + inst.demand(v, xi)
            for t in range(max(1, math.floor(before / cap)), math.floor(after / cap) + 1):
                if before <= t * cap < after:
                    value += p * 2 * inst.depot_cost(v)
            before = after
    return value


def brute_force_q(route: Route | Sequence[int], inst: Instance) -> Fraction:
    seq = tuple(route.customers if isinstance(route, Route) else route)
    return min(brute_force_directed_q(seq, inst), brute_force_directed_q(seq[::-1], inst))


class _FastRouteValue:
    """Route recourse with integer arithmetic, memoized by canonical route."""

    def __init__(self, inst: Instance):
        self.inst = inst
        scale = math.lcm(inst.capacity.denominator, *[d.denominator for row in inst.scenarios.demands for d in row])
        self.cap = int(inst.capacity * scale)
        self.dem = [[int(d * scale) for d in row] for row in inst.scenarios.demands]
        self.cache: dict[tuple[int, ...], Fraction] = {}

    def _directed(self, seq: Sequence[int]) -> Fraction:
        inst, cap = self.inst, self.cap
        total = Fraction(0)
        for p, row in zip(inst.probs, self.dem):
            load = 0
            acc = Fraction(0)
            for v in seq:
                new = load + row[v - 1]
                # multiples t*cap with load <= t*cap < new, t >= 1
                lo = max(1, -(-load // cap))
                hi = (new - 1) // cap if new > 0 else 0
                if hi >= lo:
                    acc += (hi - lo + 1) * 2 * inst.depot_cost(v)
                load = new
            total += p * acc
        return total

    def __call__(self, route: Route) -> Fraction:
        key = route.customers
        if key not in self.cache:
            val = self._directed(key)
            if len(key) > 1:
                val = min(val, self._directed(key[::-1]))
            self.cache[key] = val
        return self.cache[key]


def enumerate_routes(customers: Iterable[int]) -> Iterator[Route]:
    """Every route over exactly the given customers, once per reversal class."""
    members = sorted(customers)
    if len(members) == 1:
        yield Route(members)
        return
    for perm in itertools.permutations(members):
        if perm[0] < perm[-1]:
            yield Route(perm)


def enumerate_subroutes(route: Sequence[int]) -> Iterator[tuple[int, ...]]:
    seq = tuple(route)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq) + 1):
            yield seq[a:b]


def _set_partitions(items: list[int], blocks: int | None) -> Iterator[list[list[int]]]:
    if not items:
        if blocks in (None, 0):
            yield []
        return
    if blocks is not None and blocks <= 0:
        return
    first, rest = items[0], items[1:]
    for size in range(len(rest) + 1):
        for others in itertools.combinations(rest, size):
            block = [first, *others]
            remaining = [v for v in rest if v not in others]
            for tail in _set_partitions(remaining, None if blocks is None else blocks - 1):
                yield [block] + tail


def enumerate_plans(
    inst: Instance | None = None,
    *,
    n: int | None = None,
    k: int | None = None,
    capacity_check: bool = True,
) -> Iterator[RoutingPlan]:
    """All routing plans, each once.

    With an instance, plans have exactly ``inst.fleet`` routes and respect
    the expected capacity (``capacity_check``).  Passing only ``n`` (and
    optionally ``k``) enumerates every plan of the subtour polytope.
    """
    if inst is not None:
        n = inst.n
        k = inst.fleet if k is None else k
    if n is None:
        raise ValueError("need an instance or a customer count")
    if n > MAX_ENUMERATION_CUSTOMERS:
        raise ValueError(f"plan enumeration is limited to {MAX_ENUMERATION_CUSTOMERS} customers")
    for blocks in _set_partitions(list(range(1, n + 1)), k):
        if inst is not None and capacity_check and any(inst.expected_demand(b) > inst.capacity for b in blocks):
            continue
        for routes in itertools.product(*(list(enumerate_routes(b)) for b in blocks)):
            yield RoutingPlan(routes)


def plan_value(plan: RoutingPlan, inst: Instance, q=None) -> Fraction:
    """Total expected cost, including the preprocessing offset."""
    q = q or _FastRouteValue(inst)
    return inst.plan_cost(plan) + sum((q(r) for r in plan.routes), Fraction(0)) + inst.objective_offset


def brute_force_optimum(inst: Instance) -> tuple[Fraction | None, RoutingPlan | None]:
    """Optimal expected cost and one optimal plan; ``(None, None)`` if no plan is feasible.

    The best route per customer set is found first, then set partitions
    into exactly ``k`` blocks are scanned.
    """
    if inst.n > MAX_ENUMERATION_CUSTOMERS:
        raise ValueError(f"brute force is limited to {MAX_ENUMERATION_CUSTOMERS} customers")
    q = _FastRouteValue(inst)
    best_route: dict[frozenset[int], tuple[Fraction, Route]] = {}

    def route_for(block: list[int]):
        key = frozenset(block)
        if key not in best_route:
            best = None
            for r in enumerate_routes(block):
                seq = (0,) + r.customers + (0,)
                val = sum((inst.cost[a][b] for a, b in zip(seq, seq[1:])), Fraction(0)) + q(r)
                if best is None or val < best[0] or (val == best[0] and r.customers < best[1].customers):
                    best = (val, r)
            best_route[key] = best
        return best_route[key]

    best_val, best_plan = None, None
    for blocks in _set_partitions(list(range(1, inst.n + 1)), inst.fleet):
        if any(inst.expected_demand(b) > inst.capacity for b in blocks):
            continue
        parts = [route_for(b) for b in blocks]
        val = sum((p[0] for p in parts), Fraction(0))
        if best_val is None or val < best_val:
            best_val, best_plan = val, RoutingPlan([p[1] for p in parts])
    if best_val is None:
        return None, None
    return best_val + inst.objective_offset, best_plan
