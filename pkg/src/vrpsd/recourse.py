"""Classical recourse over demand scenarios.

Under the classical policy a vehicle follows its planned route and, whenever
its load would exceed capacity at a customer, travels to the depot and back
from that customer.  A directed route therefore costs, per scenario,
``2 * c(0, v)`` for each failure observed at customer ``v``.  All values are
exact :class:`~fractions.Fraction` objects.

Failure counting uses the integer-scaled demands cached on the instance, so
the arithmetic is exact but cheap.
"""
from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .instance import DirectedRoute, Instance, Route


class Disaggregation(str, enum.Enum):
    """How the recourse of a route is split over its customers.

    ``D1`` puts everything on the customer with the smallest id.  ``D2``
    gives each customer the cost of the failures it observes under the
    orientation chosen by :func:`q_classical`.
    """

    D1 = "d1"
    D2 = "d2"


def _ceil_div(a, b):
    return -((-a) // b)


def _fails_before(load, cap):
    """Number of ``t >= 1`` with ``t * cap < load``."""
    return np.where(load > 0, (load - 1) // cap, 0)


def _scaled(inst: Instance):
    return inst.scaled_demands


def _scale_factor(inst: Instance) -> Fraction:
    _, cap = inst.scaled_demands
    return Fraction(cap) / inst.capacity


def _scaled_alpha(alpha, inst: Instance) -> int:
    value = Fraction(alpha) * _scale_factor(inst)
    if value.denominator != 1:
        raise ValueError(f"load {alpha} is not on the demand grid")
    return int(value)


def _fail_scaled(alpha: int, load, cap: int):
    if alpha == 0:
        return np.maximum(_ceil_div(load, cap) - 1, 0)
    r = alpha % cap
    return _ceil_div(r + load, cap) - _ceil_div(r, cap)


def fail(alpha, customers: Iterable[int], xi: int, inst: Instance) -> int:
    """Failures observed while serving ``customers`` after a load ``alpha`` was collected.

    The count does not depend on the order in which the set is visited.
    """
    dem, cap = _scaled(inst)
    idx = list(customers)
    load = int(dem[xi, idx].sum()) if idx else 0
    return int(_fail_scaled(_scaled_alpha(alpha, inst), np.asarray(load), cap))


def fail_all(alpha, customers: Iterable[int], inst: Instance) -> np.ndarray:
    """:func:`fail` for every scenario at once."""
    dem, cap = _scaled(inst)
    idx = list(customers)
    load = dem[:, idx].sum(axis=1) if idx else np.zeros(dem.shape[0], dtype=dem.dtype)
    return np.asarray(_fail_scaled(_scaled_alpha(alpha, inst), load, cap))


def failure_matrix(route: DirectedRoute | Sequence[int], inst: Instance) -> np.ndarray:
    """``F[xi, j]``: failures observed at the ``j``-th customer of the route in scenario ``xi``."""
    dem, cap = _scaled(inst)
    seq = list(route)
    block = dem[:, seq]
    cum = np.cumsum(block, axis=1)
    return _fails_before(cum, cap) - _fails_before(cum - block, cap)


def failures_per_customer(route: DirectedRoute | Sequence[int], xi: int, inst: Instance) -> tuple[int, ...]:
    return tuple(int(f) for f in failure_matrix(route, inst)[xi])


def _weighted(counts: np.ndarray, inst: Instance) -> list[Fraction]:
    """Probability-weighted column sums of an integer scenario matrix."""
    nums, den = inst.prob_numerators
    sums = nums @ counts
    return [Fraction(int(s), den) for s in np.atleast_1d(sums)]


def customer_terms(route: DirectedRoute | Sequence[int], inst: Instance) -> dict[int, Fraction]:
    """Expected failure cost observed at each customer of a directed route."""
    seq = list(route)
    probs_fail = _weighted(failure_matrix(seq, inst), inst)
    return {v: 2 * inst.depot_cost(v) * pf for v, pf in zip(seq, probs_fail)}


def q_classical_directed(route: DirectedRoute | Sequence[int], inst: Instance) -> Fraction:
    return sum(customer_terms(route, inst).values(), Fraction(0))


def q_scenario_directed(route: DirectedRoute | Sequence[int], xi: int, inst: Instance) -> Fraction:
    seq = list(route)
    fails = failure_matrix(seq, inst)[xi]
    return sum((2 * inst.depot_cost(v) * int(f) for v, f in zip(seq, fails)), Fraction(0))


def q_classical(route: Route | Sequence[int], inst: Instance) -> tuple[Fraction, DirectedRoute]:
    """Recourse of an undirected route: the cheaper of its two orientations.

    On ties the orientation starting with the smaller customer id wins.
    """
    r = route if isinstance(route, Route) else Route(route)
    fwd, bwd = r.forward(), r.backward()
    qf = q_classical_directed(fwd, inst)
    if len(r) == 1:
        return qf, fwd
    qb = q_classical_directed(bwd, inst)
    return (qb, bwd) if qb < qf else (qf, fwd)


def q_value(route: Route | Sequence[int], inst: Instance) -> Fraction:
    return q_classical(route, inst)[0]


def disaggregate(route: Route | Sequence[int], mode: Disaggregation | str, inst: Instance) -> dict[int, Fraction]:
    mode = Disaggregation(mode)
    r = route if isinstance(route, Route) else Route(route)
    value, directed = q_classical(r, inst)
    if mode is Disaggregation.D1:
        out = {v: Fraction(0) for v in r.customers}
        out[min(r.customers)] = value
        return out
    return customer_terms(directed, inst)


# ---------------------------------------------------------------------------
# lower bounds


def _sorted_depot_costs(customers: Iterable[int], inst: Instance) -> list[Fraction]:
    ordered = sorted(customers, key=lambda v: (inst.depot_cost(v), v))
    return [2 * inst.depot_cost(v) for v in ordered]


def lb_nu(alpha, customers: Iterable[int], nu: int, xi: int, inst: Instance) -> Fraction:
    """Recourse lower bound for serving a set with ``nu`` vehicles after load ``alpha``.

    Sums ``2 c(0, v)`` over the ``fail - nu + 1`` customers of the set with the
    cheapest depot edges.
    """
    s = list(customers)
    count = fail(alpha, s, xi, inst) - nu + 1
    if count <= 0:
        return Fraction(0)
    return sum(_sorted_depot_costs(s, inst)[:count], Fraction(0))


def _lb_all(alpha_scaled: np.ndarray, customers: Sequence[int], nu: int, inst: Instance) -> np.ndarray:
    """Per-scenario ``lb_nu`` weighted by probability numerators (vectorized over scenarios).

    Returns the integer count of cheapest customers used per scenario.
    """
    dem, cap = _scaled(inst)
    load = dem[:, list(customers)].sum(axis=1)
    zero = alpha_scaled == 0
    r = alpha_scaled % cap
    with_alpha = _ceil_div(r + load, cap) - _ceil_div(r, cap)
    without = np.maximum(_ceil_div(load, cap) - 1, 0)
    fails = np.where(zero, without, with_alpha)
    return np.clip(fails - nu + 1, 0, len(customers))


def _expected_lb(counts: np.ndarray, customers: Sequence[int], inst: Instance) -> Fraction:
    prefix = [Fraction(0)]
    for c in _sorted_depot_costs(customers, inst):
        prefix.append(prefix[-1] + c)
    nums, den = inst.prob_numerators
    total = Fraction(0)
    for m in range(1, len(prefix)):
        weight = int(nums[counts == m].sum())
        if weight:
            total += prefix[m] * Fraction(weight, den)
    return total


def _directed_partial_lb(sets: Sequence[Iterable[int]], inst: Instance) -> Fraction:
    dem, _ = _scaled(inst)
    alpha = np.zeros(dem.shape[0], dtype=dem.dtype)
    total = Fraction(0)
    for part in sets:
        members = sorted(part)
        counts = _lb_all(alpha, members, 1, inst)
        total += _expected_lb(counts, members, inst)
        alpha = alpha + dem[:, members].sum(axis=1)
    return total


def partial_route_lb(sets: Sequence[Iterable[int]], inst: Instance) -> Fraction:
    """Recourse lower bound valid for every route that follows the partial route.

    ``sets`` is the ordered tuple of customer sets of the partial route.  The
    bound accumulates the load collected before each set and applies
    :func:`lb_nu` with one vehicle; the smaller of the two travel directions
    is returned.
    """
    parts = [frozenset(s) for s in sets]
    fwd = _directed_partial_lb(parts, inst)
    if len(parts) == 1:
        return fwd
    return min(fwd, _directed_partial_lb(parts[::-1], inst))


def set_lb(customers: Iterable[int], k_tilde: int, inst: Instance) -> Fraction:
    """Expected recourse lower bound for serving a set with ``k_tilde`` vehicles."""
    members = sorted(customers)
    dem, _ = _scaled(inst)
    counts = _lb_all(np.zeros(dem.shape[0], dtype=dem.dtype), members, k_tilde, inst)
    return _expected_lb(counts, members, inst)


# ---------------------------------------------------------------------------
# generic disaggregation


QOracle = Callable[[tuple[int, ...]], Fraction]


def get_disaggregation(route: Sequence[int], q_oracle: QOracle) -> dict[int, Fraction]:
    """Split ``q_oracle(route)`` over the customers so that subroutes are covered.

    Processes the customers left to right.  Customer ``v_b`` receives the
    largest shortfall ``q(v_a..v_b) - assigned(v_a..v_b)`` over the start
    points ``a``.  Any mass still missing at the end goes to the first
    customer.  If the oracle is weakly superadditive on the route, the
    values sum to ``q_oracle(route)`` and every contiguous subroute receives
    at least its own recourse.
    """
    seq = tuple(route)
    ell = len(seq)
    assigned = [Fraction(0)] * ell
    families: list[list[tuple[int, ...]]] = [[]]
    for b in range(ell):
        best_a, best = 0, None
        running = Fraction(0)
        for a in range(b, -1, -1):
            running += assigned[a]
            gap = Fraction(q_oracle(seq[a : b + 1])) - running
            if best is None or gap > best or (gap == best and a < best_a):
                best_a, best = a, gap
        if best > 0:
            families.append(families[best_a] + [seq[best_a : b + 1]])
            assigned[b] = best
        else:
            families.append(families[b])
    rest = Fraction(q_oracle(seq)) - sum(assigned, Fraction(0))
    if rest > 0:
        assigned[0] += rest
    return dict(zip(seq, assigned))


def check_weak_superadditivity(q_oracle: QOracle, route: Sequence[int], max_length: int = 12) -> bool:
    """Whether ``q(route)`` dominates the sum over every family of disjoint subroutes."""
    seq = tuple(route)
    if len(seq) > max_length:
        raise ValueError(f"route of length {len(seq)} exceeds the enumeration guard {max_length}")
    cache: dict[tuple[int, int], Fraction] = {}

    def q(a: int, b: int) -> Fraction:
        if (a, b) not in cache:
            cache[(a, b)] = Fraction(q_oracle(seq[a:b]))
        return cache[(a, b)]

    total = q(0, len(seq))
    # best family value by dynamic programming over prefixes
    best = [Fraction(0)] * (len(seq) + 1)
    for end in range(1, len(seq) + 1):
        cand = best[end - 1]
        for start in range(end):
            cand = max(cand, best[start] + q(start, end))
        best[end] = cand
    return total >= best[len(seq)]


def is_monotone(values: Mapping[int, Fraction], route: Sequence[int], q_oracle: QOracle) -> bool:
    """Every contiguous subroute receives at least its own recourse."""
    seq = tuple(route)
    for a, b in itertools.combinations(range(len(seq) + 1), 2):
        part = seq[a:b]
        if sum((values[v] for v in part), Fraction(0)) < q_oracle(part):
            return False
    return True
