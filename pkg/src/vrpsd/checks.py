"""Randomized equivalence checks between the fast code paths and the brute-force oracle."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import oracle, recourse
from .cuts import PartialRoute
from .instance import Instance, ScenarioSet, generate_instance


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    trials: int
    detail: str = ""


def _random_instance(rng: random.Random, n: int, n_scenarios: int, capacity: int = 10) -> Instance:
    costs = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            costs[i][j] = costs[j][i] = rng.randint(1, 9)
    demands = []
    for _ in range(n_scenarios):
        demands.append([rng.choice([0, 0, capacity, rng.randint(0, capacity)]) for _ in range(n)])
    for v in range(n):
        if not any(row[v] for row in demands):
            demands[0][v] = 1
    probs = [Fraction(1, n_scenarios)] * n_scenarios
    return Instance(n, costs, capacity, 1, ScenarioSet(probs, demands))


def check_fail_count(rng: random.Random, trials: int) -> CheckOutcome:
    for t in range(trials):
        inst = _random_instance(rng, rng.randint(1, 6), 3)
        cap = int(inst.capacity)
        alpha = rng.choice([0, cap, 2 * cap, rng.randint(0, 3 * cap)])
        size = rng.randint(0, inst.n)
        members = rng.sample(list(inst.customers), size)
        xi = rng.randrange(inst.n_scenarios)
        got = recourse.fail(alpha, members, xi, inst)
        want = oracle.brute_force_fail(alpha, [inst.demand(v, xi) for v in members], inst.capacity)
        if got != want:
            return CheckOutcome("fail-count", False, t + 1, f"alpha={alpha} set={members} xi={xi}: {got} != {want}")
    return CheckOutcome("fail-count", True, trials)


def check_recourse_value(rng: random.Random, trials: int) -> CheckOutcome:
    for t in range(trials):
        inst = _random_instance(rng, rng.randint(1, 6), rng.randint(1, 4))
        seq = list(inst.customers)
        rng.shuffle(seq)
        got = recourse.q_value(seq, inst)
        want = oracle.brute_force_q(seq, inst)
        if got != want:
            return CheckOutcome("recourse-value", False, t + 1, f"route {seq}: {got} != {want}")
    return CheckOutcome("recourse-value", True, trials)


def check_partial_route_bound(rng: random.Random, trials: int) -> CheckOutcome:
    for t in range(trials):
        inst = _random_instance(rng, rng.randint(2, 6), rng.randint(1, 4))
        customers = list(inst.customers)
        rng.shuffle(customers)
        sets, i = [], 0
        while i < len(customers):
            big = not sets or len(sets[-1]) == 1
            size = rng.randint(1, 3) if big else 1
            sets.append(customers[i : i + size])
            i += size
        h = PartialRoute(sets)
        bound = recourse.partial_route_lb(list(h), inst)
        for orders in itertools.product(*(itertools.permutations(s) for s in h)):
            seq = [v for part in orders for v in part]
            if recourse.q_value(seq, inst) < bound:
                return CheckOutcome("partial-route-bound", False, t + 1, f"{h}: route {seq} below {bound}")
    return CheckOutcome("partial-route-bound", True, trials)


def check_solver_optimum(rng: random.Random, trials: int) -> CheckOutcome:
    from .solver import Config, solve

    configs = [Config(mode="d1"), Config(mode="d2"), Config(mode="d2", use_set_cuts=True)]
    for t in range(trials):
        n = rng.randint(3, 6)
        inst = generate_instance(
            n, rng.randint(1, 2), 20, rng.randint(1, 5), rng.choice(["independent", "correlated"]), rng.randrange(10**6), fill=0.9, cv=0.5
        )
        want, _ = oracle.brute_force_optimum(inst)
        cfg = configs[t % len(configs)]
        res = solve(inst, cfg)
        if want is None:
            ok = res.status == "infeasible"
        else:
            ok = res.objective is not None and abs(float(res.objective - want)) <= 1e-6 * max(1.0, abs(float(want)))
        if not ok:
            return CheckOutcome("solver-optimum", False, t + 1, f"{cfg.label}: {res.objective} != {want}")
    return CheckOutcome("solver-optimum", True, trials)


def run_checks(seed: int, budget: int) -> list[CheckOutcome]:
    """Run every check with a trial count proportional to ``budget``."""
    rng = random.Random(seed)
    return [
        check_fail_count(rng, 50 * budget),
        check_recourse_value(rng, 10 * budget),
        check_partial_route_bound(rng, 5 * budget),
        check_solver_optimum(rng, budget),
    ]
