"""Shared builders for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import numpy as np

from vrpsd.cuts import PartialRoute
from vrpsd.instance import Instance, ScenarioSet, edges, edges_from_plan, load_instance
from vrpsd.oracle import enumerate_plans

DATA = Path(__file__).parent / "data"


def fixture_instance() -> Instance:
    return load_instance(DATA / "counterexample.json")


def random_instance(
    rng: random.Random,
    n: int,
    n_scenarios: int,
    capacity: int = 10,
    fleet: int = 1,
    max_cost: int = 9,
) -> Instance:
    """Arbitrary symmetric costs and scenario demands on the grid ``0..capacity``."""
    costs = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            costs[i][j] = costs[j][i] = rng.randint(1, max_cost)
    demands = [[rng.choice([0, capacity, rng.randint(0, capacity), rng.randint(0, capacity)]) for _ in range(n)] for _ in range(n_scenarios)]
    for v in range(n):
        if not any(row[v] for row in demands):
            demands[0][v] = rng.randint(1, capacity)
    weights = [rng.randint(1, 4) for _ in range(n_scenarios)]
    probs = [Fraction(w, sum(weights)) for w in weights]
    return Instance(n, costs, capacity, fleet, ScenarioSet(probs, demands))


def random_partial_route(rng: random.Random, customers: list[int], max_set: int = 3) -> PartialRoute:
    """Random partial route over a random subset; no two consecutive sets are larger than one."""
    pool = list(customers)
    rng.shuffle(pool)
    pool = pool[: rng.randint(1, len(pool))]
    sets: list[list[int]] = []
    i = 0
    while i < len(pool):
        may_be_big = not sets or len(sets[-1]) == 1
        size = rng.randint(1, max_set) if may_be_big else 1
        sets.append(pool[i : i + size])
        i += size
    return PartialRoute(sets)


def plan_matrix(n: int, k: int | None = None, inst: Instance | None = None):
    """Every plan (optionally with a fixed fleet / capacity) and its integer edge vector."""
    plans = list(enumerate_plans(inst, n=n, k=k)) if inst is not None else list(enumerate_plans(n=n, k=k))
    mat = np.array([edges_from_plan(p, n) for p in plans], dtype=np.int64).reshape(len(plans), len(edges(n)))
    return plans, mat


def form_values(form, mat: np.ndarray) -> np.ndarray:
    """Exact values of an integer-coefficient affine form on each row of ``mat``."""
    coef = np.zeros(mat.shape[1], dtype=np.int64)
    for e, c in form.coeffs.items():
        assert c.denominator == 1
        coef[e] = int(c)
    assert form.const.denominator == 1
    return mat @ coef + int(form.const)
