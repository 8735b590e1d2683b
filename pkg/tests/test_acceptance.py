"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that pytest prints in its terminal
summary; run ``python tests/test_acceptance.py`` to see them directly.
"""
from __future__ import annotations

import itertools
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import CRITERIA_RESULTS  # noqa: E402
from helpers import DATA, fixture_instance, form_values, plan_matrix, random_instance, random_partial_route  # noqa: E402

from vrpsd.cuts import (  # noqa: E402
    PartialRoute,
    activation_gendreau,
    activation_set,
    activation_whs,
    activation_wof_exact,
    activation_wof_superset,
    plan_adheres,
    plan_exactly_adheres,
)
from vrpsd.instance import RoutingPlan, edges, edges_from_plan, generate_instance  # noqa: E402
from vrpsd.oracle import brute_force_fail, brute_force_optimum, enumerate_plans  # noqa: E402
from vrpsd.recourse import (  # noqa: E402
    check_weak_superadditivity,
    disaggregate,
    fail,
    get_disaggregation,
    is_monotone,
    partial_route_lb,
    q_value,
    set_lb,
)
from vrpsd.separation import set_cut  # noqa: E402
from vrpsd.solver import Config, solve  # noqa: E402


def record(number: int, ok: bool, detail: str) -> None:
    CRITERIA_RESULTS[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------------------
# 1 and 8 share the regression suite of solves

CONFIGS = {
    "d1": Config(mode="d1", time_limit=300),
    "d2": Config(mode="d2", time_limit=300),
    "d2+set": Config(mode="d2", use_set_cuts=True, time_limit=300),
}
SUITE_SIZE = 102


def suite_instance(seed: int):
    rng = random.Random(seed)
    n = rng.randint(5, 8)
    k = rng.randint(1, 3)
    n_scenarios = rng.randint(1, 10)
    return generate_instance(
        n,
        k,
        rng.choice([20, 50, 100]),
        n_scenarios,
        rng.choice(["independent", "correlated"]),
        seed,
        fill=rng.choice([0.7, 0.85, 0.95]),
        cv=rng.choice([0.3, 0.5]),
        name=f"suite-{seed}",
    )


@pytest.fixture(scope="module")
def regression_suite():
    rows = []
    start = time.perf_counter()
    for seed in range(SUITE_SIZE):
        inst = suite_instance(seed)
        optimum, _ = brute_force_optimum(inst)
        results = {label: solve(inst, cfg) for label, cfg in CONFIGS.items()}
        rows.append((seed, inst, optimum, results))
    return rows, time.perf_counter() - start


def test_criterion_1_oracle_equivalence(regression_suite):
    rows, seconds = regression_suite
    failures = []
    feasible = 0
    for seed, _, optimum, results in rows:
        feasible += optimum is not None
        for label, res in results.items():
            if optimum is None:
                ok = res.status == "infeasible"
            else:
                ok = (
                    res.status == "optimal"
                    and res.objective is not None
                    and abs(float(res.objective - optimum)) <= 1e-6 * max(1.0, abs(float(optimum)))
                )
            if not ok:
                failures.append((seed, label, res.status, res.objective, optimum))
    ok = not failures and len(rows) >= 100 and seconds < 600
    record(
        1,
        ok,
        f"{len(rows)} instances ({feasible} feasible) x 3 configs, {len(failures)} mismatches, {seconds:.0f}s",
    )
    assert not failures, failures[:5]
    assert seconds < 600


def test_criterion_8_block_cut_path_property(regression_suite):
    rows, _ = regression_suite
    points = trees = violations = 0
    for _, _, _, results in rows:
        for res in results.values():
            points += res.stats["path_points"]
            trees += res.stats["path_trees_checked"]
            violations += res.stats["path_violations"]
    extra = _extra_path_points(max(0, 1000 - points))
    points += extra[0]
    trees += extra[1]
    violations += extra[2]
    ok = points >= 1000 and violations == 0
    record(8, ok, f"{points} fractional points, {trees} depot-flow-2 trees, {violations} non-path trees")
    assert points >= 1000
    assert violations == 0


def _extra_path_points(needed: int) -> tuple[int, int, int]:
    """Solve larger fixed-seed instances until enough fractional points were inspected."""
    points = trees = violations = 0
    seed = 1000
    while points < needed:
        inst = generate_instance(10, 2 + seed % 2, 100, 10, "independent", seed, fill=0.85, cv=0.4)
        res = solve(inst, Config(mode="d2", use_set_cuts=True, time_limit=60))
        points += res.stats["path_points"]
        trees += res.stats["path_trees_checked"]
        violations += res.stats["path_violations"]
        seed += 1
    return points, trees, violations


# ---------------------------------------------------------------------------
# 2


def test_criterion_2_fail_count():
    rng = random.Random(2)
    mismatches = 0
    boundary = {"alpha0": 0, "alpha_multiple": 0, "zero_demand": 0}
    trials = 10_000
    for t in range(trials):
        inst = random_instance(rng, rng.randint(1, 7), 3, capacity=rng.choice([1, 5, 10]))
        cap = int(inst.capacity)
        kind = t % 4
        alpha = [0, cap * rng.randint(1, 3), rng.randint(0, 4 * cap), rng.randint(0, 4 * cap)][kind]
        members = rng.sample(list(inst.customers), rng.randint(0, inst.n))
        xi = rng.randrange(inst.n_scenarios)
        demands = [inst.demand(v, xi) for v in members]
        boundary["alpha0"] += alpha == 0
        boundary["alpha_multiple"] += alpha > 0 and alpha % cap == 0
        boundary["zero_demand"] += sum(demands) == 0
        got = fail(alpha, members, xi, inst)
        want = brute_force_fail(alpha, demands, inst.capacity)
        # the count is order independent
        shuffled = list(demands)
        rng.shuffle(shuffled)
        if got != want or brute_force_fail(alpha, shuffled, inst.capacity) != want:
            mismatches += 1
    ok = mismatches == 0 and all(v > 0 for v in boundary.values())
    record(2, ok, f"{trials} inputs, {mismatches} mismatches, boundary cases {boundary}")
    assert mismatches == 0
    assert all(v > 0 for v in boundary.values())


# ---------------------------------------------------------------------------
# 3


def _segments(plan, s: frozenset[int]) -> int:
    count = 0
    for r in plan.routes:
        inside = [v in s for v in r.customers]
        count += sum(1 for i, flag in enumerate(inside) if flag and (i == 0 or not inside[i - 1]))
    return count


def test_criterion_3_activation_contract():
    rng = random.Random(3)
    bad: list[str] = []
    n_routes = n_sets = n_gendreau = 0
    for n, count in ((4, 60), (5, 70), (6, 80)):
        plans, mat = plan_matrix(n)
        customers = list(range(1, n + 1))
        for _ in range(count):
            h = random_partial_route(rng, customers)
            superset = form_values(activation_wof_superset(h, n), mat)
            exact_of = form_values(activation_wof_exact(h, n), mat)
            exact_hs = form_values(activation_whs(h, n), mat)
            for p, plan in enumerate(plans):
                adh = plan_adheres(plan.routes, h)
                ex = plan_exactly_adheres(plan.routes, h)
                if (superset[p] == 1) != adh or (not adh and superset[p] > 0):
                    bad.append(f"superset {h} {plan}")
                for name, vals in (("wof", exact_of), ("whs", exact_hs)):
                    if (vals[p] == 1) != ex or (not ex and vals[p] > 0):
                        bad.append(f"{name} {h} {plan}")
            n_routes += 1
        # set activation: domain is where S is split into at least k pieces
        for _ in range(count):
            s = frozenset(rng.sample(customers, rng.randint(1, n)))
            k_tilde = rng.randint(1, len(s))
            vals = form_values(activation_set(s, k_tilde, n), mat)
            for p, plan in enumerate(plans):
                segs = _segments(plan, s)
                if segs < k_tilde:
                    continue
                if (vals[p] == 1) != (segs == k_tilde) or (segs != k_tilde and vals[p] > 0):
                    bad.append(f"set {sorted(s)} k={k_tilde} {plan}")
            n_sets += 1
        # single-solution activation
        for target in rng.sample(range(len(plans)), min(40, len(plans))):
            k = len(plans[target])
            vals = form_values(activation_gendreau(mat[target], k, n), mat)
            for p, plan in enumerate(plans):
                if len(plan) != k:
                    continue
                if (vals[p] == 1) != (p == target) or (p != target and vals[p] > 0):
                    bad.append(f"gendreau {plans[target]} at {plan}")
            n_gendreau += 1
    ok = not bad and n_routes >= 200 and n_sets >= 200
    record(
        3,
        ok,
        f"{n_routes} partial routes, {n_sets} sets, {n_gendreau} single-solution targets over all plans n<=6; {len(bad)} violations",
    )
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------
# 4


def _integer_form(form, n):
    coef = np.zeros(len(edges(n)), dtype=np.int64)
    for e, c in form.coeffs.items():
        coef[e] = int(c)
    return coef, int(form.const)


def test_criterion_4_dominance():
    rng = random.Random(4)
    plan_cache = {}
    worse = 0
    coincide_checked = coincide_bad = 0
    trials = 10_000
    for _ in range(trials):
        n = rng.randint(3, 7)
        k = rng.randint(1, min(3, n))
        if (n, k) not in plan_cache:
            plan_cache[(n, k)] = plan_matrix(n, k)[1]
        mat = plan_cache[(n, k)]
        picks = [rng.randrange(len(mat)) for _ in range(rng.randint(2, 4))]
        weights = np.array([rng.randint(1, 9) for _ in picks], dtype=np.int64)
        combo = weights @ mat[picks]  # point = combo / weights.sum()
        total = int(weights.sum())
        h = random_partial_route(rng, list(range(1, n + 1)))
        wof_coef, wof_const = _integer_form(activation_wof_exact(h, n), n)
        whs_coef, whs_const = _integer_form(activation_whs(h, n), n)
        wof_val = int(wof_coef @ combo) + wof_const * total
        whs_val = int(whs_coef @ combo) + whs_const * total
        if wof_val < whs_val:
            worse += 1
        if len(h) >= 2 and len(h[1]) == 1 and len(h[len(h) - 2]) == 1:
            coincide_checked += 1
            if wof_val != whs_val or activation_wof_exact(h, n) != activation_whs(h, n):
                coincide_bad += 1
    ok = worse == 0 and coincide_bad == 0 and coincide_checked > 0
    record(
        4,
        ok,
        f"{trials} fractional points, {worse} with wof < whs; {coincide_checked} singleton-neighbour cases, {coincide_bad} differ",
    )
    assert worse == 0
    assert coincide_bad == 0 and coincide_checked > 0


# ---------------------------------------------------------------------------
# 5


def test_criterion_5_lower_bound_validity():
    rng = random.Random(5)
    route_bad = set_bad = 0
    n_partial = routes_checked = 0
    while n_partial < 500:
        inst = random_instance(rng, rng.randint(2, 8), rng.randint(1, 6), capacity=rng.choice([5, 10]))
        h = random_partial_route(rng, list(inst.customers), max_set=5)
        bound = partial_route_lb(list(h), inst)
        for orders in itertools.product(*(itertools.permutations(sorted(s)) for s in h)):
            seq = [v for part in orders for v in part]
            routes_checked += 1
            if q_value(seq, inst) < bound:
                route_bad += 1
        n_partial += 1

    points = positive = 0
    for n, fleet, seed in ((5, 1, 0), (5, 2, 1), (6, 2, 2), (6, 3, 3), (7, 2, 4), (7, 3, 5)):
        inst = random_instance(random.Random(seed), n, 4, capacity=10, fleet=fleet)
        subsets = [frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(range(1, n + 1), r)]
        lb_cache: dict = {}
        mass_cache: dict = {}
        # every plan with the fleet size, capacity ignored (a superset of the feasible points)
        for plan in enumerate_plans(inst, capacity_check=False):
            points += 1
            theta: dict[int, Fraction] = {}
            for r in plan.routes:
                if r not in mass_cache:
                    mass_cache[r] = disaggregate(r, "d2", inst)
                theta.update(mass_cache[r])
            for s in subsets:
                pieces = _segments(plan, s)
                key = (s, pieces)
                if key not in lb_cache:
                    lb_cache[key] = set_lb(s, pieces, inst)
                positive += lb_cache[key] > 0
                if sum(theta[v] for v in s) < lb_cache[key]:
                    set_bad += 1
    ok = route_bad == 0 and set_bad == 0
    record(
        5,
        ok,
        f"{n_partial} partial routes / {routes_checked} adhering routes, {route_bad} bound violations; "
        f"{points} integer points x all subsets ({positive} positive bounds), {set_bad} set-bound violations",
    )
    assert route_bad == 0
    assert set_bad == 0


# ---------------------------------------------------------------------------
# 6


def test_criterion_6_counterexample_fixture():
    inst = fixture_instance()
    expected = json.loads((DATA / "counterexample_expected.json").read_text())
    route, sub = expected["route"], expected["subroute"]
    q_route, q_sub = q_value(route, inst), q_value(sub, inst)
    cut = set_cut(expected["set"], inst, expected["set_vehicles"])
    # plan {R, (v5)}: the set is served by one vehicle, so the activation is one there
    plan_x = edges_from_plan(RoutingPlan([route, [5]]), inst.n)
    activation = cut.activation.evaluate(plan_x)
    theta_d1 = [Fraction(v) for v in expected["theta_d1"]]
    theta_d2 = [Fraction(v) for v in expected["theta_d2"]]
    d1 = disaggregate(route, "d1", inst)
    d2 = disaggregate(route, "d2", inst)
    checks = {
        "Q(R)=3/2": q_route == Fraction(expected["q_route"]),
        "Q(R')=2": q_sub == Fraction(expected["q_subroute"]),
        "not weakly superadditive": q_route < q_sub and not check_weak_superadditivity(lambda r: q_value(r, inst), route),
        "set bound 1/2 with activation 1": cut.bound == Fraction(expected["set_bound"]) and activation == 1,
        "D1 violates": [d1.get(v, 0) for v in inst.customers] == theta_d1 and not cut.holds_exactly(plan_x, theta_d1),
        "D2 satisfies": [d2.get(v, 0) for v in inst.customers] == theta_d2 and cut.holds_exactly(plan_x, theta_d2),
    }
    failed = [name for name, ok in checks.items() if not ok]
    record(6, not failed, "all exact equalities hold" if not failed else f"failed: {failed}")
    assert not failed


# ---------------------------------------------------------------------------
# 7


def test_criterion_7_get_disaggregation():
    rng = random.Random(7)
    bad_sum = bad_mono = 0
    trials = 1000
    for _ in range(trials):
        ell = rng.randint(1, 8)
        cap = Fraction(rng.randint(1, 20))
        demand = {v: Fraction(rng.randint(0, 40), rng.choice([1, 2, 3])) for v in range(1, ell + 1)}
        seq = list(range(1, ell + 1))
        rng.shuffle(seq)

        def q(r, demand=demand, cap=cap):
            return max(Fraction(0), sum((demand[v] for v in r), Fraction(0)) - cap)

        values = get_disaggregation(seq, q)
        if sum(values.values(), Fraction(0)) != q(seq):
            bad_sum += 1
        if not is_monotone(values, seq, q):
            bad_mono += 1
    inst = fixture_instance()
    route = json.loads((DATA / "counterexample_expected.json").read_text())["route"]
    fixture_not_superadditive = not check_weak_superadditivity(lambda r: q_value(r, inst), route)
    ok = bad_sum == 0 and bad_mono == 0 and fixture_not_superadditive
    record(
        7,
        ok,
        f"{trials} routes: {bad_sum} sum mismatches, {bad_mono} non-monotone; fixture weakly superadditive: {not fixture_not_superadditive}",
    )
    assert bad_sum == 0 and bad_mono == 0
    assert fixture_not_superadditive


# ---------------------------------------------------------------------------
# 9


def test_criterion_9_scale_smoke():
    smoke = json.loads((DATA / "scale_smoke.json").read_text())
    params = smoke["instance"]
    inst = generate_instance(
        params["n"], params["k"], params["capacity"], params["scenarios"], params["distribution"], params["seed"],
        fill=params["fill"], cv=params["cv"],
    )
    start = time.perf_counter()
    res = solve(inst, Config(mode="d2", use_set_cuts=True, time_limit=smoke["time_limit"]))
    seconds = time.perf_counter() - start
    base = smoke["baseline"]
    nodes = res.stats["nodes"]
    cuts = sum(res.stats["cuts_by_tag"].values())
    within = all(0.5 * b <= v <= 1.5 * b for v, b in ((nodes, base["nodes"]), (cuts, base["cuts"])))
    ok = res.status == "optimal" and seconds <= smoke["time_limit"]
    record(
        9,
        ok,
        f"status {res.status} in {seconds:.1f}s, objective {float(res.objective) if res.objective else None}, "
        f"nodes {nodes} (baseline {base['nodes']}), cuts {cuts} (baseline {base['cuts']}), "
        f"{'within' if within else 'outside'} +-50% baseline",
    )
    assert res.status == "optimal"
    assert seconds <= smoke["time_limit"]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
