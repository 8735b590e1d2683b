import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from vrpsd import lp
from vrpsd.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LpModel, dump_lp

SENSES = ("<=", ">=", "=")


def random_lp(seed, n_vars=None, n_rows=None, free_share=0.2):
    rng = np.random.default_rng(seed)
    n = n_vars or int(rng.integers(2, 8))
    m = n_rows or int(rng.integers(1, 8))
    cost = rng.integers(-5, 6, n).astype(float)
    lower = np.where(rng.random(n) < free_share, -np.inf, rng.integers(-2, 1, n).astype(float))
    upper = np.where(rng.random(n) < 0.5, np.inf, lower + rng.integers(1, 5, n))
    upper = np.where(np.isinf(lower) & np.isinf(upper), 4.0, upper)
    rows = []
    for _ in range(m):
        coeffs = rng.integers(-3, 4, n).astype(float)
        sense = SENSES[int(rng.integers(0, 3))] if rng.random() < 0.9 else "="
        rows.append((coeffs, sense, float(rng.integers(-4, 8))))
    return cost, lower, upper, rows


def reference(cost, lower, upper, rows):
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, sense, rhs in rows:
        if sense == "<=":
            a_ub.append(coeffs), b_ub.append(rhs)
        elif sense == ">=":
            a_ub.append(-coeffs), b_ub.append(-rhs)
        else:
            a_eq.append(coeffs), b_eq.append(rhs)
    res = linprog(
        cost,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=b_eq or None,
        bounds=[(None if np.isinf(lo) else lo, None if np.isinf(hi) else hi) for lo, hi in zip(lower, upper)],
        method="highs",
    )
    return {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[res.status], res.fun


def check_feasible(model, x, tol=1e-6):
    act = model.row_activity(x)
    for value, sense, rhs in zip(act, model.sense, model.b):
        if sense == "<=":
            assert value <= rhs + tol
        elif sense == ">=":
            assert value >= rhs - tol
        else:
            assert value == pytest.approx(rhs, abs=tol)
    assert np.all(x >= model.lo - tol) and np.all(x <= model.hi + tol)


@settings(max_examples=150)
@given(st.integers(0, 2**32 - 1))
def test_matches_highs_on_random_models(seed):
    cost, lower, upper, rows = random_lp(seed)
    model = LpModel(cost, lower, upper)
    model.add_rows(rows)
    res = model.solve()
    want_status, want_obj = reference(cost, lower, upper, rows)
    assert res.status == want_status
    if want_status == OPTIMAL:
        assert res.objective == pytest.approx(want_obj, abs=1e-6)
        check_feasible(model, res.x)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_warm_start_after_adding_rows_matches_cold_solve(seed):
    cost, lower, upper, rows = random_lp(seed, free_share=0.0)
    half = max(1, len(rows) // 2)
    warm = LpModel(cost, lower, upper)
    warm.add_rows(rows[:half])
    warm.solve()
    warm.add_rows(rows[half:])
    warm_res = warm.solve()
    cold = LpModel(cost, lower, upper)
    cold.add_rows(rows)
    cold_res = cold.solve()
    assert warm_res.status == cold_res.status
    if cold_res.status == OPTIMAL:
        assert warm_res.objective == pytest.approx(cold_res.objective, abs=1e-6)


def test_small_known_optimum_and_duals():
    # min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  x = 8/5, y = 6/5
    model = LpModel([-1, -1], [0, 0], [np.inf, np.inf])
    model.add_rows([({0: 1, 1: 2}, "<=", 4), ([3, 1], "<=", 6)])
    res = model.solve()
    assert res.status == OPTIMAL
    assert res.x == pytest.approx([1.6, 1.2])
    assert res.objective == pytest.approx(-2.8)
    assert res.duals == pytest.approx([-0.4, -0.2])


def test_contradictory_rows_are_infeasible():
    model = LpModel([1], [-np.inf], [np.inf])
    model.add_rows([({0: 1}, ">=", 1), ({0: 1}, "<=", 0)])
    assert model.solve().status == INFEASIBLE


def test_unbounded_is_reported():
    model = LpModel([-1, 0], [0, 0], [np.inf, 1])
    model.add_rows([({0: 1, 1: -1}, ">=", 0)])
    assert model.solve().status == UNBOUNDED


def test_model_without_rows():
    model = LpModel([1, -2, 0], [0, -1, 3], [5, 4, 7])
    res = model.solve()
    assert res.status == OPTIMAL
    assert list(res.x) == [0, 4, 3]
    assert res.objective == -8


def test_bound_changes_and_row_removal_warm_start():
    checked = 0
    for seed in range(60):
        cost, lower, upper, rows = random_lp(seed, n_vars=5, n_rows=6, free_share=0.0)
        model = LpModel(cost, lower, upper)
        model.add_rows(rows)
        first = model.solve()
        if first.status != OPTIMAL:
            continue
        checked += 1
        j = int(np.argmax(np.abs(first.x - np.round(first.x + 0.25))))
        lo, hi = model.bounds(j)
        model.set_bounds(j, lo, max(lo, np.floor(first.x[j] - 0.5)))
        tightened = model.solve()
        cold = LpModel(cost, model.lo, model.hi)
        cold.add_rows(rows)
        cold_res = cold.solve()
        assert tightened.status == cold_res.status
        if cold_res.status == OPTIMAL:
            assert tightened.objective == pytest.approx(cold_res.objective, abs=1e-6)
        model.set_bounds(j, lo, hi)
        model.solve()
        kept = model.remove_rows(range(model.n_rows))
        assert len(kept) == model.n_rows <= len(rows)
        after = model.solve()
        rebuilt = LpModel(cost, lower, upper)
        rebuilt.add_rows([rows[i] for i in kept])
        assert after.objective == pytest.approx(rebuilt.solve().objective, abs=1e-6)
        # dropping only non-binding rows leaves the optimum unchanged
        assert after.objective == pytest.approx(first.objective, abs=1e-6)
    assert checked >= 10


def test_remove_rows_keeps_binding_rows():
    model = LpModel([-1], [0], [10])
    model.add_rows([({0: 1}, "<=", 3), ({0: 1}, "<=", 8)])
    assert model.solve().objective == pytest.approx(-3)
    assert model.remove_rows([0, 1]) == [0]
    assert model.solve().objective == pytest.approx(-3)


def test_exact_fallback_when_residuals_fail(monkeypatch):
    monkeypatch.setattr(LpModel, "_residuals_ok", lambda self, x, tol=1e-6: False)
    model = LpModel([-1, -1], [0, 0], [np.inf, np.inf])
    model.add_rows([({0: 1, 1: 2}, "<=", 4), ({0: 3, 1: 1}, "<=", 6)])
    res = model.solve()
    assert res.exact and res.status == OPTIMAL
    assert model.exact_fallbacks >= 1
    assert float(res.objective) == pytest.approx(-2.8)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        LpModel([1, 2], [0], [1])
    with pytest.raises(ValueError):
        LpModel([1], [2], [1])
    model = LpModel([1], [0], [1])
    with pytest.raises(ValueError):
        model.add_rows([({0: 1}, "<>", 1)])
    with pytest.raises(ValueError):
        model.add_rows([([1, 2], "<=", 1)])


def test_copy_is_independent_and_module_helpers():
    model = LpModel([-1], [0], [5])
    clone = lp.add_rows(model.copy(), [({0: 1}, "<=", 2)])
    assert lp.solve(clone).objective == pytest.approx(-2)
    assert lp.solve(model).objective == pytest.approx(-5)


def test_dump_lp_text():
    model = LpModel([1, -2], [0, 0], [1, np.inf])
    model.add_rows([({0: 1, 1: 1}, ">=", 1)])
    text = dump_lp(model, ["a", "b"])
    assert text.splitlines()[0] == "Minimize"
    assert " obj: +1 a -2 b" in text
    assert " r0: +1 a +1 b >= 1" in text
    assert " 0 <= b <= inf" in text
    assert text.endswith("End")
