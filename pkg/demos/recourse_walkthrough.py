"""Walk through exact recourse values on a five-customer instance.

Run with ``python3 demos/recourse_walkthrough.py``.  The instance is small
enough to print every number and check it by hand.  It shows that a route can
cost less in expected recourse than one of its own subroutes, why that breaks
cuts that assume the opposite, and how the per-set lower bound repairs it.
"""
from pathlib import Path

from vrpsd import load_instance
from vrpsd.instance import RoutingPlan, edges_from_plan
from vrpsd.recourse import check_weak_superadditivity, disaggregate, q_classical, set_lb
from vrpsd.separation import set_cut

HERE = Path(__file__).resolve().parent
inst = load_instance(HERE.parent / "tests" / "data" / "counterexample.json")

print(f"instance {inst.name}: {inst.n} customers, {inst.fleet} vehicles, capacity {inst.capacity}")
for xi, (p, row) in enumerate(zip(inst.probs, inst.scenarios.demands)):
    print(f"  scenario {xi + 1} (p={p}): demands {[str(d) for d in row]}")

# A route and the subroute obtained by dropping its first customer.
route, subroute = [1, 2, 3, 4], [2, 3, 4]
for seq in (route, subroute):
    value, directed = q_classical(seq, inst)
    print(f"expected recourse of {seq}: {value} (cheaper direction {list(directed)})")

oracle = lambda seq: q_classical(seq, inst)[0]  # noqa: E731
print("weakly superadditive along the route:", check_weak_superadditivity(oracle, route))

# Two ways of spreading the route's recourse over its customers.
for mode in ("d1", "d2"):
    parts = disaggregate(route, mode, inst)
    print(f"{mode}: " + ", ".join(f"theta_{v}={parts[v]}" for v in route))

# Under d1 all recourse sits on customer 1, so customers 2..4 carry nothing
# although serving them alone costs 2.  The set cut on {2, 3, 4} sees this.
plan = RoutingPlan([route, [5]])
x = edges_from_plan(plan, inst.n)
cut = set_cut(subroute, inst, 1)
print(f"set lower bound for {subroute} with one vehicle: {set_lb(subroute, 1, inst)}")
for mode in ("d1", "d2"):
    theta = [0] * inst.n
    for r in plan.routes:
        for v, val in disaggregate(r, mode, inst).items():
            theta[v - 1] = val
    print(f"  set cut under {mode}: {'holds' if cut.holds_exactly(x, theta) else 'violated'}")
