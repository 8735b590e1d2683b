"""Look inside one root relaxation: support graph, block-cut forest, partial routes.

Run with ``python3 demos/partial_routes_from_lp.py``.  The script solves the
root LP of a generated instance with only degree rows and rounded capacity
rows, then prints how the fractional support splits into blocks and the
recourse bound carried by each partial route read off the forest.
"""
import numpy as np

from vrpsd import generate_instance
from vrpsd.instance import edges, rci_rhs
from vrpsd.lp import OPTIMAL, LpModel
from vrpsd.separation import build_block_cut_forest, get_partial_routes, partial_route_cut, separate_rci

inst = generate_instance(14, 3, 50, 10, "independent", seed=4, fill=0.8, cv=0.4)
n = inst.n
edge_list = edges(n)
cost = inst.edge_costs_float
upper = [2.0 if i == 0 else 1.0 for i, _ in edge_list]
model = LpModel(cost, np.zeros(len(edge_list)), upper)

degree_rows = []
for v in range(1, n + 1):
    degree_rows.append(({e: 1 for e, (i, j) in enumerate(edge_list) if v in (i, j)}, "=", 2))
degree_rows.append(({e: 1 for e, (i, _) in enumerate(edge_list) if i == 0}, "=", 2 * inst.fleet))
model.add_rows(degree_rows)

# cutting loop on rounded capacity inequalities only
for round_no in range(50):
    res = model.solve()
    assert res.status == OPTIMAL
    violated = separate_rci(res.x, inst, at_integer=False)
    if not violated:
        break
    rows = []
    for s in violated:
        inside = {e: 1 for e, (i, j) in enumerate(edge_list) if i in s and j in s}
        rows.append((inside, "<=", len(s) - rci_rhs(s, inst)))
    model.add_rows(rows)
print(f"root bound without recourse: {res.objective:.3f} after {round_no} capacity rounds")

support = {edge_list[e]: round(float(v), 3) for e, v in enumerate(res.x) if v > 1e-6}
print("fractional support:", {k: v for k, v in support.items() if 1e-6 < v < 1 - 1e-6})

forest = build_block_cut_forest(res.x, n)
for tree in forest.trees:
    nodes = ", ".join(f"{node.kind} {sorted(node.vertices)}" for node in tree.nodes)
    print(f"tree over {sorted(tree.customers)}: depot flow {tree.depot_flow:.2f}, path {tree.is_path()}")
    print(f"  nodes: {nodes}")
    if abs(tree.depot_flow - 2) > 1e-6:
        print("  skipped: partial routes come only from trees with depot flow 2")

for h in get_partial_routes(res.x, n):
    cut = partial_route_cut(h, "d2", inst)
    shown = " -> ".join(str(sorted(s)) for s in h)
    print(f"partial route {shown}: recourse bound {float(cut.bound):.3f}")
