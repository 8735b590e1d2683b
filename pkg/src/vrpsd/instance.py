"""Instances of the vehicle routing problem with scenario-based stochastic demands.

An instance lives on the complete graph over vertices ``0..n`` where ``0`` is
the depot.  All data that feeds the recourse computations (costs, capacity,
demands, probabilities) is held as :class:`fractions.Fraction` so that
recourse values can be compared exactly.

Edge vectors are plain 1-D sequences indexed by the edge ids returned by
:func:`edges`: edges ``(i, j)`` with ``i < j`` in lexicographic order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

PROBABILITY_TOLERANCE = 1e-9


class InstanceError(ValueError):
    """Raised for malformed or invariant-violating instance data."""


class InfeasiblePointError(ValueError):
    """Raised when an integer edge vector does not encode a routing plan."""


class SubtourError(InfeasiblePointError):
    """An integer edge vector contains cycles that avoid the depot.

    ``components`` lists the customer sets of the offending cycles.
    """

    def __init__(self, components: list[frozenset[int]]):
        self.components = components
        pretty = ", ".join(str(sorted(c)) for c in components)
        super().__init__(f"subtour among customers {pretty}")


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise InstanceError(f"not a number: {value!r}")


# ---------------------------------------------------------------------------
# edges


@lru_cache(maxsize=None)
def edges(n: int) -> tuple[tuple[int, int], ...]:
    """All edges of the complete graph on ``0..n`` as ``(i, j)`` with ``i < j``."""
    return tuple((i, j) for i in range(n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def edge_ids(n: int) -> dict[tuple[int, int], int]:
    return {e: k for k, e in enumerate(edges(n))}


def edge_id(n: int, u: int, v: int) -> int:
    if u > v:
        u, v = v, u
    return edge_ids(n)[(u, v)]


# ---------------------------------------------------------------------------
# routes


@dataclass(frozen=True)
class DirectedRoute:
    """A route with a fixed direction of travel; the depot is implicit at both ends."""

    customers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "customers", tuple(int(v) for v in self.customers))
        if not self.customers:
            raise ValueError("a route visits at least one customer")
        if len(set(self.customers)) != len(self.customers):
            raise ValueError(f"repeated customer in {self.customers}")

    def __len__(self) -> int:
        return len(self.customers)

    def __iter__(self):
        return iter(self.customers)

    def reversed(self) -> DirectedRoute:
        return DirectedRoute(self.customers[::-1])

    def undirected(self) -> Route:
        return Route(self.customers)


@dataclass(frozen=True, init=False)
class Route:
    """An undirected route.

    Stored in its canonical orientation (first customer id not larger than the
    last), which makes equality and hashing reversal invariant.
    """

    customers: tuple[int, ...]

    def __init__(self, customers: Iterable[int]):
        seq = tuple(int(v) for v in customers)
        if not seq:
            raise ValueError("a route visits at least one customer")
        if len(set(seq)) != len(seq):
            raise ValueError(f"repeated customer in {seq}")
        if seq[0] > seq[-1]:
            seq = seq[::-1]
        object.__setattr__(self, "customers", seq)

    def __len__(self) -> int:
        return len(self.customers)

    def __iter__(self):
        return iter(self.customers)

    @property
    def customer_set(self) -> frozenset[int]:
        return frozenset(self.customers)

    def forward(self) -> DirectedRoute:
        return DirectedRoute(self.customers)

    def backward(self) -> DirectedRoute:
        return DirectedRoute(self.customers[::-1])


@dataclass(frozen=True)
class RoutingPlan:
    routes: frozenset[Route]

    def __init__(self, routes: Iterable[Route | Sequence[int]]):
        rs = frozenset(r if isinstance(r, Route) else Route(r) for r in routes)
        seen: set[int] = set()
        for r in rs:
            if seen & r.customer_set:
                raise ValueError("routes of a plan must visit disjoint customers")
            seen |= r.customer_set
        object.__setattr__(self, "routes", rs)

    def __len__(self) -> int:
        return len(self.routes)

    def __iter__(self):
        return iter(sorted(self.routes, key=lambda r: r.customers))

    @property
    def customers(self) -> frozenset[int]:
        return frozenset(v for r in self.routes for v in r.customers)


# ---------------------------------------------------------------------------
# instance


@dataclass(frozen=True)
class ScenarioSet:
    """Demand scenarios: ``demands[xi][v - 1]`` is the demand of customer ``v``."""

    probs: tuple[Fraction, ...]
    demands: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        probs = tuple(_frac(p) for p in self.probs)
        demands = tuple(tuple(_frac(d) for d in row) for row in self.demands)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "demands", demands)
        if not probs:
            raise InstanceError("at least one scenario is required")
        if len(demands) != len(probs):
            raise InstanceError("one demand vector per scenario is required")
        if any(p < 0 for p in probs):
            raise InstanceError("probabilities must be nonnegative")
        if sum(probs) != 1:
            raise InstanceError(f"probabilities sum to {float(sum(probs)):g}")
        if any(d < 0 for row in demands for d in row):
            raise InstanceError("demands must be nonnegative")

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class Instance:
    n_customers: int
    cost: tuple[tuple[Fraction, ...], ...]
    capacity: Fraction
    fleet: int
    scenarios: ScenarioSet
    objective_offset: Fraction = Fraction(0)
    name: str = field(default="", compare=False)

    depot = 0

    def __post_init__(self):
        n = self.n_customers
        cost = tuple(tuple(_frac(c) for c in row) for row in self.cost)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "capacity", _frac(self.capacity))
        object.__setattr__(self, "objective_offset", _frac(self.objective_offset))
        if n < 1:
            raise InstanceError("at least one customer is required")
        if len(cost) != n + 1 or any(len(row) != n + 1 for row in cost):
            raise InstanceError(f"cost matrix must be {n + 1}x{n + 1}")
        for i in range(n + 1):
            if cost[i][i] != 0:
                raise InstanceError("cost matrix must have a zero diagonal")
            for j in range(i + 1, n + 1):
                if cost[i][j] != cost[j][i]:
                    raise InstanceError(f"cost matrix is not symmetric at ({i}, {j})")
                if cost[i][j] < 0:
                    raise InstanceError("costs must be nonnegative")
        if self.capacity <= 0:
            raise InstanceError("capacity must be positive")
        if int(self.fleet) != self.fleet or self.fleet < 1:
            raise InstanceError("fleet size must be a positive integer")
        if any(len(row) != n for row in self.scenarios.demands):
            raise InstanceError(f"each scenario needs {n} customer demands")
        for v in self.customers:
            if self.expected_demand(v) <= 0:
                raise InstanceError(f"customer {v} has zero expected demand")

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return self.n_customers

    @property
    def customers(self) -> range:
        return range(1, self.n_customers + 1)

    @property
    def n_scenarios(self) -> int:
        return len(self.scenarios)

    @property
    def probs(self) -> tuple[Fraction, ...]:
        return self.scenarios.probs

    def demand(self, v: int, xi: int) -> Fraction:
        return self.scenarios.demands[xi][v - 1]

    def depot_cost(self, v: int) -> Fraction:
        return self.cost[0][v]

    @cached_property
    def _expected(self) -> tuple[Fraction, ...]:
        s = self.scenarios
        return (Fraction(0),) + tuple(
            sum((p * row[v - 1] for p, row in zip(s.probs, s.demands)), Fraction(0))
            for v in self.customers
        )

    def expected_demand(self, customers: int | Iterable[int]) -> Fraction:
        """Expected demand of one customer or the sum over a set of customers."""
        if isinstance(customers, (int, np.integer)):
            return self._expected[int(customers)]
        return sum((self._expected[v] for v in customers), Fraction(0))

    @cached_property
    def edge_costs(self) -> tuple[Fraction, ...]:
        return tuple(self.cost[i][j] for i, j in edges(self.n))

    @cached_property
    def edge_costs_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.edge_costs])

    @cached_property
    def scaled_demands(self) -> tuple[np.ndarray, int]:
        """Demands and capacity over a common integer scale.

        Returns ``(D, cap)`` where ``D[xi, v]`` (column 0 is the depot, zero)
        and ``cap`` are integers with the same ratios as the rational data.
        Failure counting only depends on these ratios.
        """
        s = self.scenarios
        dens = [self.capacity.denominator] + [d.denominator for row in s.demands for d in row]
        scale = math.lcm(*dens)
        mat = [[0] + [int(d * scale) for d in row] for row in s.demands]
        cap = int(self.capacity * scale)
        big = max([cap] + [sum(row) for row in mat]) * (self.n + 2)
        dtype = np.int64 if big < 2**62 else object
        return np.array(mat, dtype=dtype), cap

    @cached_property
    def prob_numerators(self) -> tuple[np.ndarray, int]:
        """Probabilities as integer numerators over a common denominator."""
        den = math.lcm(*[p.denominator for p in self.probs])
        nums = [int(p * den) for p in self.probs]
        return np.array(nums, dtype=np.int64 if den < 2**40 else object), den

    def plan_cost(self, plan: RoutingPlan) -> Fraction:
        """First-stage travel cost of a plan."""
        total = Fraction(0)
        for r in plan.routes:
            seq = (0,) + r.customers + (0,)
            total += sum((self.cost[a][b] for a, b in zip(seq, seq[1:])), Fraction(0))
        return total

    def with_scenarios(self, scenarios: ScenarioSet) -> Instance:
        return replace(self, scenarios=scenarios)


# ---------------------------------------------------------------------------
# parsing and writing


def _normalize_probs(probs: list[Fraction]) -> list[Fraction]:
    total = sum(probs, Fraction(0))
    if total == 1:
        return probs
    if abs(float(total) - 1.0) <= PROBABILITY_TOLERANCE and total > 0:
        return [p / total for p in probs]
    raise InstanceError(f"probabilities sum to {float(total):g}")


def euclidean_costs(coords: Sequence[Sequence[float]], digits: int | None = 0) -> list[list[Fraction]]:
    """Euclidean distance matrix.

    ``digits`` controls rounding: ``0`` gives nearest integers, ``None``
    keeps the float distance converted exactly.
    """
    pts = [tuple(float(c) for c in p) for p in coords]
    out = []
    for a in pts:
        row = []
        for b in pts:
            dist = math.dist(a, b)
            if digits is None:
                row.append(Fraction(dist))
            elif digits == 0:
                row.append(Fraction(int(math.floor(dist + 0.5))))
            else:
                row.append(Fraction(repr(round(dist, digits))))
        out.append(row)
    return out


def instance_from_dict(doc: Mapping, distance_digits: int | None = 0) -> Instance:
    try:
        n = int(doc["n"])
        capacity = _frac(doc["capacity"])
        fleet = int(doc["fleet"])
        if "costs" in doc:
            cost = [[_frac(c) for c in row] for row in doc["costs"]]
        elif "coords" in doc:
            cost = euclidean_costs(doc["coords"], distance_digits)
        else:
            raise InstanceError("document needs 'costs' or 'coords'")
        sc = doc["scenarios"]
        probs = _normalize_probs([_frac(p) for p in sc["probs"]])
        demands = [[_frac(d) for d in row] for row in sc["demands"]]
        offset = _frac(doc.get("offset", 0))
        name = str(doc.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance document: {exc!r}") from exc
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"malformed instance document: {exc}") from exc
    return Instance(n, cost, capacity, fleet, ScenarioSet(probs, demands), offset, name)


def parse_instance(text: str, distance_digits: int | None = 0) -> Instance:
    """Parse the JSON instance document.

    Numbers may be JSON numbers or strings such as ``"3/2"``; decimal
    literals are read exactly.
    """
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    return instance_from_dict(doc, distance_digits)


def load_instance(path, distance_digits: int | None = 0) -> Instance:
    with open(path, encoding="utf-8") as fh:
        inst = parse_instance(fh.read(), distance_digits)
    if not inst.name:
        inst = replace(inst, name=str(path).rsplit("/", 1)[-1].removesuffix(".json"))
    return inst


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def instance_to_dict(inst: Instance) -> dict:
    doc = {
        "n": inst.n,
        "capacity": _num(inst.capacity),
        "fleet": inst.fleet,
        "costs": [[_num(c) for c in row] for row in inst.cost],
        "scenarios": {
            "probs": [_num(p) for p in inst.probs],
            "demands": [[_num(d) for d in row] for row in inst.scenarios.demands],
        },
    }
    if inst.objective_offset:
        doc["offset"] = _num(inst.objective_offset)
    if inst.name:
        doc["name"] = inst.name
    return doc


def dump_instance(inst: Instance) -> str:
    """Canonical JSON text: fixed key order, exact rationals, trailing newline."""
    doc = instance_to_dict(inst)
    lines = ["{"]
    items = list(doc.items())
    for k, (key, val) in enumerate(items):
        sep = "," if k < len(items) - 1 else ""
        if key == "costs":
            rows = ",\n    ".join(json.dumps(r) for r in val)
            lines.append(f'  "costs": [\n    {rows}\n  ]{sep}')
        elif key == "scenarios":
            rows = ",\n      ".join(json.dumps(r) for r in val["demands"])
            lines.append(
                f'  "scenarios": {{\n    "probs": {json.dumps(val["probs"])},\n'
                f'    "demands": [\n      {rows}\n    ]\n  }}{sep}'
            )
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{sep}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# generation


def generate_instance(
    n: int,
    k: int,
    capacity: int,
    n_scenarios: int,
    mode: str = "independent",
    seed: int | None = 0,
    *,
    means: Sequence[float] | None = None,
    sigma: float | Sequence[float] | None = None,
    cv: float = 0.3,
    fill: float = 0.7,
    grid: int = 100,
    correlation_length: float | None = None,
    name: str = "",
) -> Instance:
    """Random instance with normally distributed scenario demands.

    Customers and the depot get integer coordinates in ``[0, grid]^2`` and
    costs are rounded Euclidean distances.  Mean demands are drawn so that
    the total expected load is roughly ``fill * k * capacity``.  The standard
    deviation of customer ``v`` is ``cv * mean[v]`` unless ``sigma`` is
    given.  Samples are clamped to ``[0, capacity]`` and rounded.

    In ``correlated`` mode demands are drawn jointly with correlation
    ``exp(-dist(i, j) / L)``, where ``L`` defaults to the mean distance
    between customers.
    """
    if n < 1 or n_scenarios < 1 or k < 1 or capacity <= 0:
        raise InstanceError("need n >= 1, k >= 1, N >= 1 and positive capacity")
    if mode not in ("independent", "correlated"):
        raise InstanceError(f"unknown generator mode {mode!r}")
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, grid + 1, size=(n + 1, 2))
    pts[0] = grid // 2
    cost = euclidean_costs(pts.tolist(), 0)

    if means is None:
        hi = max(1, int(round(2 * fill * k * capacity / n)) - 1)
        hi = min(hi, int(capacity))
        mu = rng.integers(1, hi + 1, size=n).astype(float)
    else:
        mu = np.asarray(means, dtype=float)
        if mu.shape != (n,):
            raise InstanceError(f"need {n} means")
    if sigma is None:
        sd = cv * mu
    else:
        sd = np.broadcast_to(np.asarray(sigma, dtype=float), (n,)).copy()
    if np.any(sd < 0):
        raise InstanceError("standard deviations must be nonnegative")

    if mode == "independent":
        samples = rng.normal(mu, sd, size=(n_scenarios, n)) if np.any(sd > 0) else np.tile(mu, (n_scenarios, 1))
    else:
        cust = pts[1:].astype(float)
        dist = np.sqrt(((cust[:, None, :] - cust[None, :, :]) ** 2).sum(-1))
        if correlation_length is None:
            off = dist[~np.eye(n, dtype=bool)]
            correlation_length = float(off.mean()) if off.size and off.mean() > 0 else 1.0
        rho = np.exp(-dist / correlation_length)
        cov = rho * np.outer(sd, sd)
        samples = rng.multivariate_normal(mu, cov, size=n_scenarios, method="eigh")
    dem = np.rint(np.clip(samples, 0, capacity)).astype(int)
    for v in range(n):
        if not dem[:, v].any():
            # keep the expected demand positive
            dem[0, v] = 1
    probs = [Fraction(1, n_scenarios)] * n_scenarios
    return Instance(
        n,
        cost,
        Fraction(capacity),
        k,
        ScenarioSet(probs, dem.tolist()),
        name=name or f"gen-n{n}-k{k}-N{n_scenarios}-{mode}-s{seed}",
    )


def generate_instance_from_params(params: Mapping) -> Instance:
    """Dictionary front end to :func:`generate_instance` (keys n, k, C, N, mode, seed)."""
    p = dict(params)
    try:
        n = p.pop("n")
        k = p.pop("k", 1)
        cap = p.pop("C", p.pop("capacity", 100))
        big_n = p.pop("N", p.pop("n_scenarios", 1))
    except KeyError as exc:
        raise InstanceError(f"missing parameter {exc}") from exc
    return generate_instance(n, k, cap, big_n, **p)


# ---------------------------------------------------------------------------
# preprocessing and rounded capacities


def preprocess_demands(inst: Instance) -> Instance:
    """Reduce every demand above capacity by whole vehicle loads.

    A demand ``d > C`` always causes ``q = ceil(d / C) - 1`` extra round
    trips to the depot that no routing decision can avoid.  Their expected
    cost moves into ``objective_offset``.
    """
    cap = inst.capacity
    offset = inst.objective_offset
    rows = []
    changed = False
    for xi, row in enumerate(inst.scenarios.demands):
        new = list(row)
        for idx, d in enumerate(row):
            if d > cap:
                q = math.ceil(d / cap) - 1
                new[idx] = d - q * cap
                offset += q * 2 * inst.depot_cost(idx + 1) * inst.probs[xi]
                changed = True
        rows.append(tuple(new))
    if not changed:
        return inst
    return replace(inst, scenarios=ScenarioSet(inst.probs, tuple(rows)), objective_offset=offset)


def is_preprocessed(inst: Instance) -> bool:
    return all(d <= inst.capacity for row in inst.scenarios.demands for d in row)


def rci_rhs(customers: Iterable[int], inst: Instance) -> int:
    """Minimum number of vehicles needed for a set, ``ceil(expected demand / C)``."""
    s = list(customers)
    if not s:
        raise ValueError("rounded capacity of an empty set is undefined")
    return math.ceil(inst.expected_demand(s) / inst.capacity)


def plan_is_feasible(plan: RoutingPlan, inst: Instance) -> bool:
    """Exactly ``k`` routes covering every customer, each within expected capacity."""
    if len(plan) != inst.fleet or plan.customers != frozenset(inst.customers):
        return False
    return all(inst.expected_demand(r.customers) <= inst.capacity for r in plan.routes)


# ---------------------------------------------------------------------------
# encoding and decoding


def edges_from_plan(plan: RoutingPlan, n: int) -> np.ndarray:
    """Integer edge vector of a plan; a single-customer route uses its depot edge twice."""
    x = np.zeros(len(edges(n)), dtype=int)
    for r in plan.routes:
        seq = (0,) + r.customers + (0,)
        for a, b in zip(seq, seq[1:]):
            x[edge_id(n, a, b)] += 1
    return x


def _as_int_vector(x: Sequence, tol: float = 1e-6) -> list[int]:
    out = []
    for val in x:
        f = float(val)
        r = int(round(f))
        if abs(f - r) > tol:
            raise InfeasiblePointError(f"edge vector is not integral ({f})")
        out.append(r)
    return out


def routing_plan_from_edges(x: Sequence, n: int) -> RoutingPlan:
    """Decode an integer edge vector into the routing plan it represents.

    Raises :class:`SubtourError` when some cycles avoid the depot and
    :class:`InfeasiblePointError` for any other degree violation.
    """
    xs = _as_int_vector(x)
    if len(xs) != len(edges(n)):
        raise InfeasiblePointError(f"edge vector has length {len(xs)}, expected {len(edges(n))}")
    adj: dict[int, list[int]] = {v: [] for v in range(n + 1)}
    for (i, j), val in zip(edges(n), xs):
        if val < 0 or val > 2 or (val == 2 and i != 0):
            raise InfeasiblePointError(f"edge ({i}, {j}) carries {val}")
        for _ in range(val):
            adj[i].append(j)
            adj[j].append(i)
    for v in range(1, n + 1):
        if len(adj[v]) != 2:
            raise InfeasiblePointError(f"customer {v} has degree {len(adj[v])}")

    routes = []
    visited: set[int] = set()
    starts = sorted(adj[0])
    used_start: dict[int, int] = {}
    for s in starts:
        if s in visited:
            continue
        seq = [s]
        prev, cur = 0, s
        while True:
            nbrs = list(adj[cur])
            nbrs.remove(prev)
            nxt = nbrs[0]
            if nxt == 0:
                break
            seq.append(nxt)
            prev, cur = cur, nxt
        visited.update(seq)
        used_start[s] = used_start.get(s, 0) + 1
        routes.append(Route(seq))

    rest = set(range(1, n + 1)) - visited
    if rest:
        comps = []
        while rest:
            v = min(rest)
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w and w not in comp:
                        comp.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
            rest -= comp
        raise SubtourError(comps)
    return RoutingPlan(routes)
