"""Partial routes, activation functions and integer L-shaped cuts.

An integer L-shaped cut reads ``theta(U) >= L * W(x)``.  ``W`` is an affine
function of the edge variables that equals one on a target set of integer
solutions and is nonpositive on every other integer solution; ``L`` lower
bounds the recourse that the target solutions place on the customers ``U``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .instance import Route, edge_id, edges


# ---------------------------------------------------------------------------
# partial routes


@dataclass(frozen=True)
class PartialRoute:
    """Ordered customer sets ``S_1 .. S_l`` that a route visits as consecutive blocks.

    Sets with more than one customer are unstructured (their internal order is
    free); two unstructured sets may not be adjacent.
    """

    sets: tuple[frozenset[int], ...]

    def __init__(self, sets: Iterable[Iterable[int]]):
        parts = tuple(frozenset(int(v) for v in s) for s in sets)
        if not parts:
            raise ValueError("a partial route has at least one set")
        seen: set[int] = set()
        for s in parts:
            if not s:
                raise ValueError("partial route sets must be nonempty")
            if 0 in s:
                raise ValueError("the depot cannot belong to a partial route")
            if seen & s:
                raise ValueError("partial route sets must be disjoint")
            seen |= s
        for a, b in zip(parts, parts[1:]):
            if len(a) > 1 and len(b) > 1:
                raise ValueError("two unstructured sets cannot be adjacent")
        object.__setattr__(self, "sets", parts)

    @classmethod
    def from_route(cls, route: Route | Sequence[int]) -> PartialRoute:
        return cls([{v} for v in route])

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i):
        return self.sets[i]

    @property
    def customers(self) -> frozenset[int]:
        return frozenset().union(*self.sets)

    @property
    def size(self) -> int:
        """Number of customers, ``|H|``."""
        return sum(len(s) for s in self.sets)

    def reversed(self) -> PartialRoute:
        return PartialRoute(self.sets[::-1])

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in self.sets)
        return f"PartialRoute({body})"


def _follows_blocks(seq: Sequence[int], h: PartialRoute) -> bool:
    pos = 0
    for part in h.sets:
        if frozenset(seq[pos : pos + len(part)]) != part:
            return False
        pos += len(part)
    return pos == len(seq)


def exactly_adheres(route: Route | Sequence[int], h: PartialRoute) -> bool:
    """The route visits ``S_1, .., S_l`` (or the reverse) as contiguous blocks and nothing else."""
    seq = tuple(route.customers if isinstance(route, Route) else route)
    if frozenset(seq) != h.customers or len(seq) != h.size:
        return False
    return _follows_blocks(seq, h) or _follows_blocks(seq[::-1], h)


def adheres(route: Route | Sequence[int], h: PartialRoute) -> bool:
    """Some contiguous piece of the route exactly adheres to ``h``."""
    seq = tuple(route.customers if isinstance(route, Route) else route)
    m = h.size
    return any(exactly_adheres(seq[i : i + m], h) for i in range(len(seq) - m + 1))


def plan_exactly_adheres(plan: Iterable[Route], h: PartialRoute) -> bool:
    return any(exactly_adheres(r, h) for r in plan)


def plan_adheres(plan: Iterable[Route], h: PartialRoute) -> bool:
    return any(adheres(r, h) for r in plan)


# ---------------------------------------------------------------------------
# affine forms


class AffineForm:
    """``sum_e coeffs[e] * x_e + const`` over edge ids of the complete graph on ``0..n``."""

    __slots__ = ("n", "coeffs", "const")

    def __init__(self, n: int, coeffs: Mapping[int, Fraction] | None = None, const=0):
        self.n = n
        self.coeffs = {e: Fraction(c) for e, c in (coeffs or {}).items() if c != 0}
        self.const = Fraction(const)

    def __add__(self, other: AffineForm) -> AffineForm:
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return AffineForm(self.n, out, self.const + other.const)

    def scaled(self, factor) -> AffineForm:
        f = Fraction(factor)
        return AffineForm(self.n, {e: f * c for e, c in self.coeffs.items()}, f * self.const)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineForm)
            and self.n == other.n
            and self.coeffs == other.coeffs
            and self.const == other.const
        )

    def __hash__(self):
        return hash((self.n, self.key()))

    def key(self) -> tuple:
        return (tuple(sorted(self.coeffs.items())), self.const)

    def __call__(self, x: Sequence) -> Fraction | float:
        return self.evaluate(x)

    def evaluate(self, x: Sequence) -> Fraction | float:
        """Exact for integer or rational ``x``; float for float input."""
        if isinstance(x, np.ndarray) and x.dtype.kind == "f":
            return float(self.const) + sum(float(c) * float(x[e]) for e, c in self.coeffs.items())
        total = self.const
        for e, c in self.coeffs.items():
            val = x[e]
            if isinstance(val, (float, np.floating)):
                return float(self.const) + sum(float(c) * float(x[f]) for f, c in self.coeffs.items())
            total += c * Fraction(int(val) if isinstance(val, np.integer) else val)
        return total

    def dense(self) -> np.ndarray:
        out = np.zeros(len(edges(self.n)))
        for e, c in self.coeffs.items():
            out[e] = float(c)
        return out

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*x{edges(self.n)[e]}" for e, c in sorted(self.coeffs.items()))
        return f"AffineForm({terms or '0'} + {self.const})"


def _inside(n: int, s: Iterable[int]) -> dict[int, Fraction]:
    members = sorted(s)
    return {edge_id(n, u, v): Fraction(1) for u, v in itertools.combinations(members, 2)}


def _between(n: int, a: Iterable[int], b: Iterable[int]) -> dict[int, Fraction]:
    return {edge_id(n, u, v): Fraction(1) for u in a for v in b}


def x_inside(n: int, s: Iterable[int], weight=1, const=0) -> AffineForm:
    """``weight * x(S) + const``."""
    return AffineForm(n, _inside(n, s), 0).scaled(weight) + AffineForm(n, {}, const)


def x_between(n: int, a: Iterable[int], b: Iterable[int], weight=1, const=0) -> AffineForm:
    """``weight * x(A, B) + const``; the depot is the set ``{0}``."""
    return AffineForm(n, _between(n, a, b), 0).scaled(weight) + AffineForm(n, {}, const)


def _tightness(n: int, s: frozenset[int]) -> AffineForm:
    """``x(S) - |S| + 1``: zero iff the edges inside ``S`` form a spanning path on integer points."""
    return x_inside(n, s, 1, 1 - len(s))


def _x_of_h(n: int, h: PartialRoute) -> AffineForm:
    """``x(H) - |H| + 1``."""
    form = AffineForm(n, {}, 1 - h.size)
    for s in h.sets:
        form = form + x_inside(n, s)
    for a, b in zip(h.sets, h.sets[1:]):
        form = form + x_between(n, a, b)
    return form


def _end_term(n: int, end: frozenset[int], neighbour: frozenset[int] | None) -> AffineForm:
    """``x(0, S) + 2 x(S) [+ x(S, neighbour)] - 2|S|`` for an end set of the partial route."""
    form = x_between(n, [0], end) + x_inside(n, end, 2, -2 * len(end))
    if neighbour is not None:
        form = form + x_between(n, end, neighbour)
    return form


def activation_gendreau(x_bar: Sequence, k: int, n: int | None = None) -> AffineForm:
    """Activation that is one exactly at the integer solution ``x_bar``.

    ``1 + x(E(x_bar) minus depot edges) - n + k``.
    """
    x_arr = np.asarray(x_bar)
    if n is None:
        n = int(round((np.sqrt(8 * len(x_arr) + 1) - 1) / 2))
    coeffs = {
        e: Fraction(1)
        for e, (i, _) in enumerate(edges(n))
        if i != 0 and round(float(x_arr[e])) >= 1
    }
    return AffineForm(n, coeffs, 1 - n + k)


def activation_wof_superset(h: PartialRoute, n: int) -> AffineForm:
    """One on integer solutions in which some route adheres to ``h``."""
    sets = h.sets
    ell = len(sets)
    form = AffineForm(n, {}, 1) + _x_of_h(n, h)
    if ell == 3:
        if len(sets[0]) == 1 or len(sets[2]) == 1:
            form = form + _tightness(n, sets[1])
    elif ell == 2 or ell >= 4:
        if len(sets[0]) == 1:
            form = form + _tightness(n, sets[1])
        if len(sets[-1]) == 1:
            form = form + _tightness(n, sets[-2])
    return form


def activation_wof_exact(h: PartialRoute, n: int) -> AffineForm:
    """One on integer solutions with a route that exactly adheres to ``h``."""
    sets = h.sets
    form = activation_wof_superset(h, n)
    if len(sets) == 1:
        return form + _end_term(n, sets[0], None)
    return form + _end_term(n, sets[0], sets[1]) + _end_term(n, sets[-1], sets[-2])


def whs_coefficients(ell: int) -> tuple[list[int], list[int], int]:
    """``(alpha_1..alpha_l, beta_0..beta_l, gamma)`` of the coefficient-table activation."""
    if ell < 1:
        raise ValueError("partial routes have at least one set")
    if ell == 1:
        return [3], [1, 0], 0
    if ell == 2:
        return [4, 4], [1, 3, 1], 1
    if ell == 3:
        return [3, 2, 3], [1, 2, 2, 1], 1
    alpha = [3, 2] + [1] * (ell - 4) + [2, 3]
    beta = [1, 2] + [1] * (ell - 3) + [2, 1]
    return alpha, beta, 1


def activation_whs(h: PartialRoute, n: int) -> AffineForm:
    """Coefficient-table activation for exact adherence.

    ``gamma + sum_i alpha_i (x(S_i) - |S_i| + 1) + sum_i beta_i (x(S_i, S_i+1) - 1)``
    with the depot standing in for ``S_0`` and ``S_l+1``.
    """
    alpha, beta, gamma = whs_coefficients(len(h))
    chain = [frozenset({0})] + list(h.sets) + [frozenset({0})]
    form = AffineForm(n, {}, gamma)
    for a, s in zip(alpha, h.sets):
        form = form + _tightness(n, s).scaled(a)
    for i, b in enumerate(beta):
        if b:
            form = form + x_between(n, chain[i], chain[i + 1], b, -b)
    return form


def activation_set(customers: Iterable[int], k_tilde: int, n: int) -> AffineForm:
    """``1 + x(S) - |S| + k``: one on integer solutions that serve ``S`` with ``k`` path pieces."""
    s = frozenset(customers)
    if not s:
        raise ValueError("set activation needs a nonempty set")
    return x_inside(n, s, 1, 1 - len(s) + k_tilde)


# ---------------------------------------------------------------------------
# cuts

CUT_TAGS = ("gendreau", "route", "pr_ea", "pr_a", "path", "set", "translated", "rci")


@dataclass(frozen=True)
class ILSCut:
    """``theta(support) >= bound * activation(x)``."""

    support: frozenset[int]
    bound: Fraction
    activation: AffineForm
    tag: str

    @property
    def trivial(self) -> bool:
        return self.bound == 0

    def key(self) -> tuple:
        return (self.tag, tuple(sorted(self.support)), self.bound, self.activation.key())

    def lhs(self, theta: Sequence) -> float:
        return sum(float(theta[v - 1]) for v in self.support)

    def rhs(self, x: Sequence):
        return self.bound * self.activation.evaluate(x)

    def violation(self, x: Sequence, theta: Sequence) -> float:
        """Positive when ``(x, theta)`` violates the cut."""
        return float(self.rhs(x)) - self.lhs(theta)

    def holds_exactly(self, x: Sequence, theta: Sequence) -> bool:
        lhs = sum((Fraction(theta[v - 1]) for v in self.support), Fraction(0))
        return lhs >= self.bound * Fraction(self.activation.evaluate(x))

    def row(self, n: int) -> tuple[dict[int, float], dict[int, float], float]:
        """Row ``theta(U) - L * (a . x) >= L * b`` as ``(x coefficients, theta coefficients, rhs)``.

        Theta coefficients are keyed by customer id.
        """
        x_coef = {e: -float(self.bound * c) for e, c in self.activation.coeffs.items()}
        t_coef = {v: 1.0 for v in self.support}
        return x_coef, t_coef, float(self.bound * self.activation.const)


def make_cut(support: Iterable[int], bound, activation: AffineForm, tag: str) -> ILSCut:
    bound = Fraction(bound)
    if bound < 0:
        raise ValueError("cut bound must be nonnegative")
    if tag not in CUT_TAGS:
        raise ValueError(f"unknown cut tag {tag!r}")
    u = frozenset(int(v) for v in support)
    if not u or 0 in u:
        raise ValueError("cut support must be a nonempty set of customers")
    return ILSCut(u, bound, activation, tag)


def translate_cut(cut: ILSCut, lb) -> ILSCut:
    """Shift a cut to the translated variables ``theta - lb``.

    ``lb`` is a scalar lower bound on ``theta(U)`` or per-customer bounds
    (mapping or a sequence indexed by ``customer - 1``).
    """
    if isinstance(lb, Mapping):
        total = sum((Fraction(lb.get(v, 0)) for v in cut.support), Fraction(0))
    elif isinstance(lb, (int, float, Fraction)):
        total = Fraction(lb)
    else:
        total = sum((Fraction(lb[v - 1]) for v in cut.support), Fraction(0))
    if total < 0:
        raise ValueError("lower bounds must be nonnegative")
    return ILSCut(cut.support, max(cut.bound - total, Fraction(0)), cut.activation, "translated")


def route_cut(route: Route | Sequence[int], value, support: Iterable[int], n: int, activation: str = "whs") -> ILSCut:
    """Exact-adherence cut of a full route, built through its partial route."""
    h = PartialRoute.from_route(route)
    form = activation_whs(h, n) if activation == "whs" else activation_wof_exact(h, n)
    return make_cut(support, value, form, "route")


def path_cut(route: Route | Sequence[int], value, n: int, *, monotone: bool = False) -> ILSCut:
    """``theta(V(R)) >= Q(R) * W_superset(x; R)``.

    Valid only when the disaggregation is monotone, which callers must assert.
    """
    if not monotone:
        raise ValueError("path cuts need a monotone disaggregation")
    h = PartialRoute.from_route(route)
    return make_cut(h.customers, value, activation_wof_superset(h, n), "path")


def adherence_cut(h: PartialRoute, value, n: int, *, monotone: bool = False) -> ILSCut:
    """``theta(V(H)) >= L(H) * W_superset(x; H)``, gated like :func:`path_cut`."""
    if not monotone:
        raise ValueError("adherence cuts need a monotone disaggregation")
    return make_cut(h.customers, value, activation_wof_superset(h, n), "pr_a")
