"""Bounded-variable simplex for the branch-and-cut master problem.

Rows are ``a x (<=|>=|=) b``; every row gets a slack column so that the
initial basis is the identity.  The solver keeps an explicit basis inverse
and supports:

* a dual simplex, used whenever the basis is dual feasible (the normal case
  after adding cuts or tightening bounds),
* a primal simplex, used to finish from a primal feasible basis and as the
  clean-up phase,
* Bland's rule after a run of degenerate pivots,
* periodic refactorization, and an exact rational re-solve from the same
  basis when the floating-point answer fails its residual checks.

Variables whose reduced cost points towards an infinite bound are boxed
temporarily; if the box is still binding at the end the problem is reported
as ``unbounded-guarded``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

INF = float("inf")
ARTIFICIAL_BOUND = 1e7

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded-guarded"
ITERATION_LIMIT = "iteration-limit"

Row = tuple  # (coefficients, sense, rhs)


@dataclass
class LpResult:
    status: str
    objective: float
    x: np.ndarray
    duals: np.ndarray
    reduced_costs: np.ndarray
    iterations: int
    basis: np.ndarray = field(repr=False)
    exact: bool = False


class _Tol:
    def __init__(self, exact: bool):
        if exact:
            self.primal = self.dual = self.pivot = self.zero = 0
        else:
            self.primal = 1e-9
            self.dual = 1e-9
            self.pivot = 1e-9
            self.zero = 1e-12


class LpModel:
    """Minimize ``c x`` subject to rows and variable bounds.

    The model remembers its basis between solves, so adding rows, changing
    bounds and re-solving warm starts from the previous optimum.
    """

    refactor_every = 60
    bland_after = 40

    def __init__(self, cost: Sequence[float], lower: Sequence[float], upper: Sequence[float]):
        self.c = np.asarray(cost, dtype=float).copy()
        self.n = len(self.c)
        self.lo = np.asarray(lower, dtype=float).copy()
        self.hi = np.asarray(upper, dtype=float).copy()
        if self.lo.shape != (self.n,) or self.hi.shape != (self.n,):
            raise ValueError("bounds must match the number of variables")
        if np.any(self.lo > self.hi):
            raise ValueError("lower bound above upper bound")
        self.A = np.zeros((0, self.n))
        self.b = np.zeros(0)
        self.sense: list[str] = []
        # basis state over n structural + m slack columns
        self.basis = np.zeros(0, dtype=int)
        self.Binv = np.zeros((0, 0))
        self.x = np.where(np.isfinite(self.lo), self.lo, np.where(np.isfinite(self.hi), self.hi, 0.0))
        self._pivots_since_refactor = 0
        self.total_iterations = 0
        self.exact_fallbacks = 0

    # -- model edits --------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self.n

    @property
    def n_rows(self) -> int:
        return len(self.b)

    def _dense(self, coeffs) -> np.ndarray:
        if isinstance(coeffs, Mapping):
            row = np.zeros(self.n)
            for j, v in coeffs.items():
                row[int(j)] += float(v)
            return row
        row = np.asarray(coeffs, dtype=float)
        if row.shape != (self.n,):
            raise ValueError("dense row has the wrong length")
        return row

    def _slack_bounds(self, sense: str) -> tuple[float, float]:
        if sense == "<=":
            return 0.0, INF
        if sense == ">=":
            return -INF, 0.0
        if sense == "=":
            return 0.0, 0.0
        raise ValueError(f"unknown row sense {sense!r}")

    def add_rows(self, rows: Iterable[Row]) -> list[int]:
        """Append rows; the new slacks enter the basis, keeping the old basis warm."""
        rows = list(rows)
        if not rows:
            return []
        dense = np.array([self._dense(c) for c, _, _ in rows])
        rhs = np.array([float(r) for _, _, r in rows])
        senses = [s for _, s, _ in rows]
        for s in senses:
            self._slack_bounds(s)
        m0, k = self.n_rows, len(rows)
        # slack values of the new rows at the current point
        x_struct = self.x[: self.n]
        slack_vals = rhs - dense @ x_struct
        # basis inverse extension: B' = [[B, 0], [A_new[:, basis], I]]
        old_basis = self.basis
        struct_basic = old_basis < self.n
        a_b = np.zeros((k, m0))
        a_b[:, struct_basic] = dense[:, old_basis[struct_basic]]
        new_binv = np.zeros((m0 + k, m0 + k))
        new_binv[:m0, :m0] = self.Binv
        new_binv[m0:, :m0] = -a_b @ self.Binv
        new_binv[m0:, m0:] = np.eye(k)
        # slack column ids shift: old slack j = n + i stays n + i
        self.A = np.vstack([self.A, dense])
        self.b = np.concatenate([self.b, rhs])
        self.sense.extend(senses)
        self.x = np.concatenate([self.x, slack_vals])
        self.basis = np.concatenate([old_basis, self.n + m0 + np.arange(k)])
        self.Binv = new_binv
        return list(range(m0, m0 + k))

    def remove_rows(self, indices: Iterable[int]) -> list[int]:
        """Drop rows whose slack is basic; returns the old indices of the rows kept, in order."""
        m = self.n_rows
        drop = set()
        pos = {int(j): r for r, j in enumerate(self.basis)}
        for i in indices:
            if self.n + i in pos:
                drop.add(int(i))
        if not drop:
            return list(range(m))
        keep_rows = [i for i in range(m) if i not in drop]
        keep_pos = [r for r, j in enumerate(self.basis) if not (j >= self.n and (j - self.n) in drop)]
        self.Binv = self.Binv[np.ix_(keep_pos, keep_rows)]
        old_basis = self.basis[keep_pos]
        remap = {i: k for k, i in enumerate(keep_rows)}
        self.basis = np.array(
            [j if j < self.n else self.n + remap[j - self.n] for j in old_basis], dtype=int
        )
        self.A = self.A[keep_rows]
        self.b = self.b[keep_rows]
        self.sense = [self.sense[i] for i in keep_rows]
        self.x = np.concatenate([self.x[: self.n], self.x[self.n :][keep_rows]])
        return keep_rows

    def set_bounds(self, j: int, lower: float, upper: float) -> None:
        if lower > upper:
            raise ValueError("lower bound above upper bound")
        self.lo[j], self.hi[j] = float(lower), float(upper)
        if not self._is_basic(j):
            # keep the nonbasic variable on the same side
            self.x[j] = self._snap(j, self.x[j])

    def bounds(self, j: int) -> tuple[float, float]:
        return float(self.lo[j]), float(self.hi[j])

    def _is_basic(self, j: int) -> bool:
        return bool(np.any(self.basis == j))

    def _snap(self, j: int, value: float) -> float:
        lo, hi = self._full_bounds()
        if value <= lo[j]:
            return lo[j] if np.isfinite(lo[j]) else hi[j]
        if value >= hi[j]:
            return hi[j] if np.isfinite(hi[j]) else lo[j]
        # nonbasic values sit at a bound; pick the nearer one
        if np.isfinite(lo[j]) and (not np.isfinite(hi[j]) or value - lo[j] <= hi[j] - value):
            return lo[j]
        return hi[j] if np.isfinite(hi[j]) else 0.0

    def _full_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        sl = [self._slack_bounds(s) for s in self.sense]
        lo = np.concatenate([self.lo, np.array([a for a, _ in sl])])
        hi = np.concatenate([self.hi, np.array([b for _, b in sl])])
        return lo, hi

    def copy(self) -> LpModel:
        other = LpModel.__new__(LpModel)
        other.__dict__ = {k: (v.copy() if hasattr(v, "copy") else v) for k, v in self.__dict__.items()}
        return other

    # -- solving ---------------------------------------------------------------

    def solve(self, max_iter: int = 50000) -> LpResult:
        if self.n_rows == 0:
            return self._solve_unconstrained()
        core = _Core.from_model(self, exact=False)
        res = core.run(max_iter)
        if res.status == OPTIMAL and not self._residuals_ok(res.x):
            log.info("LP residual check failed; refactorizing")
            core.refactor()
            res = core.run(max_iter)
        if res.status in (OPTIMAL, INFEASIBLE) and (res.status == INFEASIBLE or self._residuals_ok(res.x)):
            if res.status == INFEASIBLE and not core.trust_infeasible():
                res = self._exact(core, max_iter)
        elif res.status != UNBOUNDED:
            res = self._exact(core, max_iter)
        core.store(self)
        self.total_iterations += res.iterations
        return res

    def _exact(self, core: _Core, max_iter: int) -> LpResult:
        log.warning("falling back to exact rational simplex (%d rows)", self.n_rows)
        self.exact_fallbacks += 1
        exact = _Core.from_model(self, exact=True, basis=core.basis, x=core.x)
        res = exact.run(max_iter)
        # continue in floating point from the exact basis
        core.basis = exact.basis.copy()
        core.x = np.array([float(v) for v in exact.x])
        core.refactor()
        res.exact = True
        return res

    def _residuals_ok(self, x: np.ndarray, tol: float = 1e-6) -> bool:
        act = self.A @ x
        scale = 1.0 + np.abs(self.b)
        for i, s in enumerate(self.sense):
            if s == "<=" and act[i] - self.b[i] > tol * scale[i]:
                return False
            if s == ">=" and self.b[i] - act[i] > tol * scale[i]:
                return False
            if s == "=" and abs(act[i] - self.b[i]) > tol * scale[i]:
                return False
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def _solve_unconstrained(self) -> LpResult:
        x = np.empty(self.n)
        for j in range(self.n):
            if self.c[j] > 0:
                x[j] = self.lo[j]
            elif self.c[j] < 0:
                x[j] = self.hi[j]
            else:
                x[j] = self.lo[j] if np.isfinite(self.lo[j]) else (self.hi[j] if np.isfinite(self.hi[j]) else 0.0)
        if not np.all(np.isfinite(x)):
            return LpResult(UNBOUNDED, -INF, x, np.zeros(0), self.c.copy(), 0, self.basis.copy())
        self.x = x.copy()
        return LpResult(OPTIMAL, float(self.c @ x), x, np.zeros(0), self.c.copy(), 0, self.basis.copy())

    def row_activity(self, x: Sequence[float]) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float)


class _Core:
    """Working copy of the simplex state (float or exact rational)."""

    def __init__(self):
        pass

    @classmethod
    def from_model(cls, model: LpModel, exact: bool, basis=None, x=None) -> _Core:
        self = cls()
        self.exact = exact
        self.tol = _Tol(exact)
        self.n = model.n
        self.m = model.n_rows
        lo, hi = model._full_bounds()
        if exact:
            conv = np.vectorize(lambda v: Fraction(v) if np.isfinite(v) else v, otypes=[object])
            self.A = conv(model.A) if model.A.size else model.A.astype(object)
            self.b = conv(model.b)
            self.c = conv(np.concatenate([model.c, np.zeros(self.m)]))
            self.lo = conv(lo)
            self.hi = conv(hi)
            xs = model.x if x is None else x
            self.x = np.array([Fraction(float(v)) for v in xs], dtype=object)
        else:
            self.A = model.A
            self.b = model.b
            self.c = np.concatenate([model.c, np.zeros(self.m)])
            self.lo = lo
            self.hi = hi
            self.x = (model.x if x is None else x).astype(float).copy()
        self.basis = (model.basis if basis is None else basis).copy()
        self.is_basic = np.zeros(self.n + self.m, dtype=bool)
        self.is_basic[self.basis] = True
        self.artificial = np.zeros(self.n + self.m, dtype=bool)
        if exact:
            self.refactor()
        else:
            self.Binv = model.Binv.copy()
            self.since_refactor = model._pivots_since_refactor
            if self.Binv.shape != (self.m, self.m):
                self.refactor()
        self._snap_nonbasic()
        self.iterations = 0
        return self

    def store(self, model: LpModel) -> None:
        model.basis = self.basis.copy()
        model.x = np.array([float(v) for v in self.x]) if self.exact else self.x.copy()
        # artificial boxes are not part of the model
        if self.exact:
            model.Binv = np.array([[float(v) for v in row] for row in self.Binv]).reshape(self.m, self.m)
        else:
            model.Binv = self.Binv
        model._pivots_since_refactor = getattr(self, "since_refactor", 0)

    # -- linear algebra -----------------------------------------------------

    def column(self, j: int):
        if j < self.n:
            return self.A[:, j]
        e = np.zeros(self.m, dtype=object if self.exact else float)
        if self.exact:
            e[:] = Fraction(0)
            e[j - self.n] = Fraction(1)
        else:
            e[j - self.n] = 1.0
        return e

    def basis_matrix(self):
        cols = [self.column(j) for j in self.basis]
        return np.column_stack(cols) if cols else np.zeros((0, 0))

    def refactor(self) -> None:
        B = self.basis_matrix()
        if self.exact:
            self.Binv = _exact_inverse(B)
        else:
            try:
                self.Binv = np.linalg.inv(B)
            except np.linalg.LinAlgError:
                self._repair_basis()
                self.Binv = np.linalg.inv(self.basis_matrix())
        self.since_refactor = 0

    def _repair_basis(self) -> None:
        """Replace dependent basis columns by slacks."""
        B = self.basis_matrix()
        q, r, piv = _qr_pivot(B)
        rank = int(np.sum(np.abs(np.diag(r)) > 1e-10))
        keep = sorted(piv[:rank])
        kept_cols = [self.basis[i] for i in keep]
        rows_covered = np.linalg.matrix_rank(B[:, keep]) if keep else 0
        new_basis = list(kept_cols)
        for i in range(self.m):
            if len(new_basis) == self.m:
                break
            cand = self.n + i
            if cand in new_basis:
                continue
            trial = np.column_stack([self.column(j) for j in new_basis + [cand]])
            if np.linalg.matrix_rank(trial) == len(new_basis) + 1:
                new_basis.append(cand)
        del rows_covered
        for j in self.basis:
            if j not in new_basis:
                self.is_basic[j] = False
        self.basis = np.array(new_basis, dtype=int)
        self.is_basic[:] = False
        self.is_basic[self.basis] = True
        self._snap_nonbasic()

    def _snap_nonbasic(self) -> None:
        for j in np.nonzero(~self.is_basic)[0]:
            lo, hi, v = self.lo[j], self.hi[j], self.x[j]
            if self.artificial[j]:
                continue
            if lo == hi:
                self.x[j] = lo
            elif v <= lo or (v < hi and hi == INF):
                self.x[j] = lo if lo > -INF else (hi if hi < INF else self._zero())
            elif v >= hi or lo == -INF:
                self.x[j] = hi if hi < INF else (lo if lo > -INF else self._zero())
            else:
                self.x[j] = lo if v - lo <= hi - v else hi

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def compute_primal(self) -> None:
        xn = self.x.copy()
        xn[self.basis] = 0
        r = self.b - self.A @ xn[: self.n] - xn[self.n :]
        self.x[self.basis] = self.Binv @ r

    def compute_duals(self):
        y = self.c[self.basis] @ self.Binv
        d = self.c - np.concatenate([y @ self.A, y]) if self.m else self.c.copy()
        d[self.basis] = 0
        return y, d

    def pivot(self, r: int, q: int, col) -> None:
        piv = col[r]
        row = self.Binv[r] / piv
        self.Binv = self.Binv - np.outer(col, row)
        self.Binv[r] = row
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[q] = True
        self.basis[r] = q
        self.since_refactor += 1
        self.iterations += 1
        if not self.exact and self.since_refactor >= LpModel.refactor_every:
            self.refactor()

    # -- phases -------------------------------------------------------------

    def make_dual_feasible(self, d) -> None:
        """Move nonbasic variables to the bound their reduced cost prefers.

        Infinite bounds are replaced by an artificial box.
        """
        tol = self.tol.dual
        big = Fraction(ARTIFICIAL_BOUND) if self.exact else ARTIFICIAL_BOUND
        for j in np.nonzero(~self.is_basic)[0]:
            lo, hi = self.lo[j], self.hi[j]
            if lo == hi:
                continue
            if d[j] < -tol and self.x[j] != hi:
                if hi < INF:
                    self.x[j] = hi
                else:
                    self.artificial[j] = True
                    self.x[j] = max(big, (lo if lo > -INF else 0) + big)
            elif d[j] > tol and self.x[j] != lo:
                if lo > -INF:
                    self.x[j] = lo
                else:
                    self.artificial[j] = True
                    self.x[j] = min(-big, (hi if hi < INF else 0) - big)

    def run(self, max_iter: int) -> LpResult:
        _, d = self.compute_duals()
        self.make_dual_feasible(d)
        status = self.dual_simplex(max_iter)
        if status == OPTIMAL:
            status = self.primal_simplex(max_iter)
        return self.result(status)

    def dual_simplex(self, max_iter: int) -> str:
        tol = self.tol
        degenerate = 0
        last_obj = None
        while self.iterations < max_iter:
            self.compute_primal()
            y, d = self.compute_duals()
            xb = self.x[self.basis]
            lob, hib = self.lo[self.basis], self.hi[self.basis]
            below = lob - xb
            above = xb - hib
            infeas = np.maximum(below, above)
            if self.exact:
                infeas = np.array([v if v > 0 else 0 for v in infeas], dtype=object)
            if not np.any(infeas > tol.primal):
                return OPTIMAL
            bland = degenerate >= LpModel.bland_after
            if bland:
                cand = [r for r in range(self.m) if infeas[r] > tol.primal]
                r = min(cand, key=lambda i: self.basis[i])
            else:
                r = int(np.argmax(infeas))
            to_lower = below[r] > above[r]
            rho = self.Binv[r]
            alpha = np.concatenate([rho @ self.A, rho])
            sign = -1 if to_lower else 1
            # candidates move the leaving variable towards its violated bound
            s_alpha = sign * alpha
            nb = ~self.is_basic
            movable = nb & (self.lo != self.hi)
            at_lo = self.x <= self.lo
            at_hi = self.x >= self.hi
            elig = movable & (
                ((s_alpha > tol.pivot) & ~at_hi) | ((s_alpha < -tol.pivot) & ~at_lo)
            )
            # free-to-move variables strictly between bounds (artificial) accept either sign
            idx = np.nonzero(elig)[0]
            if idx.size == 0:
                return INFEASIBLE
            abs_a = np.abs(alpha[idx])
            abs_d = np.abs(d[idx])
            if self.exact or bland:
                ratios = abs_d / abs_a
                best = min(ratios)
                ties = [j for j, rt in zip(idx, ratios) if rt == best]
                if bland:
                    q = int(min(ties))
                else:
                    q = int(max(ties, key=lambda j: abs(alpha[j])))
            else:
                bound = np.min((abs_d + tol.dual) / abs_a)
                ok = (abs_d / abs_a) <= bound
                cands = idx[ok]
                q = int(cands[np.argmax(np.abs(alpha[cands]))])
            col = self.Binv @ self.column(q)
            if abs(col[r]) <= tol.zero:
                if not self.exact:
                    self.refactor()
                    degenerate += 1
                    continue
                return INFEASIBLE
            leaving = self.basis[r]
            self.pivot(r, q, col)
            self.x[leaving] = self.lo[leaving] if to_lower else self.hi[leaving]
            obj = self.objective()
            if last_obj is not None and abs(obj - last_obj) <= (0 if self.exact else 1e-12 * (1 + abs(obj))):
                degenerate += 1
            else:
                degenerate = 0
            last_obj = obj
        return ITERATION_LIMIT

    def primal_simplex(self, max_iter: int) -> str:
        """Primal simplex from a primal feasible basis; also removes artificial boxes."""
        tol = self.tol
        if np.any(self.artificial):
            for j in np.nonzero(self.artificial)[0]:
                self.artificial[j] = False
        degenerate = 0
        while self.iterations < max_iter:
            self.compute_primal()
            y, d = self.compute_duals()
            nb = ~self.is_basic
            can_up = nb & (self.x < self.hi - tol.primal)
            can_down = nb & (self.x > self.lo + tol.primal)
            up = can_up & (d < -tol.dual)
            down = can_down & (d > tol.dual)
            idx = np.nonzero(up | down)[0]
            if idx.size == 0:
                return OPTIMAL
            bland = degenerate >= LpModel.bland_after
            if bland or self.exact:
                q = int(idx[0]) if bland else int(idx[np.argmax(np.abs(d[idx]))])
            else:
                q = int(idx[np.argmax(np.abs(d[idx]))])
            s = 1 if up[q] else -1
            col = self.Binv @ self.column(q)
            xb = self.x[self.basis]
            lob, hib = self.lo[self.basis], self.hi[self.basis]
            step = (self.hi[q] - self.x[q]) if s > 0 else (self.x[q] - self.lo[q])
            r_leave, to_lower = -1, False
            sc = s * col
            for r in range(self.m):
                if sc[r] > tol.pivot and lob[r] > -INF:
                    t = (xb[r] - lob[r]) / sc[r]
                    if t < step or (t == step and r_leave >= 0 and bland and self.basis[r] < self.basis[r_leave]):
                        step, r_leave, to_lower = t, r, True
                elif sc[r] < -tol.pivot and hib[r] < INF:
                    t = (hib[r] - xb[r]) / (-sc[r])
                    if t < step or (t == step and r_leave >= 0 and bland and self.basis[r] < self.basis[r_leave]):
                        step, r_leave, to_lower = t, r, False
            if step == INF:
                return UNBOUNDED
            if step < 0:
                step = 0 * step
            if r_leave < 0:
                # bound flip
                self.x[q] = self.hi[q] if s > 0 else self.lo[q]
                self.iterations += 1
                degenerate = 0
                continue
            leaving = self.basis[r_leave]
            self.x[q] = self.x[q] + s * step
            self.pivot(r_leave, q, col)
            self.x[leaving] = self.lo[leaving] if to_lower else self.hi[leaving]
            degenerate = degenerate + 1 if step <= tol.primal else 0
        return ITERATION_LIMIT

    def objective(self):
        return self.c[: self.n] @ self.x[: self.n]

    def trust_infeasible(self) -> bool:
        """Confirm infeasibility after a fresh factorization in floating point."""
        if self.exact:
            return True
        self.refactor()
        self.iterations_before = self.iterations
        return self.dual_simplex(self.iterations + 5000) == INFEASIBLE

    def result(self, status: str) -> LpResult:
        self.compute_primal()
        y, d = self.compute_duals()
        to_f = (lambda a: np.array([float(v) for v in a])) if self.exact else (lambda a: np.asarray(a, float).copy())
        x = to_f(self.x[: self.n])
        obj = float(self.objective()) if status == OPTIMAL else (INF if status == INFEASIBLE else -INF)
        return LpResult(status, obj, x, to_f(y), to_f(d[: self.n]), self.iterations, self.basis.copy(), self.exact)


def _qr_pivot(B: np.ndarray):
    """QR with column pivoting via Gram-Schmidt (small matrices only)."""
    m, k = B.shape
    A = B.astype(float).copy()
    piv = list(range(k))
    R = np.zeros((k, k))
    Q = np.zeros((m, k))
    for i in range(k):
        norms = [np.linalg.norm(A[:, j]) for j in range(i, k)]
        j = i + int(np.argmax(norms))
        A[:, [i, j]] = A[:, [j, i]]
        R[:, [i, j]] = R[:, [j, i]]
        piv[i], piv[j] = piv[j], piv[i]
        nrm = np.linalg.norm(A[:, i])
        R[i, i] = nrm
        if nrm <= 1e-12:
            break
        Q[:, i] = A[:, i] / nrm
        for jj in range(i + 1, k):
            R[i, jj] = Q[:, i] @ A[:, jj]
            A[:, jj] -= R[i, jj] * Q[:, i]
    return Q, R, piv


def _exact_inverse(B) -> np.ndarray:
    m = B.shape[0]
    M = [[Fraction(v) for v in B[i]] + [Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular basis")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(m):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    out = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            out[i, j] = M[i][m + j]
    return out


def solve(model: LpModel, max_iter: int = 50000) -> LpResult:
    return model.solve(max_iter)


def add_rows(model: LpModel, rows: Iterable[Row]) -> LpModel:
    model.add_rows(rows)
    return model


def dump_lp(model: LpModel, names: Sequence[str] | None = None) -> str:
    """Human-readable LP text, for debugging."""
    names = list(names) if names is not None else [f"x{j}" for j in range(model.n)]

    def expr(coefs):
        parts = [f"{v:+g} {names[j]}" for j, v in enumerate(coefs) if v != 0]
        return " ".join(parts) if parts else "0"

    lines = ["Minimize", f" obj: {expr(model.c)}", "Subject To"]
    for i in range(model.n_rows):
        lines.append(f" r{i}: {expr(model.A[i])} {model.sense[i]} {model.b[i]:g}")
    lines.append("Bounds")
    for j in range(model.n):
        lines.append(f" {model.lo[j]:g} <= {names[j]} <= {model.hi[j]:g}")
    lines.append("End")
    return "\n".join(lines)
