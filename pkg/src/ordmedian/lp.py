"""Self-contained linear-programming kernel.

Bounded-variable revised simplex with a two-phase start.  Variable bounds
are handled implicitly (nonbasic variables rest at a finite bound), which
keeps branch-and-bound subproblems the same size as their parent: branching
only tightens bounds, never adds rows.

The pivot rule is Dantzig (most negative reduced cost, ties by lowest
column index) with a switch to Bland's rule after a stall of more than 50
degenerate pivots.  Given identical input the pivot sequence, and hence the
solution, is deterministic.

The basis inverse is kept explicitly and updated per pivot; it is
refactorized from scratch at a fixed cadence for numerical hygiene.  Dense
factorization is intended for desk scale (up to a couple of thousand
columns).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

__all__ = ["LinearProgram", "LpSolution", "solve_lp", "write_lp_text"]

_REFACTOR_EVERY = 150
_STALL_LIMIT = 50
_PIV_TOL = 1e-10


@dataclass
class LinearProgram:
    """min / max  objective @ x + offset  s.t.  A x (<=,=,>=) rhs, lo <= x <= hi.

    ``senses`` holds one of "L", "E", "G" per row (<=, =, >=).  Bound entries
    may be +-inf.  ``a_matrix`` may be dense or any scipy sparse format.
    """

    objective: np.ndarray
    a_matrix: "sp.spmatrix | np.ndarray"
    senses: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    maximize: bool = False
    objective_offset: float = 0.0

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.senses = np.asarray(self.senses, dtype="U1")
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if not sp.issparse(self.a_matrix):
            self.a_matrix = np.atleast_2d(np.asarray(self.a_matrix, dtype=float))
        m, n = self.a_matrix.shape
        if self.objective.shape != (n,):
            raise ValueError("objective length must match columns")
        if self.rhs.shape != (m,) or self.senses.shape != (m,):
            raise ValueError("rhs/senses length must match rows")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bound vectors must match columns")
        if not set(self.senses) <= {"L", "E", "G"}:
            raise ValueError("row senses must be 'L', 'E' or 'G'")
        for arr in (self.objective, self.rhs):
            if np.any(np.isnan(arr)):
                raise ValueError("NaN entries in problem data")
        if np.any(self.lower > self.upper):
            raise ValueError("variable lower bound exceeds upper bound")

    @property
    def n_rows(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a_matrix.shape[1]


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class _Simplex:
    """Working state for one solve; single-use."""

    def __init__(self, lp: LinearProgram, tol_feas: float):
        self.tol = tol_feas
        a = lp.a_matrix
        if sp.issparse(a):
            a = a.toarray()
        else:
            a = a.copy()
        c = lp.objective.copy()
        if lp.maximize:
            c = -c

        # Drop structurally empty rows (the only presolve performed).
        row_nnz = np.abs(a).sum(axis=1)
        keep = row_nnz > 0.0
        self.empty_row_infeasible = False
        for i in np.nonzero(~keep)[0]:
            r, s = lp.rhs[i], lp.senses[i]
            bad = (
                (s == "L" and r < -tol_feas)
                or (s == "G" and r > tol_feas)
                or (s == "E" and abs(r) > tol_feas)
            )
            if bad:
                self.empty_row_infeasible = True
        a = a[keep]
        rhs = lp.rhs[keep]
        senses = lp.senses[keep]

        m, nstruct = a.shape
        self.m = m
        self.nstruct = nstruct

        n_slack = int(np.sum(senses != "E"))
        ncols = nstruct + n_slack
        cols = np.zeros((m, ncols))
        cols[:, :nstruct] = a
        lo = np.concatenate([lp.lower, np.zeros(n_slack)])
        hi = np.concatenate([lp.upper, np.zeros(n_slack)])
        k = nstruct
        for i in range(m):
            if senses[i] == "E":
                continue
            cols[i, k] = 1.0
            if senses[i] == "L":
                lo[k], hi[k] = 0.0, np.inf
            else:  # "G": A x - s' = b with s' >= 0 written as +slack in (-inf, 0]
                lo[k], hi[k] = -np.inf, 0.0
            k += 1

        self.A = cols
        self.b = rhs
        self.lo = lo
        self.hi = hi
        self.c_struct = c
        self.ncols = ncols
        self.iterations = 0

    # -- state helpers -------------------------------------------------------

    def _nonbasic_start_value(self, j: int) -> float:
        if np.isfinite(self.lo[j]):
            return self.lo[j]
        if np.isfinite(self.hi[j]):
            return self.hi[j]
        return 0.0

    def _refactorize(self):
        B = self.Aall[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise RuntimeError("singular basis encountered") from exc

    def _recompute_basics(self):
        mask = np.ones(self.ntot, dtype=bool)
        mask[self.basis] = False
        xn = self.x[mask]
        self.x[self.basis] = self.Binv @ (self.b - self.Aall[:, mask] @ xn)

    # -- core loop -----------------------------------------------------------

    def _iterate(self, cost: np.ndarray, max_iter: int) -> str:
        """Run primal simplex to optimality for the given cost vector.

        Returns "optimal" or "unbounded".  Assumes the current basis is
        primal feasible.
        """
        bland = False
        stall = 0
        since_refactor = 0
        m = self.m

        while True:
            if self.iterations >= max_iter:
                raise RuntimeError("simplex iteration limit exceeded")
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                self._refactorize()
                self._recompute_basics()
                since_refactor = 0

            y = cost[self.basis] @ self.Binv
            d = cost - y @ self.Aall
            d[self.basis] = 0.0

            at_lo = self.vstat == 1
            at_hi = self.vstat == 2
            free = self.vstat == 3
            tol = self.tol
            cand = (at_lo & (d < -tol)) | (at_hi & (d > tol)) | (
                free & (np.abs(d) > tol)
            )
            idx = np.nonzero(cand)[0]
            if idx.size == 0:
                return "optimal"
            if bland:
                e = int(idx[0])
            else:
                e = int(idx[np.argmax(np.abs(d[idx]))])
            sigma = -1.0 if d[e] > 0 else 1.0

            alpha = self.Binv @ self.Aall[:, e]
            delta = sigma * alpha
            xb = self.x[self.basis]

            # Ratio test: basic variables hitting a bound, or the entering
            # variable traversing its own range (bound flip).
            t_best = self.hi[e] - self.lo[e] if self.vstat[e] != 3 else np.inf
            leave = -1  # -1 means bound flip
            pos = delta > _PIV_TOL
            neg = delta < -_PIV_TOL
            with np.errstate(invalid="ignore"):
                lim = np.full(m, np.inf)
                lim[pos] = (xb[pos] - self.lo[self.basis[pos]]) / delta[pos]
                lim[neg] = (xb[neg] - self.hi[self.basis[neg]]) / delta[neg]
            lim = np.maximum(lim, 0.0)
            r = int(np.argmin(lim)) if m else -1
            if m and lim[r] < t_best - 1e-15:
                # deterministic tie-break: smallest variable index among ties
                ties = np.nonzero(lim <= lim[r] + 1e-15)[0]
                r = int(ties[np.argmin(self.basis[ties])])
                t_best = lim[r]
                leave = r
            if not np.isfinite(t_best):
                return "unbounded"

            stall = stall + 1 if t_best <= 1e-12 else 0
            if stall > _STALL_LIMIT:
                bland = True
            elif t_best > 1e-12:
                bland = False

            # apply the step
            self.x[self.basis] = xb - t_best * delta
            self.x[e] += sigma * t_best
            if leave < 0:
                # bound flip: entering moves across to its other bound
                self.vstat[e] = 2 if sigma > 0 else 1
                continue
            out = self.basis[leave]
            hit_lower = delta[leave] > 0
            self.x[out] = self.lo[out] if hit_lower else self.hi[out]
            self.vstat[out] = 1 if hit_lower else 2
            self.basis[leave] = e
            self.vstat[e] = 0
            # product-form update of the basis inverse
            piv = alpha[leave]
            if abs(piv) < _PIV_TOL:  # pragma: no cover
                self._refactorize()
                self._recompute_basics()
                since_refactor = 0
                continue
            row = self.Binv[leave] / piv
            self.Binv -= np.outer(alpha, row)
            self.Binv[leave] = row

    def solve(self) -> LpSolution:
        if self.empty_row_infeasible:
            return LpSolution("infeasible", None, None, 0)
        m, ncols = self.m, self.ncols
        if m == 0:
            return self._solve_bounds_only()

        # Phase 1: artificial column per row, signed to make it start >= 0.
        x = np.empty(ncols)
        for j in range(ncols):
            x[j] = self._nonbasic_start_value(j)
        resid = self.b - self.A @ x
        sgn = np.where(resid >= 0, 1.0, -1.0)
        art = np.zeros((m, m))
        art[np.arange(m), np.arange(m)] = sgn
        self.Aall = np.hstack([self.A, art])
        self.ntot = ncols + m
        self.lo = np.concatenate([self.lo, np.zeros(m)])
        self.hi = np.concatenate([self.hi, np.full(m, np.inf)])
        self.x = np.concatenate([x, np.abs(resid)])
        self.basis = np.arange(ncols, ncols + m)
        # vstat: 0 basic, 1 at lower, 2 at upper, 3 free-at-zero
        self.vstat = np.empty(self.ntot, dtype=np.int8)
        for j in range(ncols):
            if np.isfinite(self.lo[j]):
                self.vstat[j] = 1
            elif np.isfinite(self.hi[j]):
                self.vstat[j] = 2
            else:
                self.vstat[j] = 3
        self.vstat[ncols:] = 0
        self.Binv = art.copy()  # diag(+-1) is its own inverse

        max_iter = 50000 + 60 * (m + ncols)
        cost1 = np.zeros(self.ntot)
        cost1[ncols:] = 1.0
        status = self._iterate(cost1, max_iter)
        assert status == "optimal"  # phase-1 objective is bounded below by 0
        infeas = float(self.x[ncols:].sum())
        if infeas > 1e-7:
            return LpSolution("infeasible", None, None, self.iterations)
        # pin artificials to zero for phase 2
        self.lo[ncols:] = 0.0
        self.hi[ncols:] = 0.0
        self.x[ncols:] = np.maximum(self.x[ncols:], 0.0)

        cost2 = np.zeros(self.ntot)
        cost2[: self.nstruct] = self.c_struct
        status = self._iterate(cost2, max_iter)
        if status == "unbounded":
            return LpSolution("unbounded", None, None, self.iterations)
        self._refactorize()
        self._recompute_basics()
        xs = self.x[: self.nstruct].copy()
        obj = float(self.c_struct @ xs)
        return LpSolution("optimal", xs, obj, self.iterations)

    def _solve_bounds_only(self) -> LpSolution:
        c = self.c_struct
        x = np.empty(self.nstruct)
        for j in range(self.nstruct):
            if c[j] > 0:
                if not np.isfinite(self.lo[j]):
                    return LpSolution("unbounded", None, None, 0)
                x[j] = self.lo[j]
            elif c[j] < 0:
                if not np.isfinite(self.hi[j]):
                    return LpSolution("unbounded", None, None, 0)
                x[j] = self.hi[j]
            else:
                x[j] = self._nonbasic_start_value(j)
        return LpSolution("optimal", x, float(c @ x), 0)


def solve_lp(lp: LinearProgram, tol_feas: float = 1e-9) -> LpSolution:
    """Solve an LP to a vertex optimum.

    Infeasibility and unboundedness are reported through ``status``, never by
    raising.  The reported objective includes ``objective_offset`` and is on
    the original (min or max) scale.
    """
    sol = _Simplex(lp, tol_feas).solve()
    if sol.is_optimal:
        obj = sol.objective
        if lp.maximize:
            obj = -obj
        sol.objective = obj + lp.objective_offset
    return sol


def write_lp_text(lp: LinearProgram, path: str, name: str = "LP") -> None:
    """Dump an LP instance in fixed MPS format for external cross-checks.

    Sections: NAME, ROWS (N objective, L/G/E constraints), COLUMNS, RHS,
    BOUNDS (LO/UP/MI/PL per finite/infinite bound), ENDATA.  Row i is named
    ``R{i}`` and column j ``C{j}``.
    """
    a = lp.a_matrix
    if sp.issparse(a):
        a = a.toarray()
    lines = [f"NAME          {name}", "ROWS", " N  COST"]
    for i, s in enumerate(lp.senses):
        lines.append(f" {s}  R{i}")
    lines.append("COLUMNS")
    for j in range(lp.n_cols):
        if lp.objective[j] != 0.0:
            lines.append(f"    C{j}  COST  {lp.objective[j]:.17g}")
        for i in np.nonzero(a[:, j])[0]:
            lines.append(f"    C{j}  R{i}  {a[i, j]:.17g}")
    lines.append("RHS")
    for i, r in enumerate(lp.rhs):
        if r != 0.0:
            lines.append(f"    RHS  R{i}  {r:.17g}")
    lines.append("BOUNDS")
    for j in range(lp.n_cols):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            if lo != 0.0:
                lines.append(f" LO BND  C{j}  {lo:.17g}")
        else:
            lines.append(f" MI BND  C{j}")
        if np.isfinite(hi):
            lines.append(f" UP BND  C{j}  {hi:.17g}")
    lines.append("ENDATA")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
