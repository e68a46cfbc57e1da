"""Exact branch-and-bound for mixed binary-integer linear programs.

Search order is deterministic: best-bound node selection with depth-first
plunging after each incumbent improvement, most-fractional branching, ties
by lowest variable index.  When the objective is known a priori to be
integral at every feasible point (``objective_integral``), a subtree is cut
as soon as its bound rounds up to the incumbent value.

Incumbents may also arrive through a user hook (``incumbent_callback``)
called with each node relaxation point; whatever it returns is accepted
only after a full feasibility check.  The solver is single-threaded, which
doubles as the reproducibility mode required of the contract.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram, LpSolution, solve_lp

__all__ = ["MilpProblem", "MilpSolution", "MilpLimits", "solve_milp"]


@dataclass
class MilpProblem:
    lp: LinearProgram
    binary_mask: np.ndarray
    incumbent_callback: Optional[Callable[[np.ndarray], Optional[np.ndarray]]] = None
    objective_integral: bool = False
    initial_incumbent: Optional[np.ndarray] = None

    def __post_init__(self):
        self.binary_mask = np.asarray(self.binary_mask, dtype=bool)
        if self.binary_mask.shape != (self.lp.n_cols,):
            raise ValueError("binary_mask must have one entry per column")
        b = self.binary_mask
        if np.any(self.lp.lower[b] < -0.0) or np.any(self.lp.upper[b] > 1.0):
            raise ValueError("binary variables must have bounds within [0, 1]")


@dataclass
class MilpLimits:
    max_nodes: int = 1_000_000
    max_seconds: float = math.inf
    tol_gap: float = 1e-9
    tol_int: float = 1e-6

    def __post_init__(self):
        if self.max_nodes < 0 or self.max_seconds <= 0 or self.tol_gap < 0:
            raise ValueError("limits must be positive (max_nodes may be 0)")


@dataclass
class MilpSolution:
    status: str  # "optimal" | "feasible-with-gap" | "infeasible"
    x: Optional[np.ndarray]
    objective: Optional[float]
    bound: float
    node_count: int
    wall_time: float
    bound_log: Optional[list] = None  # global lower bound at each dequeue


def _feasible(lp: LinearProgram, x: np.ndarray, tol: float) -> bool:
    if np.any(x < lp.lower - tol) or np.any(x > lp.upper + tol):
        return False
    ax = lp.a_matrix @ x
    r = lp.rhs
    s = lp.senses
    ok = np.ones(lp.n_rows, dtype=bool)
    ok &= np.where(s == "L", ax <= r + tol, True)
    ok &= np.where(s == "G", ax >= r - tol, True)
    ok &= np.where(s == "E", np.abs(ax - r) <= tol, True)
    return bool(ok.all())


def _lexicographic_less(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    diff = a - b
    nz = np.nonzero(np.abs(diff) > tol)[0]
    return nz.size > 0 and diff[nz[0]] < 0


class _Search:
    def __init__(self, problem: MilpProblem, limits: MilpLimits, verbose: bool):
        self.p = problem
        self.limits = limits
        self.verbose = verbose
        self.lp = problem.lp
        if self.lp.maximize:
            raise ValueError("solve_milp expects a minimization problem")
        self.bin_idx = np.nonzero(problem.binary_mask)[0]
        self.incumbent: Optional[np.ndarray] = None
        self.incumbent_obj = math.inf
        self.nodes = 0
        self.seq = 0
        self.heap: list = []
        self.plunge: list = []
        self.bound_log: list = []
        self.t0 = time.perf_counter()
        self.feas_tol = max(limits.tol_int, 1e-7)

    # -- incumbent handling --------------------------------------------------

    def _try_incumbent(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.lp.n_cols,):
            return False
        xb = x[self.bin_idx]
        if np.any(np.abs(xb - np.round(xb)) > self.limits.tol_int):
            return False
        x = x.copy()
        x[self.bin_idx] = np.round(xb)
        if not _feasible(self.lp, x, self.feas_tol):
            return False
        obj = float(self.lp.objective @ x) + self.lp.objective_offset
        if obj < self.incumbent_obj - self.limits.tol_gap:
            self.incumbent, self.incumbent_obj = x, obj
            return True
        if (
            self.incumbent is not None
            and abs(obj - self.incumbent_obj) <= self.limits.tol_gap
            and _lexicographic_less(x, self.incumbent)
        ):
            self.incumbent = x  # deterministic representative among ties
        return False

    def _cutoff(self) -> float:
        """Bound value at or above which a subtree cannot improve."""
        if not np.isfinite(self.incumbent_obj):
            return math.inf
        if self.p.objective_integral:
            return self.incumbent_obj - 1.0 + 1e-6
        return self.incumbent_obj - self.limits.tol_gap

    # -- node relaxation -----------------------------------------------------

    def _solve_node(self, lo: np.ndarray, hi: np.ndarray) -> LpSolution:
        node_lp = LinearProgram(
            objective=self.lp.objective,
            a_matrix=self.lp.a_matrix,
            senses=self.lp.senses,
            rhs=self.lp.rhs,
            lower=lo,
            upper=hi,
            maximize=False,
            objective_offset=self.lp.objective_offset,
        )
        return solve_lp(node_lp)

    # -- main loop -----------------------------------------------------------

    def run(self) -> MilpSolution:
        lp = self.lp
        if self.p.initial_incumbent is not None:
            self._try_incumbent(self.p.initial_incumbent)

        trivial = self._trivial_bound()
        if self.limits.max_nodes == 0:
            return self._finish(trivial)

        root = (trivial, self.seq, 0, lp.lower.copy(), lp.upper.copy())
        heapq.heappush(self.heap, root)
        root_feasible = None

        while self.heap or self.plunge:
            if self.nodes >= self.limits.max_nodes:
                break
            if time.perf_counter() - self.t0 > self.limits.max_seconds:
                break
            if self.plunge:
                bound0, _, depth, lo, hi = self.plunge.pop()
            else:
                bound0, _, depth, lo, hi = heapq.heappop(self.heap)
            pending = [n[0] for n in self.heap] + [n[0] for n in self.plunge]
            self.bound_log.append(min([bound0] + pending))
            if bound0 > self._cutoff():
                continue
            self.nodes += 1

            sol = self._solve_node(lo, hi)
            if sol.status != "optimal":
                if self.nodes == 1 and root_feasible is None:
                    root_feasible = False
                continue
            root_feasible = True if root_feasible is None else root_feasible
            bound = sol.objective
            if self.verbose:
                print(
                    f"node {self.nodes}  depth {depth}  bound {bound:.6g}  "
                    f"incumbent {self.incumbent_obj:.6g}"
                )
            if bound > self._cutoff():
                continue

            x = sol.x
            if self.p.incumbent_callback is not None:
                cand = self.p.incumbent_callback(x.copy())
                if cand is not None:
                    self._try_incumbent(cand)
                    if bound > self._cutoff():
                        continue

            frac = np.abs(x[self.bin_idx] - np.round(x[self.bin_idx]))
            if frac.size == 0 or frac.max() <= self.limits.tol_int:
                improved = self._try_incumbent(x)
                if improved and self.verbose:
                    print(f"  incumbent {self.incumbent_obj:.6g}")
                continue

            # most-fractional branching, ties by lowest variable index
            score = np.minimum(frac, 1.0 - frac)
            j = self.bin_idx[int(np.argmax(score))]
            frac_j = x[j]

            for fix_to in (0.0, 1.0) if frac_j < 0.5 else (1.0, 0.0):
                clo, chi = lo.copy(), hi.copy()
                if fix_to == 0.0:
                    chi[j] = 0.0
                else:
                    clo[j] = 1.0
                self.seq += 1
                node = (bound, self.seq, depth + 1, clo, chi)
                # plunge down the preferred child; sibling to the queue
                if fix_to == (0.0 if frac_j < 0.5 else 1.0):
                    self.plunge.append(node)
                else:
                    heapq.heappush(self.heap, node)

        exhausted = not self.heap and not self.plunge
        if exhausted and self.incumbent is None and root_feasible is not True:
            return MilpSolution(
                "infeasible", None, None, math.inf, self.nodes,
                time.perf_counter() - self.t0, self.bound_log,
            )
        if exhausted:
            bound = self.incumbent_obj
        else:
            pending = [n[0] for n in self.heap] + [n[0] for n in self.plunge]
            bound = min(pending) if pending else self.incumbent_obj
        return self._finish(bound)

    def _trivial_bound(self) -> float:
        """Bound from the objective over the variable box alone."""
        c = self.lp.objective
        lo, hi = self.lp.lower, self.lp.upper
        term = np.where(c >= 0, c * lo, c * hi)
        term = np.where(np.isnan(term), -math.inf, term)  # 0 * inf guards
        return float(np.sum(term)) + self.lp.objective_offset

    def _finish(self, bound: float) -> MilpSolution:
        wall = time.perf_counter() - self.t0
        if self.incumbent is None:
            status = "infeasible" if bound == math.inf else "feasible-with-gap"
            return MilpSolution(
                status, None, None, bound, self.nodes, wall, self.bound_log
            )
        gap_closed = self.incumbent_obj - bound <= self.limits.tol_gap or (
            self.p.objective_integral and bound > self.incumbent_obj - 1.0 + 1e-6
        )
        if gap_closed:
            bound = self.incumbent_obj
        status = "optimal" if gap_closed else "feasible-with-gap"
        x = self.incumbent.copy()
        x[self.bin_idx] = np.round(x[self.bin_idx])
        return MilpSolution(
            status, x, self.incumbent_obj, bound, self.nodes, wall, self.bound_log
        )


def solve_milp(
    problem: MilpProblem,
    limits: Optional[MilpLimits] = None,
    verbose: bool = False,
) -> MilpSolution:
    """Solve a binary MILP to certified global optimality when limits allow.

    Under node or time limits the best incumbent is returned together with a
    valid global lower bound (status "feasible-with-gap").
    """
    return _Search(problem, limits or MilpLimits(), verbose).run()
