"""Exact LAD estimation of the ordered-response median regression.

The piecewise-constant LAD problem over (slopes b, thresholds c) is encoded
as a binary MILP: one indicator d_ij per observation i and threshold j,
forced by big-M sign constraints to equal 1[index_i <= c_j].  Minimizing
the indicator-weighted score coefficients then minimizes the sum of
absolute category deviations, up to the constant sum w_i |y_i - J|.

Strict inequalities are realized with a small tolerance ``delta`` (the
upper sign band) and ``epsilon_gap`` (threshold separation).  Big-M values
are computed in closed form by corner analysis of the linear index over the
parameter box.

``brute_force_lad`` is an independent oracle: it enumerates slope
candidates that exhaust every ordering of the index values (exact for P<=1
via breakpoints, arrangement vertices with perturbation for P=2), and for
each slope finds optimal thresholds exactly by dynamic programming over cut
positions, since the objective is piecewise constant in c with breakpoints
at the index values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram, solve_lp
from .milp import MilpLimits, MilpProblem, MilpSolution, solve_milp
from .model import (
    OrderedDataset,
    ParamBox,
    Thresholds,
    lad_objective,
    score_coefficients,
)

__all__ = [
    "LadMilpEncoding",
    "LadEstimate",
    "LadOptions",
    "compute_big_m",
    "build_lad_milp",
    "fit_lad",
    "brute_force_lad",
]


@dataclass(frozen=True)
class LadMilpEncoding:
    """Variable layout and constants of the LAD MILP.

    Columns are ordered [b (P), c (J-1), d (n x (J-1), observation-major)].
    """

    n: int
    n_slopes: int
    j_max: int
    delta: float
    epsilon_gap: float
    big_m: np.ndarray
    objective_offset: float

    def d_index(self, i: int, j: int) -> int:
        """Column of d_ij (j is 0-based threshold index)."""
        return self.n_slopes + (self.j_max - 1) + i * (self.j_max - 1) + j

    @property
    def n_cols(self) -> int:
        return self.n_slopes + (self.j_max - 1) * (1 + self.n)


@dataclass
class LadEstimate:
    beta_hat: np.ndarray
    gamma_hat: np.ndarray
    objective: float
    certificate: Optional[MilpSolution] = None


@dataclass
class LadOptions:
    delta: float = 1e-6
    epsilon_gap: float = 1e-6
    tol_gap: float = 1e-9
    max_nodes: int = 1_000_000
    max_seconds: float = math.inf
    initial_search: int = 32
    refine: bool = True
    verbose: bool = False
    seed: int = 20190219  # initial-search draws only; fixed for reproducibility


def _check_box(data: OrderedDataset, box: ParamBox, epsilon_gap: float = 0.0):
    if box.n_slopes != data.n_slopes:
        raise ValueError("box beta dimension does not match data")
    if box.n_thresholds != data.j_max - 1:
        raise ValueError("box gamma dimension must be j_max - 1")
    run = -np.inf
    for j in range(box.n_thresholds):
        run = max(box.gamma_lo[j], run + epsilon_gap)
        if run > box.gamma_hi[j]:
            raise ValueError(
                "gamma box admits no strictly increasing threshold vector"
            )


def compute_big_m(data: OrderedDataset, box: ParamBox) -> np.ndarray:
    """M_ij = max over the box of |c_j - x1_i - xt_i' b|, in closed form.

    The linear expression is maximized corner-wise: c_j at the bound that
    stretches it, each slope at whichever bound works against (or with) the
    inner product.  Result is floored at zero.
    """
    _check_box(data, box)
    xt = data.x_tilde
    # max of -xt'b and +xt'b over the slope box, per observation
    neg_max = np.maximum(-xt * box.beta_lo, -xt * box.beta_hi).sum(axis=1)
    pos_max = np.maximum(xt * box.beta_lo, xt * box.beta_hi).sum(axis=1)
    up = box.gamma_hi[None, :] - data.x1[:, None] + neg_max[:, None]
    down = -box.gamma_lo[None, :] + data.x1[:, None] + pos_max[:, None]
    return np.maximum(np.maximum(up, down), 0.0)


def build_lad_milp(
    data: OrderedDataset,
    box: ParamBox,
    delta: float = 1e-6,
    epsilon_gap: float = 1e-6,
) -> MilpProblem:
    """Assemble the LAD MILP for the dataset over the given parameter box.

    The returned problem carries its ``LadMilpEncoding`` as ``.encoding``.
    """
    if delta <= 0 or epsilon_gap <= 0:
        raise ValueError("delta and epsilon_gap must be positive")
    _check_box(data, box, epsilon_gap)
    n, p, jm = data.n, data.n_slopes, data.j_max
    nt = jm - 1
    big_m = compute_big_m(data, box)
    w = data.effective_weights()
    coeff = np.stack([score_coefficients(y, jm) for y in data.outcomes])
    offset = float(np.sum(w * np.abs(data.outcomes - jm)))
    enc = LadMilpEncoding(n, p, jm, delta, epsilon_gap, big_m, offset)

    ncols = enc.n_cols
    d0 = p + nt  # first d column
    xt = data.x_tilde

    rows, cols, vals = [], [], []
    senses, rhs = [], []

    def add_block(row_base, col_arr, val_arr, row_arr):
        rows.append(row_arr)
        cols.append(col_arr)
        vals.append(val_arr)

    nJ = n * nt
    r_idx = np.arange(nJ)
    i_idx = np.repeat(np.arange(n), nt)
    j_idx = np.tile(np.arange(nt), n)
    d_cols = d0 + r_idx
    c_cols = p + j_idx
    m_flat = big_m[i_idx, j_idx]

    # lower sign constraint:  c_j - xt_i'b - M_ij d_ij >= x1_i - M_ij
    add_block(0, c_cols, np.ones(nJ), r_idx)
    add_block(0, d_cols, -m_flat, r_idx)
    if p:
        add_block(
            0,
            np.tile(np.arange(p), nJ),
            -xt[i_idx].ravel(),
            np.repeat(r_idx, p),
        )
    senses.append(np.full(nJ, "G"))
    rhs.append(data.x1[i_idx] - m_flat)

    # upper sign constraint:  c_j - xt_i'b - (M_ij + 2 delta) d_ij <= x1_i - delta
    base = nJ
    add_block(base, c_cols, np.ones(nJ), base + r_idx)
    add_block(base, d_cols, -(m_flat + 2.0 * delta), base + r_idx)
    if p:
        add_block(
            base,
            np.tile(np.arange(p), nJ),
            -xt[i_idx].ravel(),
            base + np.repeat(r_idx, p),
        )
    senses.append(np.full(nJ, "L"))
    rhs.append(data.x1[i_idx] - delta)

    # threshold monotonicity:  c_{j+1} - c_j >= epsilon_gap
    base = 2 * nJ
    ng = nt - 1
    if ng:
        jj = np.arange(ng)
        add_block(base, p + jj + 1, np.ones(ng), base + jj)
        add_block(base, p + jj, -np.ones(ng), base + jj)
        senses.append(np.full(ng, "G"))
        rhs.append(np.full(ng, epsilon_gap))

    # indicator monotonicity:  d_ij - d_{i,j+1} <= 0
    base = 2 * nJ + ng
    if ng:
        nm = n * ng
        ii = np.repeat(np.arange(n), ng)
        jj = np.tile(np.arange(ng), n)
        left = d0 + ii * nt + jj
        add_block(base, left, np.ones(nm), base + np.arange(nm))
        add_block(base, left + 1, -np.ones(nm), base + np.arange(nm))
        senses.append(np.full(nm, "L"))
        rhs.append(np.zeros(nm))

    nrows = 2 * nJ + ng + (n * ng if ng else 0)
    a = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nrows, ncols),
    ).tocsr()

    objective = np.zeros(ncols)
    objective[d0:] = (w[:, None] * coeff).ravel()
    lower = np.concatenate([box.beta_lo, box.gamma_lo, np.zeros(nJ)])
    upper = np.concatenate([box.beta_hi, box.gamma_hi, np.ones(nJ)])
    lp = LinearProgram(
        objective=objective,
        a_matrix=a,
        senses=np.concatenate(senses),
        rhs=np.concatenate(rhs),
        lower=lower,
        upper=upper,
        objective_offset=offset,
    )
    mask = np.zeros(ncols, dtype=bool)
    mask[d0:] = True
    integral = bool(np.all(np.abs(w - np.round(w)) < 1e-12))
    problem = MilpProblem(lp, mask, objective_integral=integral)
    problem.encoding = enc
    return problem


# ---------------------------------------------------------------------------
# rounding heuristic
# ---------------------------------------------------------------------------

def _repair_thresholds(c, box: ParamBox, eps_gap: float) -> Optional[np.ndarray]:
    c = np.clip(np.asarray(c, dtype=float), box.gamma_lo, box.gamma_hi)
    for j in range(1, c.size):
        c[j] = max(c[j], c[j - 1] + eps_gap)
    c = np.minimum(c, box.gamma_hi)
    for j in range(c.size - 2, -1, -1):
        c[j] = min(c[j], c[j + 1] - eps_gap)
    c = np.maximum(c, box.gamma_lo)
    ok = np.all(np.diff(c) >= eps_gap - 1e-15) and np.all(
        c <= box.gamma_hi + 1e-12
    )
    return c if ok else None


def _incumbent_from_point(
    b: np.ndarray,
    c: np.ndarray,
    data: OrderedDataset,
    box: ParamBox,
    enc: LadMilpEncoding,
) -> Optional[np.ndarray]:
    """Round a relaxation point to a feasible integer point.

    Thresholds are repaired to satisfy the gap, indicators are set by the
    exact rule d_ij = 1[index_i <= c_j], and thresholds sitting inside the
    delta band just below an index value are snapped onto it so the strict
    side of the band is respected.
    """
    c = _repair_thresholds(c, box, enc.epsilon_gap)
    if c is None:
        return None
    v = data.x1 + data.x_tilde @ np.asarray(b, dtype=float)
    for j in range(c.size):
        band = (v > c[j]) & (v <= c[j] + enc.delta)
        if np.any(band):
            snapped = float(v[band].max())
            if snapped <= box.gamma_hi[j]:
                c[j] = snapped
    d = (v[:, None] <= c[None, :]).astype(float)
    return np.concatenate([np.asarray(b, dtype=float), c, d.ravel()])


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def _quantile_start(data: OrderedDataset, v: np.ndarray, box: ParamBox):
    """Thresholds at the index quantiles matching empirical cell shares."""
    w = data.effective_weights()
    shares = np.array(
        [np.sum(w[data.outcomes <= j]) for j in range(1, data.j_max)]
    ) / np.sum(w)
    shares = np.clip(shares, 0.01, 0.99)
    return np.quantile(v, shares)


def _eval_point(v, y, w, c):
    """Objective at index values v and sorted thresholds c.

    Matches the prediction rule with cells closed above: an index equal to
    c_j lands in category j.
    """
    pred = 1 + np.searchsorted(c, v, side="left")
    return float(np.sum(w * np.abs(y - pred)))


def _threshold_descent(data, box, b, c0, eps_gap):
    """Coordinate descent on the thresholds at a fixed slope.

    Candidate positions for each c_j are the index quantiles; the best
    value is kept whenever the move preserves strict ordering within the
    box.  Uses only objective evaluations, so it stays independent of the
    exhaustive oracle's machinery.
    """
    v = data.x1 + data.x_tilde @ b
    y, w = data.outcomes, data.effective_weights()
    cands = np.unique(np.quantile(v, np.linspace(0.0, 1.0, 65)))
    cands = np.concatenate([cands, cands + 2e-6, [v.min() - 1.0, v.max() + 1.0]])
    c = c0.copy()
    best = _eval_point(v, y, w, np.sort(c)) if np.all(np.diff(c) > 0) else math.inf
    for _ in range(2):
        for j in range(c.size):
            lo = box.gamma_lo[j] if j == 0 else max(box.gamma_lo[j], c[j - 1] + eps_gap)
            hi = (
                box.gamma_hi[j]
                if j == c.size - 1
                else min(box.gamma_hi[j], c[j + 1] - eps_gap)
            )
            for val in cands:
                if val < lo or val > hi:
                    continue
                trial = c.copy()
                trial[j] = val
                obj = _eval_point(v, y, w, trial)
                if obj < best:
                    best, c = obj, trial
    return c, best


def _initial_incumbent(data, box, enc, objective, rng, n_draws):
    """Multi-start alternating search for a good feasible starting point.

    A coarse uniform scan over the slope box (thresholds at matched index
    quantiles) seeds several starts; each start then alternates threshold
    coordinate descent with slope re-sampling in a shrinking neighborhood,
    scoring slope candidates against the polished thresholds.  The winner
    is converted to a feasible integer point by the rounding rule, so a
    valid incumbent exists whenever the box is non-empty.  Only objective
    evaluations are used — nothing is shared with the exhaustive oracle.
    """
    width = box.beta_hi - box.beta_lo
    center = 0.5 * (box.beta_lo + box.beta_hi)
    y, w = data.outcomes, data.effective_weights()

    def score(b, c):
        c = _repair_thresholds(np.asarray(c, float), box, enc.epsilon_gap)
        if c is None:
            return math.inf, None
        v = data.x1 + data.x_tilde @ b
        return _eval_point(v, y, w, c), c

    # coarse scan
    pool = [center] + [
        rng.uniform(box.beta_lo, box.beta_hi) for _ in range(max(1, n_draws) - 1)
    ]
    scored = []
    for b in pool:
        v = data.x1 + data.x_tilde @ b
        obj, c = score(b, _quantile_start(data, v, box))
        if c is not None:
            scored.append((obj, tuple(b), c))
    if not scored:
        return None
    scored.sort(key=lambda t: (t[0], t[1]))
    starts = scored[: min(8, len(scored))]

    best_obj, best_b, best_c = math.inf, None, None
    local = max(20, n_draws // 4)
    for obj0, b0, c0 in starts:
        b = np.asarray(b0, float)
        obj, c = obj0, c0
        radius = 0.2 * width
        for _ in range(3):
            c2, obj2 = _threshold_descent(data, box, b, c, enc.epsilon_gap)
            if obj2 < obj:
                obj, c = obj2, c2
            if data.n_slopes:
                for _ in range(local):
                    bt = np.clip(
                        b + rng.normal(size=width.size) * radius,
                        box.beta_lo,
                        box.beta_hi,
                    )
                    objt, ct = score(bt, c)
                    if objt < obj:
                        obj, b, c = objt, bt, ct
            radius = radius * 0.35
        if obj < best_obj:
            best_obj, best_b, best_c = obj, b, c

    # final polish: coordinate grid scan on the slope against the polished
    # thresholds, alternated with another threshold descent
    if data.n_slopes:
        radius = 0.1 * width
        for _ in range(3):
            for k in range(best_b.size):
                grid = np.linspace(
                    max(box.beta_lo[k], best_b[k] - radius[k]),
                    min(box.beta_hi[k], best_b[k] + radius[k]),
                    17,
                )
                for val in grid:
                    bt = best_b.copy()
                    bt[k] = val
                    vt = data.x1 + data.x_tilde @ bt
                    objt = _eval_point(vt, y, w, best_c)
                    if objt < best_obj:
                        best_obj, best_b = objt, bt
            c2, obj2 = _threshold_descent(data, box, best_b, best_c, enc.epsilon_gap)
            if obj2 < best_obj:
                best_obj, best_c = obj2, c2
            radius = radius * 0.4
    return _incumbent_from_point(best_b, best_c, data, box, enc)


def fit_lad(
    data: OrderedDataset,
    box: ParamBox,
    options: Optional[LadOptions] = None,
) -> LadEstimate:
    """Global LAD optimum over the box, certified by branch and bound.

    A rounding heuristic is registered with the solver so every node
    relaxation yields a feasible incumbent candidate; an initial incumbent
    is seeded from the box center plus a fixed-seed sample of slope draws
    with quantile-matched thresholds.  Under node/time limits the best
    incumbent is returned and the certificate carries status
    "feasible-with-gap".
    """
    opt = options or LadOptions()
    problem = build_lad_milp(data, box, opt.delta, opt.epsilon_gap)
    enc: LadMilpEncoding = problem.encoding
    p, nt = enc.n_slopes, enc.j_max - 1

    rng = np.random.default_rng(opt.seed)
    problem.initial_incumbent = _initial_incumbent(
        data, box, enc, problem.lp.objective, rng, opt.initial_search
    )
    problem.incumbent_callback = lambda x: _incumbent_from_point(
        x[:p], x[p : p + nt], data, box, enc
    )

    limits = MilpLimits(
        max_nodes=opt.max_nodes, max_seconds=opt.max_seconds, tol_gap=opt.tol_gap
    )
    sol = solve_milp(problem, limits, verbose=opt.verbose)
    if sol.x is None:
        raise RuntimeError(f"LAD MILP terminated without an incumbent: {sol.status}")

    beta = sol.x[:p].copy()
    gamma = sol.x[p : p + nt].copy()
    if opt.refine and sol.status == "optimal" and enc.n * nt <= 2000:
        refined = _analytic_center(data, box, enc, sol.x)
        if refined is not None:
            rb, rg = refined
            if (
                abs(lad_objective(data, rb, rg) - sol.objective)
                <= max(opt.tol_gap, 1e-9)
            ):
                beta, gamma = rb, rg
    # guard against eps-level ordering ties in the reported thresholds
    if np.any(np.diff(gamma) <= 0):
        rep = _repair_thresholds(gamma, box, opt.epsilon_gap)
        if rep is not None:
            gamma = rep
    return LadEstimate(beta, gamma, sol.objective, sol)


def _analytic_center(data, box, enc: LadMilpEncoding, x):
    """Max-min-slack representative of the optimal (b, c) polyhedron.

    Within the optimal indicator pattern the estimator is set-valued; the
    reported point maximizes the smallest slack of the pattern-defining
    inequalities, clipped to the box.
    """
    p, nt, n = enc.n_slopes, enc.j_max - 1, enc.n
    d = x[p + nt :].reshape(n, nt) > 0.5
    xt = data.x_tilde
    rows, cols, vals, senses, rhs = [], [], [], [], []
    s_col = p + nt
    r = 0
    for i in range(n):
        for j in range(nt):
            cols.extend([p + j, s_col])
            rows.extend([r, r])
            if d[i, j]:
                vals.extend([1.0, -1.0])
                senses.append("G")
                rhs.append(data.x1[i])
            else:
                vals.extend([1.0, 1.0])
                senses.append("L")
                rhs.append(data.x1[i] - enc.delta)
            for q in range(p):
                if xt[i, q] != 0.0:
                    rows.append(r)
                    cols.append(q)
                    vals.append(-xt[i, q])
            r += 1
    for j in range(nt - 1):
        rows.extend([r, r, r])
        cols.extend([p + j + 1, p + j, s_col])
        vals.extend([1.0, -1.0, -1.0])
        senses.append("G")
        rhs.append(enc.epsilon_gap)
        r += 1
    a = sp.coo_matrix((vals, (rows, cols)), shape=(r, p + nt + 1)).tocsr()
    obj = np.zeros(p + nt + 1)
    obj[s_col] = 1.0
    lp = LinearProgram(
        objective=obj,
        a_matrix=a,
        senses=np.array(senses),
        rhs=np.array(rhs),
        lower=np.concatenate([box.beta_lo, box.gamma_lo, [0.0]]),
        upper=np.concatenate([box.beta_hi, box.gamma_hi, [1e6]]),
        maximize=True,
    )
    sol = solve_lp(lp)
    if not sol.is_optimal or sol.objective <= 0.0:
        return None
    return sol.x[:p], sol.x[p : p + nt]


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _cut_dp_batch(vmat, coeffw, box: ParamBox, width_tol):
    """Optimal threshold cost per slope candidate, by cut-position DP.

    ``vmat`` is (B, n) index values per candidate; ``coeffw`` is (n, J-1)
    weighted score coefficients.  Cut t for threshold j places c_j between
    the t-th and (t+1)-th sorted index value; cut feasibility requires a
    realizable interval inside the gamma box.  Returns (best costs, sorted
    index values, orders) for later reconstruction.
    """
    B, n = vmat.shape
    nt = coeffw.shape[1]
    order = np.argsort(vmat, axis=1, kind="stable")
    vs = np.take_along_axis(vmat, order, axis=1)
    left = np.concatenate([np.full((B, 1), -np.inf), vs], axis=1)
    right = np.concatenate([vs, np.full((B, 1), np.inf)], axis=1)
    width_ok = (right - left) > width_tol
    pref = np.zeros((B, n + 1, nt))
    pref[:, 1:, :] = np.cumsum(coeffw[order], axis=1)

    f = None
    for j in range(nt):
        feas = width_ok & (left <= box.gamma_hi[j]) & (right > box.gamma_lo[j])
        cost = np.where(feas, pref[:, :, j], np.inf)
        if f is None:
            f = cost
        else:
            f = cost + np.minimum.accumulate(f, axis=1)
    return f.min(axis=1), vs, order


def _cut_dp_backtrack(v, coeffw, box: ParamBox, width_tol):
    """Scalar DP with backpointers; returns (cost, cut positions, sorted v)."""
    n = v.shape[0]
    nt = coeffw.shape[1]
    order = np.argsort(v, kind="stable")
    vs = v[order]
    left = np.concatenate([[-np.inf], vs])
    right = np.concatenate([vs, [np.inf]])
    width_ok = (right - left) > width_tol
    pref = np.zeros((n + 1, nt))
    pref[1:, :] = np.cumsum(coeffw[order], axis=0)

    f = np.full((nt, n + 1), np.inf)
    back = np.zeros((nt, n + 1), dtype=int)
    for j in range(nt):
        feas = width_ok & (left <= box.gamma_hi[j]) & (right > box.gamma_lo[j])
        if j == 0:
            f[0] = np.where(feas, pref[:, 0], np.inf)
        else:
            run = np.inf
            arg = 0
            for t in range(n + 1):
                if f[j - 1, t] < run:
                    run, arg = f[j - 1, t], t
                back[j, t] = arg
                f[j, t] = pref[t, j] + run if feas[t] else np.inf
    t = int(np.argmin(f[nt - 1]))
    cost = f[nt - 1, t]
    cuts = [t]
    for j in range(nt - 1, 0, -1):
        t = back[j, t]
        cuts.append(t)
    return cost, cuts[::-1], vs


def _thresholds_from_cuts(cuts, vs, box: ParamBox, eps_gap):
    """Place strictly increasing thresholds realizing the given cuts."""
    n = vs.shape[0]
    c = np.empty(len(cuts))
    prev = -np.inf
    for j, t in enumerate(cuts):
        lo_int = vs[t - 1] if t > 0 else -np.inf
        hi_int = vs[t] if t < n else np.inf
        a = max(lo_int, box.gamma_lo[j], prev + eps_gap)
        room = min(box.gamma_hi[j], hi_int - 1e-12 if np.isfinite(hi_int) else np.inf)
        if a > room:
            raise RuntimeError("threshold reconstruction failed (degenerate cell)")
        if np.isfinite(room):
            c[j] = a + 0.5 * (room - a)
        else:
            c[j] = max(a, min(box.gamma_hi[j], (vs[-1] if n else 0.0) + 1.0))
        prev = c[j]
    return c


def _slope_candidates_p1(data: OrderedDataset, box: ParamBox, extra_grid):
    x1, xt = data.x1, data.x_tilde[:, 0]
    lo, hi = box.beta_lo[0], box.beta_hi[0]
    pts = [lo, hi]
    # index-order crossings
    dif = xt[:, None] - xt[None, :]
    num = x1[None, :] - x1[:, None]
    iu = np.triu_indices(data.n, 1)
    dd, nn = dif[iu], num[iu]
    mask = np.abs(dd) > 1e-14
    pts.extend((nn[mask] / dd[mask]).tolist())
    # index-vs-gamma-bound crossings
    nz = np.abs(xt) > 1e-14
    for bound in np.concatenate([box.gamma_lo, box.gamma_hi]):
        pts.extend(((bound - x1[nz]) / xt[nz]).tolist())
    pts = np.array([p for p in pts if lo <= p <= hi])
    pts = np.unique(pts)
    mids = 0.5 * (pts[1:] + pts[:-1]) if pts.size > 1 else np.empty(0)
    cands = np.unique(np.concatenate([pts, mids]))
    if extra_grid:
        cands = np.unique(
            np.concatenate([cands, np.linspace(lo, hi, extra_grid)])
        )
    return cands[:, None]


def _slope_candidates_p2(data: OrderedDataset, box: ParamBox, extra_grid):
    x1, xt = data.x1, data.x_tilde
    lo, hi = box.beta_lo, box.beta_hi
    # lines a'b = r  from index-order crossings and gamma-bound crossings
    iu = np.triu_indices(data.n, 1)
    a_rows = [xt[iu[0]] - xt[iu[1]]]
    r_rows = [x1[iu[1]] - x1[iu[0]]]
    for bound in np.concatenate([box.gamma_lo, box.gamma_hi]):
        a_rows.append(xt)
        r_rows.append(bound - x1)
    A = np.concatenate(a_rows)
    r = np.concatenate(r_rows)
    keep = np.abs(A).max(axis=1) > 1e-12
    A, r = A[keep], r[keep]
    # box-edge pseudo-lines
    A = np.concatenate([A, [[1, 0], [1, 0], [0, 1], [0, 1]]])
    r = np.concatenate([r, [lo[0], hi[0], lo[1], hi[1]]])

    m = A.shape[0]
    i1, i2 = np.triu_indices(m, 1)
    det = A[i1, 0] * A[i2, 1] - A[i1, 1] * A[i2, 0]
    ok = np.abs(det) > 1e-10
    i1, i2, det = i1[ok], i2[ok], det[ok]
    bx = (r[i1] * A[i2, 1] - r[i2] * A[i1, 1]) / det
    by = (A[i1, 0] * r[i2] - A[i2, 0] * r[i1]) / det
    verts = np.column_stack([bx, by])
    span = float(np.max(np.maximum(hi - lo, 1e-6)))
    inside = np.all((verts >= lo - 1e-9) & (verts <= hi + 1e-9), axis=1)
    verts, i1, i2 = verts[inside], i1[inside], i2[inside]
    # perturb each vertex along the four sector bisectors of its two crossing
    # lines: one sample lands strictly inside each incident arrangement cell
    d1 = np.column_stack([-A[i1, 1], A[i1, 0]])
    d2 = np.column_stack([-A[i2, 1], A[i2, 0]])
    d1 /= np.linalg.norm(d1, axis=1, keepdims=True)
    d2 /= np.linalg.norm(d2, axis=1, keepdims=True)
    dirs = np.stack([d1 + d2, d1 - d2, -d1 + d2, -d1 - d2], axis=1)
    nrm = np.linalg.norm(dirs, axis=2, keepdims=True)
    dirs = np.divide(dirs, nrm, out=np.zeros_like(dirs), where=nrm > 1e-12)
    cand_list = []
    for eps in (1e-7 * span, 1e-4 * span):
        cand_list.append((verts[:, None, :] + eps * dirs).reshape(-1, 2))
    corners = np.array(
        [[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]],
         [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]]
    )
    cand_list.append(corners)
    cands = np.concatenate(cand_list)
    keep = np.all((cands >= lo - 1e-12) & (cands <= hi + 1e-12), axis=1)
    cands = np.clip(cands[keep], lo, hi)
    if extra_grid:
        g0 = np.linspace(lo[0], hi[0], extra_grid)
        g1 = np.linspace(lo[1], hi[1], extra_grid)
        grid = np.array(np.meshgrid(g0, g1)).reshape(2, -1).T
        cands = np.concatenate([cands, grid])
    return np.unique(np.round(cands / 1e-12) * 1e-12, axis=0)


def brute_force_lad(
    data: OrderedDataset,
    box: ParamBox,
    grid_resolution: int = 0,
    *,
    max_n: int = 50,
) -> LadEstimate:
    """Independent exact oracle for small instances (P <= 2, n <= 50).

    Slope candidates exhaust the index orderings over the slope box; for
    each candidate the optimal thresholds are found by exact cut DP.
    ``grid_resolution`` adds a uniform slope grid on top of the exhaustive
    candidates (useful as a redundancy check, not needed for exactness).
    """
    _check_box(data, box)
    p = data.n_slopes
    if p > 2 or data.n > max_n:
        raise ValueError("instance too large for the brute-force oracle")
    eps_gap = 1e-6
    width_tol = 4.0 * data.j_max * eps_gap
    w = data.effective_weights()
    coeffw = w[:, None] * np.stack(
        [score_coefficients(y, data.j_max) for y in data.outcomes]
    )
    offset = float(np.sum(w * np.abs(data.outcomes - data.j_max)))

    if p == 0:
        cands = np.zeros((1, 0))
    elif p == 1:
        cands = _slope_candidates_p1(data, box, grid_resolution)
    else:
        cands = _slope_candidates_p2(data, box, grid_resolution)

    best_cost, best_b = np.inf, None
    chunk = max(1, int(2_000_000 // max(1, data.n * data.j_max)))
    for s in range(0, cands.shape[0], chunk):
        bchunk = cands[s : s + chunk]
        vmat = data.x1[None, :] + bchunk @ data.x_tilde.T
        costs, _, _ = _cut_dp_batch(vmat, coeffw, box, width_tol)
        k = int(np.argmin(costs))
        if costs[k] < best_cost - 1e-12:
            best_cost, best_b = costs[k], bchunk[k]
    if best_b is None or not np.isfinite(best_cost):
        raise RuntimeError("no feasible threshold placement inside the box")

    v = data.x1 + data.x_tilde @ best_b
    cost, cuts, vs = _cut_dp_backtrack(v, coeffw, box, width_tol)
    gamma = _thresholds_from_cuts(cuts, vs, box, eps_gap)
    objective = cost + offset
    check = lad_objective(data, best_b, Thresholds(gamma))
    if abs(check - objective) > 1e-9:
        raise RuntimeError(
            f"oracle reconstruction mismatch: DP {objective}, direct {check}"
        )
    return LadEstimate(np.asarray(best_b, dtype=float), gamma, float(objective))
