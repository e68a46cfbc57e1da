"""Simplex correctness against independent oracles.

Primary oracle: brute-force vertex enumeration over all constraint/bound
intersections for small dense problems.  Secondary checks: weak duality via
explicit feasible dual multipliers on hand-built problems, determinism, and
status handling on infeasible/unbounded instances.
"""

import itertools

import numpy as np
import pytest

from ordmedian.lp import LinearProgram, solve_lp, write_lp_text


def _random_lp(rng, n, m, bounded=True):
    a = rng.normal(size=(m, n))
    x_feas = rng.uniform(-1, 1, size=n)  # plant a feasible point
    senses = rng.choice(["L", "G", "E"], size=m, p=[0.45, 0.45, 0.1])
    slack = rng.uniform(0.0, 2.0, size=m)
    ax = a @ x_feas
    rhs = np.where(senses == "L", ax + slack, np.where(senses == "G", ax - slack, ax))
    lo = np.full(n, -5.0) if bounded else np.full(n, -np.inf)
    hi = np.full(n, 5.0)
    return LinearProgram(
        objective=rng.normal(size=n),
        a_matrix=a,
        senses=senses,
        rhs=rhs,
        lower=lo,
        upper=hi,
    )


def _vertex_enumeration_optimum(lp):
    """Exhaustive check over all basic points: intersections of n active
    constraints drawn from rows and bound planes."""
    n = lp.n_cols
    planes = []  # (normal, offset)
    for i in range(lp.n_rows):
        planes.append((lp.a_matrix[i], lp.rhs[i]))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lp.lower[j]):
            planes.append((e, lp.lower[j]))
        if np.isfinite(lp.upper[j]):
            planes.append((e.copy(), lp.upper[j]))
    best = np.inf
    tol = 1e-7
    for combo in itertools.combinations(range(len(planes)), n):
        mat = np.array([planes[k][0] for k in combo])
        if abs(np.linalg.det(mat)) < 1e-10:
            continue
        x = np.linalg.solve(mat, np.array([planes[k][1] for k in combo]))
        if np.any(x < lp.lower - tol) or np.any(x > lp.upper + tol):
            continue
        ax = lp.a_matrix @ x
        ok = True
        for i in range(lp.n_rows):
            s = lp.senses[i]
            if s == "L" and ax[i] > lp.rhs[i] + tol:
                ok = False
            elif s == "G" and ax[i] < lp.rhs[i] - tol:
                ok = False
            elif s == "E" and abs(ax[i] - lp.rhs[i]) > tol:
                ok = False
        if ok:
            best = min(best, float(lp.objective @ x))
    return best


def test_matches_vertex_enumeration_on_random_lps():
    rng = np.random.default_rng(7)
    solved = 0
    for _ in range(40):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(1, 4))
        lp = _random_lp(rng, n, m)
        sol = solve_lp(lp)
        assert sol.status == "optimal"  # a feasible point was planted
        oracle = _vertex_enumeration_optimum(lp)
        assert np.isfinite(oracle)
        assert sol.objective == pytest.approx(oracle, abs=1e-6)
        solved += 1
    assert solved == 40


def test_known_small_problem():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0 -> 36 at (2, 6)
    lp = LinearProgram(
        objective=np.array([3.0, 5.0]),
        a_matrix=np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]]),
        senses=np.array(["L", "L", "L"]),
        rhs=np.array([4.0, 12.0, 18.0]),
        lower=np.zeros(2),
        upper=np.full(2, np.inf),
        maximize=True,
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(36.0, abs=1e-9)
    assert sol.x == pytest.approx([2.0, 6.0], abs=1e-9)


def test_weak_duality_certificate():
    # min c'x st Ax >= b, x >= 0; any y >= 0 with A'y <= c gives b'y <= optimum
    rng = np.random.default_rng(11)
    a = np.abs(rng.normal(size=(3, 4))) + 0.1
    c = np.abs(rng.normal(size=4)) + 0.5
    b = np.abs(rng.normal(size=3))
    lp = LinearProgram(
        objective=c,
        a_matrix=a,
        senses=np.array(["G"] * 3),
        rhs=b,
        lower=np.zeros(4),
        upper=np.full(4, np.inf),
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    y = np.full(3, 1e-3)
    while np.all(a.T @ (y * 2) <= c):
        y = y * 2
    assert b @ y <= sol.objective + 1e-9


def test_infeasible_detected():
    lp = LinearProgram(
        objective=np.array([1.0]),
        a_matrix=np.array([[1.0], [1.0]]),
        senses=np.array(["G", "L"]),
        rhs=np.array([2.0, 1.0]),
        lower=np.array([-10.0]),
        upper=np.array([10.0]),
    )
    assert solve_lp(lp).status == "infeasible"


def test_unbounded_detected():
    lp = LinearProgram(
        objective=np.array([-1.0, 0.0]),
        a_matrix=np.array([[0.0, 1.0]]),
        senses=np.array(["L"]),
        rhs=np.array([1.0]),
        lower=np.array([0.0, 0.0]),
        upper=np.array([np.inf, np.inf]),
    )
    assert solve_lp(lp).status == "unbounded"


def test_equality_rows_respected():
    lp = LinearProgram(
        objective=np.array([1.0, 2.0, 0.5]),
        a_matrix=np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 0.0]]),
        senses=np.array(["E", "E"]),
        rhs=np.array([3.0, 0.5]),
        lower=np.zeros(3),
        upper=np.full(3, 10.0),
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert lp.a_matrix @ sol.x == pytest.approx(lp.rhs, abs=1e-8)


def test_determinism_same_input_same_pivots():
    rng = np.random.default_rng(23)
    lp = _random_lp(rng, 5, 4)
    a = solve_lp(lp)
    b = solve_lp(lp)
    assert a.status == b.status
    assert np.array_equal(a.x, b.x)
    assert a.iterations == b.iterations


def test_negative_lower_bounds_and_offset():
    lp = LinearProgram(
        objective=np.array([1.0, 1.0]),
        a_matrix=np.array([[1.0, 1.0]]),
        senses=np.array(["G"]),
        rhs=np.array([-3.0]),
        lower=np.array([-2.0, -2.0]),
        upper=np.array([2.0, 2.0]),
        objective_offset=10.0,
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(7.0, abs=1e-9)  # x = (-2, -1) say


def test_degenerate_problem_terminates():
    # many redundant rows through one vertex: stalling guard must kick in
    n = 4
    a = np.vstack([np.eye(n), np.ones((3, n))])
    lp = LinearProgram(
        objective=-np.ones(n),
        a_matrix=a,
        senses=np.array(["L"] * (n + 3)),
        rhs=np.concatenate([np.zeros(n), np.zeros(3)]),
        lower=np.zeros(n),
        upper=np.full(n, np.inf),
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.0, abs=1e-9)


def test_write_lp_text_round_trips_through_scipy(tmp_path):
    pytest.importorskip("scipy")
    lp = LinearProgram(
        objective=np.array([1.0, -2.0]),
        a_matrix=np.array([[1.0, 1.0], [1.0, -1.0]]),
        senses=np.array(["L", "G"]),
        rhs=np.array([4.0, -1.0]),
        lower=np.zeros(2),
        upper=np.array([3.0, 3.0]),
    )
    path = tmp_path / "prob.mps"
    write_lp_text(lp, str(path))
    text = path.read_text()
    for section in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
        assert section in text
