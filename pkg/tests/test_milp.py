"""Branch-and-bound correctness against exhaustive binary enumeration."""

import itertools
import math

import numpy as np
import pytest

from ordmedian.lp import LinearProgram, solve_lp
from ordmedian.milp import MilpLimits, MilpProblem, solve_milp


def _random_milp(rng, n_bin, n_cont, m):
    n = n_bin + n_cont
    a = rng.normal(size=(m, n))
    senses = rng.choice(["L", "G"], size=m)
    rhs = rng.normal(size=m) * 2.0
    lo = np.concatenate([np.zeros(n_bin), np.full(n_cont, -3.0)])
    hi = np.concatenate([np.ones(n_bin), np.full(n_cont, 3.0)])
    lp = LinearProgram(
        objective=rng.normal(size=n),
        a_matrix=a,
        senses=senses,
        rhs=rhs,
        lower=lo,
        upper=hi,
    )
    mask = np.concatenate([np.ones(n_bin, bool), np.zeros(n_cont, bool)])
    return MilpProblem(lp=lp, binary_mask=mask)


def _enumerate_optimum(problem):
    """Fix every binary assignment, solve the continuous remainder."""
    lp = problem.lp
    bins = np.nonzero(problem.binary_mask)[0]
    best = math.inf
    for bits in itertools.product((0.0, 1.0), repeat=bins.size):
        lo, hi = lp.lower.copy(), lp.upper.copy()
        lo[bins] = bits
        hi[bins] = bits
        sol = solve_lp(
            LinearProgram(
                objective=lp.objective,
                a_matrix=lp.a_matrix,
                senses=lp.senses,
                rhs=lp.rhs,
                lower=lo,
                upper=hi,
                objective_offset=lp.objective_offset,
            )
        )
        if sol.status == "optimal":
            best = min(best, sol.objective)
    return best


def test_against_exhaustive_enumeration():
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(30):
        n_bin = int(rng.integers(2, 9))
        n_cont = int(rng.integers(0, 3))
        m = int(rng.integers(1, 5))
        problem = _random_milp(rng, n_bin, n_cont, m)
        sol = solve_milp(problem)
        oracle = _enumerate_optimum(problem)
        if math.isinf(oracle):
            assert sol.status == "infeasible"
        else:
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(oracle, abs=1e-6)
        checked += 1
    assert checked == 30


def test_knapsack_known_answer():
    # max 5a + 4b + 3c st 2a + 3b + c <= 5 -> 9 at a = b = 1 (weight 5)
    lp = LinearProgram(
        objective=np.array([-5.0, -4.0, -3.0]),
        a_matrix=np.array([[2.0, 3.0, 1.0]]),
        senses=np.array(["L"]),
        rhs=np.array([5.0]),
        lower=np.zeros(3),
        upper=np.ones(3),
    )
    sol = solve_milp(MilpProblem(lp=lp, binary_mask=np.ones(3, bool)))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-9.0)
    assert np.array_equal(sol.x, [1.0, 1.0, 0.0])


def test_bound_log_is_monotone_and_valid():
    rng = np.random.default_rng(5)
    for _ in range(10):
        problem = _random_milp(rng, 6, 2, 3)
        sol = solve_milp(problem)
        log = np.asarray(sol.bound_log)
        if log.size == 0:
            continue
        assert np.all(np.diff(log) >= -1e-9)  # global bound never regresses
        if sol.status == "optimal":
            # while unexplored nodes remain they can still hold the optimum,
            # so every logged pending bound that precedes the final incumbent
            # must stay below it; the first entry always does
            assert log[0] <= sol.objective + 1e-6


def test_incumbent_callback_candidates_are_verified():
    lp = LinearProgram(
        objective=np.array([-1.0, -1.0]),
        a_matrix=np.array([[1.0, 1.0]]),
        senses=np.array(["L"]),
        rhs=np.array([1.0]),
        lower=np.zeros(2),
        upper=np.ones(2),
    )
    bogus_calls = []

    def callback(x):
        bogus_calls.append(x)
        return np.array([1.0, 1.0])  # violates the row; must be rejected

    problem = MilpProblem(
        lp=lp, binary_mask=np.ones(2, bool), incumbent_callback=callback
    )
    sol = solve_milp(problem)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-1.0)
    assert len(bogus_calls) >= 1


def test_initial_incumbent_respected():
    lp = LinearProgram(
        objective=np.array([1.0, 1.0]),
        a_matrix=np.array([[1.0, 1.0]]),
        senses=np.array(["G"]),
        rhs=np.array([1.0]),
        lower=np.zeros(2),
        upper=np.ones(2),
    )
    problem = MilpProblem(
        lp=lp,
        binary_mask=np.ones(2, bool),
        initial_incumbent=np.array([1.0, 1.0]),
    )
    sol = solve_milp(problem, MilpLimits(max_nodes=0))
    assert sol.status in ("optimal", "feasible-with-gap")
    assert sol.objective == pytest.approx(2.0)
    assert sol.node_count == 0


def test_node_limit_yields_bound_and_gap_status():
    rng = np.random.default_rng(18)
    problem = _random_milp(rng, 10, 0, 4)
    full = solve_milp(problem)
    assert full.status == "optimal"
    limited = solve_milp(problem, MilpLimits(max_nodes=3))
    assert limited.bound <= full.objective + 1e-9
    if limited.x is not None:
        assert limited.objective >= full.objective - 1e-9


def test_integral_objective_early_cut():
    # objective is a sum of binaries: integral, so bound > incumbent - 1 prunes
    rng = np.random.default_rng(2)
    n = 8
    a = rng.normal(size=(4, n))
    x_feas = rng.integers(0, 2, n).astype(float)
    rhs = a @ x_feas + 0.5
    lp = LinearProgram(
        objective=np.ones(n),
        a_matrix=a,
        senses=np.array(["L"] * 4),
        rhs=rhs,
        lower=np.zeros(n),
        upper=np.ones(n),
    )
    plain = solve_milp(MilpProblem(lp=lp, binary_mask=np.ones(n, bool)))
    clever = solve_milp(
        MilpProblem(lp=lp, binary_mask=np.ones(n, bool), objective_integral=True)
    )
    assert plain.status == clever.status == "optimal"
    assert clever.objective == pytest.approx(plain.objective)
    assert clever.node_count <= plain.node_count


def test_determinism():
    rng = np.random.default_rng(31)
    problem = _random_milp(rng, 7, 1, 3)
    a = solve_milp(problem)
    b = solve_milp(problem)
    assert a.status == b.status
    assert a.node_count == b.node_count
    if a.x is not None:
        assert np.array_equal(a.x, b.x)
