"""Generator contracts: determinism, threshold rule, error-law medians."""

import math

import numpy as np
import pytest
from scipy import stats

from ordmedian.model import lad_objective, predict_category, ThetaSplit, Thresholds
from ordmedian.simulate import CovariateLaw, DgpSpec, generate


def test_same_seed_same_dataset():
    spec = DgpSpec(n=500, j_max=3, beta=(0.4,), gamma=(-0.3, 0.6), seed=11)
    a, _ = generate(spec)
    b, _ = generate(spec)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert np.array_equal(a.covariates, b.covariates)


def test_different_seed_different_draws():
    base = dict(n=500, j_max=3, beta=(0.4,), gamma=(-0.3, 0.6))
    a, _ = generate(DgpSpec(seed=1, **base))
    b, _ = generate(DgpSpec(seed=2, **base))
    assert not np.array_equal(a.covariates, b.covariates)


def test_outcomes_follow_threshold_rule_exactly():
    spec = DgpSpec(n=200, j_max=4, beta=(0.5, -0.2), gamma=(-1.0, 0.0, 1.2), seed=3)
    data, truth = generate(spec)
    implied = 1 + np.sum(truth.latent[:, None] > truth.gamma[None, :], axis=1)
    assert np.array_equal(data.outcomes, implied)


def test_degenerate_error_is_separable():
    spec = DgpSpec(n=40, j_max=3, beta=(0.5,), gamma=(-0.4, 0.6),
                   error_law="none", seed=5)
    data, truth = generate(spec)
    assert lad_objective(data, list(spec.beta), list(spec.gamma)) == 0.0
    pred = predict_category(
        data.covariates, ThetaSplit(np.asarray(spec.beta)), Thresholds(truth.gamma)
    )
    assert np.array_equal(pred, data.outcomes)


def test_normal_cells_match_analytic_probabilities():
    n = 10**5
    spec = DgpSpec(n=n, j_max=3, beta=(0.5,), gamma=(-0.5, 0.7), seed=42)
    data, truth = generate(spec)
    idx = data.covariates @ truth.theta
    gfull = np.array([-np.inf, -0.5, 0.7, np.inf])
    for j in (1, 2, 3):
        p = float(
            np.mean(stats.norm.cdf(gfull[j] - idx) - stats.norm.cdf(gfull[j - 1] - idx))
        )
        emp = float(np.mean(data.outcomes == j))
        se = math.sqrt(p * (1 - p) / n)
        assert abs(emp - p) < 3 * se + 1e-12


@pytest.mark.parametrize("law", ["normal", "logistic", "shifted-exponential"])
def test_error_median_zero(law):
    spec = DgpSpec(n=10**5, j_max=3, beta=(0.3,), gamma=(-0.5, 0.7),
                   error_law=law, seed=8)
    _, truth = generate(spec)
    assert abs(np.median(truth.errors)) < 0.02


def test_shifted_exponential_mean_is_positive():
    spec = DgpSpec(n=10**5, j_max=3, beta=(0.3,), gamma=(-0.5, 0.7),
                   error_law="shifted-exponential", seed=9)
    _, truth = generate(spec)
    assert truth.errors.mean() == pytest.approx(1 - math.log(2), abs=0.02)


def test_logistic_errors_have_unit_variance():
    spec = DgpSpec(n=2 * 10**5, j_max=3, beta=(0.3,), gamma=(-0.5, 0.7),
                   error_law="logistic", seed=10)
    _, truth = generate(spec)
    assert truth.errors.var() == pytest.approx(1.0, abs=0.02)


def test_conditional_median_zero_in_covariate_bins():
    spec = DgpSpec(n=10**5, j_max=3, beta=(0.3,), gamma=(-0.5, 0.7),
                   error_law="shifted-exponential", seed=14)
    data, truth = generate(spec)
    x1 = data.covariates[:, 0]
    edges = np.quantile(x1, [0.0, 0.25, 0.5, 0.75, 1.0])
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (x1 >= lo) & (x1 <= hi)
        assert abs(np.median(truth.errors[mask])) < 0.02


def test_skedastic_scaling():
    spec = DgpSpec(n=10**5, j_max=3, beta=(0.0,), gamma=(-0.5, 0.7),
                   sked_alpha=(0.4,), seed=20)
    data, truth = generate(spec)
    assert np.allclose(truth.scales, np.exp(0.4 * data.covariates[:, 0]))
    # larger scale index -> wider error spread, median still zero
    hi = truth.scales > np.median(truth.scales)
    assert truth.errors[hi].std() > truth.errors[~hi].std()
    assert abs(np.median(truth.errors[hi])) < 0.05


def test_covariate_laws():
    laws = (
        CovariateLaw("uniform", (2.0, 5.0)),
        CovariateLaw("discrete", values=(0.0, 1.0, 2.0), probs=(0.5, 0.25, 0.25)),
    )
    spec = DgpSpec(n=20000, j_max=2, beta=(0.3,), gamma=(2.5,),
                   covariate_laws=laws, seed=21)
    data, _ = generate(spec)
    assert data.covariates[:, 0].min() >= 2.0
    assert data.covariates[:, 0].max() <= 5.0
    assert set(np.unique(data.covariates[:, 1])) == {0.0, 1.0, 2.0}
    assert np.mean(data.covariates[:, 1] == 0.0) == pytest.approx(0.5, abs=0.02)


def test_spec_validation():
    with pytest.raises(ValueError):
        DgpSpec(n=10, j_max=3, beta=(0.1,), gamma=(0.5, 0.5))  # not increasing
    with pytest.raises(ValueError):
        DgpSpec(n=10, j_max=3, beta=(0.1,), gamma=(0.0, 1.0), error_law="cauchy")
    with pytest.raises(ValueError):
        DgpSpec(n=0, j_max=3, beta=(0.1,), gamma=(0.0, 1.0))
