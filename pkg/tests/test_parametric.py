"""Heteroskedastic ordered probit/logit: gradients, oracles, recovery."""

import math
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from ordmedian.model import OrderedDataset
from ordmedian.parametric import (
    FitOptions,
    HetOrderedSpec,
    HetParams,
    fit_het_ordered,
    loglik,
    loglik_packed,
    median_latent,
    scale_by_reference,
)
from ordmedian.parametric import _cell_terms, _start_values, _unpack
from ordmedian.simulate import DgpSpec, generate

_LOGISTIC_SCALE = math.sqrt(3.0) / math.pi


def _dataset(seed=0, n=400, j_max=4):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 3))
    h = x[:, :2] @ np.array([1.0, -0.5]) + rng.normal(size=n) * np.exp(
        0.3 * x[:, 2]
    )
    gamma = np.array([-0.8, 0.2, 1.1])[: j_max - 1]
    y = 1 + np.sum(h[:, None] > gamma[None, :], axis=1)
    return OrderedDataset(outcomes=y, covariates=x, j_max=j_max)


def _fd4(f, vec, h=1e-4):
    out = np.zeros_like(vec)
    for k in range(vec.size):
        e = np.zeros_like(vec)
        e[k] = h
        out[k] = (8 * (f(vec + e) - f(vec - e)) - (f(vec + 2 * e) - f(vec - 2 * e))) / (
            12 * h
        )
    return out


def test_cell_probabilities_match_quadrature():
    """Independent oracle: integrate the scaled error density over each cell."""
    data = _dataset(n=30)
    params = HetParams(
        theta=np.array([0.8, -0.4]), alpha=np.array([0.25]),
        gamma=np.array([-0.7, 0.1, 1.0]),
    )
    for link, density in (
        ("normal", stats.norm.pdf),
        ("logistic", lambda u: stats.logistic.pdf(u, scale=_LOGISTIC_SCALE)),
    ):
        spec = HetOrderedSpec(link, (0, 1), (2,))
        prob = _cell_terms(spec, params, data)[2]
        idx = data.covariates[:, :2] @ params.theta
        s = np.exp(0.25 * data.covariates[:, 2])
        gfull = np.concatenate([[-np.inf], params.gamma, [np.inf]])
        for i in range(data.n):
            lo = gfull[data.outcomes[i] - 1]
            hi = gfull[data.outcomes[i]]
            val, _ = integrate.quad(
                lambda h: density((h - idx[i]) / s[i]) / s[i], lo, hi,
                points=None if not np.isfinite(lo) or not np.isfinite(hi) else [idx[i]],
            )
            assert prob[i] == pytest.approx(val, rel=1e-7, abs=1e-10)


def test_logistic_link_has_unit_variance():
    # the scaled logistic CDF should match a variance-one distribution
    spec = HetOrderedSpec("logistic", (0,))
    var, _ = integrate.quad(
        lambda u: u * u * stats.logistic.pdf(u, scale=_LOGISTIC_SCALE), -40, 40
    )
    assert var == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("link", ["normal", "logistic"])
def test_analytic_gradient_matches_finite_differences(link):
    data = _dataset()
    spec = HetOrderedSpec(link, (0, 1), (2,))
    rng = np.random.default_rng(7)
    x0 = _start_values(spec, data, 2, 1)
    f = lambda v: loglik_packed(spec, v, data, 2, 1)[0]
    checked = 0
    while checked < 20:
        vec = x0 + rng.normal(size=x0.size) * 0.3
        th, al, ga = _unpack(vec, 2, 1, 3)
        prob = _cell_terms(spec, HetParams(th, al, ga), data)[2]
        if prob.min() < 1e-8:
            continue  # stay in the regular region (no probability flooring)
        _, grad = loglik_packed(spec, vec, data, 2, 1)
        num = _fd4(f, vec)
        assert np.max(np.abs(grad - num) / (1.0 + np.abs(num))) < 1e-5
        checked += 1


def test_loglik_equals_sum_of_log_cell_probs():
    data = _dataset(n=50)
    spec = HetOrderedSpec("normal", (0, 1))
    params = HetParams(
        theta=np.array([1.0, -0.5]), alpha=np.zeros(0),
        gamma=np.array([-0.8, 0.2, 1.1]),
    )
    gfull = np.concatenate([[-np.inf], params.gamma, [np.inf]])
    idx = data.covariates[:, :2] @ params.theta
    manual = sum(
        math.log(
            stats.norm.cdf(gfull[y] - v) - stats.norm.cdf(gfull[y - 1] - v)
        )
        for y, v in zip(data.outcomes, idx)
    )
    assert loglik(spec, params, data) == pytest.approx(manual, rel=1e-12)


def test_recovery_on_synthetic_probit_data():
    spec_dgp = DgpSpec(
        n=4000, j_max=3, beta=(0.7, 0.0), gamma=(-0.5, 0.8),
        error_law="normal", sked_alpha=(0.0, 0.0, 0.3), seed=12,
    )
    # third covariate drives the variance only through the skedastic index
    data, truth = generate(spec_dgp)
    spec = HetOrderedSpec("normal", (0, 1), (2,))
    # the DGP scales by exp(0.3 x3); the mean index is x1 + 0.7 x2
    fit = fit_het_ordered(spec, data)
    assert fit.converged
    assert fit.theta_hat[0] == pytest.approx(1.0, abs=0.1)
    assert fit.theta_hat[1] == pytest.approx(0.7, abs=0.1)
    assert fit.alpha_hat[0] == pytest.approx(0.3, abs=0.1)
    assert fit.gamma_hat == pytest.approx([-0.5, 0.8], abs=0.12)


def test_label_flip_symmetry():
    """Reversing category order and negating the index leaves the likelihood
    unchanged (both links are symmetric around zero)."""
    data = _dataset(n=120)
    flipped = OrderedDataset(
        outcomes=data.j_max + 1 - data.outcomes,
        covariates=data.covariates,
        j_max=data.j_max,
    )
    params = HetParams(
        theta=np.array([0.6, -0.2]), alpha=np.array([0.1]),
        gamma=np.array([-0.9, 0.0, 0.8]),
    )
    mirrored = HetParams(
        theta=-params.theta, alpha=params.alpha, gamma=-params.gamma[::-1]
    )
    for link in ("normal", "logistic"):
        spec = HetOrderedSpec(link, (0, 1), (2,))
        assert loglik(spec, params, data) == pytest.approx(
            loglik(spec, mirrored, flipped), rel=1e-12
        )


def test_degenerate_outcomes_raise():
    x = np.random.default_rng(0).normal(size=(30, 2))
    data = OrderedDataset(outcomes=np.ones(30, dtype=int), covariates=x, j_max=3)
    with pytest.raises(ValueError, match="degenerate"):
        fit_het_ordered(HetOrderedSpec("normal", (0, 1)), data)


def test_non_convergence_is_reported_not_silent():
    data = _dataset(n=200)
    spec = HetOrderedSpec("normal", (0, 1), (2,))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = fit_het_ordered(spec, data, FitOptions(max_iter=1))
    assert not fit.converged
    assert fit.message
    assert any("converge" in str(w.message) for w in caught)


def test_scale_by_reference():
    data = _dataset(n=300)
    fit = fit_het_ordered(HetOrderedSpec("normal", (0, 1), (2,)), data)
    scaled, scaled_gamma = scale_by_reference(fit, "x1")
    assert scaled[0] == pytest.approx(1.0)
    assert scaled[1] == pytest.approx(fit.theta_hat[1] / fit.theta_hat[0])
    assert scaled_gamma == pytest.approx(fit.gamma_hat / fit.theta_hat[0])
    with pytest.raises(KeyError):
        scale_by_reference(fit, "nope")


def test_median_latent_is_linear_index():
    data = _dataset(n=200)
    fit = fit_het_ordered(HetOrderedSpec("normal", (0, 1), (2,)), data)
    x = np.array([0.5, -1.0])
    assert median_latent(fit, x) == pytest.approx(float(x @ fit.theta_hat))
