"""Heteroskedastic ordered probit / logit by maximum likelihood.

Latent model: H = x'theta + U with U | x distributed as a mean-zero,
variance-one normal or logistic variable scaled by the exponential
skedastic function exp(z'alpha).  Cell probabilities are
F((gamma_j - x'theta)/s) - F((gamma_{j-1} - x'theta)/s) with s = exp(z'alpha).
The logistic link is scaled to unit variance so that both links share the
error normalization.

No intercept enters the mean index (absorbed by the thresholds) and no
intercept enters the skedastic index (the variance baseline is fixed at 1),
which pins down location and scale.

Threshold monotonicity is maintained by optimizing gamma_1 and the log
increments log(gamma_j - gamma_{j-1}); the optimizer is a quasi-Newton
(BFGS) ascent with analytic gradients, converged when the gradient
infinity-norm drops below ``gtol``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import optimize, special

from .model import OrderedDataset

__all__ = [
    "HetOrderedSpec",
    "HetParams",
    "HetOrderedFit",
    "loglik",
    "loglik_packed",
    "fit_het_ordered",
    "scale_by_reference",
    "median_latent",
]

_PROB_FLOOR = 1e-300
_GRAD_CLIP = 1e10
_LOGISTIC_SCALE = math.sqrt(3.0) / math.pi  # unit-variance logistic


@dataclass(frozen=True)
class HetOrderedSpec:
    """Which covariate columns enter the mean and the variance index."""

    link: str  # "normal" | "logistic"
    mean_columns: Tuple[int, ...]
    sked_columns: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.link not in ("normal", "logistic"):
            raise ValueError("link must be 'normal' or 'logistic'")
        object.__setattr__(self, "mean_columns", tuple(self.mean_columns))
        object.__setattr__(self, "sked_columns", tuple(self.sked_columns))


@dataclass(frozen=True)
class HetParams:
    theta: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        for name in ("theta", "alpha", "gamma"):
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=float)
            )


@dataclass
class HetOrderedFit:
    spec: HetOrderedSpec
    theta_hat: np.ndarray
    alpha_hat: np.ndarray
    gamma_hat: np.ndarray
    loglik: float
    converged: bool
    message: str = ""
    n_iter: int = 0
    mean_names: Tuple[str, ...] = ()


def _cdf_pdf(link: str, u: np.ndarray):
    if link == "normal":
        cdf = special.ndtr(u)
        pdf = np.exp(-0.5 * np.square(u)) / math.sqrt(2.0 * math.pi)
    else:
        t = u / _LOGISTIC_SCALE
        cdf = special.expit(t)
        pdf = cdf * (1.0 - cdf) / _LOGISTIC_SCALE
    return cdf, pdf


def _cell_terms(spec: HetOrderedSpec, params: HetParams, data: OrderedDataset):
    """Per-observation cell probabilities and the pieces of their gradient."""
    if params.gamma.size != data.j_max - 1:
        raise ValueError("gamma length must be j_max - 1")
    if np.any(np.diff(params.gamma) <= 0):
        raise ValueError("thresholds must be strictly increasing")
    xm = data.covariates[:, spec.mean_columns]
    zs = data.covariates[:, spec.sked_columns]
    if params.theta.size != xm.shape[1] or params.alpha.size != zs.shape[1]:
        raise ValueError("parameter dimensions do not match the spec")
    idx = xm @ params.theta
    s = np.exp(zs @ params.alpha) if zs.shape[1] else np.ones(data.n)

    gfull = np.concatenate([[-np.inf], params.gamma, [np.inf]])
    y = data.outcomes
    a_hi = gfull[y]
    a_lo = gfull[y - 1]
    u_hi = (a_hi - idx) / s
    u_lo = (a_lo - idx) / s
    F_hi, f_hi = _cdf_pdf(spec.link, np.where(np.isfinite(u_hi), u_hi, 0.0))
    F_lo, f_lo = _cdf_pdf(spec.link, np.where(np.isfinite(u_lo), u_lo, 0.0))
    F_hi = np.where(u_hi == np.inf, 1.0, F_hi)
    f_hi = np.where(np.isfinite(u_hi), f_hi, 0.0)
    F_lo = np.where(u_lo == -np.inf, 0.0, F_lo)
    f_lo = np.where(np.isfinite(u_lo), f_lo, 0.0)
    prob = np.maximum(F_hi - F_lo, _PROB_FLOOR)
    # u * f(u) terms for the skedastic gradient; 0 at infinite arguments
    uf_hi = np.where(np.isfinite(u_hi), u_hi, 0.0) * f_hi
    uf_lo = np.where(np.isfinite(u_lo), u_lo, 0.0) * f_lo
    return idx, s, prob, f_hi, f_lo, uf_hi, uf_lo, xm, zs


def loglik(spec: HetOrderedSpec, params: HetParams, data: OrderedDataset) -> float:
    """Weighted log-likelihood; cell probabilities floored at 1e-300."""
    _, _, prob, *_ = _cell_terms(spec, params, data)
    return float(np.sum(data.effective_weights() * np.log(prob)))


def _loglik_grad(spec, params: HetParams, data):
    idx, s, prob, f_hi, f_lo, uf_hi, uf_lo, xm, zs = _cell_terms(
        spec, params, data
    )
    w = data.effective_weights()
    inv = w / prob
    g_theta = ((f_lo - f_hi) / s * inv) @ xm
    g_alpha = ((uf_lo - uf_hi) * inv) @ zs if zs.shape[1] else np.zeros(0)
    nt = data.j_max - 1
    g_gamma = np.zeros(nt)
    y = data.outcomes
    hi_term = f_hi / s * inv
    lo_term = f_lo / s * inv
    for j in range(1, nt + 1):
        g_gamma[j - 1] = hi_term[y == j].sum() - lo_term[y == j + 1].sum()
    ll = float(np.sum(w * np.log(prob)))
    return ll, g_theta, g_alpha, g_gamma


def _pack(theta, alpha, gamma):
    t = np.empty(gamma.size)
    t[0] = gamma[0]
    if gamma.size > 1:
        t[1:] = np.log(np.diff(gamma))
    return np.concatenate([theta, alpha, t])


def _unpack(vec, km, ks, nt):
    theta = vec[:km]
    alpha = vec[km : km + ks]
    t = vec[km + ks :]
    gamma = np.empty(nt)
    gamma[0] = t[0]
    if nt > 1:
        gamma[1:] = t[0] + np.cumsum(np.exp(t[1:]))
    return theta, alpha, gamma


def loglik_packed(spec, vec, data, km, ks):
    """Log-likelihood and analytic gradient on the unconstrained scale
    (gamma parameterized by its first value and log increments)."""
    nt = data.j_max - 1
    theta, alpha, gamma = _unpack(vec, km, ks, nt)
    ll, g_theta, g_alpha, g_gamma = _loglik_grad(
        spec, HetParams(theta, alpha, gamma), data
    )
    g_t = np.empty(nt)
    g_t[0] = g_gamma.sum()
    for m in range(1, nt):
        g_t[m] = math.exp(vec[km + ks + m]) * g_gamma[m:].sum()
    grad = np.concatenate([g_theta, g_alpha, g_t])
    return ll, np.clip(grad, -_GRAD_CLIP, _GRAD_CLIP)


def _start_values(spec, data, km, ks):
    w = data.effective_weights()
    total = w.sum()
    cum = np.array(
        [np.sum(w[data.outcomes <= j]) for j in range(1, data.j_max)]
    ) / total
    cum = np.clip(cum, 1e-3, 1.0 - 1e-3)
    q = special.ndtri(cum)  # standard-normal quantiles of the cell shares
    q = np.maximum.accumulate(q + 1e-8 * np.arange(q.size))
    gamma = q
    for j in range(1, gamma.size):
        gamma[j] = max(gamma[j], gamma[j - 1] + 1e-3)
    return _pack(np.zeros(km), np.zeros(ks), gamma)


@dataclass
class FitOptions:
    gtol: float = 1e-6
    max_iter: int = 500


def fit_het_ordered(
    spec: HetOrderedSpec,
    data: OrderedDataset,
    options: Optional[FitOptions] = None,
) -> HetOrderedFit:
    """Quasi-Newton maximum likelihood fit.

    Starts from theta = 0, alpha = 0 and thresholds at the standard-normal
    quantiles of the empirical cell shares.  Non-convergence is reported in
    the fit (``converged``/``message``) and warned about, never silent.
    """
    opt = options or FitOptions()
    counts = np.bincount(data.outcomes, minlength=data.j_max + 1)[1:]
    if np.count_nonzero(counts) < 2:
        raise ValueError(
            "degenerate outcome distribution: all mass in one category, "
            "the likelihood has no interior maximum"
        )
    km, ks = len(spec.mean_columns), len(spec.sked_columns)
    x0 = _start_values(spec, data, km, ks)

    def nll(vec):
        ll, grad = loglik_packed(spec, vec, data, km, ks)
        return -ll, -grad

    res = optimize.minimize(
        nll,
        x0,
        jac=True,
        method="BFGS",
        options={"gtol": opt.gtol, "maxiter": opt.max_iter},
    )
    theta, alpha, gamma = _unpack(res.x, km, ks, data.j_max - 1)
    # BFGS sometimes flags "precision loss" after the gradient is already
    # tiny; the criterion that matters is the gradient infinity-norm
    converged = bool(np.max(np.abs(res.jac)) < 10 * opt.gtol)
    if not converged:
        warnings.warn(f"ordered-response MLE did not converge: {res.message}")
    return HetOrderedFit(
        spec=spec,
        theta_hat=theta.copy(),
        alpha_hat=alpha.copy(),
        gamma_hat=gamma.copy(),
        loglik=float(-res.fun),
        converged=converged,
        message=str(res.message),
        n_iter=int(res.nit),
        mean_names=tuple(data.column_names[c] for c in spec.mean_columns),
    )


def scale_by_reference(fit: HetOrderedFit, reference_coef_name: str):
    """Divide every mean-index coefficient and threshold by the named
    reference coefficient (the display convention that makes parametric
    estimates comparable with the scale-normalized LAD fit)."""
    names = list(fit.mean_names)
    if reference_coef_name not in names:
        raise KeyError(f"unknown coefficient {reference_coef_name!r}")
    ref = float(fit.theta_hat[names.index(reference_coef_name)])
    if abs(ref) < 1e-12:
        raise ValueError("reference coefficient is numerically zero")
    return fit.theta_hat / ref, fit.gamma_hat / ref


def median_latent(fit: HetOrderedFit, x) -> float:
    """Median (= mean, by symmetry of the link) of the latent index at x,
    where x holds the mean-index covariates in spec order."""
    x = np.asarray(x, dtype=float)
    return float(x @ fit.theta_hat)
