"""Synthetic ordered-response data with known ground truth.

Outcomes are produced exactly by the threshold rule y = j iff
gamma_{j-1} < x'theta + u <= gamma_j applied to a latent index with a
median-zero error.  Available error laws:

``normal``
    N(0, 1) — symmetric, so mean and median coincide.
``logistic``
    logistic scaled to unit variance.
``shifted-exponential``
    Exponential(1) - log 2: median exactly 0, mean 1 - log 2 > 0.  This is
    the law that separates median-based from mean-based estimation targets.
``none``
    degenerate at 0 (perfectly separable data).

An optional exponential skedastic index exp(z'alpha) scales the error
observation by observation.  Everything is driven by one seeded generator,
so the same spec always produces the same dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .model import OrderedDataset

__all__ = ["CovariateLaw", "DgpSpec", "GroundTruth", "generate"]

_LOGISTIC_SD = math.pi / math.sqrt(3.0)


@dataclass(frozen=True)
class CovariateLaw:
    """Marginal law of one covariate column; columns draw independently."""

    kind: str  # "normal" | "uniform" | "discrete"
    params: Tuple[float, ...] = (0.0, 1.0)  # (mu, sd) or (lo, hi)
    values: Tuple[float, ...] = ()  # discrete support
    probs: Tuple[float, ...] = ()  # discrete weights (uniform when empty)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "normal":
            mu, sd = self.params
            return rng.normal(mu, sd, size=n)
        if self.kind == "uniform":
            lo, hi = self.params
            return rng.uniform(lo, hi, size=n)
        if self.kind == "discrete":
            if not self.values:
                raise ValueError("discrete law needs a support")
            p = np.asarray(self.probs, dtype=float) if self.probs else None
            return rng.choice(np.asarray(self.values, dtype=float), size=n, p=p)
        raise ValueError(f"unknown covariate law {self.kind!r}")


@dataclass(frozen=True)
class DgpSpec:
    n: int
    j_max: int
    beta: Tuple[float, ...]  # free slopes; the first coefficient is fixed at 1
    gamma: Tuple[float, ...]
    covariate_laws: Tuple[CovariateLaw, ...] = ()
    error_law: str = "normal"
    error_scale: float = 1.0
    sked_alpha: Tuple[float, ...] = ()  # coefficients on the first columns
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.j_max < 2:
            raise ValueError("need n >= 1 and at least two categories")
        g = np.asarray(self.gamma, dtype=float)
        if g.size != self.j_max - 1 or np.any(np.diff(g) <= 0):
            raise ValueError("gamma must be strictly increasing, length J-1")
        if self.error_law not in ("normal", "logistic", "shifted-exponential", "none"):
            raise ValueError(f"unknown error law {self.error_law!r}")
        if self.error_scale < 0:
            raise ValueError("error_scale must be non-negative")
        laws = self.covariate_laws or tuple(
            CovariateLaw("normal") for _ in range(len(self.beta) + 1)
        )
        if len(laws) != len(self.beta) + 1:
            raise ValueError("need one covariate law per column (P + 1 total)")
        if len(self.sked_alpha) > len(laws):
            raise ValueError("skedastic index uses at most all covariate columns")
        object.__setattr__(self, "covariate_laws", tuple(laws))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "gamma", tuple(float(v) for v in g))


@dataclass(frozen=True)
class GroundTruth:
    theta: np.ndarray  # full coefficient vector, first entry 1
    gamma: np.ndarray
    latent: np.ndarray
    errors: np.ndarray
    scales: np.ndarray


def _draw_errors(rng: np.random.Generator, law: str, n: int) -> np.ndarray:
    if law == "normal":
        return rng.normal(size=n)
    if law == "logistic":
        return rng.logistic(scale=1.0 / _LOGISTIC_SD, size=n)
    if law == "shifted-exponential":
        return rng.exponential(size=n) - math.log(2.0)
    return np.zeros(n)


def generate(spec: DgpSpec) -> Tuple[OrderedDataset, GroundTruth]:
    """Draw covariates, errors, and outcomes per the threshold rule."""
    rng = np.random.default_rng(spec.seed)
    x = np.column_stack(
        [law.draw(rng, spec.n) for law in spec.covariate_laws]
    )
    theta = np.concatenate([[1.0], spec.beta])
    gamma = np.asarray(spec.gamma)
    u = _draw_errors(rng, spec.error_law, spec.n) * spec.error_scale
    if spec.sked_alpha:
        alpha = np.asarray(spec.sked_alpha, dtype=float)
        scales = np.exp(x[:, : alpha.size] @ alpha)
    else:
        scales = np.ones(spec.n)
    u = u * scales
    h = x @ theta + u
    y = 1 + np.sum(h[:, None] > gamma[None, :], axis=1)
    data = OrderedDataset(outcomes=y, covariates=x, j_max=spec.j_max)
    truth = GroundTruth(
        theta=theta, gamma=gamma.copy(), latent=h, errors=u, scales=scales
    )
    return data, truth
