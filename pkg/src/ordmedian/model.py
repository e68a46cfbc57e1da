"""Core domain types for ordered-response median regression.

An observed category y in {1..J} is generated by a latent index crossing
strictly increasing thresholds: y = j exactly when gamma_{j-1} < index <= gamma_j,
with gamma_0 = -inf and gamma_J = +inf.  Cells are closed above, so an index
sitting exactly on gamma_j maps to category j.

The design matrix carries no intercept and the coefficient on the first
covariate column is normalized to +1 (or -1 on request); the remaining P
slopes are free.  All types here are immutable after construction and safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "OrderedDataset",
    "ThetaSplit",
    "Thresholds",
    "ParamBox",
    "PooledSpec",
    "predict_category",
    "lad_objective",
    "score_coefficients",
]


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OrderedDataset:
    """n observations of (outcome, covariate vector, optional weight).

    ``covariates`` is n x (P+1); column 0 is the scale-normalized covariate
    whose coefficient is pinned to +-1.  No covariate column may be constant
    (the design excludes an intercept).
    """

    outcomes: np.ndarray
    covariates: np.ndarray
    j_max: int
    column_names: Tuple[str, ...] = ()
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.outcomes, dtype=int)
        x = np.asarray(self.covariates, dtype=float)
        if x.ndim != 2:
            raise ValueError("covariates must be a 2-d array")
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("outcomes and covariates disagree on n")
        if self.j_max < 2:
            raise ValueError("need at least two outcome categories")
        if y.min() < 1 or y.max() > self.j_max:
            raise ValueError("outcomes must lie in {1..j_max}")
        if not np.all(np.isfinite(x)):
            raise ValueError("covariates contain non-finite entries")
        if x.shape[0] > 1:
            spans = x.max(axis=0) - x.min(axis=0)
            if np.any(spans == 0.0):
                bad = int(np.argmax(spans == 0.0))
                raise ValueError(
                    f"covariate column {bad} is constant; the design must not "
                    "contain an intercept"
                )
        names = tuple(self.column_names) or tuple(
            f"x{p + 1}" for p in range(x.shape[1])
        )
        if len(names) != x.shape[1]:
            raise ValueError("column_names length must match covariate columns")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != y.shape:
                raise ValueError("weights must have length n")
            if np.any(w < 0) or not np.any(w > 0):
                raise ValueError("weights must be >= 0 and not all zero")
            object.__setattr__(self, "weights", _frozen_array(w))
        object.__setattr__(self, "outcomes", _frozen_array(y, dtype=int))
        object.__setattr__(self, "covariates", _frozen_array(x))
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_slopes(self) -> int:
        """Number of free slope parameters P (covariate columns minus one)."""
        return self.covariates.shape[1] - 1

    @property
    def x1(self) -> np.ndarray:
        return self.covariates[:, 0]

    @property
    def x_tilde(self) -> np.ndarray:
        return self.covariates[:, 1:]

    def effective_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n)
        return np.asarray(self.weights)


@dataclass(frozen=True)
class ThetaSplit:
    """Index coefficients with the first element fixed at +1 (or -1)."""

    beta: np.ndarray
    first_coef: int = 1

    def __post_init__(self):
        if self.first_coef not in (1, -1):
            raise ValueError("first_coef must be +1 or -1")
        object.__setattr__(self, "beta", _frozen_array(self.beta))

    def full(self) -> np.ndarray:
        return np.concatenate(([float(self.first_coef)], self.beta))


@dataclass(frozen=True)
class Thresholds:
    """Strictly increasing interior thresholds gamma_1 < ... < gamma_{J-1}."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("gamma must be a non-empty vector")
        if np.any(np.diff(g) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "gamma", _frozen_array(g))

    @property
    def j_max(self) -> int:
        return self.gamma.size + 1


@dataclass(frozen=True)
class ParamBox:
    """Bounded box parameter space for (beta, gamma)."""

    beta_lo: np.ndarray
    beta_hi: np.ndarray
    gamma_lo: np.ndarray
    gamma_hi: np.ndarray

    def __post_init__(self):
        for name in ("beta_lo", "beta_hi", "gamma_lo", "gamma_hi"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        if self.beta_lo.shape != self.beta_hi.shape:
            raise ValueError("beta bounds disagree in length")
        if self.gamma_lo.shape != self.gamma_hi.shape:
            raise ValueError("gamma bounds disagree in length")
        allb = np.concatenate(
            [self.beta_lo, self.beta_hi, self.gamma_lo, self.gamma_hi]
        )
        if not np.all(np.isfinite(allb)):
            raise ValueError("parameter box must be bounded (finite entries)")
        if np.any(self.beta_lo > self.beta_hi) or np.any(
            self.gamma_lo > self.gamma_hi
        ):
            raise ValueError("box lower bounds exceed upper bounds")

    @property
    def n_slopes(self) -> int:
        return self.beta_lo.size

    @property
    def n_thresholds(self) -> int:
        return self.gamma_lo.size

    @staticmethod
    def default(data: OrderedDataset, scale: float) -> "ParamBox":
        """Box with beta in [-scale, scale]^P and gamma bounds wide enough to
        cover every index value reachable from that beta box."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        p = data.n_slopes
        reach = scale * (1.0 + np.abs(data.covariates).max())
        return ParamBox(
            beta_lo=-scale * np.ones(p),
            beta_hi=scale * np.ones(p),
            gamma_lo=-reach * np.ones(data.j_max - 1),
            gamma_hi=reach * np.ones(data.j_max - 1),
        )


@dataclass(frozen=True)
class PooledSpec:
    """Layout of the pooled two-group design [X, D*X].

    ``group_dummy_column`` indexes the 0/1 group dummy D in the source data;
    ``shared_columns`` lists the covariate columns that enter both the base
    index and the interaction block; ``restrictions`` names columns whose
    coefficient is held equal across groups (their interaction is dropped).
    """

    group_dummy_column: int
    shared_columns: Tuple[int, ...]
    restrictions: Tuple[int, ...] = field(default_factory=tuple)


def _index_values(x, theta: ThetaSplit) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    th = theta.full()
    if x.shape[-1] != th.size:
        raise ValueError(
            f"covariate dimension {x.shape[-1]} does not match theta "
            f"dimension {th.size}"
        )
    return x @ th

def predict_category(x, theta: ThetaSplit, gamma: Thresholds):
    """Category implied by the threshold rule: 1 + #{j : x'theta > gamma_j}.

    Cells are closed above, so an index equal to gamma_j returns j.  Accepts
    a single covariate vector or an n x (P+1) matrix.
    """
    v = _index_values(x, theta)
    cats = 1 + np.sum(np.greater.outer(v, gamma.gamma), axis=-1)
    if np.isscalar(v) or v.ndim == 0:
        return int(cats)
    return cats.astype(int)


def lad_objective(data: OrderedDataset, beta, gamma) -> float:
    """Weighted sum of absolute deviations between observed and predicted
    categories at (beta, gamma), with the first coefficient fixed at +1."""
    if not isinstance(gamma, Thresholds):
        gamma = Thresholds(np.asarray(gamma, dtype=float))
    if gamma.j_max != data.j_max:
        raise ValueError("gamma length must be j_max - 1")
    theta = ThetaSplit(np.asarray(beta, dtype=float))
    pred = predict_category(data.covariates, theta, gamma)
    w = data.effective_weights()
    return float(np.sum(w * np.abs(data.outcomes - pred)))


def score_coefficients(y: int, j_max: int) -> np.ndarray:
    """Per-threshold objective coefficients |y-j| - |y-j-1| for j=1..J-1.

    Equals +1 when j <= y-1 and -1 when j >= y; these weight the indicators
    1[index <= gamma_j] in the decomposed form of the LAD objective.
    """
    j = np.arange(1, j_max)
    return np.abs(y - j).astype(float) - np.abs(y - j - 1).astype(float)
