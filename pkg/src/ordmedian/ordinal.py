"""Ordinal comparisons that do and do not survive relabeling.

Medians of ordered categorical variables are equivariant under any strictly
increasing relabeling of the categories, so median comparisons are
scale-free.  Mean comparisons are not: unless one distribution first-order
stochastically dominates the other, some increasing relabeling reverses the
sign of the mean difference.  This module provides the median utilities, the
FOSD checks (discrete and two-group Gaussian), and two explicit reversal
constructions — an exponential transform for the Gaussian case and a small
linear program that searches over label vectors in the discrete case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .lp import LinearProgram, solve_lp

__all__ = [
    "OrdinalDistribution",
    "LatentGaussianPair",
    "ExponentialReversal",
    "RelabelReversal",
    "median_category",
    "compare_observed_medians",
    "fosd_discrete",
    "fosd_gaussian",
    "exponential_reversal",
    "relabel_reversal",
    "lambda_sign",
]

_CDF_TOL = 1e-12


@dataclass(frozen=True)
class OrdinalDistribution:
    """Probability mass function over the categories {1..J}."""

    probabilities: np.ndarray
    sample_size: int = 0

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("need a 1-d pmf over at least two categories")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > _CDF_TOL:
            raise ValueError("probabilities must sum to 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def j_max(self) -> int:
        return self.probabilities.size

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probabilities)

    def mean(self, labels: Optional[Sequence[float]] = None) -> float:
        t = (
            np.arange(1, self.j_max + 1, dtype=float)
            if labels is None
            else np.asarray(labels, dtype=float)
        )
        return float(t @ self.probabilities)

    @staticmethod
    def from_sample(outcomes, j_max: int) -> "OrdinalDistribution":
        y = np.asarray(outcomes, dtype=int)
        counts = np.bincount(y, minlength=j_max + 1)[1 : j_max + 1]
        return OrdinalDistribution(counts / y.size, sample_size=y.size)


@dataclass(frozen=True)
class LatentGaussianPair:
    """Two-group Gaussian summary of a latent index: H | group g ~ N(mu_g, var_g)."""

    mu1: float
    var1: float
    mu2: float
    var2: float

    def __post_init__(self):
        if self.var1 <= 0 or self.var2 <= 0:
            raise ValueError("variances must be strictly positive")


def median_category(dist: OrdinalDistribution) -> int:
    """Smallest category whose CDF reaches 1/2 (no interpolation)."""
    return int(np.argmax(dist.cdf() >= 0.5)) + 1


def compare_observed_medians(a: OrdinalDistribution, b: OrdinalDistribution) -> int:
    """Sign of median(a) - median(b); invariant to increasing relabelings."""
    if a.j_max != b.j_max:
        raise ValueError("distributions must share the category count")
    return int(np.sign(median_category(a) - median_category(b)))


def fosd_discrete(a: OrdinalDistribution, b: OrdinalDistribution) -> str:
    """Coordinatewise CDF comparison.

    Returns "a_dominates", "b_dominates", "equal", or "neither" (CDFs cross).
    A dominates B when A's CDF lies weakly below B's everywhere.
    """
    if a.j_max != b.j_max:
        raise ValueError("distributions must share the category count")
    diff = a.cdf() - b.cdf()
    below = bool(np.all(diff <= _CDF_TOL))
    above = bool(np.all(diff >= -_CDF_TOL))
    if below and above:
        return "equal"
    if below:
        return "a_dominates"
    if above:
        return "b_dominates"
    return "neither"


def fosd_gaussian(pair: LatentGaussianPair, tol_var: float = 1e-12) -> str:
    """Dominance between two Gaussians.

    Normal CDFs with unequal variances always cross, so dominance holds only
    on the knife edge of equal variances with distinct means.
    """
    if abs(pair.var1 - pair.var2) >= tol_var:
        return "none"
    if pair.mu1 == pair.mu2:
        return "equal"
    return "dominates_1" if pair.mu1 > pair.mu2 else "dominates_2"


@dataclass(frozen=True)
class ExponentialReversal:
    k_star: float
    k_witness: float
    transform_sign: int  # +1: tau(h) = exp(kh); -1: tau(h) = -exp(-kh)
    original_sign: int  # sign of mu1 - mu2
    exponent_1: float  # transformed mean is sign * exp(exponent)
    exponent_2: float

    @property
    def transformed_mean_1(self) -> float:
        return self.transform_sign * _safe_exp(self.exponent_1)

    @property
    def transformed_mean_2(self) -> float:
        return self.transform_sign * _safe_exp(self.exponent_2)

    @property
    def reversed_sign(self) -> int:
        # compare on the exponent scale so huge witnesses cannot overflow
        gap = self.transform_sign * (self.exponent_1 - self.exponent_2)
        return int(np.sign(gap)) if self.exponent_1 != self.exponent_2 else 0

    def transform(self, h):
        h = np.asarray(h, dtype=float)
        k = self.k_witness
        if self.transform_sign > 0:
            return np.exp(k * h)
        return -np.exp(-k * h)


def _safe_exp(e: float) -> float:
    return math.exp(e) if e < 709.0 else math.inf


def _exp_exponent(sign: int, k: float, mu: float, var: float) -> float:
    # E[exp(kH)] = exp(k mu + k^2 var / 2); E[-exp(-kH)] mirrors it
    if sign > 0:
        return k * mu + k * k * var / 2.0
    return -k * mu + k * k * var / 2.0


def exponential_reversal(pair: LatentGaussianPair) -> ExponentialReversal:
    """Monotone exponential transform that flips the Gaussian mean ranking.

    For H ~ N(mu, var), E[-exp(-kH)] = -exp(-k mu + k^2 var / 2), so the
    ranking of the transformed means crosses at k* = 2(mu1-mu2)/(var1-var2)
    when that value is positive; otherwise tau(h) = exp(kh) is used and the
    crossing sits at the negated ratio.  The returned witness k = 2 k* is
    deterministic and strictly past the flip point.
    """
    dmu = pair.mu1 - pair.mu2
    dvar = pair.var1 - pair.var2
    if dvar == 0:
        raise ValueError(
            "equal variances: the Gaussian pair is FOSD-ranked and no "
            "increasing transform can reverse the mean ordering"
        )
    if dmu == 0:
        raise ValueError("equal means: there is no ranking to reverse")
    k_star = 2.0 * dmu / dvar
    sign = -1 if k_star > 0 else +1
    if sign > 0:
        k_star = -k_star
    k = 2.0 * k_star
    out = ExponentialReversal(
        k_star=k_star,
        k_witness=k,
        transform_sign=sign,
        original_sign=int(np.sign(dmu)),
        exponent_1=_exp_exponent(sign, k, pair.mu1, pair.var1),
        exponent_2=_exp_exponent(sign, k, pair.mu2, pair.var2),
    )
    assert out.reversed_sign == -out.original_sign
    return out


@dataclass(frozen=True)
class RelabelReversal:
    labels: np.ndarray
    achieved_mean_diff: float


def relabel_reversal(
    a: OrdinalDistribution, b: OrdinalDistribution, gap: float = 1e-3
) -> Optional[RelabelReversal]:
    """Increasing relabeling of {1..J} that reverses the mean comparison.

    Searches label vectors t with t_1 = 1, t_J = J and increments of at
    least ``gap`` (a scale-free normalization) by pushing the relabeled mean
    difference sum_j t_j (a_j - b_j) as far as possible against its original
    sign with a linear program.  Returns None when no sign flip is
    achievable, which for unequal means is exactly the FOSD-ranked case.
    """
    if a.j_max != b.j_max:
        raise ValueError("distributions must share the category count")
    j = a.j_max
    if gap < 0 or gap * (j - 1) > (j - 1) + _CDF_TOL:
        raise ValueError("gap must satisfy 0 <= gap and gap * (J-1) <= J-1")
    dp = a.probabilities - b.probabilities
    base = float(np.arange(1, j + 1) @ dp)
    if abs(base) <= _CDF_TOL:
        return None  # equal default-label means: no sign to reverse
    target = -np.sign(base)
    # variables t_2..t_{J-1}; endpoints fixed by the normalization
    nfree = j - 2
    obj = target * dp[1 : j - 1] if nfree else np.zeros(0)
    rows, senses, rhs = [], [], []
    for i in range(j - 1):  # t_{i+2} - t_{i+1} >= gap
        row = np.zeros(nfree)
        r = float(gap)
        if i == 0:
            r += 1.0  # t_1 = 1
            if nfree:
                row[0] = 1.0
            else:
                r -= float(j)  # J - 1 >= gap, always true here
            rows.append(row)
        elif i == j - 2:
            r -= float(j)  # t_J = J
            row[nfree - 1] = -1.0
            rows.append(row)
        else:
            row[i] = 1.0
            row[i - 1] = -1.0
            rows.append(row)
        senses.append("G")
        rhs.append(r)
    if nfree == 0:
        return None  # J = 2: both labels are pinned, no reversal possible
    lp = LinearProgram(
        objective=np.asarray(obj, dtype=float),
        a_matrix=np.vstack(rows),
        senses=np.array(senses),
        rhs=np.array(rhs, dtype=float),
        lower=np.full(nfree, 1.0),
        upper=np.full(nfree, float(j)),
        maximize=True,
        objective_offset=float(target * (dp[0] + j * dp[-1])),
    )
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"relabeling LP did not solve: {sol.status}")
    labels = np.concatenate([[1.0], sol.x, [float(j)]])
    achieved = float(labels @ dp)
    if achieved * base < 0:
        return RelabelReversal(labels, achieved)
    return None


def lambda_sign(fit, x, interaction_columns, flip: bool = False) -> int:
    """Sign of the between-group median gap of the latent index at x.

    ``fit`` is a pooled two-group fit whose coefficient vector covers the
    stacked design [X, D*X]; ``interaction_columns`` indexes the D*X block
    and ``x`` holds the covariate values entering that block.  The gap
    Med(H | x, D=1) - Med(H | x, D=0) equals x' (interaction coefficients),
    so only its sign — which survives any increasing transform of the latent
    scale — is reported.  ``flip`` swaps which group is the baseline.
    """
    if hasattr(fit, "theta_hat"):
        coef = np.asarray(fit.theta_hat, dtype=float)
    elif hasattr(fit, "beta_hat"):
        coef = np.concatenate([[1.0], np.asarray(fit.beta_hat, dtype=float)])
    else:
        coef = np.asarray(fit, dtype=float)
    x = np.asarray(x, dtype=float)
    gap = float(x @ coef[list(interaction_columns)])
    if flip:
        gap = -gap
    if abs(gap) < 1e-12:
        return 0
    return 1 if gap > 0 else -1
