"""Median regression and ordinal comparison tools for ordered-response data.

The estimator of interest minimizes the sum of absolute deviations between
observed and predicted categories in a threshold-crossing model; it is
solved exactly as a mixed-integer linear program by an in-package
branch-and-bound over an in-package simplex.  Companion modules fit
heteroskedastic ordered probit/logit by maximum likelihood, check
first-order stochastic dominance, and construct explicit mean-ranking
reversals that motivate comparing medians instead of means.
"""

from .dataio import ColumnConfig, CovariateSpec, ResultRecord, build_pooled, load_csv
from .lad import (
    LadEstimate,
    LadOptions,
    brute_force_lad,
    build_lad_milp,
    compute_big_m,
    fit_lad,
)
from .lp import LinearProgram, LpSolution, solve_lp, write_lp_text
from .milp import MilpLimits, MilpProblem, MilpSolution, solve_milp
from .model import (
    OrderedDataset,
    ParamBox,
    PooledSpec,
    ThetaSplit,
    Thresholds,
    lad_objective,
    predict_category,
    score_coefficients,
)
from .ordinal import (
    LatentGaussianPair,
    OrdinalDistribution,
    compare_observed_medians,
    exponential_reversal,
    fosd_discrete,
    fosd_gaussian,
    lambda_sign,
    median_category,
    relabel_reversal,
)
from .parametric import (
    FitOptions,
    HetOrderedFit,
    HetOrderedSpec,
    HetParams,
    fit_het_ordered,
    loglik,
    median_latent,
    scale_by_reference,
)
from .simulate import CovariateLaw, DgpSpec, generate

__version__ = "0.1.0"
