"""CSV ingestion, design construction, and result serialization.

A ``ColumnConfig`` names the outcome column (with a label-to-category map),
the covariate columns with their transforms, and the optional group dummy,
weight, and skedastic columns.  ``load_csv`` applies the transforms in
declared order and reports every dropped row with a reason.  Fitted results
travel as ``ResultRecord`` objects that serialize to JSON losslessly and
carry a full configuration echo, so any run can be re-executed from its
output file alone.

Transforms:

``standardize``   subtract the sample mean, divide by the sample standard
                  deviation (computed on the analysis sample after drops)
``square``        elementwise square
``dummy-encode``  expand a categorical column into 0/1 indicators, dropping
                  the first level (sorted order) as the reference
``interact-with-group``  multiply the column by the group dummy
``none``          pass through
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .model import OrderedDataset, PooledSpec

__all__ = [
    "CovariateSpec",
    "ColumnConfig",
    "LoadReport",
    "ResultRecord",
    "load_csv",
    "build_pooled",
]

_TRANSFORMS = ("none", "standardize", "square", "dummy-encode", "interact-with-group")


@dataclass(frozen=True)
class CovariateSpec:
    name: str
    transform: str = "none"

    def __post_init__(self):
        if self.transform not in _TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")


@dataclass(frozen=True)
class ColumnConfig:
    """Column roles for a CSV file.

    ``outcome_map`` sends observed outcome labels (strings or numbers, as
    they appear in the file) bijectively onto {1..J}.  An empty map means
    the outcome column already holds integers 1..J.
    """

    outcome: str
    covariates: Tuple[CovariateSpec, ...]
    outcome_map: Mapping[str, int] = field(default_factory=dict)
    group_dummy: Optional[str] = None
    weight: Optional[str] = None
    sked_columns: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "covariates",
            tuple(
                c if isinstance(c, CovariateSpec) else CovariateSpec(**c)
                for c in self.covariates
            ),
        )
        object.__setattr__(self, "sked_columns", tuple(self.sked_columns))
        if self.outcome_map:
            cats = sorted(self.outcome_map.values())
            if cats != list(range(1, len(cats) + 1)):
                raise ValueError("outcome_map must be a bijection onto {1..J}")
        if any(c.transform == "interact-with-group" for c in self.covariates):
            if self.group_dummy is None:
                raise ValueError(
                    "interact-with-group transform requires a group dummy column"
                )

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "covariates": [asdict(c) for c in self.covariates],
            "outcome_map": dict(self.outcome_map),
            "group_dummy": self.group_dummy,
            "weight": self.weight,
            "sked_columns": list(self.sked_columns),
        }

    @staticmethod
    def from_dict(d: Mapping) -> "ColumnConfig":
        return ColumnConfig(
            outcome=d["outcome"],
            covariates=tuple(CovariateSpec(**c) for c in d["covariates"]),
            outcome_map={str(k): int(v) for k, v in d.get("outcome_map", {}).items()},
            group_dummy=d.get("group_dummy"),
            weight=d.get("weight"),
            sked_columns=tuple(d.get("sked_columns", ())),
        )


@dataclass
class LoadReport:
    rows_read: int
    rows_kept: int
    dropped: Dict[str, int]  # reason -> count


def _required_columns(config: ColumnConfig) -> List[str]:
    cols = [config.outcome] + [c.name for c in config.covariates]
    for extra in (config.group_dummy, config.weight):
        if extra is not None:
            cols.append(extra)
    cols.extend(config.sked_columns)
    seen, out = set(), []
    for c in cols:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _map_outcomes(raw: pd.Series, mapping: Mapping[str, int]):
    """Returns (categories or NaN, j_max)."""
    if mapping:
        as_str = raw.astype(str).str.strip()
        y = as_str.map({str(k): v for k, v in mapping.items()})
        return y, max(mapping.values())
    y = pd.to_numeric(raw, errors="coerce")
    frac = y.dropna() % 1
    if len(frac) and (frac != 0).any():
        raise ValueError("outcome column must hold integers when no map is given")
    return y, int(y.max()) if len(y.dropna()) else 0


def load_csv(path, config: ColumnConfig) -> Tuple[OrderedDataset, LoadReport]:
    """Read a CSV, apply the configured transforms, and build the dataset."""
    frame = pd.read_csv(path)
    missing = [c for c in _required_columns(config) if c not in frame.columns]
    if missing:
        raise KeyError(f"columns not in file: {missing}")
    rows_read = len(frame)
    dropped: Dict[str, int] = {}

    y_raw, j_max = _map_outcomes(frame[config.outcome], config.outcome_map)
    keep = y_raw.notna()
    dropped_outcome = int((~keep).sum())
    if dropped_outcome:
        dropped["unmapped-or-missing-outcome"] = dropped_outcome

    numeric_cols = [c.name for c in config.covariates if c.transform != "dummy-encode"]
    numeric_cols += [c for c in (config.group_dummy, config.weight) if c]
    numeric_cols += list(config.sked_columns)
    numeric = {}
    for col in dict.fromkeys(numeric_cols):
        numeric[col] = pd.to_numeric(frame[col], errors="coerce")
        bad = numeric[col].isna() & keep
        if bad.any():
            dropped[f"non-numeric:{col}"] = int(bad.sum())
            keep &= ~bad
    for c in config.covariates:
        if c.transform == "dummy-encode":
            bad = frame[c.name].isna() & keep
            if bad.any():
                dropped[f"missing:{c.name}"] = int(bad.sum())
                keep &= ~bad

    idx = keep[keep].index
    if len(idx) == 0:
        raise ValueError("no usable rows after drops")
    y = y_raw.loc[idx].astype(int).to_numpy()
    group = (
        numeric[config.group_dummy].loc[idx].to_numpy()
        if config.group_dummy
        else None
    )
    if group is not None and not np.all(np.isin(group, (0.0, 1.0))):
        raise ValueError("group dummy column must be binary 0/1")

    columns: List[np.ndarray] = []
    names: List[str] = []
    for c in config.covariates:
        if c.transform == "dummy-encode":
            raw = frame[c.name].loc[idx].astype(str)
            levels = sorted(raw.unique())
            for lev in levels[1:]:  # first level is the reference
                columns.append((raw == lev).to_numpy(dtype=float))
                names.append(f"{c.name}={lev}")
            continue
        x = numeric[c.name].loc[idx].to_numpy(dtype=float)
        if c.transform == "standardize":
            sd = x.std(ddof=0)
            if sd == 0:
                raise ValueError(f"cannot standardize constant column {c.name!r}")
            x = (x - x.mean()) / sd
            names.append(f"{c.name}:std")
        elif c.transform == "square":
            x = np.square(x)
            names.append(f"{c.name}^2")
        elif c.transform == "interact-with-group":
            x = x * group
            names.append(f"{c.name}:grp")
        else:
            names.append(c.name)
        columns.append(x)

    weights = numeric[config.weight].loc[idx].to_numpy() if config.weight else None
    data = OrderedDataset(
        outcomes=y,
        covariates=np.column_stack(columns),
        j_max=j_max,
        column_names=tuple(names),
        weights=weights,
    )
    report = LoadReport(rows_read=rows_read, rows_kept=len(idx), dropped=dropped)
    return data, report


def build_pooled(data: OrderedDataset, spec: PooledSpec) -> OrderedDataset:
    """Stack two groups into one design [X, D*X].

    The fitted coefficients then split into a base block (group D=0) and an
    interaction block equal to the between-group coefficient difference.
    Columns listed in ``spec.restrictions`` keep a common coefficient across
    groups, so their interaction column is omitted.
    """
    d = data.covariates[:, spec.group_dummy_column]
    if not np.all(np.isin(d, (0.0, 1.0))):
        raise ValueError("group dummy column must be binary 0/1")
    shared = list(spec.shared_columns)
    restricted = set(spec.restrictions)
    base = data.covariates[:, shared]
    inter_cols = [c for c in shared if c not in restricted]
    inter = data.covariates[:, inter_cols] * d[:, None]
    names = [data.column_names[c] for c in shared] + [
        f"{data.column_names[c]}:grp" for c in inter_cols
    ]
    return OrderedDataset(
        outcomes=data.outcomes,
        covariates=np.column_stack([base, inter]),
        j_max=data.j_max,
        column_names=tuple(names),
        weights=data.weights,
    )


@dataclass
class ResultRecord:
    """Self-describing record of one estimation run."""

    estimator: str  # "lad" | "probit" | "logit"
    coefficients: List[dict]  # {"name", "raw", "scaled" (optional)}
    thresholds: List[float]
    scaled_thresholds: Optional[List[float]]
    objective: float  # LAD objective or log-likelihood
    certificate: Dict[str, object]  # solver status, bounds, node counts, ...
    config: Dict[str, object]  # full effective configuration echo
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ResultRecord":
        return ResultRecord(**json.loads(text))

    def table(self) -> str:
        """Aligned human-readable coefficient table."""
        lines = [f"estimator: {self.estimator}"]
        width = max((len(c["name"]) for c in self.coefficients), default=4)
        has_scaled = any(c.get("scaled") is not None for c in self.coefficients)
        head = f"{'name':<{width}}  {'raw':>12}"
        if has_scaled:
            head += f"  {'scaled':>12}"
        lines.append(head)
        for c in self.coefficients:
            row = f"{c['name']:<{width}}  {c['raw']:>12.6f}"
            if has_scaled:
                s = c.get("scaled")
                row += f"  {s:>12.6f}" if s is not None else " " * 14
            lines.append(row)
        for j, g in enumerate(self.thresholds, start=1):
            row = f"{'cut' + str(j):<{width}}  {g:>12.6f}"
            if has_scaled and self.scaled_thresholds is not None:
                row += f"  {self.scaled_thresholds[j - 1]:>12.6f}"
            lines.append(row)
        lines.append(f"objective: {self.objective:.6f}")
        return "\n".join(lines)
