"""Dataset ingestion, imputation, and the simulated-data generator.

CSV ingestion produces a numeric attribute matrix plus dense integer
class ids; missing cells become NaN until imputed with column means.
The simulator draws a smooth true-probability curve from the model's own
prior (lognormal pseudo-count fields coupled by an RBF-correlated
copula) and samples labelled observations from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import Observation, predict
from .field import NatafBetaField, sample_field
from .kernel import as_points, rbf_correlation
from .special import DomainError, cholesky_with_jitter

__all__ = [
    "Dataset",
    "SimulationSpec",
    "GridFunction",
    "ParseError",
    "load_csv",
    "dataset_from_rows",
    "load_points",
    "save_csv",
    "impute_means",
    "simulate",
    "simulation_sidecar",
    "true_metrics",
]


class ParseError(DomainError):
    """A CSV cell could not be interpreted; carries row and column."""


@dataclass(frozen=True)
class Dataset:
    """Labelled attribute matrix with dense integer class ids.

    ``class_names`` maps each id to its original label token; ``missing``
    marks cells that were missing on load (NaN until imputed).
    """

    x: np.ndarray
    c: np.ndarray
    attribute_names: list
    class_names: list
    provenance: str = ""
    missing: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        c = np.asarray(self.c, dtype=int)
        if x.ndim != 2 or c.shape != (len(x),):
            raise DomainError("attribute matrix and labels have inconsistent shapes")
        if len(self.attribute_names) != x.shape[1]:
            raise DomainError("attribute name count does not match matrix width")
        k = len(self.class_names)
        if len(c) and (c.min() < 0 or c.max() >= k):
            raise DomainError("class ids must be dense integers starting at 0")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "c", c)

    @property
    def n_classes(self):
        return len(self.class_names)

    @property
    def rows(self):
        return [Observation(x=self.x[i], c=int(self.c[i])) for i in range(len(self.x))]

    def __len__(self):
        return len(self.x)


def _parse_cell(token, missing_token):
    token = token.strip()
    if token == missing_token or token == "":
        return math.nan, True
    return float(token), False


def _split_rows(text, delimiter):
    rows = []
    for line in text.splitlines():
        if line.strip() == "":
            continue
        rows.append([t for t in (line.split(delimiter) if delimiter else line.split())])
    return rows


def load_csv(path, label_column=-1, missing_token="?", delimiter=","):
    """Parse a delimited text file into a Dataset.

    The label column (default: last) may hold arbitrary tokens; they are
    mapped to dense ids in sorted order, numerically when every token
    parses as a number.  A single leading header row is auto-detected:
    if any attribute cell of the first row is neither numeric nor the
    missing token, the row is treated as column names.  Missing attribute
    cells become NaN and are flagged for imputation.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    rows = _split_rows(text, delimiter)
    return dataset_from_rows(rows, label_column, missing_token, provenance=str(path))


def dataset_from_rows(rows, label_column=-1, missing_token="?", provenance=""):
    """Build a Dataset from already-split cell rows (see load_csv)."""
    path = provenance or "<rows>"
    if not rows:
        raise ParseError(f"{path}: file contains no data")

    width = len(rows[0])
    if width < 2:
        raise ParseError(f"{path}: need at least one attribute column and a label column")
    label_idx = label_column if label_column >= 0 else width + label_column
    if not 0 <= label_idx < width:
        raise ParseError(f"{path}: label column {label_column} outside row of width {width}")
    attr_idx = [j for j in range(width) if j != label_idx]

    def attribute_cells_numeric(row):
        for j in attr_idx:
            token = row[j].strip()
            if token == missing_token or token == "":
                continue
            try:
                float(token)
            except ValueError:
                return False
        return True

    header = None
    if not attribute_cells_numeric(rows[0]):
        header = rows[0]
        rows = rows[1:]
        if not rows:
            raise ParseError(f"{path}: header only, no data rows")

    x = np.empty((len(rows), len(attr_idx)))
    missing = np.zeros_like(x, dtype=bool)
    tokens = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for out_j, j in enumerate(attr_idx):
            try:
                x[i, out_j], missing[i, out_j] = _parse_cell(row[j], missing_token)
            except ValueError:
                raise ParseError(
                    f"{path}: row {i + 1}, column {j + 1}: cannot parse {row[j].strip()!r}"
                ) from None
        tokens.append(row[label_idx].strip())

    distinct = sorted(set(tokens), key=_label_sort_key(tokens))
    ids = {tok: k for k, tok in enumerate(distinct)}
    c = np.asarray([ids[t] for t in tokens], dtype=int)

    if header is not None:
        attribute_names = [header[j].strip() for j in attr_idx]
    else:
        attribute_names = [f"x{j + 1}" for j in range(len(attr_idx))]
    return Dataset(
        x=x,
        c=c,
        attribute_names=attribute_names,
        class_names=distinct,
        provenance=provenance,
        missing=missing if missing.any() else None,
    )


def _label_sort_key(tokens):
    """Numeric sort when every label token is a number, lexical otherwise."""
    try:
        [float(t) for t in set(tokens)]
    except ValueError:
        return lambda t: t
    return lambda t: float(t)


def load_points(path, delimiter=","):
    """Read a file of bare attribute vectors (no label column)."""
    with open(path, encoding="utf-8") as fh:
        rows = _split_rows(fh.read(), delimiter)
    if not rows:
        raise ParseError(f"{path}: file contains no data")

    def numeric(row):
        try:
            [float(t) for t in row]
        except ValueError:
            return False
        return True

    if not numeric(rows[0]):
        rows = rows[1:]
        if not rows:
            raise ParseError(f"{path}: header only, no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width or not numeric(row):
            raise ParseError(f"{path}: row {i + 1} is not a numeric vector of width {width}")
        out[i] = [float(t) for t in row]
    return out


def save_csv(dataset, path):
    """Write a Dataset back to comma-delimited text.

    Floats are written in their shortest round-trip form, so reloading
    reproduces the numeric matrix bit for bit; missing cells are written
    as the default missing token.
    """
    lines = [",".join(dataset.attribute_names + ["label"])]
    for i in range(len(dataset)):
        cells = []
        for v in dataset.x[i]:
            cells.append("?" if math.isnan(v) else repr(float(v)))
        cells.append(str(dataset.class_names[dataset.c[i]]))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def impute_means(dataset):
    """Replace each missing cell by its column mean over observed cells.

    Idempotent; a dataset with nothing missing is returned unchanged.
    """
    if dataset.missing is None or not dataset.missing.any():
        return dataset
    x = dataset.x.copy()
    for j in range(x.shape[1]):
        col_missing = dataset.missing[:, j]
        if not col_missing.any():
            continue
        observed = x[~col_missing, j]
        if len(observed) == 0:
            raise DomainError(f"column {dataset.attribute_names[j]!r} has no observed values")
        x[col_missing, j] = observed.mean()
    return Dataset(
        x=x,
        c=dataset.c,
        attribute_names=dataset.attribute_names,
        class_names=dataset.class_names,
        provenance=dataset.provenance,
        missing=None,
    )


@dataclass(frozen=True)
class SimulationSpec:
    """Configuration of the one-dimensional simulated experiment.

    Length scales default to 2 for the count fields and the probability
    copula alike; attribute values are uniform on (attr_low, attr_high).
    The lognormal hyper-moments and grid resolution are configuration
    defaults: log-mean ln 0.6 keeps the pseudo-counts below 1 so true
    probability curves swing decisively between the classes, which puts
    the best attainable accuracy near 80 percent.
    """

    n: int
    seed: int
    l_a: float = 2.0
    l_b: float = 2.0
    l_p: float = 2.0
    attr_low: float = 0.0
    attr_high: float = 10.0
    grid_size: int = 101
    log_mean: float = math.log(0.6)
    log_sd: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one observation")
        if not self.attr_low < self.attr_high:
            raise DomainError("attr_low must be below attr_high")
        if self.grid_size < 2:
            raise DomainError("grid must have at least two points")


@dataclass(frozen=True)
class GridFunction:
    """A function of one attribute known on a uniform grid; values
    between grid points are linearly interpolated."""

    grid: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.grid, self.values)


def _lognormal_field(grid, scale, log_mean, log_sd, rng):
    """One realization of a lognormal process on the grid."""
    corr = rbf_correlation(grid, scale)
    chol = cholesky_with_jitter(corr, name="field correlation")
    z = chol @ rng.standard_normal(len(grid))
    return np.exp(log_mean + log_sd * z)


def simulate(spec):
    """Draw (p_true, data) for the simulated binary experiment.

    The grid's pseudo-count curves a(x), b(x) come from independent
    lognormal processes, the true probability curve is one copula
    realization of the resulting field, and observations are uniform
    attribute draws labelled by Bernoulli(p_true(x)).  Every stage has
    its own substream of the seed, so p_true does not depend on n.
    """
    streams = np.random.SeedSequence(spec.seed).spawn(5)
    rng_a, rng_b, rng_p, rng_x, rng_c = (np.random.default_rng(s) for s in streams)

    grid = np.linspace(spec.attr_low, spec.attr_high, spec.grid_size)
    pts = grid[:, None]
    a_grid = _lognormal_field(pts, spec.l_a, spec.log_mean, spec.log_sd, rng_a)
    b_grid = _lognormal_field(pts, spec.l_b, spec.log_mean, spec.log_sd, rng_b)
    fld = NatafBetaField(a=a_grid, b=b_grid, r_p=rbf_correlation(pts, spec.l_p))
    p_true = GridFunction(grid=grid, values=sample_field(fld, 1, rng_p)[0])

    xs = rng_x.uniform(spec.attr_low, spec.attr_high, spec.n)
    labels = (rng_c.uniform(size=spec.n) < p_true(xs)).astype(int)
    data = Dataset(
        x=xs[:, None],
        c=labels,
        attribute_names=["x1"],
        class_names=["0", "1"],
        provenance=f"simulated seed={spec.seed} n={spec.n}",
    )
    return p_true, data


def simulation_sidecar(spec, p_true):
    """JSON-compatible record of a simulation: the spec plus the true
    probability curve, full precision."""
    return {
        "spec": {
            "n": spec.n,
            "seed": spec.seed,
            "l_a": spec.l_a,
            "l_b": spec.l_b,
            "l_p": spec.l_p,
            "attr_low": spec.attr_low,
            "attr_high": spec.attr_high,
            "grid_size": spec.grid_size,
            "log_mean": spec.log_mean,
            "log_sd": spec.log_sd,
        },
        "grid": [float(v) for v in p_true.grid],
        "p_true": [float(v) for v in p_true.values],
    }


def true_metrics(p_true, model=None, query=None):
    """Expected accuracy of a decision rule under the true probabilities.

    Decisions come from the model's predictive when one is given, else
    from the true curve itself (class 1 where p_true exceeds 0.5, the
    best any classifier can do).  The correct-classification rate is the
    mean true probability of the chosen classes over the grid; its
    companion is the geometric mean.
    """
    if query is None:
        pts = p_true.grid[:, None]
        p_vals = np.asarray(p_true.values, dtype=float)
    else:
        pts = as_points(query)
        p_vals = p_true(pts[:, 0]) if pts.shape[1] == 1 else p_true(pts)
    if model is None:
        decisions = p_vals > 0.5
    else:
        decisions = predict(model, pts).prob_class1 > 0.5
    chosen = np.where(decisions, p_vals, 1.0 - p_vals)
    ccr_true = float(np.mean(chosen))
    pcc_true = 0.0 if np.any(chosen == 0) else float(np.exp(np.mean(np.log(chosen))))
    return ccr_true, pcc_true
