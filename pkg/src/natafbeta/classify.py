"""Length-scale fitting and posterior predictive classification.

The binary core treats class counts as evidence spread by an RBF kernel:
the marginal likelihood of the kernel length scales is a product of
leave-one-out Beta-function ratios, maximized by damped gradient ascent
in log-scale space.  Prediction is the ratio of expected posterior
pseudo-counts.  Multiclass problems are handled one-vs-rest.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .field import NatafBetaField
from .kernel import (
    DEFAULT_PRIOR_MEAN,
    CountField,
    as_points,
    as_scales,
    cross_correlation,
    propagate_counts,
    unique_points,
)
from .special import DomainError, log_beta_function

__all__ = [
    "Observation",
    "BinaryModel",
    "FitConfig",
    "PredictiveResult",
    "MulticlassPrediction",
    "UnfittableDataError",
    "log_likelihood",
    "fit",
    "predict",
    "fit_multiclass",
    "predict_multiclass",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "nataf-beta-model"
MODEL_VERSION = 1


class UnfittableDataError(DomainError):
    """The dataset cannot support a fit (fewer than two rows or classes)."""


@dataclass(frozen=True)
class Observation:
    """One labelled attribute vector; ``c`` is 0/1 in the binary core."""

    x: np.ndarray
    c: int


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings.

    ``start=None`` selects the default start point, the per-dimension
    mean of the training attribute values.  ``fd_step`` is the central
    finite-difference step in log-scale space.
    """

    start: np.ndarray | None = None
    rel_tol: float = 1e-3
    max_iter: int = 100
    wall_clock_limit: float = 7200.0
    fd_step: float = 1e-3
    prior_mean: float = DEFAULT_PRIOR_MEAN

    def __post_init__(self):
        if self.rel_tol <= 0 or self.max_iter < 1 or self.wall_clock_limit <= 0:
            raise DomainError("fit configuration values must be positive")
        if self.fd_step <= 0 or self.prior_mean <= 0:
            raise DomainError("fd_step and prior_mean must be positive")


@dataclass(frozen=True)
class BinaryModel:
    """A fitted binary classifier.

    ``training_points`` are the unique training attribute vectors with
    direct class counts in ``counts``; ``map_scales`` is the fitted
    length-scale vector (shared between the two classes).  ``fit_trace``
    records (iteration, scales, mean log-likelihood) for accepted steps,
    so the objective column is nondecreasing.
    """

    training_points: np.ndarray
    counts: CountField
    map_scales: np.ndarray
    prior_mean: float
    fit_trace: list
    positive_class: int = 1

    @property
    def x_dim(self):
        return self.training_points.shape[1]


@dataclass(frozen=True)
class PredictiveResult:
    """Posterior predictive over a query set: per-point class-1
    probability and the posterior Beta field behind it (independent
    points, so the copula correlation is the identity)."""

    query: np.ndarray
    prob_class1: np.ndarray
    field: NatafBetaField


@dataclass(frozen=True)
class MulticlassPrediction:
    """One-vs-rest predictive: raw per-class probabilities, the same
    normalized to unit row sums, and argmax labels (ties resolved to the
    lowest class index)."""

    class_ids: np.ndarray
    probs: np.ndarray
    normalized: np.ndarray
    labels: np.ndarray


def _as_xc(data):
    """Accept a Dataset-like object (``.x``, ``.c``) or an (x, c) pair."""
    if hasattr(data, "x") and hasattr(data, "c"):
        x, c = data.x, data.c
    else:
        x, c = data
    c = np.asarray(c)
    raw = np.asarray(x, dtype=float)
    if raw.size == 0 and len(c) == 0:
        dim = raw.shape[1] if raw.ndim == 2 else 1
        return np.empty((0, dim)), c
    x = as_points(raw)
    if len(c) != len(x):
        raise DomainError("labels and attribute vectors differ in length")
    return x, c


class _Workspace:
    """Precomputed pieces for repeated likelihood evaluations.

    Stores the per-dimension pairwise squared differences once; a kernel
    at new scales is a reweighted exponential of the same tensor, and a
    single-dimension perturbation is an elementwise update of the current
    kernel rather than a rebuild.
    """

    def __init__(self, x, c, prior_mean):
        self.x = x
        self.a_vec = (np.asarray(c) == 1).astype(float)
        self.b_vec = 1.0 - self.a_vec
        self.prior_mean = float(prior_mean)
        diff = x[:, None, :] - x[None, :, :]
        self.d2 = diff * diff  # (d, d, x_dim)
        self.n = len(x)
        self.x_dim = x.shape[1]

    def kernel(self, theta):
        """Off-diagonal RBF kernel at log-scales ``theta`` (diagonal zeroed
        so each observation's own count is left out)."""
        inv = np.exp(-theta)
        k = np.exp(-0.5 * (self.d2 @ inv))
        np.fill_diagonal(k, 0.0)
        return k

    def perturbed(self, k, theta, dim, new_theta_dim):
        """Kernel with one log-scale changed, from the current kernel."""
        delta = np.exp(-new_theta_dim) - np.exp(-theta[dim])
        k_new = k * np.exp(-0.5 * self.d2[:, :, dim] * delta)
        np.fill_diagonal(k_new, 0.0)
        return k_new

    def objective(self, k):
        """Mean per-observation log-likelihood for an off-diagonal kernel."""
        eps = self.prior_mean
        a_prime = eps + k @ self.a_vec
        b_prime = eps + k @ self.b_vec
        log_factors = log_beta_function(
            a_prime + self.a_vec, b_prime + self.b_vec
        ) - log_beta_function(a_prime, b_prime)
        return float(np.mean(log_factors))

    def objective_at(self, theta):
        return self.objective(self.kernel(theta))

    def gradient(self, theta, h):
        """Central finite-difference gradient of the objective in log-scale
        space, one kernel update per perturbed dimension."""
        k = self.kernel(theta)
        g = np.empty(self.x_dim)
        for dim in range(self.x_dim):
            up = self.objective(self.perturbed(k, theta, dim, theta[dim] + h))
            dn = self.objective(self.perturbed(k, theta, dim, theta[dim] - h))
            g[dim] = (up - dn) / (2.0 * h)
        return g


def log_likelihood(scales, data, prior_mean=DEFAULT_PRIOR_MEAN):
    """Log-likelihood of the length scales given binary observations.

    Each observation contributes the log ratio of Beta functions between
    the propagated counts with and without its own class indicator, the
    propagated counts being the kernel-weighted evidence from all other
    observations plus the vanishing prior mean.  Empty data gives 0.
    """
    if prior_mean <= 0:
        raise DomainError("prior_mean must be positive")
    x, c = _as_xc(data)
    if len(x) == 0:
        return 0.0
    if len(c) and not np.isin(c, (0, 1)).all():
        raise DomainError("binary log-likelihood requires 0/1 labels")
    sc = as_scales(scales, x.shape[1])
    ws = _Workspace(x, c, prior_mean)
    return ws.objective(ws.kernel(np.log(sc))) * len(x)


def _default_start(x):
    """Per-dimension mean of the attribute values, guarded to stay
    positive (a scale divides squared distance, so it must be > 0)."""
    start = x.mean(axis=0)
    bad = ~np.isfinite(start) | (start <= 0)
    if np.any(bad):
        alt = np.abs(x).mean(axis=0)
        start = np.where(bad, np.where(alt > 0, alt, 1.0), start)
    return start


def _fallback_start(ws):
    """Scales proportional to the mean pairwise squared difference per
    dimension.  Used when the default start point puts every kernel entry
    at underflow, which zeroes the finite-difference gradient."""
    n = ws.n
    if n < 2:
        return np.ones(ws.x_dim)
    off_sum = ws.d2.sum(axis=(0, 1))  # diagonal contributes zero
    mean_d2 = off_sum / (n * (n - 1))
    return np.where(mean_d2 > 0, ws.x_dim * mean_d2, 1.0)


def fit(data, config=None):
    """Maximize the length-scale likelihood by damped gradient ascent.

    Runs in log-scale space with central finite-difference gradients and
    backtracking step halving.  Stops when the trailing 10-step and
    5-step mean objectives agree within ``rel_tol`` relative to the
    current objective, on ``max_iter``, or on the wall-clock limit.
    Returns the best scales visited.  Deterministic for fixed inputs.
    """
    config = config or FitConfig()
    x, c = _as_xc(data)
    if len(x) < 2:
        raise UnfittableDataError("need at least two observations to fit")
    if not np.isin(c, (0, 1)).all():
        raise DomainError("binary fit requires 0/1 labels")
    if len(np.unique(c)) < 2:
        raise UnfittableDataError("training data contains a single class")

    ws = _Workspace(x, c, config.prior_mean)
    if config.start is not None:
        start = as_scales(config.start, ws.x_dim)
    else:
        start = _default_start(x)
    theta = np.log(start)

    if config.start is None:
        g0 = ws.gradient(theta, config.fd_step)
        if np.max(np.abs(g0)) < 1e-12:
            theta = np.log(_fallback_start(ws))

    deadline = time.monotonic() + config.wall_clock_limit
    obj = ws.objective_at(theta)
    trace = [(0, np.exp(theta).copy(), obj)]
    best_theta, best_obj = theta.copy(), obj

    for iteration in range(1, config.max_iter + 1):
        if time.monotonic() > deadline:
            break
        g = ws.gradient(theta, config.fd_step)
        g_inf = np.max(np.abs(g))
        if g_inf == 0.0 or not np.isfinite(g_inf):
            break
        # Trust-region cap on the initial step so steep gradients do not
        # throw the scales across many orders of magnitude at once.
        alpha = min(1.0, 5.0 / g_inf)
        accepted = False
        for _ in range(40):
            candidate = theta + alpha * g
            cand_obj = ws.objective_at(candidate)
            if cand_obj > obj:
                theta, obj = candidate, cand_obj
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        trace.append((iteration, np.exp(theta).copy(), obj))
        if obj > best_obj:
            best_theta, best_obj = theta.copy(), obj
        objs = [t[2] for t in trace]
        if len(objs) >= 10:
            window_gap = abs(np.mean(objs[-10:]) - np.mean(objs[-5:]))
            if window_gap < config.rel_tol * abs(obj):
                break

    map_scales = np.exp(best_theta)
    points, inverse = unique_points(x)
    a_hat = np.bincount(inverse, weights=ws.a_vec, minlength=len(points))
    b_hat = np.bincount(inverse, weights=ws.b_vec, minlength=len(points))
    counts = propagate_counts(
        a_hat, b_hat, points, points, map_scales, map_scales, config.prior_mean
    )
    return BinaryModel(
        training_points=points,
        counts=counts,
        map_scales=map_scales,
        prior_mean=config.prior_mean,
        fit_trace=trace,
    )


def predict(model, query):
    """Posterior predictive class-1 probability at each query point.

    Expected posterior pseudo-counts are the prior mean plus kernel
    weighted direct counts; the predictive probability is their ratio.
    """
    query = as_points(query)
    if query.shape[1] != model.x_dim:
        raise DomainError(
            f"query dimension {query.shape[1]} does not match model dimension {model.x_dim}"
        )
    cf = propagate_counts(
        model.counts.a_hat,
        model.counts.b_hat,
        model.training_points,
        query,
        model.map_scales,
        model.map_scales,
        model.prior_mean,
    )
    prob = cf.a_post / (cf.a_post + cf.b_post)
    fld = NatafBetaField(a=cf.a_post, b=cf.b_post, r_p=None)
    return PredictiveResult(query=query, prob_class1=prob, field=fld)


def fit_multiclass(data, config=None):
    """One binary model per class, that class against the pooled rest.

    Classes present in the label vector are modelled; a declared class
    with zero members is skipped with a warning.  Scales are fitted
    independently per model.
    """
    x, c = _as_xc(data)
    class_ids = np.unique(c)
    if len(class_ids) < 2:
        raise UnfittableDataError("multiclass fit requires at least two classes")
    n_declared = getattr(data, "n_classes", None)
    if n_declared is not None:
        for k in range(int(n_declared)):
            if k not in class_ids:
                warnings.warn(f"class {k} has no members and is skipped")
    models = []
    for k in class_ids:
        binary = (c == k).astype(int)
        model = fit((x, binary), config)
        models.append(
            BinaryModel(
                training_points=model.training_points,
                counts=model.counts,
                map_scales=model.map_scales,
                prior_mean=model.prior_mean,
                fit_trace=model.fit_trace,
                positive_class=int(k),
            )
        )
    return models


def predict_multiclass(models, query):
    """Per-class one-vs-rest probabilities and argmax labels.

    Raw probabilities are each model's own predictive; the normalized
    matrix rescales rows to sum to 1.  Ties go to the lowest class index.
    """
    if not models:
        raise DomainError("no models given")
    query = as_points(query)
    class_ids = np.asarray([m.positive_class for m in models])
    order = np.argsort(class_ids)
    class_ids = class_ids[order]
    probs = np.column_stack([predict(models[i], query).prob_class1 for i in order])
    row_sum = probs.sum(axis=1, keepdims=True)
    normalized = probs / np.where(row_sum > 0, row_sum, 1.0)
    labels = class_ids[np.argmax(probs, axis=1)]
    return MulticlassPrediction(
        class_ids=class_ids, probs=probs, normalized=normalized, labels=labels
    )


def _floats(a):
    return [float(v) for v in np.asarray(a).ravel()]


def model_to_dict(model):
    """JSON-compatible tree for one binary model; floats survive the
    round trip bit-exactly through their shortest decimal form."""
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": "binary",
        "x_dim": int(model.x_dim),
        "positive_class": int(model.positive_class),
        "prior_mean": float(model.prior_mean),
        "map_scales": _floats(model.map_scales),
        "training_points": [_floats(row) for row in model.training_points],
        "counts": {
            name: _floats(getattr(model.counts, name))
            for name in ("a_hat", "b_hat", "a_post", "b_post", "a_prior_prop", "b_prior_prop")
        },
        "fit_trace": [
            {"iteration": int(i), "scales": _floats(s), "objective": float(o)}
            for i, s, o in model.fit_trace
        ],
    }


def model_from_dict(tree):
    """Inverse of model_to_dict, with format and version checks."""
    if tree.get("format") != MODEL_FORMAT:
        raise DomainError(f"not a recognized model file (format {tree.get('format')!r})")
    if tree.get("version") != MODEL_VERSION:
        raise DomainError(f"unsupported model version {tree.get('version')!r}")
    if tree.get("kind") == "multiclass":
        return [model_from_dict(sub) for sub in tree["models"]]
    x_dim = int(tree["x_dim"])
    points = np.asarray(tree["training_points"], dtype=float).reshape(-1, x_dim)
    counts = CountField(
        **{name: np.asarray(vals, dtype=float) for name, vals in tree["counts"].items()}
    )
    trace = [
        (int(t["iteration"]), np.asarray(t["scales"], dtype=float), float(t["objective"]))
        for t in tree["fit_trace"]
    ]
    return BinaryModel(
        training_points=points,
        counts=counts,
        map_scales=np.asarray(tree["map_scales"], dtype=float),
        prior_mean=float(tree["prior_mean"]),
        fit_trace=trace,
        positive_class=int(tree["positive_class"]),
    )


def save_model(model, path):
    """Write a binary model or a one-vs-rest model list to ``path``."""
    if isinstance(model, (list, tuple)):
        tree = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kind": "multiclass",
            "models": [model_to_dict(m) for m in model],
        }
    else:
        tree = model_to_dict(model)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree, fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
