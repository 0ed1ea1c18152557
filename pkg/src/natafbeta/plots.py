"""Report figures rendered to files.

All rendering uses the non-interactive backend so figures can be written
from scripts and tests without a display.  Each function saves one PNG
and returns the path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classify import predict
from .field import credible_band
from .special import DomainError

__all__ = ["save_field_figure", "save_trace_figure", "save_cv_figure"]


def save_field_figure(model, path, low=None, high=None, grid=200, levels=(0.05, 0.95), data=None):
    """Predictive probability over a 1-D attribute range with credible
    bands and, when training data is supplied, an observation rug."""
    if model.x_dim != 1:
        raise DomainError("field figure requires a model over one attribute")
    pts = model.training_points[:, 0]
    lo = float(pts.min() if low is None else low)
    hi = float(pts.max() if high is None else high)
    xs = np.linspace(lo, hi, int(grid))
    result = predict(model, xs[:, None])
    bands = credible_band(result.field, list(levels))

    fig, ax = plt.subplots(figsize=(7, 4))
    for q, row in zip(levels, bands):
        ax.plot(xs, row, lw=0.8, color="tab:gray", label=f"quantile {q:g}")
    if len(levels) >= 2:
        ax.fill_between(xs, bands[0], bands[-1], color="tab:gray", alpha=0.2)
    ax.plot(xs, result.prob_class1, color="tab:blue", lw=1.8, label="predictive mean")
    if data is not None:
        x1 = data.x[data.c == 1, 0]
        x0 = data.x[data.c == 0, 0]
        ax.plot(x1, np.ones_like(x1), "o", ms=4, mfc="none", color="tab:red", label="class 1")
        ax.plot(x0, np.zeros_like(x0), "o", ms=4, mfc="none", color="tab:green", label="class 0")
    ax.set_xlabel("attribute value")
    ax.set_ylabel("class-1 probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_trace_figure(models, path):
    """Mean log-likelihood against iteration for one or more fits."""
    if not isinstance(models, (list, tuple)):
        models = [models]
    fig, ax = plt.subplots(figsize=(6, 4))
    for model in models:
        iters = [t[0] for t in model.fit_trace]
        objs = [t[2] for t in model.fit_trace]
        ax.plot(iters, objs, marker=".", label=f"class {model.positive_class}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean log-likelihood")
    if len(models) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_cv_figure(report, path):
    """Per-fold bars for both metrics with their means drawn across."""
    folds = np.arange(len(report.per_fold))
    ccrs = [m[0] for m in report.per_fold]
    pccs = [m[1] for m in report.per_fold]
    width = 0.4
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(folds - width / 2, ccrs, width, label="CCR", color="tab:blue")
    ax.bar(folds + width / 2, pccs, width, label="PCC", color="tab:orange")
    ax.axhline(report.mean_ccr, color="tab:blue", ls="--", lw=1)
    ax.axhline(report.mean_pcc, color="tab:orange", ls="--", lw=1)
    ax.set_xlabel("fold")
    ax.set_ylabel("metric")
    ax.set_ylim(0, 1.05)
    ax.set_title(report.dataset_name or "cross-validation")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
