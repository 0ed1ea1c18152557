"""Classification metrics and the k-fold cross-validation harness.

CCR is plain accuracy under the strict decision rule (binary class 1
only when its predictive probability exceeds 0.5, multiclass by argmax).
PCC aggregates the model's own predictive probability of its chosen
class, geometric mean by default.  Cross-validation shuffles rows with a
seeded generator, so a fixed seed reproduces folds and results exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .classify import (
    FitConfig,
    UnfittableDataError,
    fit,
    fit_multiclass,
    predict,
    predict_multiclass,
)
from .special import DomainError

__all__ = ["CvReport", "ccr", "pcc", "fold_indices", "cross_validate", "write_report_json", "write_report_csv"]


def ccr(predicted_labels, true_labels):
    """Correct classification rate: correct decisions over all decisions."""
    pred = np.asarray(predicted_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.size == 0:
        raise DomainError("label vectors must be non-empty and of equal length")
    return float(np.mean(pred == true))


def pcc(chosen_probs, mode="geometric"):
    """Aggregate predictive probability of the chosen classes.

    Geometric mean by default (the d-th root of the product over the
    test set); ``mode="arithmetic"`` averages instead.  A zero entry
    collapses the geometric mean to 0.
    """
    p = np.asarray(chosen_probs, dtype=float)
    if p.size == 0:
        raise DomainError("need at least one probability")
    if np.any(p < 0) or np.any(p > 1):
        raise DomainError("probabilities must lie in [0, 1]")
    if mode == "arithmetic":
        return float(np.mean(p))
    if mode != "geometric":
        raise DomainError(f"unknown pcc mode {mode!r}")
    if np.any(p == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(p))))


@dataclass(frozen=True)
class CvReport:
    """Per-fold (ccr, pcc) pairs with their aggregates, all on the 0-1
    scale; ``failures`` lists folds excluded because training degenerated
    to a single class."""

    per_fold: list
    mean_ccr: float
    std_ccr: float
    mean_pcc: float
    std_pcc: float
    fold_seed: int
    dataset_name: str
    k: int
    pcc_mode: str = "geometric"
    failures: list = dataclass_field(default_factory=list)


def fold_indices(n, k, seed, labels=None, stratify=False):
    """Deterministic fold assignment: a seeded uniform shuffle split into
    k nearly equal parts, remainder rows going one each to the leading
    folds.  With ``stratify`` the shuffle and deal happen per class."""
    if not 2 <= k <= n:
        raise DomainError(f"cannot split {n} rows into {k} folds")
    rng = np.random.default_rng(seed)
    if stratify:
        if labels is None:
            raise DomainError("stratified folds require labels")
        labels = np.asarray(labels)
        folds = [[] for _ in range(k)]
        slot = 0
        for cls in np.unique(labels):
            members = np.flatnonzero(labels == cls)
            members = members[rng.permutation(len(members))]
            for idx in members:
                folds[slot % k].append(int(idx))
                slot += 1
        return [np.sort(np.asarray(f, dtype=int)) for f in folds]
    perm = rng.permutation(n)
    base, remainder = divmod(n, k)
    folds = []
    stop = 0
    for f in range(k):
        start, stop = stop, stop + base + (1 if f < remainder else 0)
        folds.append(np.sort(perm[start:stop]))
    return folds


def _binary_fold_metrics(x_tr, c_tr, x_te, c_te, config, pcc_mode):
    model = fit((x_tr, c_tr), config)
    prob = predict(model, x_te).prob_class1
    pred = (prob > 0.5).astype(int)
    chosen = np.where(pred == 1, prob, 1.0 - prob)
    return ccr(pred, c_te), pcc(chosen, pcc_mode)


def _multiclass_fold_metrics(x_tr, c_tr, x_te, c_te, config, pcc_mode):
    models = fit_multiclass((x_tr, c_tr), config)
    out = predict_multiclass(models, x_te)
    chosen = out.probs[np.arange(len(x_te)), np.argmax(out.probs, axis=1)]
    return ccr(out.labels, c_te), pcc(chosen, pcc_mode)


def cross_validate(dataset, k=10, seed=0, config=None, stratify=False, pcc_mode="geometric", name=None):
    """k-fold cross-validation of the classifier on a labelled dataset.

    Each fold is held out once while the remaining rows train a fresh
    model (binary when two classes are present, one-vs-rest otherwise).
    Folds whose training part contains a single class are recorded as
    failures and excluded from the aggregates.  Bit-for-bit reproducible
    for a fixed seed.
    """
    config = config or FitConfig()
    x = np.asarray(dataset.x, dtype=float)
    c = np.asarray(dataset.c)
    n_classes = len(np.unique(c))
    if n_classes < 2:
        raise UnfittableDataError("cross-validation requires at least two classes")
    binary = n_classes == 2
    folds = fold_indices(len(x), k, seed, labels=c, stratify=stratify)
    mask = np.ones(len(x), dtype=bool)

    per_fold = []
    failures = []
    for f, test_idx in enumerate(folds):
        mask[:] = True
        mask[test_idx] = False
        x_tr, c_tr = x[mask], c[mask]
        x_te, c_te = x[test_idx], c[test_idx]
        if len(x_te) == 0:
            continue
        try:
            if binary:
                metrics = _binary_fold_metrics(x_tr, c_tr, x_te, c_te, config, pcc_mode)
            else:
                metrics = _multiclass_fold_metrics(x_tr, c_tr, x_te, c_te, config, pcc_mode)
        except UnfittableDataError as exc:
            warnings.warn(f"fold {f} excluded: {exc}")
            failures.append((f, str(exc)))
            continue
        per_fold.append(metrics)

    if not per_fold:
        raise UnfittableDataError("every fold failed; nothing to aggregate")
    ccrs = np.asarray([m[0] for m in per_fold])
    pccs = np.asarray([m[1] for m in per_fold])
    std = lambda v: float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
    return CvReport(
        per_fold=per_fold,
        mean_ccr=float(np.mean(ccrs)),
        std_ccr=std(ccrs),
        mean_pcc=float(np.mean(pccs)),
        std_pcc=std(pccs),
        fold_seed=int(seed),
        dataset_name=name if name is not None else getattr(dataset, "provenance", ""),
        k=int(k),
        pcc_mode=pcc_mode,
        failures=failures,
    )


def write_report_json(report, path):
    """Full-precision JSON-compatible dump of a CvReport."""
    tree = {
        "dataset": report.dataset_name,
        "k": report.k,
        "fold_seed": report.fold_seed,
        "pcc_mode": report.pcc_mode,
        "per_fold": [{"ccr": float(a), "pcc": float(b)} for a, b in report.per_fold],
        "mean_ccr": report.mean_ccr,
        "std_ccr": report.std_ccr,
        "mean_pcc": report.mean_pcc,
        "std_pcc": report.std_pcc,
        "failures": [{"fold": f, "reason": r} for f, r in report.failures],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree, fh, indent=2)
        fh.write("\n")


def write_report_csv(report, path):
    """One CSV row of percentages, one decimal place: dataset, mean and
    spread of CCR, mean and spread of PCC."""
    header = "dataset,mean_ccr,std_ccr,mean_pcc,std_pcc"
    row = ",".join(
        [report.dataset_name]
        + [
            f"{100.0 * v:.1f}"
            for v in (report.mean_ccr, report.std_ccr, report.mean_pcc, report.std_pcc)
        ]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n" + row + "\n")
