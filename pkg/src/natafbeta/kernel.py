"""RBF correlation matrices and class-count propagation across attribute space.

Count evidence observed at specific attribute vectors is spread to nearby
points by a Gaussian RBF kernel whose per-dimension length scales divide
the squared distance directly (so a scale carries units of squared
attribute distance).  The expected-value propagation path is the default;
the full lognormal single-observation conditioning is available for the
cases where the posterior spread matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import DomainError

__all__ = [
    "CountField",
    "LognormalFieldParams",
    "DEFAULT_PRIOR_MEAN",
    "as_points",
    "as_scales",
    "unique_points",
    "rbf_correlation",
    "cross_correlation",
    "count_observations",
    "propagate_counts",
    "condition_lognormal_single",
]

# Practical stand-in for the vanishing prior mean of the propagated counts.
DEFAULT_PRIOR_MEAN = 1e-10


def as_points(points):
    """Coerce to an (s, x_dim) float array; a 1-D input is one dimension."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise DomainError("query set must be a non-empty 2-D array of points")
    if np.any(~np.isfinite(pts)):
        raise DomainError("query points must be finite")
    return pts


def as_scales(scales, x_dim):
    """Coerce to a positive length-scale vector of length ``x_dim``.

    A scalar is broadcast across dimensions.  Scales divide squared
    distances, so their units are squared attribute distance.
    """
    sc = np.asarray(scales, dtype=float)
    if sc.ndim == 0:
        sc = np.full(x_dim, float(sc))
    if sc.shape != (x_dim,):
        raise DomainError(f"length scales have shape {sc.shape}, expected ({x_dim},)")
    if np.any(~np.isfinite(sc)) or np.any(sc <= 0):
        raise DomainError("length scales must be positive and finite")
    return sc


def unique_points(points):
    """First-occurrence unique rows under exact bitwise equality.

    Returns (unique (u, x_dim) array, inverse index mapping each input row
    to its unique row).
    """
    pts = as_points(points)
    seen = {}
    inverse = np.empty(len(pts), dtype=int)
    keep = []
    for i, row in enumerate(pts):
        key = row.tobytes()
        j = seen.get(key)
        if j is None:
            j = len(keep)
            seen[key] = j
            keep.append(i)
        inverse[i] = j
    return pts[keep], inverse


def _sq_distances(x, y):
    """Pairwise per-dimension squared differences, shape (len(x), len(y), x_dim)."""
    return (x[:, None, :] - y[None, :, :]) ** 2


def rbf_correlation(points, scales):
    """RBF correlation matrix [R]_ij = exp(-0.5 * sum_k (x_ik - x_jk)^2 / l_k).

    Exactly symmetric with unit diagonal; entries in (0, 1].
    """
    pts = as_points(points)
    sc = as_scales(scales, pts.shape[1])
    d2 = _sq_distances(pts, pts)
    return np.exp(-0.5 * (d2 / sc).sum(axis=2))


def cross_correlation(query, observed, scales):
    """Rectangular RBF kernel between two point sets, shape (s, d)."""
    q = as_points(query)
    o = as_points(observed)
    if q.shape[1] != o.shape[1]:
        raise DomainError(
            f"query dimension {q.shape[1]} does not match observed dimension {o.shape[1]}"
        )
    sc = as_scales(scales, q.shape[1])
    d2 = _sq_distances(q, o)
    return np.exp(-0.5 * (d2 / sc).sum(axis=2))


def count_observations(data, query):
    """Direct per-query-point class counts.

    ``data`` is a Dataset-like object (``.x``, ``.c``) or an (x, c) pair
    of attribute vectors and binary labels; every observed vector must
    match a query point exactly (bitwise, after canonical ingestion).
    Returns integer vectors (a_hat, b_hat) with a_hat[j] counting class-1
    observations at query point j.
    """
    if hasattr(data, "x") and hasattr(data, "c"):
        x, c = data.x, data.c
    else:
        x, c = data
    qs = as_points(query)
    c = np.asarray(c)
    if len(c) == 0:
        zeros = np.zeros(len(qs), dtype=int)
        return zeros, zeros.copy()
    xs = as_points(x)
    if len(c) != len(xs):
        raise DomainError("labels and attribute vectors differ in length")
    if len(c) and not np.isin(c, (0, 1)).all():
        raise DomainError("class labels must be binary 0/1")
    index = {row.tobytes(): j for j, row in enumerate(qs)}
    a_hat = np.zeros(len(qs), dtype=int)
    b_hat = np.zeros(len(qs), dtype=int)
    for i, row in enumerate(xs):
        j = index.get(row.tobytes())
        if j is None:
            raise DomainError(f"observation {i} has no matching query point")
        if c[i] == 1:
            a_hat[j] += 1
        else:
            b_hat[j] += 1
    return a_hat, b_hat


@dataclass(frozen=True)
class CountField:
    """Direct and kernel-propagated class counts over a query set.

    ``a_hat``/``b_hat`` are the direct counts at each query point;
    ``a_post``/``b_post`` the expected posterior counts (prior mean plus
    kernel-weighted evidence from every observation); ``a_prior_prop``/
    ``b_prior_prop`` the propagated-only parts, identically
    ``post - hat``.
    """

    a_hat: np.ndarray
    b_hat: np.ndarray
    a_post: np.ndarray
    b_post: np.ndarray
    a_prior_prop: np.ndarray
    b_prior_prop: np.ndarray


def propagate_counts(a_hat, b_hat, observed, query, l_a, l_b, prior_mean=DEFAULT_PRIOR_MEAN):
    """Spread direct counts at ``observed`` points over ``query`` points.

    The expected posterior count at query point j is

        a_post[j] = prior_mean + sum_i K_a[j, i] * a_hat[i]

    with K_a the cross RBF kernel at scales ``l_a`` (``l_b`` for the
    class-0 counts).  Query points that coincide bitwise with an observed
    point carry that point's direct count; the propagated-only vectors
    are obtained by subtracting those direct counts.
    """
    if prior_mean < 0:
        raise DomainError("prior_mean must be nonnegative")
    obs = as_points(observed)
    qs = as_points(query)
    a = np.asarray(a_hat, dtype=float)
    b = np.asarray(b_hat, dtype=float)
    if a.shape != (len(obs),) or b.shape != (len(obs),):
        raise DomainError("count vectors must match the observed point set")
    if np.any(a < 0) or np.any(b < 0):
        raise DomainError("counts must be nonnegative")

    k_a = cross_correlation(qs, obs, l_a)
    k_b = cross_correlation(qs, obs, l_b)
    a_post = prior_mean + k_a @ a
    b_post = prior_mean + k_b @ b

    index = {row.tobytes(): i for i, row in enumerate(obs)}
    a_direct = np.zeros(len(qs))
    b_direct = np.zeros(len(qs))
    for j, row in enumerate(qs):
        i = index.get(row.tobytes())
        if i is not None:
            a_direct[j] = a[i]
            b_direct[j] = b[i]

    return CountField(
        a_hat=a_direct,
        b_hat=b_direct,
        a_post=a_post,
        b_post=b_post,
        a_prior_prop=a_post - a_direct,
        b_prior_prop=b_post - b_direct,
    )


@dataclass(frozen=True)
class LognormalFieldParams:
    """Lognormal process over a query set: log-space means, standard
    deviations and correlation.  The implied covariance is
    diag(zeta) R diag(zeta)."""

    lam: np.ndarray
    zeta: np.ndarray
    correlation: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        zeta = np.asarray(self.zeta, dtype=float)
        corr = np.asarray(self.correlation, dtype=float)
        s = len(lam)
        if zeta.shape != (s,) or corr.shape != (s, s):
            raise DomainError("field parameter shapes are inconsistent")
        if np.any(~np.isfinite(lam)) or np.any(~np.isfinite(zeta)) or np.any(zeta < 0):
            raise DomainError("field parameters must be finite with zeta >= 0")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "correlation", corr)

    @property
    def covariance(self):
        return np.outer(self.zeta, self.zeta) * self.correlation


def condition_lognormal_single(prior, index, observed_count):
    """Condition a lognormal field on one observed count at ``index``.

    Standard Gaussian conditioning in log space on ln(observed_count):
    the conditioned coordinate collapses to the observation (zeta -> 0,
    lam -> ln count) and correlated coordinates move with it.  ``index``
    is 0-based.
    """
    s = len(prior.lam)
    if not 0 <= index < s:
        raise DomainError(f"index {index} outside field of size {s}")
    if observed_count <= 0:
        raise DomainError("observed count must be positive (its logarithm is taken)")
    if prior.zeta[index] <= 0:
        raise DomainError("prior zeta at the conditioning index must be positive")

    cov = prior.covariance
    col = cov[:, index]
    var_i = prior.zeta[index] ** 2
    innovation = np.log(observed_count) - prior.lam[index]

    lam_post = prior.lam + col * (innovation / var_i)
    cov_post = cov - np.outer(col, col) / var_i

    var_post = np.clip(np.diag(cov_post), 0.0, None)
    zeta_post = np.sqrt(var_post)
    denom = np.outer(zeta_post, zeta_post)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr_post = np.where(denom > 0, cov_post / np.where(denom > 0, denom, 1.0), 0.0)
    np.fill_diagonal(corr_post, 1.0)
    return LognormalFieldParams(lam=lam_post, zeta=zeta_post, correlation=corr_post)
