"""Joint distribution of class probabilities over a query set.

Each query point carries a Beta marginal for its class-1 probability;
the points are coupled through a Gaussian copula, so the joint density
is the product of the Beta marginals times a multivariate-normal
correction in transformed space.  Supports density evaluation, copula
sampling and per-point credible bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .special import (
    DomainError,
    beta_cdf,
    beta_inv_cdf,
    beta_log_pdf,
    cholesky_with_jitter,
    mvn_log_pdf,
    std_normal_cdf,
    std_normal_inv_cdf,
    std_normal_log_pdf,
)

__all__ = ["NatafBetaField", "nataf_beta_log_pdf", "sample_field", "credible_band"]

# Probabilities are clamped this far inside (0, 1) before the normal
# inverse CDF so transformed coordinates stay finite at grid endpoints.
CDF_CLAMP = 1e-14


@dataclass(frozen=True)
class NatafBetaField:
    """Beta marginals (a, b) at each of s query points plus the copula
    correlation.  ``r_p=None`` means independent points (identity)."""

    a: np.ndarray
    b: np.ndarray
    r_p: np.ndarray | None = dataclass_field(default=None)

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise DomainError("a and b must be vectors of equal length")
        if np.any(~np.isfinite(a)) or np.any(~np.isfinite(b)) or np.any(a <= 0) or np.any(b <= 0):
            raise DomainError("Beta parameters must be positive and finite")
        r = self.r_p
        if r is not None:
            r = np.asarray(r, dtype=float)
            s = len(a)
            if r.shape != (s, s):
                raise DomainError(f"correlation matrix shape {r.shape}, expected ({s}, {s})")
            if not np.allclose(r, r.T, atol=1e-12) or not np.allclose(np.diag(r), 1.0, atol=1e-12):
                raise DomainError("correlation matrix must be symmetric with unit diagonal")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "r_p", r)

    @property
    def size(self):
        return len(self.a)

    def correlation(self):
        """The copula correlation, materializing the identity default."""
        if self.r_p is None:
            return np.eye(self.size)
        return self.r_p


def _transformed(p, field):
    """Map probabilities to standard-normal space through the Beta CDFs."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != field.size:
        raise DomainError(f"probability vector length {p.shape[-1]}, field size {field.size}")
    if np.any(p <= 0) or np.any(p >= 1):
        raise DomainError("probabilities must lie strictly inside (0, 1)")
    q = np.clip(beta_cdf(p, field.a, field.b), CDF_CLAMP, 1.0 - CDF_CLAMP)
    z = std_normal_inv_cdf(q)
    if np.any(~np.isfinite(z)):
        raise DomainError("transformed coordinates are not finite")
    return p, z


def nataf_beta_log_pdf(p, field):
    """Joint log density at ``p``.

    ``p`` of shape (s,) gives a float; (m, s) evaluates m points at once.
    With an identity correlation the copula correction vanishes and the
    result is the plain sum of Beta log densities.
    """
    p, z = _transformed(p, field)
    beta_terms = np.asarray(beta_log_pdf(p, field.a, field.b))
    if field.r_p is None:
        # Identity copula: the multivariate term is the sum of univariate
        # normal log densities and cancels the correction exactly.
        return beta_terms.sum(axis=-1)
    correction = beta_terms - std_normal_log_pdf(z)
    copula = mvn_log_pdf(z, field.correlation(), name="r_p")
    return copula + np.asarray(correction).sum(axis=-1)


def sample_field(field, n, seed):
    """Draw ``n`` joint realizations, one per row.

    ``seed`` may be an integer or a ``numpy.random.Generator``.  Latent
    normals are correlated through the triangular factor of the copula
    correlation, then pushed through the Beta inverse CDFs.  Bit-for-bit
    reproducible for a fixed integer seed.
    """
    if n < 1:
        raise DomainError("sample count must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.standard_normal((int(n), field.size))
    if field.r_p is None:
        z = u
    else:
        chol = cholesky_with_jitter(field.correlation(), name="r_p")
        z = u @ chol.T
    q = np.clip(std_normal_cdf(z), CDF_CLAMP, 1.0 - CDF_CLAMP)
    return beta_inv_cdf(q, field.a, field.b)


def credible_band(field, levels):
    """Per-point Beta quantiles, one row per level.

    Returns an array of shape (len(levels), s); bands for plots come
    from paired low/high levels.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if np.any(levels <= 0) or np.any(levels >= 1):
        raise DomainError("levels must lie strictly inside (0, 1)")
    return beta_inv_cdf(levels[:, None], field.a[None, :], field.b[None, :])
