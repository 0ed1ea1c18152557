"""Scalar special functions and multivariate-normal kernels.

Numerical ground floor for the whole package: Beta log-densities and
CDFs (stable down to pseudo-counts of 1e-12), standard-normal transforms
and a Cholesky-based multivariate normal log density with diagonal
jitter escalation.  Everything here is a pure function and safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

__all__ = [
    "BetaParams",
    "DomainError",
    "DivergentDensityError",
    "SingularMatrixError",
    "log_beta_function",
    "beta_log_pdf",
    "beta_cdf",
    "beta_inv_cdf",
    "std_normal_cdf",
    "std_normal_inv_cdf",
    "std_normal_log_pdf",
    "mvn_log_pdf",
    "cholesky_with_jitter",
]

LOG_2PI = float(np.log(2.0 * np.pi))

# Jitter escalation for nearly singular correlation matrices: start tiny,
# double until the factorization succeeds or the cap is reached.
JITTER_START = 1e-10
JITTER_MAX = 1e-6


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the function."""


class DivergentDensityError(DomainError):
    """The density is +inf at the requested point (endpoint with exponent < 0)."""


class SingularMatrixError(ValueError):
    """A correlation matrix stayed non-positive-definite after jitter."""


@dataclass(frozen=True)
class BetaParams:
    """Beta pseudo-counts: ``a`` for class 1, ``b`` for class 0."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise DomainError(f"Beta parameters must be finite, got a={self.a}, b={self.b}")
        if self.a <= 0 or self.b <= 0:
            raise DomainError(f"Beta parameters must be positive, got a={self.a}, b={self.b}")


def _as_positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError(f"{name} must be positive and finite")
    return x


def log_beta_function(a, b):
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b).

    Accepts scalars or arrays; finite for any positive arguments,
    including pseudo-counts as small as 1e-12.
    """
    a = _as_positive(a, "a")
    b = _as_positive(b, "b")
    out = sp.gammaln(a) + sp.gammaln(b) - sp.gammaln(a + b)
    return float(out) if out.ndim == 0 else out


def beta_log_pdf(p, a, b):
    """Log density of Beta(a, b) at ``p``.

    (a-1) ln p + (b-1) ln(1-p) - ln B(a, b).  Endpoints are allowed only
    where the corresponding exponent is >= 1 (density 0, log -inf is
    returned only for exponent > 0 at the endpoint; an endpoint with an
    exponent < 0 means the density diverges there and a DomainError is
    raised instead of silently returning a non-finite number).
    """
    p = np.asarray(p, dtype=float)
    a = _as_positive(a, "a")
    b = _as_positive(b, "b")
    if np.any((p < 0) | (p > 1)):
        raise DomainError("p must lie in [0, 1]")
    at_zero = p == 0
    at_one = p == 1
    if np.any(at_zero & (a < 1)) or np.any(at_one & (b < 1)):
        raise DivergentDensityError("density diverges at an endpoint with exponent < 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (a - 1.0) * np.log(p) + (b - 1.0) * np.log1p(-p) - log_beta_function(a, b)
        # exponent exactly 0 at an endpoint contributes 0, not 0*log(0)=nan
        out = np.where(at_zero & (a == 1), (b - 1.0) * np.log1p(-p) - log_beta_function(a, b), out)
        out = np.where(at_one & (b == 1), (a - 1.0) * np.log(p) - log_beta_function(a, b), out)
    return float(out) if out.ndim == 0 else out


def beta_cdf(p, a, b):
    """Regularized incomplete beta I_p(a, b); monotone, F(0)=0, F(1)=1."""
    p = np.asarray(p, dtype=float)
    a = _as_positive(a, "a")
    b = _as_positive(b, "b")
    if np.any((p < 0) | (p > 1)):
        raise DomainError("p must lie in [0, 1]")
    out = sp.betainc(a, b, p)
    return float(out) if out.ndim == 0 else out


def beta_inv_cdf(q, a, b):
    """Inverse of :func:`beta_cdf` by bracketed bisection.

    Returns p with beta_cdf(p) = q to within 1e-12 absolute in p.  The
    bisection runs on beta_cdf itself, so the roundtrip with beta_cdf is
    consistent by construction.  Vectorized over ``q``.
    """
    q, a, b = np.broadcast_arrays(
        np.asarray(q, dtype=float),
        np.asarray(_as_positive(a, "a"), dtype=float),
        np.asarray(_as_positive(b, "b"), dtype=float),
    )
    if np.any((q < 0) | (q > 1)):
        raise DomainError("q must lie in [0, 1]")
    lo = np.zeros_like(q)
    hi = np.ones_like(q)
    # 53 halvings take the bracket width below 1e-15
    for _ in range(53):
        mid = 0.5 * (lo + hi)
        below = sp.betainc(a, b, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(q == 0.0, 0.0, out)
    out = np.where(q == 1.0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def std_normal_cdf(z):
    """Phi(z), standard normal CDF."""
    out = sp.ndtr(np.asarray(z, dtype=float))
    return float(out) if out.ndim == 0 else out


def std_normal_inv_cdf(q):
    """Phi^-1(q) for q in (0, 1); accurate to 1e-9 over [1e-12, 1 - 1e-12]."""
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise DomainError("q must lie strictly inside (0, 1)")
    out = sp.ndtri(q)
    return float(out) if out.ndim == 0 else out


def std_normal_log_pdf(z):
    """ln phi(z) = -0.5 (ln 2 pi + z^2)."""
    z = np.asarray(z, dtype=float)
    out = -0.5 * (LOG_2PI + z * z)
    return float(out) if out.ndim == 0 else out


def cholesky_with_jitter(r, name="correlation matrix"):
    """Lower Cholesky factor of ``r``, escalating diagonal jitter on failure.

    Adds JITTER_START to the diagonal on the first failure and doubles it
    until the factorization succeeds; past JITTER_MAX the matrix is
    declared singular.
    """
    r = np.asarray(r, dtype=float)
    try:
        return np.linalg.cholesky(r)
    except np.linalg.LinAlgError:
        pass
    jitter = JITTER_START
    eye = np.eye(r.shape[0])
    while jitter <= JITTER_MAX:
        try:
            return np.linalg.cholesky(r + jitter * eye)
        except np.linalg.LinAlgError:
            jitter *= 2.0
    raise SingularMatrixError(
        f"{name} is not positive definite (jitter escalated past {JITTER_MAX:g})"
    )


def mvn_log_pdf(z, r, name="correlation matrix"):
    """Log density of a zero-mean MVN with correlation matrix ``r`` at ``z``.

    -0.5 (s ln 2 pi + ln det R + z' R^-1 z) via the Cholesky factor of ``r``.
    ``z`` may be a single vector of length s or an (m, s) batch; a batch
    returns an array of m log densities.
    """
    z = np.asarray(z, dtype=float)
    r = np.asarray(r, dtype=float)
    s = r.shape[0]
    if r.shape != (s, s):
        raise DomainError("correlation matrix must be square")
    if z.shape[-1] != s:
        raise DomainError(f"z has dimension {z.shape[-1]}, correlation matrix is {s}x{s}")
    chol = cholesky_with_jitter(r, name=name)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    # solve L w = z so that z' R^-1 z = w'w
    w = np.linalg.solve(chol, z[..., None] if z.ndim == 1 else z.T)
    quad = np.sum(w * w, axis=0)
    out = -0.5 * (s * LOG_2PI + log_det + quad)
    if z.ndim == 1:
        return float(out[0]) if out.ndim else float(out)
    return out
