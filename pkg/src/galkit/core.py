"""Parameter types and the dense linear algebra behind them.

Every matrix that reaches the rest of the package passes through here:
``GalParams`` and ``MatrixProductParams`` validate symmetry, positive
semidefiniteness and shape, and ``factorize`` produces the square-root
factor used for quadratic forms, log-determinants and Gaussian sampling.
Nothing in the package ever forms an explicit inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NonPositiveShape, NonSymmetric, NotPsd, SingularSigma

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_sigma(sigma: ArrayLike) -> NDArray:
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"sigma must be square, got shape {sigma.shape}")
    if sigma.shape[0] == 0:
        raise DimensionMismatch("sigma must have dimension p >= 1")
    if not np.all(np.isfinite(sigma)):
        raise NotPsd("sigma has non-finite entries")
    scale = np.max(np.abs(sigma))
    asym = np.max(np.abs(sigma - sigma.T))
    if asym > SYMMETRY_RTOL * scale:
        raise NonSymmetric(f"sigma asymmetry {asym:.3g} exceeds {SYMMETRY_RTOL:g} relative")
    sigma = 0.5 * (sigma + sigma.T)
    eig = np.linalg.eigvalsh(sigma)
    lam_max = max(eig[-1], 0.0)
    if eig[0] < -PSD_RTOL * lam_max or (lam_max == 0.0 and eig[0] < 0.0):
        raise NotPsd(f"sigma has eigenvalue {eig[0]:.6g} (largest {eig[-1]:.6g})")
    return sigma


def _check_mu(mu: ArrayLike, p: int) -> NDArray:
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu.ndim != 1 or mu.shape[0] != p:
        raise DimensionMismatch(f"mu must have length {p}, got shape {mu.shape}")
    if not np.all(np.isfinite(mu)):
        raise DimensionMismatch("mu has non-finite entries")
    return mu


@dataclass(frozen=True, eq=False)
class GalParams:
    """The triple (sigma, mu, s) of a generalized asymmetric Laplace law.

    The constructor validates and symmetrizes; instances are immutable.
    """

    sigma: NDArray
    mu: NDArray
    s: float

    def __post_init__(self):
        sigma = _check_sigma(self.sigma)
        mu = _check_mu(self.mu, sigma.shape[0])
        s = float(self.s)
        if not (s > 0.0) or not np.isfinite(s):
            raise NonPositiveShape(f"shape s must be > 0, got {self.s!r}")
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "s", s)

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def factor(self) -> SpdFactor:
        return factorize(self.sigma)

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.tolist(), "mu": self.mu.tolist(), "s": self.s}


def validate_params(sigma: ArrayLike, mu: ArrayLike, s: float) -> GalParams:
    return GalParams(sigma, mu, s)


@dataclass(frozen=True, eq=False)
class MatrixProductParams:
    """Law of ``W y + |y|^2 mu`` with W (p x d) having i.i.d. N(0, sigma)
    columns and y ~ N(0, alpha I_d)."""

    sigma: NDArray
    mu: NDArray
    d: int
    alpha: float = 1.0

    def __post_init__(self):
        sigma = _check_sigma(self.sigma)
        mu = _check_mu(self.mu, sigma.shape[0])
        if isinstance(self.d, (bool, np.bool_)) or int(self.d) != self.d or int(self.d) < 1:
            raise DimensionMismatch(f"d must be a positive integer, got {self.d!r}")
        alpha = float(self.alpha)
        if not (alpha > 0.0) or not np.isfinite(alpha):
            raise NonPositiveShape(f"alpha must be > 0, got {self.alpha!r}")
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "alpha", alpha)

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def factor(self) -> SpdFactor:
        return factorize(self.sigma)

    def target(self) -> GalParams:
        """GAL law of ``W y + |y|^2 mu``: (2 alpha sigma, 2 alpha mu, d/2)."""
        return GalParams(2.0 * self.alpha * self.sigma, 2.0 * self.alpha * self.mu, self.d / 2.0)

    def isotropic_target(self) -> GalParams:
        """GAL law of ``W y`` alone: (2 alpha sigma, 0, d/2)."""
        return GalParams(2.0 * self.alpha * self.sigma, np.zeros(self.p), self.d / 2.0)

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.tolist(), "mu": self.mu.tolist(), "d": self.d, "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class SpdFactor:
    """Square-root factor with ``lower @ lower.T == sigma``.

    For strictly positive definite input ``lower`` is the Cholesky factor.
    For rank-deficient input it is the row-permuted pivoted factor, which
    still reconstructs sigma but is not triangular; it supports sampling
    only, and the solve-based operations raise ``SingularSigma``.
    """

    lower: NDArray
    log_det: float
    full_rank: bool
    rank: int = field(default=-1)

    @property
    def p(self) -> int:
        return self.lower.shape[0]

    def solve_lower(self, x: ArrayLike) -> NDArray:
        """``L^{-1} x`` for x of shape (p,) or (n, p); rows stay rows."""
        if not self.full_rank:
            raise SingularSigma("sigma is rank-deficient; density-side operations need it positive definite")
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.p or x.ndim > 2:
            raise DimensionMismatch(f"expected trailing dimension {self.p}, got shape {x.shape}")
        return solve_triangular(self.lower, x.T, lower=True, check_finite=False).T


def _pivoted_cholesky(sigma: NDArray, tol: float) -> tuple[NDArray, int]:
    # Diagonal-pivoted outer-product Cholesky. Returns P L, rank.
    p = sigma.shape[0]
    a = sigma.copy()
    perm = np.arange(p)
    lower = np.zeros((p, p))
    rank = p
    for k in range(p):
        j = k + int(np.argmax(np.diag(a)[k:]))
        if j != k:
            a[[k, j], :] = a[[j, k], :]
            a[:, [k, j]] = a[:, [j, k]]
            lower[[k, j], :k] = lower[[j, k], :k]
            perm[[k, j]] = perm[[j, k]]
        pivot = a[k, k]
        if pivot < -tol:
            raise NotPsd(f"negative pivot {pivot:.6g} in pivoted factorization")
        if pivot <= tol:
            rank = k
            break
        lk = np.sqrt(pivot)
        lower[k, k] = lk
        lower[k + 1:, k] = a[k + 1:, k] / lk
        a[k + 1:, k + 1:] -= np.outer(lower[k + 1:, k], lower[k + 1:, k])
    out = np.empty_like(lower)
    out[perm] = lower
    return out, rank


def factorize(sigma: ArrayLike) -> SpdFactor:
    """Factor a validated sigma; falls back to pivoting when singular."""
    sigma = _check_sigma(sigma)
    p = sigma.shape[0]
    max_diag = float(np.max(np.diag(sigma)))
    # pivots below this are treated as exact zeros
    rank_tol = p * np.finfo(float).eps * max_diag
    try:
        lower = np.linalg.cholesky(sigma)
        diag = np.diag(lower)
        if np.all(diag * diag > rank_tol) and max_diag > 0.0:
            return SpdFactor(_frozen(lower), float(2.0 * np.sum(np.log(diag))), True, p)
    except np.linalg.LinAlgError:
        pass
    lower, rank = _pivoted_cholesky(sigma, max(rank_tol, PSD_RTOL * max_diag))
    return SpdFactor(_frozen(lower), float("-inf"), False, rank)


def quad_form(factor: SpdFactor, x: ArrayLike) -> NDArray | float:
    """Mahalanobis norm ``sqrt(x^T sigma^{-1} x)`` via a triangular solve."""
    z = factor.solve_lower(x)
    # scale first so tiny or huge x neither underflows nor overflows when squared
    big = np.max(np.abs(z), axis=-1, keepdims=True)
    safe = np.where(big > 0.0, big, 1.0)
    q = np.linalg.norm(z / safe, axis=-1) * safe[..., 0]
    return float(q) if np.ndim(q) == 0 else q


def asym_const(factor: SpdFactor, mu: ArrayLike) -> float:
    """``sqrt(2 + mu^T sigma^{-1} mu)``; always at least sqrt(2)."""
    q = quad_form(factor, mu)
    return float(np.sqrt(2.0 + q * q))
