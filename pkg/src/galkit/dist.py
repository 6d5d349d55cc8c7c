"""Analytic side of the GAL law: characteristic function, log-density,
moments and convolution of parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .core import SYMMETRY_RTOL, GalParams, asym_const, quad_form
from .errors import DimensionMismatch, IncompatibleParams, QuadratureError, SingularSigma
from .specfun import log_bessel_k, log_gamma


@dataclass(frozen=True)
class Moments:
    mean: NDArray
    covariance: NDArray


def _as_points(params: GalParams, x: ArrayLike) -> tuple[NDArray, bool]:
    x = np.asarray(x, dtype=float)
    if params.p == 1 and x.ndim <= 1 and not (x.ndim == 1 and x.shape[0] == 1):
        # scalar point or a flat batch of 1-D points
        single = x.ndim == 0
        return x.reshape(-1, 1), single
    if x.ndim == 1:
        if x.shape[0] != params.p:
            raise DimensionMismatch(f"expected a point of length {params.p}, got {x.shape[0]}")
        return x[None, :], True
    if x.ndim != 2 or x.shape[1] != params.p:
        raise DimensionMismatch(f"expected points of shape (n, {params.p}), got {x.shape}")
    return x, False


def cf(params: GalParams, u: ArrayLike) -> complex | NDArray:
    """phi(u) = (1 + u^T sigma u / 2 - i mu^T u)^(-s).

    The base has real part >= 1, so the principal-branch log never meets
    its cut and ``exp(-s log w)`` is the right power.
    """
    pts, single = _as_points(params, u)
    quad = 0.5 * np.einsum("ni,ij,nj->n", pts, params.sigma, pts)
    w = (1.0 + quad) - 1j * (pts @ params.mu)
    out = np.exp(-params.s * np.log(w))
    return complex(out[0]) if single else out


def _log_norm_const(params: GalParams) -> float:
    p = params.p
    return (
        math.log(2.0)
        - 0.5 * p * math.log(2.0 * math.pi)
        - log_gamma(params.s)
        - 0.5 * params.factor.log_det
    )


def logpdf(params: GalParams, x: ArrayLike) -> float | NDArray:
    """Log-density; ``inf`` at the origin when s <= p/2 (integrable pole).

    Needs sigma strictly positive definite.
    """
    factor = params.factor
    if not factor.full_rank:
        raise SingularSigma("density needs sigma positive definite")
    pts, single = _as_points(params, x)
    nu = params.s - 0.5 * params.p
    c = asym_const(factor, params.mu)
    q = np.atleast_1d(quad_form(factor, pts))
    # mu^T sigma^{-1} x through the same triangular solves
    skew = factor.solve_lower(pts) @ factor.solve_lower(params.mu)
    base = _log_norm_const(params)

    out = np.empty(q.shape[0])
    zero = q == 0.0
    pos = ~zero
    if np.any(pos):
        qp = q[pos]
        out[pos] = base + skew[pos] + nu * (np.log(qp) - math.log(c)) + log_bessel_k(nu, qp * c)
    if np.any(zero):
        if nu > 0.0:
            out[zero] = base + log_gamma(nu) + (nu - 1.0) * math.log(2.0) - 2.0 * nu * math.log(c)
        else:
            out[zero] = math.inf
    return float(out[0]) if single else out


def pdf(params: GalParams, x: ArrayLike) -> float | NDArray:
    """``exp(logpdf)``; underflows to 0 far in the tails."""
    return np.exp(logpdf(params, x))


def moments(params: GalParams) -> Moments:
    mu = params.mu
    return Moments(mean=params.s * mu, covariance=params.s * (params.sigma + np.outer(mu, mu)))


def _close(a: NDArray, b: NDArray) -> bool:
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 0.0)
    return bool(np.max(np.abs(a - b), initial=0.0) <= SYMMETRY_RTOL * scale)


def convolve_params(a: GalParams, b: GalParams) -> GalParams:
    """Law of z1 + z2 for independent z1 ~ a, z2 ~ b sharing sigma and mu."""
    if a.p != b.p:
        raise IncompatibleParams(f"dimensions differ: {a.p} vs {b.p}")
    if not _close(a.sigma, b.sigma):
        raise IncompatibleParams("sigma differs; convolution closure needs a shared sigma")
    if not _close(a.mu, b.mu):
        raise IncompatibleParams("mu differs; convolution closure needs a shared mu")
    return GalParams(a.sigma, a.mu, a.s + b.s)


def cf_inversion_pdf_1d(params: GalParams, x: float, epsabs: float = 1e-10) -> float:
    """Density of a 1-D GAL by Fourier inversion of ``cf``.

    f(x) = (1/pi) int_0^inf [Re phi(u) cos(ux) + Im phi(u) sin(ux)] du,
    integrated with QUADPACK's Fourier routine.  Independent of ``logpdf``;
    meant as a test oracle.
    """
    if params.p != 1:
        raise DimensionMismatch("Fourier-inversion oracle is 1-D only")
    if not params.factor.full_rank:
        raise SingularSigma("density needs sigma positive definite")
    x = float(x)

    def re(u):
        return cf(params, u).real

    def im(u):
        return cf(params, u).imag

    if x == 0.0:
        if params.s <= 0.5:
            raise QuadratureError("inversion integral diverges at x = 0 for s <= 1/2")
        total, total_err = _quad(re, epsabs)
    else:
        val_c, err_c = _quad(re, epsabs, weight="cos", wvar=abs(x))
        val_s, err_s = _quad(im, epsabs, weight="sin", wvar=abs(x))
        total = val_c + math.copysign(1.0, x) * val_s
        total_err = err_c + err_s
    if not np.isfinite(total) or total_err > 1e-6:
        raise QuadratureError(f"Fourier inversion failed at x={x} (error estimate {total_err:.3g})")
    return total / math.pi


def _quad(f, epsabs, **weight):
    opts = {"limlst": 200} if weight else {}
    res = integrate.quad(f, 0.0, np.inf, epsabs=epsabs, limit=500, full_output=1, **weight, **opts)
    if len(res) > 3:
        raise QuadratureError(f"quadrature did not converge: {res[3]}")
    return res[0], res[1]
