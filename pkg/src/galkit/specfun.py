"""Log-gamma and log K_nu(z), the modified Bessel function of the second kind.

``log_bessel_k`` reduces nu to |nu|, splits it as ``nu = m + mu`` with
|mu| <= 1/2, evaluates K_mu and K_{mu+1} by Temme's series (z <= 2) or
Steed's continued fraction (z > 2), then climbs to K_nu by forward
recurrence carried as ratios so nothing overflows.  Half-integer orders
take the terminating closed form instead.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from .errors import DomainError

_EPS = 1e-16
_MAXIT = 100_000
_HALF_INT_TOL = 1e-12
_SERIES_CUTOFF = 2.0

# Taylor coefficients of 1/Gamma(x) = sum_k c[k] x^k about 0 (c[0] = 0).
_RGAMMA_TAYLOR = (
    0.0,
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
)


def log_gamma(s: float) -> float:
    """log Gamma(s) for s > 0."""
    s = float(s)
    if not s > 0.0:
        raise DomainError(f"log_gamma needs s > 0, got {s!r}")
    return math.lgamma(s)


def _temme_gammas(mu: float) -> tuple[float, float, float, float]:
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) is taken from the series
    directly, so there is no cancellation as mu -> 0.
    """
    c = _RGAMMA_TAYLOR
    gam1 = 0.0
    gam2 = 0.0
    # 1/Gamma(1+x) = sum_{k>=1} c[k] x^{k-1}; split into even/odd powers of x
    for k in range(len(c) - 1, 0, -1):
        if k % 2 == 0:
            gam1 = gam1 * mu * mu - c[k]
        else:
            gam2 = gam2 * mu * mu + c[k]
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def _k_pair_series(mu: float, z: float) -> tuple[float, float]:
    """(log K_mu(z), log K_{mu+1}(z)) by Temme's series; z <= 2, |mu| <= 1/2."""
    x2 = 0.5 * z
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    dlog = -math.log(x2)
    e = mu * dlog
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * dlog)
    total = ff
    ee = math.exp(e)
    pp = 0.5 * ee / gampl
    qq = 0.5 / (ee * gammi)
    c = 1.0
    d = x2 * x2
    total1 = pp
    mu2 = mu * mu
    for i in range(1, _MAXIT):
        ff = (i * ff + pp + qq) / (i * i - mu2)
        c *= d / i
        pp /= i - mu
        qq /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (pp - i * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    return math.log(total), math.log(total1) + math.log(2.0 / z)


def _k_pair_cf(mu: float, z: float) -> tuple[float, float]:
    """(log K_mu(z), log K_{mu+1}(z)) by Steed's continued fraction; z > 2."""
    mu2 = mu * mu
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAXIT):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    log_kmu = 0.5 * math.log(math.pi / (2.0 * z)) - z - math.log(s)
    log_k1 = log_kmu + math.log((mu + z + 0.5 - h) / z)
    return log_kmu, log_k1


def _log_bessel_k_general_scalar(nu: float, z: float) -> float:
    nu = abs(nu)
    m = int(math.floor(nu + 0.5))
    mu = nu - m
    if z <= _SERIES_CUTOFF:
        log_k0, log_k1 = _k_pair_series(mu, z)
    else:
        log_k0, log_k1 = _k_pair_cf(mu, z)
    if m == 0:
        return log_k0
    # ratio r = K_{mu+j+1} / K_{mu+j}; K_{v+1} = K_{v-1} + (2v/z) K_v
    r = math.exp(log_k1 - log_k0)
    out = log_k1
    for j in range(1, m):
        r = 1.0 / r + 2.0 * (mu + j) / z
        out += math.log(r)
    return out


def _log_bessel_k_half_int_scalar(m: int, z: float) -> float:
    k = np.arange(m + 1)
    log_terms = (
        np.array([math.lgamma(m + kk + 1) - math.lgamma(kk + 1) - math.lgamma(m - kk + 1) for kk in k])
        - k * math.log(2.0 * z)
    )
    return 0.5 * math.log(math.pi / (2.0 * z)) - z + float(logsumexp(log_terms))


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0.0)):
        raise DomainError("log K_nu(z) needs z > 0")
    return z


def _apply(fn, z: np.ndarray):
    if z.ndim == 0:
        return fn(float(z))
    return np.fromiter((fn(float(v)) for v in z.ravel()), dtype=float, count=z.size).reshape(z.shape)


def log_bessel_k_general(nu: float, z: ArrayLike):
    """log K_nu(z) by the Temme / Steed route, whatever nu is."""
    z = _check_z(z)
    nu = float(nu)
    return _apply(lambda v: _log_bessel_k_general_scalar(nu, v), z)


def log_bessel_k_half_int(m: int, z: ArrayLike):
    """log K_{m+1/2}(z) from the terminating sum

    K_{m+1/2}(z) = sqrt(pi/(2z)) e^{-z} sum_{k=0}^m (m+k)! / (k! (m-k)! (2z)^k),

    accumulated with log-sum-exp.
    """
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")
    m = int(m)
    z = _check_z(z)
    if z.ndim == 0:
        return _log_bessel_k_half_int_scalar(m, float(z))
    kk = np.arange(m + 1)
    log_coef = np.array([math.lgamma(m + k + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1) for k in kk])
    logz = np.log(2.0 * z)[..., None]
    total = logsumexp(log_coef - kk * logz, axis=-1)
    return 0.5 * np.log(np.pi / (2.0 * z)) - z + total


def log_bessel_k(nu: float, z: ArrayLike):
    """log K_nu(z) for real nu and z > 0 (scalar or array z).

    Orders within 1e-12 of a half-integer use the closed form; everything
    else goes through ``log_bessel_k_general``.
    """
    nu = abs(float(nu))
    m = round(nu - 0.5)
    if m >= 0 and abs(nu - 0.5 - m) <= _HALF_INT_TOL:
        return log_bessel_k_half_int(m, z)
    return log_bessel_k_general(nu, z)
