"""Random variate generation for GAL laws.

Two independent routes produce the same distribution:

* ``sample_mixture``: the variance-mean gamma mixture u*mu + sqrt(u)*x.
* ``sample_matrix_product``: W y + |y|^2 mu with a Gaussian matrix W and a
  Gaussian vector y, accumulated one column of W at a time.

Draws are consumed from the given ``RngStream`` in a fixed order, so a
(seed, stream_id) pair fully determines every output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import GalParams, MatrixProductParams, SpdFactor, factorize
from .errors import DomainError
from .rng import RngStream


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """n x p draws (one per row) plus where they came from."""

    data: NDArray
    sampler: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    stream_id: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1:
            raise ValueError(f"sample data must be a non-empty n x p array, got shape {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def meta(self) -> dict:
        return {
            "sampler": self.sampler,
            "params": self.params,
            "seed": self.seed,
            "stream_id": self.stream_id,
            "n": self.n,
            "p": self.p,
        }


def as_array(samples: SampleMatrix | ArrayLike) -> NDArray:
    if isinstance(samples, SampleMatrix):
        return samples.data
    a = np.asarray(samples, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def gen_std_normal(rng: RngStream, n: int) -> NDArray:
    return rng.normal(_check_n(n))


def _gamma_ge1(rng: RngStream, shape: float, n: int) -> NDArray:
    # Marsaglia-Tsang squeeze/rejection
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = n - filled
        x = rng.normal(m)
        u = rng.uniform(m)
        v = 1.0 + c * x
        ok = v > 0.0
        v = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        accept = ok & ((u < 1.0 - 0.0331 * x2 * x2) | (np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(v))))
        got = d * v[accept]
        out[filled:filled + got.size] = got
        filled += got.size
    return out


def gen_gamma(rng: RngStream, shape: float, n: int) -> NDArray:
    """Gamma(shape, rate=1) draws.

    Shapes below 1 are boosted: Gamma(shape+1) * U**(1/shape).
    """
    shape = float(shape)
    if not shape > 0.0:
        raise DomainError(f"gamma shape must be > 0, got {shape!r}")
    n = _check_n(n)
    if shape >= 1.0:
        return _gamma_ge1(rng, shape, n)
    g = _gamma_ge1(rng, shape + 1.0, n)
    u = rng.uniform(n)
    return g * np.exp(np.log(u) / shape)


def _factor(sigma: ArrayLike | SpdFactor) -> SpdFactor:
    return sigma if isinstance(sigma, SpdFactor) else factorize(sigma)


def _mvn_rows(rng: RngStream, factor: SpdFactor, n: int) -> NDArray:
    eps = rng.normal(n * factor.p).reshape(n, factor.p)
    return eps @ factor.lower.T


def _meta(rng: RngStream) -> dict:
    return {"seed": rng.seed, "stream_id": rng.stream_id}


def gen_mvn(rng: RngStream, factor: SpdFactor | ArrayLike, n: int) -> SampleMatrix:
    factor = _factor(factor)
    meta = _meta(rng)
    rows = _mvn_rows(rng, factor, _check_n(n))
    sigma = factor.lower @ factor.lower.T
    return SampleMatrix(rows, "mvn", {"sigma": sigma.tolist()}, **meta)


def sample_mixture(rng: RngStream, params: GalParams, n: int) -> SampleMatrix:
    """Rows u*mu + sqrt(u)*L eps with u ~ Gamma(s, 1)."""
    n = _check_n(n)
    meta = _meta(rng)
    u = gen_gamma(rng, params.s, n)
    x = _mvn_rows(rng, params.factor, n)
    rows = u[:, None] * params.mu + np.sqrt(u)[:, None] * x
    return SampleMatrix(rows, "mixture", params.to_dict(), **meta)


def _accumulate_columns(rng: RngStream, factor: SpdFactor, mu: NDArray, d: int, alpha: float, n: int) -> NDArray:
    # Column k contributes y_k w_k + y_k^2 mu; only one column is live at a time.
    scale = np.sqrt(alpha)
    acc = np.zeros((n, factor.p))
    for _ in range(d):
        y = scale * rng.normal(n)
        w = _mvn_rows(rng, factor, n)
        acc += y[:, None] * w
        if mu is not None:
            acc += (y * y)[:, None] * mu
    return acc


def sample_column_term(rng: RngStream, sigma: ArrayLike, mu: ArrayLike, n: int) -> SampleMatrix:
    """Rows y*w + y^2*mu with scalar y ~ N(0,1), w ~ N(0, sigma)."""
    mp = MatrixProductParams(sigma, mu, d=1)
    n = _check_n(n)
    meta = _meta(rng)
    rows = _accumulate_columns(rng, mp.factor, mp.mu, 1, 1.0, n)
    return SampleMatrix(rows, "column-term", {"sigma": mp.sigma.tolist(), "mu": mp.mu.tolist()}, **meta)


def sample_matrix_product(rng: RngStream, mp: MatrixProductParams, n: int) -> SampleMatrix:
    """Rows W y + |y|^2 mu, W with i.i.d. N(0, sigma) columns, y ~ N(0, alpha I_d).

    With alpha = 1 the rows follow GAL(2 sigma, 2 mu, d/2); in general
    ``mp.target()``.
    """
    n = _check_n(n)
    meta = _meta(rng)
    rows = _accumulate_columns(rng, mp.factor, mp.mu, mp.d, mp.alpha, n)
    return SampleMatrix(rows, "matrix-product", mp.to_dict(), **meta)


def sample_isotropic_product(rng: RngStream, mp: MatrixProductParams, n: int) -> SampleMatrix:
    """Rows W y with y ~ N(0, alpha I_d); ``mp.mu`` is ignored.

    Distributed as GAL(2 alpha sigma, 0, d/2), i.e. as sqrt(u) x with
    u ~ Gamma(d/2, 1) and x ~ N(0, 2 alpha sigma).
    """
    n = _check_n(n)
    meta = _meta(rng)
    rows = _accumulate_columns(rng, mp.factor, None, mp.d, mp.alpha, n)
    echo = mp.to_dict()
    echo.pop("mu")
    return SampleMatrix(rows, "isotropic", echo, **meta)
