"""Statistical checks that turn distributional identities into pass/fail.

All reports serialize through ``to_json()``; every number is written as a
decimal string (``repr`` of the float, which round-trips exactly).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist

from .core import GalParams, MatrixProductParams
from .dist import cf, convolve_params, moments
from .errors import DimensionMismatch, EmptyGrid, TooFewSamples
from .rng import RngStream
from .sample import SampleMatrix, as_array, sample_isotropic_product, sample_matrix_product, sample_mixture

ECF_CONST = 4.0
ENERGY_LEVEL = 0.005
KS_CONST = 1.95
Z_LIMIT = 5.0
DEFAULT_PERMUTATIONS = 200
GRID_SEED = 0x6A1
_BLOCK = 512


def _num(x) -> str:
    return repr(float(x))


def _cnum(z) -> dict:
    return {"re": _num(z.real), "im": _num(z.imag)}


# -- empirical characteristic function ---------------------------------------


def default_grid(p: int) -> NDArray:
    """Axis vectors +-e_i at magnitudes 0.1, 0.5, 1.0 and eight fixed random
    unit directions at magnitude 0.7."""
    axes = np.vstack([np.eye(p), -np.eye(p)])
    rows = [m * axes for m in (0.1, 0.5, 1.0)]
    dirs = RngStream(GRID_SEED, p).normal(8 * p).reshape(8, p)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rows.append(0.7 * dirs)
    return np.vstack(rows)


def ecf(samples: SampleMatrix | ArrayLike, grid: ArrayLike) -> NDArray:
    """(1/n) sum_j exp(i u^T x_j) for every row u of ``grid``."""
    x = as_array(samples)
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise EmptyGrid("ECF grid is empty")
    if grid.shape[1] != x.shape[1]:
        raise DimensionMismatch(f"grid has dimension {grid.shape[1]}, samples {x.shape[1]}")
    phase = x @ grid.T
    return np.cos(phase).mean(axis=0) + 1j * np.sin(phase).mean(axis=0)


@dataclass
class EcfReport:
    grid: NDArray
    ecf: NDArray
    analytic: NDArray
    max_abs_dev: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_dev <= self.bound)

    def to_json(self) -> dict:
        return {
            "kind": "ecf",
            "grid": [[_num(v) for v in u] for u in self.grid],
            "ecf": [_cnum(z) for z in self.ecf],
            "analytic": [_cnum(z) for z in self.analytic],
            "max_abs_dev": _num(self.max_abs_dev),
            "bound": _num(self.bound),
            "passed": self.passed,
        }


def ecf_check(samples: SampleMatrix | ArrayLike, params: GalParams, grid: ArrayLike | None = None) -> EcfReport:
    x = as_array(samples)
    grid = default_grid(params.p) if grid is None else np.atleast_2d(np.asarray(grid, dtype=float))
    emp = ecf(x, grid)
    ana = np.atleast_1d(cf(params, grid))
    dev = float(np.max(np.abs(emp - ana)))
    return EcfReport(grid, emp, ana, dev, ECF_CONST / np.sqrt(x.shape[0]) + 1e-12)


# -- energy distance ---------------------------------------------------------


@dataclass
class TwoSampleReport:
    statistic: float
    permutations: int
    p_value: float
    level: float = ENERGY_LEVEL
    exceed: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.p_value >= self.level)

    def to_json(self) -> dict:
        return {
            "kind": "energy",
            "statistic": _num(self.statistic),
            "permutations": self.permutations,
            "p_value": _num(self.p_value),
            "level": _num(self.level),
            "passed": self.passed,
        }


def _energy_from_sums(s_aa, s_a_rows, total, na, nb):
    # s_ab + s_aa = a^T D 1 and s_bb = total - 2 a^T D 1 + s_aa
    s_ab = s_a_rows - s_aa
    s_bb = total - 2.0 * s_a_rows + s_aa
    return 2.0 * s_ab / (na * nb) - s_aa / na**2 - s_bb / nb**2


def energy_distance_test(
    a: SampleMatrix | ArrayLike,
    b: SampleMatrix | ArrayLike,
    rng: RngStream,
    permutations: int = DEFAULT_PERMUTATIONS,
    level: float = ENERGY_LEVEL,
) -> TwoSampleReport:
    """Permutation test on the energy statistic

    E = 2 mean|a_i - b_j| - mean|a_i - a_i'| - mean|b_j - b_j'|

    (V-statistic form, so E >= 0).  The pooled distance matrix is streamed
    in row blocks against all group-indicator columns at once, so memory
    stays O(N * permutations).
    """
    xa, xb = as_array(a), as_array(b)
    if xa.shape[1] != xb.shape[1]:
        raise DimensionMismatch(f"sample dimensions differ: {xa.shape[1]} vs {xb.shape[1]}")
    na, nb = xa.shape[0], xb.shape[0]
    if na < 50 or nb < 50:
        raise TooFewSamples(f"energy test needs >= 50 samples per side, got {na} and {nb}")
    pooled = np.vstack([xa, xb])
    big_n = na + nb

    ind = np.zeros((big_n, permutations + 1))
    ind[:na, 0] = 1.0
    for j in range(1, permutations + 1):
        order = np.argsort(rng.uniform(big_n), kind="stable")
        ind[order[:na], j] = 1.0

    d_ind = np.empty_like(ind)
    row_sums = np.empty(big_n)
    for start in range(0, big_n, _BLOCK):
        block = cdist(pooled[start:start + _BLOCK], pooled)
        d_ind[start:start + _BLOCK] = block @ ind
        row_sums[start:start + _BLOCK] = block.sum(axis=1)
    total = row_sums.sum()
    s_aa = np.einsum("ij,ij->j", ind, d_ind)
    s_a_rows = ind.T @ row_sums
    stats = _energy_from_sums(s_aa, s_a_rows, total, na, nb)
    observed = max(float(stats[0]), 0.0)
    # tolerance absorbs summation-order noise between algebraically equal splits
    tol = 1e-12 * max(total / big_n**2, 1.0)
    exceed = int(np.sum(stats[1:] >= observed - tol))
    return TwoSampleReport(observed, permutations, (1 + exceed) / (permutations + 1), level, exceed)


# -- Kolmogorov-Smirnov against the Laplace -----------------------------------


def laplace_cdf(x: ArrayLike, b: float) -> NDArray:
    x = np.asarray(x, dtype=float)
    half = 0.5 * np.exp(-np.abs(x) / b)
    return np.where(x < 0.0, half, 1.0 - half)


@dataclass
class KsReport:
    statistic: float
    threshold: float
    n: int

    @property
    def passed(self) -> bool:
        return bool(self.statistic <= self.threshold)

    def to_json(self) -> dict:
        return {
            "kind": "ks-laplace",
            "statistic": _num(self.statistic),
            "threshold": _num(self.threshold),
            "n": self.n,
            "passed": self.passed,
        }


def ks_laplace_test(samples: SampleMatrix | ArrayLike, b: float = 1.0) -> KsReport:
    """One-sample KS distance to the centered Laplace with scale b."""
    x = as_array(samples)
    if x.shape[1] != 1:
        raise DimensionMismatch(f"KS test needs 1-D samples, got p={x.shape[1]}")
    n = x.shape[0]
    if n < 100:
        raise TooFewSamples(f"KS test needs n >= 100, got {n}")
    if not b > 0:
        raise ValueError(f"Laplace scale must be > 0, got {b!r}")
    f = laplace_cdf(np.sort(x[:, 0]), b)
    i = np.arange(1, n + 1)
    stat = max(np.max(i / n - f), np.max(f - (i - 1) / n))
    return KsReport(float(stat), KS_CONST / np.sqrt(n), n)


# -- moment bands --------------------------------------------------------------


@dataclass
class MomentReport:
    mean_z: NDArray
    cov_z: NDArray
    limit: float = Z_LIMIT

    @property
    def max_abs_z(self) -> float:
        return float(max(np.max(np.abs(self.mean_z)), np.max(np.abs(self.cov_z))))

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_z <= self.limit)

    def to_json(self) -> dict:
        return {
            "kind": "moments",
            "mean_z": [_num(v) for v in self.mean_z],
            "cov_z": [[_num(v) for v in row] for row in self.cov_z],
            "max_abs_z": _num(self.max_abs_z),
            "limit": _num(self.limit),
            "passed": self.passed,
        }


def moment_check(samples: SampleMatrix | ArrayLike, params: GalParams, min_samples: int = 10_000) -> MomentReport:
    """z-scores of every empirical mean and covariance entry against the
    exact moments, with plug-in standard errors."""
    x = as_array(samples)
    n, p = x.shape
    if n < min_samples:
        raise TooFewSamples(f"moment check needs n >= {min_samples}, got {n}")
    if p != params.p:
        raise DimensionMismatch(f"samples have p={p}, params p={params.p}")
    exact = moments(params)
    xbar = x.mean(axis=0)
    centered = x - xbar
    mean_se = centered.std(axis=0, ddof=1) / np.sqrt(n)
    mean_z = (xbar - exact.mean) / mean_se
    prod = centered[:, :, None] * centered[:, None, :]
    cov_hat = prod.mean(axis=0)
    cov_se = prod.std(axis=0, ddof=1) / np.sqrt(n)
    cov_z = (cov_hat - exact.covariance) / cov_se
    return MomentReport(mean_z, cov_z)


# -- suites -------------------------------------------------------------------


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for _, c in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "passed": self.passed,
            "checks": [dict(name=name, **c.to_json()) for name, c in self.checks],
        }


@dataclass
class CfProductReport:
    max_abs_dev: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_dev <= self.tol)

    def to_json(self) -> dict:
        return {"kind": "cf-product", "max_abs_dev": _num(self.max_abs_dev), "tol": _num(self.tol), "passed": self.passed}


def battery(a, b, params: GalParams, rng: RngStream, permutations: int = DEFAULT_PERMUTATIONS,
            min_moment_samples: int = 10_000) -> list:
    """Energy test of a vs b, plus ECF and moment checks of both sides
    against ``params``."""
    return [
        ("energy", energy_distance_test(a, b, rng, permutations)),
        ("ecf_a", ecf_check(a, params)),
        ("ecf_b", ecf_check(b, params)),
        ("moments_a", moment_check(a, params, min_moment_samples)),
        ("moments_b", moment_check(b, params, min_moment_samples)),
    ]


def default_sigma(p: int) -> NDArray:
    """Fixed non-diagonal test matrix: 4+i on the diagonal, 2 * 2^-(|i-j|-1)
    off it ([[4, 2], [2, 5]] for p = 2)."""
    i = np.arange(p)
    lag = np.abs(i[:, None] - i[None, :])
    sigma = 4.0 * 0.5 ** np.maximum(lag - 1, 0) * (lag > 0) / 2.0
    sigma[i, i] = 4.0 + i
    return sigma


def default_mu(p: int) -> NDArray:
    """Fixed asymmetric drift (1, -1, 0.5, -0.5, ...)."""
    i = np.arange(p)
    return np.where(i % 2 == 0, 1.0, -1.0) * np.where(i < 2, 1.0, 0.5)


def theorem_main(mp: MatrixProductParams, n: int = 5000, seed: int = 7,
                 permutations: int = DEFAULT_PERMUTATIONS) -> SuiteReport:
    """Matrix-product draws against mixture draws of the predicted GAL law."""
    target = mp.target()
    a = sample_matrix_product(RngStream(seed, 0), mp, n)
    b = sample_mixture(RngStream(seed, 1), target, n)
    rep = SuiteReport("theorem-main", {"params": mp.to_dict(), "target": target.to_dict(), "n": n, "seed": seed,
                                       "permutations": permutations})
    rep.checks = battery(a, b, target, RngStream(seed, 2), permutations, min(n, 10_000))
    return rep


def corollary_pca(mp: MatrixProductParams, n: int = 5000, seed: int = 7,
                  permutations: int = DEFAULT_PERMUTATIONS) -> SuiteReport:
    """W y draws against sqrt(u) x draws, u ~ Gamma(d/2), x ~ N(0, 2 alpha sigma)."""
    target = mp.isotropic_target()
    a = sample_isotropic_product(RngStream(seed, 0), mp, n)
    b = sample_mixture(RngStream(seed, 1), target, n)
    rep = SuiteReport("corollary-pca", {"params": mp.to_dict(), "target": target.to_dict(), "n": n, "seed": seed,
                                        "permutations": permutations})
    rep.checks = battery(a, b, target, RngStream(seed, 2), permutations, min(n, 10_000))
    return rep


def convolution(sigma: ArrayLike, mu: ArrayLike, s1: float, s2: float, n: int = 5000, seed: int = 7,
                permutations: int = DEFAULT_PERMUTATIONS) -> SuiteReport:
    """Sums of independent GAL(s1) and GAL(s2) draws against GAL(s1 + s2) draws."""
    pa, pb = GalParams(sigma, mu, s1), GalParams(sigma, mu, s2)
    target = convolve_params(pa, pb)
    z1 = sample_mixture(RngStream(seed, 0), pa, n)
    z2 = sample_mixture(RngStream(seed, 1), pb, n)
    summed = SampleMatrix(z1.data + z2.data, "convolution-sum", target.to_dict(), seed, 0)
    direct = sample_mixture(RngStream(seed, 2), target, n)
    grid = default_grid(target.p)
    cf_dev = float(np.max(np.abs(cf(target, grid) - cf(pa, grid) * cf(pb, grid))))
    rep = SuiteReport("convolution", {"target": target.to_dict(), "s1": pa.s, "s2": pb.s, "n": n, "seed": seed,
                                      "permutations": permutations})
    rep.checks = [("cf_product", CfProductReport(cf_dev))]
    rep.checks += battery(summed, direct, target, RngStream(seed, 3), permutations, min(n, 10_000))
    return rep


def laplace_reduction(n: int = 100_000, seed: int = 7) -> SuiteReport:
    """Inner products of two independent 2-D standard Gaussian vectors
    against the standard Laplace (scale 1)."""
    mp = MatrixProductParams(np.eye(1), np.zeros(1), d=2)
    x = sample_matrix_product(RngStream(seed, 0), mp, n)
    rep = SuiteReport("laplace-reduction", {"params": mp.to_dict(), "n": n, "seed": seed, "b": "1.0"})
    rep.checks = [("ks", ks_laplace_test(x, 1.0))]
    return rep


def ks_laplace(samples: SampleMatrix | ArrayLike, b: float = 1.0) -> SuiteReport:
    rep = SuiteReport("ks-laplace", {"b": _num(b), "n": as_array(samples).shape[0]})
    rep.checks = [("ks", ks_laplace_test(samples, b))]
    return rep


def moments_suite(params: GalParams, samples: SampleMatrix | ArrayLike | None = None, n: int = 100_000,
                  seed: int = 7) -> SuiteReport:
    """Moment bands for given samples, or for fresh mixture draws."""
    if samples is None:
        samples = sample_mixture(RngStream(seed, 0), params, n)
    rep = SuiteReport("moments", {"params": params.to_dict(), "n": as_array(samples).shape[0], "seed": seed})
    rep.checks = [("moments", moment_check(samples, params))]
    return rep
