"""galkit command line.

    galkit sample  --sampler mixture --sigma I2 --mu 0,0 --s 1 --n 3 --seed 1
    galkit pdf     --sigma 2 --mu 0 --s 1 --x 1
    galkit cf      --sigma 2 --mu 1 --s 1 --u 1
    galkit moments --sigma I2 --mu 1,0 --s 2
    galkit verify  theorem-main --p 2 --d 5 --seed 7

Exit codes: 0 success / checks passed, 1 a statistical check failed,
2 bad invocation or invalid parameters.  Gamma variables use rate 1
throughout (Gamma(s, 1) has mean s).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import verify
from .core import GalParams, MatrixProductParams
from .dist import cf, logpdf, moments
from .errors import GalError
from .rng import MASK64, RngStream
from .sample import SampleMatrix, sample_isotropic_product, sample_matrix_product, sample_mixture

SEED_ENV = "GALKIT_SEED"
DEFAULT_SEED = 7
SUITES = ("theorem-main", "corollary-pca", "convolution", "laplace-reduction", "moments", "ks-laplace")


class UsageError(GalError):
    pass


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.replace(";", ",").split(",") if v.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def parse_matrix(text: str, p: int | None = None) -> np.ndarray:
    """``I2``/``I3`` (or bare ``I`` with --p), a scalar, or ``a,b;c,d``."""
    t = text.strip()
    if t.upper().startswith("I"):
        size = t[1:] or (str(p) if p else "")
        if not size.isdigit():
            raise UsageError(f"identity shorthand {text!r} needs a size, e.g. I2")
        return np.eye(int(size))
    try:
        rows = [[float(v) for v in row.split(",") if v.strip()] for row in t.split(";") if row.strip()]
    except ValueError:
        raise UsageError(f"cannot parse matrix {text!r}") from None
    if len({len(r) for r in rows}) != 1:
        raise UsageError(f"ragged matrix {text!r}")
    return np.array(rows, dtype=float)


def read_samples(path: str) -> np.ndarray:
    """Rows from a ``sample`` CSV (header optional) or JSON output."""
    text = sys.stdin.read() if path == "-" else open(path).read()
    if text.lstrip().startswith("{"):
        rows = json.loads(text)["rows"]
        return np.array([[float(v) for v in r] for r in rows], dtype=float)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and not _is_numeric_row(lines[0]):
        lines = lines[1:]
    if not lines:
        raise UsageError(f"no sample rows in {path!r}")
    return np.array([[float(v) for v in ln.split(",")] for ln in lines], dtype=float)


def _is_numeric_row(line: str) -> bool:
    try:
        [float(v) for v in line.split(",")]
        return True
    except ValueError:
        return False


@dataclass
class RunConfig:
    subcommand: str
    n: int
    seed: int
    stream: int
    fmt: str
    output: str | None
    header: bool


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def _seed(value) -> int:
    seed = _default_seed() if value is None else value
    if not 0 <= seed <= MASK64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return seed


def _gal_from_args(args, default_s: float | None = None) -> GalParams:
    if args.sigma is None:
        raise UsageError("--sigma is required")
    sigma = parse_matrix(args.sigma, args.p)
    p = sigma.shape[0]
    if args.p is not None and args.p != p:
        raise UsageError(f"--p {args.p} does not match sigma of size {p}")
    mu = np.zeros(p) if args.mu is None else parse_vector(args.mu)
    s = args.s if args.s is not None else default_s
    if s is None:
        raise UsageError("--s is required")
    return GalParams(sigma, mu, s)


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _csv(rows, header: list[str] | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


# -- subcommands ---------------------------------------------------------------


def cmd_sample(args, cfg: RunConfig) -> int:
    rng = RngStream(cfg.seed, cfg.stream)
    if args.sampler == "mixture":
        samples = sample_mixture(rng, _gal_from_args(args), cfg.n)
    else:
        if args.sigma is None:
            raise UsageError("--sigma is required")
        sigma = parse_matrix(args.sigma, args.p)
        if args.p is not None and args.p != sigma.shape[0]:
            raise UsageError(f"--p {args.p} does not match sigma of size {sigma.shape[0]}")
        mu = np.zeros(sigma.shape[0]) if args.mu is None else parse_vector(args.mu)
        if args.d is None:
            raise UsageError("--d is required for product samplers")
        mp = MatrixProductParams(sigma, mu, args.d, args.alpha)
        fn = sample_matrix_product if args.sampler == "matrix-product" else sample_isotropic_product
        samples = fn(rng, mp, cfg.n)
    _emit(format_samples(samples, cfg.fmt, cfg.header), cfg.output)
    return 0


def format_samples(samples: SampleMatrix, kind: str = "csv", header: bool = False) -> str:
    if kind == "json":
        doc = {"meta": samples.meta(), "rows": [[fmt(v) for v in row] for row in samples.data]}
        return json.dumps(doc) + "\n"
    names = [f"x{i + 1}" for i in range(samples.p)] if header else None
    return _csv(samples.data, names)


def _points(values: list[str] | None, p: int, flag: str) -> np.ndarray:
    if not values:
        raise UsageError(f"at least one {flag} point is required")
    pts = [parse_vector(v) for v in values]
    for v in pts:
        if v.shape[0] != p:
            raise UsageError(f"{flag} point {v.tolist()} has length {v.shape[0]}, expected {p}")
    return np.array(pts)


def cmd_pdf(args, cfg: RunConfig) -> int:
    params = _gal_from_args(args)
    pts = _points(args.x, params.p, "--x")
    lp = np.atleast_1d(logpdf(params, pts))
    dens = np.exp(lp)
    if cfg.fmt == "json":
        doc = {"points": [{"x": [fmt(v) for v in x], "logpdf": fmt(a), "pdf": fmt(b)} for x, a, b in zip(pts, lp, dens)]}
        _emit(json.dumps(doc) + "\n", cfg.output)
    else:
        _emit(_csv(zip(lp, dens), ["logpdf", "pdf"] if cfg.header else None), cfg.output)
    return 0


def cmd_cf(args, cfg: RunConfig) -> int:
    params = _gal_from_args(args)
    pts = _points(args.u, params.p, "--u")
    vals = np.atleast_1d(cf(params, pts))
    if cfg.fmt == "json":
        doc = {"points": [{"u": [fmt(v) for v in u], "re": fmt(z.real), "im": fmt(z.imag)} for u, z in zip(pts, vals)]}
        _emit(json.dumps(doc) + "\n", cfg.output)
    else:
        _emit(_csv(((z.real, z.imag) for z in vals), ["re", "im"] if cfg.header else None), cfg.output)
    return 0


def cmd_moments(args, cfg: RunConfig) -> int:
    m = moments(_gal_from_args(args))
    if cfg.fmt == "json":
        doc = {"mean": [fmt(v) for v in m.mean], "covariance": [[fmt(v) for v in row] for row in m.covariance]}
        _emit(json.dumps(doc) + "\n", cfg.output)
    else:
        text = "mean," + ",".join(fmt(v) for v in m.mean) + "\n"
        text += "covariance," + ",".join(fmt(v) for v in m.covariance.ravel()) + "\n"
        _emit(text, cfg.output)
    return 0


def _suite_sigma_mu(args, p: int):
    sigma = verify.default_sigma(p) if args.sigma is None else parse_matrix(args.sigma, p)
    if sigma.shape[0] != p:
        raise UsageError(f"sigma has size {sigma.shape[0]}, expected p={p}")
    mu = verify.default_mu(p) if args.mu is None else parse_vector(args.mu)
    return sigma, mu


def cmd_verify(args, cfg: RunConfig) -> int:
    suite = args.suite
    perms = args.permutations
    if perms < 1:
        raise UsageError("--permutations must be >= 1")
    if suite == "theorem-main":
        p = args.p or 2
        sigma, mu = _suite_sigma_mu(args, p)
        mp = MatrixProductParams(sigma, mu, 5 if args.d is None else args.d, args.alpha)
        rep = verify.theorem_main(mp, cfg.n or 5000, cfg.seed, perms)
    elif suite == "corollary-pca":
        p = args.p or 2
        sigma, mu = _suite_sigma_mu(args, p)
        mp = MatrixProductParams(sigma, np.zeros(p), 4 if args.d is None else args.d, args.alpha)
        rep = verify.corollary_pca(mp, cfg.n or 5000, cfg.seed, perms)
    elif suite == "convolution":
        p = args.p or 2
        sigma, mu = _suite_sigma_mu(args, p)
        rep = verify.convolution(sigma, mu, args.s1, args.s2, cfg.n or 5000, cfg.seed, perms)
    elif suite == "laplace-reduction":
        rep = verify.laplace_reduction(cfg.n or 100_000, cfg.seed)
    elif suite == "ks-laplace":
        rep = verify.ks_laplace(read_samples(args.input or "-"), args.b)
    else:
        params = _gal_from_args(args, default_s=1.0) if args.sigma is not None else GalParams(
            verify.default_sigma(args.p or 2), verify.default_mu(args.p or 2), 1.0 if args.s is None else args.s)
        samples = read_samples(args.input) if args.input else None
        rep = verify.moments_suite(params, samples, cfg.n or 100_000, cfg.seed)
    _emit(json.dumps(rep.to_json(), indent=2) + "\n", cfg.output)
    return 0 if rep.passed else 1


# -- parser --------------------------------------------------------------------


def _add_params(sp, *, product=False):
    sp.add_argument("--sigma", help="matrix: I2, I3, a scalar, or row-major 'a,b;c,d'")
    sp.add_argument("--mu", help="vector 'a,b,...' (default zeros)")
    sp.add_argument("--s", type=float, help="shape s > 0")
    sp.add_argument("--p", type=int, help="dimension (checked against sigma)")
    if product:
        sp.add_argument("--d", type=int, help="number of columns of W")
        sp.add_argument("--alpha", type=float, default=1.0, help="variance of the entries of y (default 1)")


def _add_common(sp, n_default=None):
    sp.add_argument("--n", type=int, default=n_default)
    sp.add_argument("--seed", type=int, help=f"default ${SEED_ENV} or {DEFAULT_SEED}")
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", "-o")
    sp.add_argument("--header", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galkit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("sample", help="draw GAL variates")
    sp.add_argument("--sampler", choices=("mixture", "matrix-product", "isotropic"), default="mixture")
    _add_params(sp, product=True)
    _add_common(sp, n_default=1)

    for name, point, what in (("pdf", "--x", "log-density and density"), ("cf", "--u", "characteristic function")):
        sp = sub.add_parser(name, help=what)
        _add_params(sp)
        sp.add_argument(point, action="append", help="point 'a,b,...'; repeat for several")
        _add_common(sp)

    sp = sub.add_parser("moments", help="mean and covariance")
    _add_params(sp)
    _add_common(sp)

    sp = sub.add_parser("verify", help="run a Monte Carlo verification suite")
    sp.add_argument("suite", choices=SUITES)
    _add_params(sp, product=True)
    sp.add_argument("--s1", type=float, default=1.0)
    sp.add_argument("--s2", type=float, default=1.5)
    sp.add_argument("--b", type=float, default=1.0, help="Laplace scale for ks-laplace")
    sp.add_argument("--permutations", type=int, default=verify.DEFAULT_PERMUTATIONS)
    sp.add_argument("--input", "-i", help="sample file from 'galkit sample' ('-' for stdin)")
    _add_common(sp)
    return parser


COMMANDS = {"sample": cmd_sample, "pdf": cmd_pdf, "cf": cmd_cf, "moments": cmd_moments, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        n = args.n
        if n is not None and n < 1:
            raise UsageError(f"--n must be >= 1, got {n}")
        cfg = RunConfig(args.subcommand, n, _seed(args.seed), args.stream, args.format, args.output, args.header)
        return COMMANDS[args.subcommand](args, cfg)
    except GalError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
