"""How often does the battery reject plausible-but-wrong targets?

Compares matrix-product draws with mixture draws from the correct law and
from nearby wrong laws (shape off by one half, drift halved, sigma not
doubled), over several seeds.
"""

import argparse

import numpy as np

from galkit.core import GalParams, MatrixProductParams
from galkit.rng import RngStream
from galkit.sample import sample_matrix_product, sample_mixture
from galkit.verify import default_mu, default_sigma, energy_distance_test


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--permutations", type=int, default=200)
    args = ap.parse_args()

    mp = MatrixProductParams(default_sigma(args.p), default_mu(args.p), args.d)
    right = mp.target()
    candidates = {
        "correct": right,
        "shape + 1/2": GalParams(right.sigma, right.mu, right.s + 0.5),
        "drift / 2": GalParams(right.sigma, right.mu / 2, right.s),
        "sigma not doubled": GalParams(mp.sigma, right.mu, right.s),
    }
    for name, params in candidates.items():
        rejected = 0
        for seed in range(args.seeds):
            a = sample_matrix_product(RngStream(seed, 0), mp, args.n)
            b = sample_mixture(RngStream(seed, 1), params, args.n)
            rejected += not energy_distance_test(a, b, RngStream(seed, 2), args.permutations).passed
        print(f"{name:>18}: rejected {rejected}/{args.seeds}")


if __name__ == "__main__":
    main()
