"""Random symbols, witnesses, polynomials and points for property checks."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .geometry import boundary_radius
from .symbol import FreePoly, Symbol, Witness


def random_rational(rng, max_num=9, max_den=6) -> Fraction:
    return Fraction(int(rng.integers(1, max_num + 1)), int(rng.integers(1, max_den + 1)))


def random_symbol(rng, n=None, degree=None, max_n=3, max_degree=3, density=0.3) -> Symbol:
    """Symbol with all linear terms and a random sparse set of longer words.

    At least one word of length ``degree`` is always present.
    """
    rng = np.random.default_rng(rng)
    n = int(rng.integers(1, max_n + 1)) if n is None else n
    degree = int(rng.integers(1, max_degree + 1)) if degree is None else degree
    coeffs = {(j,): random_rational(rng) for j in range(1, n + 1)}
    for k in range(2, degree + 1):
        words = list(itertools.product(range(1, n + 1), repeat=k))
        picked = [w for w in words if rng.random() < density]
        if k == degree and not picked:
            picked = [words[int(rng.integers(len(words)))]]
        for w in picked:
            coeffs[w] = random_rational(rng)
    return Symbol(n, coeffs)


def random_witness(rng, n) -> Witness:
    rng = np.random.default_rng(rng)
    sigma = tuple(int(s) + 1 for s in rng.permutation(n))
    return Witness(sigma, tuple(random_rational(rng) for _ in range(n)))


def random_freepoly(rng, n, degree=3, terms=4) -> FreePoly:
    rng = np.random.default_rng(rng)
    coeffs = {}
    for _ in range(terms):
        k = int(rng.integers(0, degree + 1))
        w = tuple(int(i) + 1 for i in rng.integers(0, n, size=k))
        coeffs[w] = complex(rng.normal(), rng.normal())
    return FreePoly(n, coeffs)


def random_interior_point(rng, f: Symbol, shrink=(0.1, 0.95)) -> np.ndarray:
    """Point ``t r u`` with ``r`` the boundary radius along a random direction ``u``."""
    rng = np.random.default_rng(rng)
    u = rng.normal(size=f.n) + 1j * rng.normal(size=f.n)
    u /= np.linalg.norm(u)
    return rng.uniform(*shrink) * boundary_radius(f, u) * u


def random_ball_point(rng, n, max_norm) -> np.ndarray:
    rng = np.random.default_rng(rng)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z) * max_norm * rng.uniform() ** (1 / (2 * n))
