"""Truncated full Fock space and the universal weighted shifts of a symbol.

The truncation at level ``N`` keeps the words of length ``<= N``; shift
matrices are compressions ``P_N W_j P_N`` so their level-``N`` columns are
zero.  Weights are exact rationals, matrix entries are doubles.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ArityError, NotHermitianError, ResourceLimitError
from .symbol import EMPTY, FreePoly, Symbol, format_word, fraction_to_json, word_product

log = logging.getLogger(__name__)

DEFAULT_CAP = 200_000
DEFAULT_TOL = 1e-9


def fock_dimension(n: int, N: int) -> int:
    return N + 1 if n == 1 else (n ** (N + 1) - 1) // (n - 1)


@dataclass(frozen=True)
class FockIndex:
    """All words of length ``<= N`` over ``n`` letters, in graded-lex order."""

    n: int
    N: int
    words: tuple
    index: Mapping

    @property
    def dim(self) -> int:
        return len(self.words)

    def level_start(self, k: int) -> int:
        return fock_dimension(self.n, k - 1) if k > 0 else 0

    def levels(self) -> np.ndarray:
        return np.fromiter((len(w) for w in self.words), dtype=int, count=self.dim)

    def __getitem__(self, word) -> int:
        return self.index[tuple(word)]


def enumerate_words(n: int, N: int, cap: int = DEFAULT_CAP) -> FockIndex:
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
    dim = fock_dimension(n, N)
    if dim > cap:
        raise ResourceLimitError(f"Fock space with n={n}, N={N} has dimension {dim} > cap {cap}")
    letters = range(1, n + 1)
    words = tuple(w for k in range(N + 1) for w in itertools.product(letters, repeat=k))
    return FockIndex(n, N, words, MappingProxyType({w: i for i, w in enumerate(words)}))


@dataclass(frozen=True)
class WeightTable:
    symbol: Symbol
    fock: FockIndex
    weights: Mapping

    def __getitem__(self, word) -> Fraction:
        return self.weights[tuple(word)]

    def to_json(self) -> dict:
        return {
            "weights": [
                {"word": list(w), **fraction_to_json(self.weights[w])} for w in self.fock.words
            ]
        }


def compute_weights(f: Symbol, N: int, cap: int = DEFAULT_CAP) -> WeightTable:
    """Exact weights ``b_w`` for every word of length ``<= N``.

    Uses ``b_w = sum a_p * b_(w minus prefix p)`` over the prefixes ``p`` of
    ``w`` that lie in the support of ``f``, with ``b_() = 1``.
    """
    fock = enumerate_words(f.n, N, cap)
    coeffs = f.coeffs
    by_length = {}
    for word, a in f.terms:
        by_length.setdefault(len(word), []).append((word, a))
    lengths = sorted(by_length)
    b = {EMPTY: Fraction(1)}
    for word in fock.words[1:]:
        total = Fraction(0)
        for k in lengths:
            if k > len(word):
                break
            a = coeffs.get(word[:k])
            if a is not None:
                total += a * b[word[k:]]
        b[word] = total
    return WeightTable(f, fock, MappingProxyType(b))


def brute_force_weight(f: Symbol, word, max_length: int = 20) -> Fraction:
    """Sum of ``a_g1 * ... * a_gk`` over every ordered factorization ``g1...gk = word``.

    Exponential in ``len(word)``; kept as an independent check of
    :func:`compute_weights`.
    """
    word = tuple(word)
    m = len(word)
    if m > max_length:
        raise ResourceLimitError(f"brute force over words longer than {max_length} is refused")
    if m == 0:
        return Fraction(1)
    coeffs = f.coeffs
    total = Fraction(0)
    for r in range(m):
        for cuts in itertools.combinations(range(1, m), r):
            bounds = (0, *cuts, m)
            factors = []
            for lo, hi in zip(bounds, bounds[1:]):
                a = coeffs.get(word[lo:hi])
                if a is None:
                    break
                factors.append(a)
            else:
                total += math.prod(factors)
    return total


@dataclass(frozen=True)
class ShiftFamily:
    fock: FockIndex
    weights: WeightTable
    shifts: tuple

    @property
    def n(self) -> int:
        return self.fock.n

    @property
    def dim(self) -> int:
        return self.fock.dim

    def as_tuple(self) -> "OperatorTuple":
        return OperatorTuple(self.shifts)

    def to_json(self) -> dict:
        out = []
        for j, W in enumerate(self.shifts, start=1):
            coo = W.tocoo()
            order = np.lexsort((coo.row, coo.col))
            entries = [
                [int(coo.row[k]), int(coo.col[k]), float(coo.data[k].real), float(coo.data[k].imag)]
                for k in order
            ]
            out.append({"j": j, "entries": entries})
        return {
            "n": self.n,
            "N": self.fock.N,
            "dim": self.dim,
            "order": "graded-lex",
            "shifts": out,
        }


def build_shifts(f: Symbol, N: int, cap: int = DEFAULT_CAP) -> ShiftFamily:
    """Truncated universal weighted shifts ``W_1 .. W_n`` of ``f``.

    ``W_j e_w = sqrt(b_w / b_(j w)) e_(j w)`` for ``len(w) < N``; columns of
    level ``N`` are zero.
    """
    table = compute_weights(f, N, cap)
    fock = table.fock
    b = table.weights
    cols = np.arange(fock.level_start(N), dtype=np.int64)
    shifts = []
    for j in range(1, f.n + 1):
        rows = np.fromiter((fock.index[(j, *fock.words[c])] for c in cols), dtype=np.int64, count=cols.size)
        data = np.fromiter(
            (math.sqrt(b[fock.words[c]] / b[fock.words[r]]) for r, c in zip(rows, cols)),
            dtype=float,
            count=cols.size,
        )
        W = sp.csc_matrix((data.astype(complex), (rows, cols)), shape=(fock.dim, fock.dim))
        shifts.append(W)
    return ShiftFamily(fock, table, tuple(shifts))


class OperatorTuple:
    """``n`` square matrices of a common size (dense arrays or scipy sparse)."""

    def __init__(self, mats: Sequence):
        mats = tuple(m if sp.issparse(m) else np.atleast_2d(np.asarray(m, dtype=complex)) for m in mats)
        if not mats:
            raise ArityError("an operator tuple needs at least one matrix")
        d = mats[0].shape[0]
        for m in mats:
            if m.shape != (d, d):
                raise ArityError(f"matrices must all be {d}x{d}, got {m.shape}")
        self.mats = mats
        self.dim = d

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def sparse(self) -> bool:
        return any(sp.issparse(m) for m in self.mats)

    def identity(self):
        return sp.identity(self.dim, dtype=complex, format="csc") if self.sparse else np.eye(self.dim, dtype=complex)

    def scaled(self, scales) -> "OperatorTuple":
        return OperatorTuple([c * m for c, m in zip(scales, self.mats)])

    def __len__(self):
        return self.n

    def __getitem__(self, j):
        return self.mats[j]

    @classmethod
    def scalars(cls, point) -> "OperatorTuple":
        """The point ``(l_1, .., l_n)`` as a tuple of 1x1 matrices."""
        return cls([[[complex(z)]] for z in point])

    def to_json(self) -> dict:
        mats = [m.toarray() if sp.issparse(m) else m for m in self.mats]
        return {
            "n": self.n,
            "dim": self.dim,
            "matrices": [[[[float(z.real), float(z.imag)] for z in row] for row in m] for m in mats],
        }

    @classmethod
    def from_json(cls, data) -> "OperatorTuple":
        def entry(z):
            if isinstance(z, (list, tuple)):
                re_, im = z
                return complex(re_, im)
            return complex(z)

        mats = [[[entry(z) for z in row] for row in m] for m in data["matrices"]]
        T = cls(mats)
        if "n" in data and data["n"] != T.n:
            raise ArityError(f"header says n={data['n']} but {T.n} matrices were given")
        return T


def _as_tuple(T) -> OperatorTuple:
    if isinstance(T, OperatorTuple):
        return T
    if isinstance(T, ShiftFamily):
        return T.as_tuple()
    return OperatorTuple(T)


def _word_products(T: OperatorTuple, words):
    """``T_w`` for each word, sharing prefix products."""
    cache = {EMPTY: T.identity()}

    def prod(word):
        if word not in cache:
            cache[word] = prod(word[:-1]) @ T.mats[word[-1] - 1]
        return cache[word]

    return {w: prod(w) for w in words}


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def eval_poly(p: FreePoly, T) -> np.ndarray:
    """``sum p_w T_w`` with ``T_() = I``, returned as a dense matrix."""
    T = _as_tuple(T)
    if p.n != T.n:
        raise ArityError(f"polynomial has arity {p.n}, tuple has {T.n} operators")
    products = _word_products(T, p.coeffs)
    out = np.zeros((T.dim, T.dim), dtype=complex)
    for w, c in p.coeffs.items():
        out += c * _dense(products[w])
    return out


def row_sum(f: Symbol, T) -> np.ndarray:
    """``sum a_w T_w T_w^*`` over the support of ``f``, symmetrized."""
    T = _as_tuple(T)
    if f.n != T.n:
        raise ArityError(f"symbol has arity {f.n}, tuple has {T.n} operators")
    products = _word_products(T, f.support)
    S = None
    for w, a in f.terms:
        P = products[w]
        term = float(a) * (P @ P.conj().T)
        S = term if S is None else S + term
    S = _dense(S)
    return (S + S.conj().T) / 2


def defect(f: Symbol, T) -> np.ndarray:
    """``I - sum a_w T_w T_w^*``, Hermitian (symmetrized before return)."""
    S = row_sum(f, T)
    D = np.eye(S.shape[0], dtype=complex) - S
    return (D + D.conj().T) / 2


def min_eig_hermitian(M, tol: float = 1e-12, max_sweeps: int = 100, hermitian_tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a Hermitian matrix by cyclic complex Jacobi.

    Sweeps until the Frobenius norm of the off-diagonal part is at most
    ``tol``.  Rotations skip entries below ``tol / d``; if the off-diagonal
    norm exceeds ``tol`` at least one entry is above that threshold, so every
    sweep makes progress.
    """
    A = np.array(_dense(M), dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {A.shape}")
    d = A.shape[0]
    if d == 0:
        raise NotHermitianError("empty matrix has no eigenvalues")
    asym = np.max(np.abs(A - A.conj().T))
    if asym > hermitian_tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |M - M^*| = {asym:.3e})")
    A = (A + A.conj().T) / 2
    skip = tol / d

    def off_norm():
        return math.sqrt(max(float(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2)), 0.0))

    for sweep in range(max_sweeps):
        if off_norm() <= tol:
            break
        rows, cols = np.nonzero(np.abs(np.triu(A, 1)) > skip)
        for p, q in zip(rows.tolist(), cols.tolist()):
            apq = A[p, q]
            r = abs(apq)
            if r <= skip:
                continue
            phase = apq / r
            app = A[p, p].real
            aqq = A[q, q].real
            theta = (aqq - app) / (2 * r)
            t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
            c = 1 / math.hypot(t, 1.0)
            s = t * c
            # columns: A <- A U, then rows: A <- U^* A, U = diag(1, conj(phase)) R
            colp = A[:, p].copy()
            colq = A[:, q] * phase.conjugate()
            A[:, p] = c * colp - s * colq
            A[:, q] = s * colp + c * colq
            rowp = A[p, :].copy()
            rowq = A[q, :] * phase
            A[p, :] = c * rowp - s * rowq
            A[q, :] = s * rowp + c * rowq
            A[p, q] = A[q, p] = 0
            A[p, p] = app - t * r
            A[q, q] = aqq + t * r
    else:
        if off_norm() > tol:
            log.warning("Jacobi did not reach off-diagonal norm %g in %d sweeps", tol, max_sweeps)
    return float(np.min(np.diag(A).real))


@dataclass(frozen=True)
class MembershipReport:
    min_eig: float
    tolerance: float
    member: bool
    dim: int

    def to_json(self) -> dict:
        return {"min_eig": self.min_eig, "tolerance": self.tolerance, "member": self.member, "dim": self.dim}


def is_member(f: Symbol, T, tol: float = DEFAULT_TOL) -> MembershipReport:
    """Whether ``T`` lies in the domain of ``f``: ``min_eig(defect) >= -tol``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    D = defect(f, T)
    lo = min_eig_hermitian(D)
    return MembershipReport(lo, tol, lo >= -tol, D.shape[0])


def gauge_rotate(T, mu) -> OperatorTuple:
    """``(conj(mu) T_1, ..., conj(mu) T_n)``."""
    T = _as_tuple(T)
    return T.scaled([complex(mu).conjugate()] * T.n)


def coherent_vector(f: Symbol, point, N: int, cap: int = DEFAULT_CAP, table: WeightTable | None = None) -> np.ndarray:
    """Vector with coordinate ``conj(l)^w * sqrt(b_w)`` at ``e_w``.

    It is a joint eigenvector of the adjoint shifts (up to the truncation
    boundary) and implements evaluation at the scalar point ``l``.
    """
    point = np.asarray(point, dtype=complex).ravel()
    if point.size != f.n:
        raise ArityError(f"point has {point.size} coordinates, symbol has arity {f.n}")
    if table is None:
        table = compute_weights(f, N, cap)
    fock = table.fock
    if fock.N < N:
        raise ValueError("weight table is shorter than the requested level")
    lam_bar = point.conj()
    return np.array(
        [word_product(lam_bar, w) * math.sqrt(table.weights[w]) for w in fock.words if len(w) <= N],
        dtype=complex,
    )


def char_eval_check(f: Symbol, point, p: FreePoly, N: int, cap: int = DEFAULT_CAP):
    """Compare ``<p(W) e_(), z_l>`` with ``p(l)``; returns ``(lhs, rhs, |lhs - rhs|)``."""
    if N < p.degree:
        raise ValueError(f"truncation level {N} is below the polynomial degree {p.degree}")
    if p.n != f.n:
        raise ArityError(f"polynomial has arity {p.n}, symbol has arity {f.n}")
    family = build_shifts(f, N, cap)
    z = coherent_vector(f, point, N, table=family.weights)
    products = _word_products(family.as_tuple(), p.coeffs)
    v = np.zeros(family.dim, dtype=complex)
    for w, c in p.coeffs.items():
        v += c * _dense(products[w][:, [0]]).ravel()
    lhs = complex(np.vdot(z, v))
    rhs = complex(p(np.asarray(point, dtype=complex)))
    return lhs, rhs, abs(lhs - rhs)


def scale_into_domain(f: Symbol, T, margin: float = 0.0, iters: int = 100) -> OperatorTuple:
    """Shrink ``T`` by the largest ``t <= 1`` keeping ``min_eig(defect) >= margin``."""
    T = _as_tuple(T)

    def ok(t):
        return np.min(np.linalg.eigvalsh(defect(f, T.scaled([t] * T.n)))) >= margin

    if ok(1.0):
        return T
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return T.scaled([lo] * T.n)


def contractivity_margin(f: Symbol, T, p: FreePoly, N: int, cap: int = DEFAULT_CAP) -> float:
    """``||p(W^(N))|| - ||p(T)||`` in spectral norm; negative values flag truncation effects."""
    family = build_shifts(f, N, cap)
    upper = np.linalg.norm(eval_poly(p, family), 2)
    return float(upper - np.linalg.norm(eval_poly(p, T), 2))


def describe_weights(table: WeightTable):
    """``(word text, b_w)`` rows for printing."""
    return [(format_word(w), table.weights[w]) for w in table.fock.words]
