"""Exact scale-permutation equivalence of symbols.

``f`` and ``g`` are equivalent when ``f = g(l_1 X_s(1), ..., l_n X_s(n))``
for a permutation ``s`` and scales ``l``.  Degree-one coefficients are
strictly positive, so matching them forces ``l_j = a^f_s(j) / a^g_j > 0``:
only the permutation has to be searched.  Two domain algebras are completely
isometrically isomorphic exactly when their symbols have the same arity and
are equivalent in this sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ArityError, InvalidWitnessError
from .fock import DEFAULT_CAP, DEFAULT_TOL, MembershipReport, build_shifts, is_member
from .symbol import Symbol, Witness, fraction_from_json, fraction_to_json, gradlex_key, substitute, word_product


@dataclass(frozen=True)
class ArityMismatch:
    n: int
    m: int

    def to_json(self):
        return {"kind": "arity_mismatch", "n": self.n, "m": self.m}


@dataclass(frozen=True)
class NoPermutation:
    """Refutation of the last permutation that survived support pruning.

    ``sigma`` is None when pruning rejected every partial assignment; the
    word then comes from the last rejected one.

    ``expected`` is the coefficient predicted for ``word`` by substituting
    into ``g``; ``found`` is the coefficient of ``word`` in ``f``.
    """

    sigma: Optional[tuple]
    word: tuple
    expected: Fraction
    found: Fraction

    def to_json(self):
        return {
            "kind": "no_permutation",
            "sigma": None if self.sigma is None else list(self.sigma),
            "word": list(self.word),
            "expected": fraction_to_json(self.expected),
            "found": fraction_to_json(self.found),
        }


Certificate = Union[ArityMismatch, NoPermutation]


@dataclass(frozen=True)
class ClassificationResult:
    witness: Optional[Witness] = None
    certificate: Optional[Certificate] = None

    @property
    def equivalent(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        if self.equivalent:
            return {"verdict": "equivalent", "witness": self.witness.to_json()}
        return {"verdict": "inequivalent", "certificate": self.certificate.to_json()}

    @classmethod
    def from_json(cls, data) -> "ClassificationResult":
        if data["verdict"] == "equivalent":
            return cls(witness=Witness.from_json(data["witness"]))
        cert = data["certificate"]
        if cert["kind"] == "arity_mismatch":
            return cls(certificate=ArityMismatch(cert["n"], cert["m"]))
        sigma = cert["sigma"]
        return cls(
            certificate=NoPermutation(
                None if sigma is None else tuple(sigma),
                tuple(cert["word"]),
                fraction_from_json(cert["expected"]),
                fraction_from_json(cert["found"]),
            )
        )


def solve_scales(f: Symbol, g: Symbol, sigma) -> tuple:
    """The scales forced by ``sigma``: ``l_j = a^f_sigma(j) / a^g_j``."""
    if f.n != g.n or len(sigma) != f.n:
        raise ArityError("symbols and permutation must have the same size")
    return tuple(f.coeff((s,)) / g.coeff((j,)) for j, s in enumerate(sigma, start=1))


def verify_witness(f: Symbol, g: Symbol, w: Witness) -> bool:
    """Whether ``substitute(g, w) == f`` exactly."""
    if f.n != g.n or w.n != f.n:
        raise ArityError(f"arities differ: f has {f.n}, g has {g.n}, witness has {w.n}")
    return substitute(g, w) == f


def _first_mismatch(f: Symbol, g: Symbol, sigma, lam, assigned):
    """First word (graded-lex in ``f``'s letters) where the partial relabeling disagrees.

    Only words whose letters all lie in the assigned part are compared; with
    ``lam=None`` only supports are compared.
    """
    image_letters = {sigma[i - 1] for i in assigned}
    predicted = {}
    for word, a in g.terms:
        if all(i in assigned for i in word):
            image = tuple(sigma[i - 1] for i in word)
            predicted[image] = None if lam is None else a * word_product(lam, word)
    observed = {w: a for w, a in f.terms if all(i in image_letters for i in w)}
    for word in sorted(predicted.keys() | observed.keys(), key=gradlex_key):
        exp = predicted.get(word, Fraction(0))
        found = observed.get(word, Fraction(0))
        if lam is None:
            if (word in predicted) != (word in observed):
                return word, exp, found
        elif exp != found:
            return word, exp, found
    return None


def classify(f: Symbol, g: Symbol, prune: bool = True) -> ClassificationResult:
    """Decide equivalence; returns the lexicographically least witness if any.

    Permutations are built letter by letter in increasing order.  With
    ``prune`` set, a partial assignment is abandoned once some word of ``g``
    using only assigned letters maps outside the support of ``f`` or some
    word of ``f`` over the assigned images has no preimage in ``g``.
    """
    n = f.n
    if n != g.n:
        return ClassificationResult(certificate=ArityMismatch(n, g.n))
    sigma = [0] * n
    used = [False] * n
    last = None
    last_pruned = None

    def partial_lam(k):
        lam = [Fraction(1)] * n
        for j in range(1, k + 1):
            lam[j - 1] = f.coeff((sigma[j - 1],)) / g.coeff((j,))
        return lam

    def search(k):
        nonlocal last, last_pruned
        if k == n:
            lam = solve_scales(f, g, sigma)
            w = Witness(tuple(sigma), lam)
            if verify_witness(f, g, w):
                return w
            word, exp, found = _first_mismatch(f, g, sigma, lam, set(range(1, n + 1)))
            last = NoPermutation(tuple(sigma), word, exp, found)
            return None
        for s in range(1, n + 1):
            if used[s - 1]:
                continue
            sigma[k] = s
            used[s - 1] = True
            if prune:
                bad = _first_mismatch(f, g, sigma, None, set(range(1, k + 2)))
                if bad is not None:
                    word = bad[0]
                    lam = partial_lam(k + 1)
                    exp = _predicted(g, sigma, lam, word)
                    last_pruned = NoPermutation(None, word, exp, f.coeff(word))
                    used[s - 1] = False
                    continue
            w = search(k + 1)
            used[s - 1] = False
            if w is not None:
                return w
        sigma[k] = 0
        return None

    witness = search(0)
    if witness is not None:
        return ClassificationResult(witness=witness)
    return ClassificationResult(certificate=last or last_pruned)


def _predicted(g: Symbol, sigma, lam, word):
    """Coefficient of ``word`` in the substitution of ``g`` (0 when it has no preimage)."""
    inv = {s: i for i, s in enumerate(sigma, start=1) if s}
    if not all(x in inv for x in word):
        return Fraction(0)
    pre = tuple(inv[x] for x in word)
    return g.coeff(pre) * word_product(lam, pre)


def witness_operators(g_family, w: Witness):
    """Tuple ``T`` with ``T_s(i) = W^g_i / sqrt(l_i)`` realizing ``W^f_j -> T_j``."""
    mats = [None] * w.n
    for i, (s, lam) in enumerate(zip(w.sigma, w.lam)):
        mats[s - 1] = g_family.shifts[i] / math.sqrt(lam)
    return mats


def operator_witness_check(
    f: Symbol, g: Symbol, w: Witness, N: int, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> MembershipReport:
    """Membership of the witness-transported universal shifts of ``g`` in the domain of ``f``."""
    if f.n != g.n or w.n != f.n:
        raise ArityError(f"arities differ: f has {f.n}, g has {g.n}, witness has {w.n}")
    if not verify_witness(f, g, w):
        raise InvalidWitnessError("the witness does not carry g to f")
    if N < f.degree:
        raise ValueError(f"truncation level {N} is below the degree {f.degree}")
    family = build_shifts(g, N, cap)
    return is_member(f, witness_operators(family, w), tol)
