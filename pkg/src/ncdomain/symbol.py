"""Free polynomial symbols with exact rational coefficients.

Words over the letters ``1..n`` are plain tuples of ints; the empty tuple is
the empty word.  Supports are always kept in graded-lex order (length first,
then lexicographic on letters).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .errors import (
    ArityError,
    EmptyWordCoefficientError,
    LetterRangeError,
    MissingLinearTermError,
    NegativeCoefficientError,
    SymbolSyntaxError,
    ValidationError,
)

Word = tuple

EMPTY: Word = ()


def gradlex_key(word):
    return (len(word), tuple(word))


def concat(a, b):
    return tuple(a) + tuple(b)


def format_word(word):
    if not word:
        return "1"
    return "".join(f"X{i}" for i in word)


def word_product(values, word):
    """Product of ``values[i-1]`` along ``word`` (1 for the empty word)."""
    return math.prod((values[i - 1] for i in word), start=1)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"cannot read {value!r} as a rational number") from exc


def _as_word(key):
    if isinstance(key, str):
        return parse_word(key)
    return tuple(int(i) for i in key)


class Symbol:
    """A positive regular free polynomial ``f = sum a_w X_w``.

    Only strictly positive coefficients are stored.  Instances are
    immutable and hashable; construct them through :func:`validate` or
    :func:`parse_symbol`.
    """

    __slots__ = ("_n", "_terms", "_coeffs", "_hash")

    def __init__(self, n: int, coeffs: Mapping):
        n = int(n)
        if n < 1:
            raise ValidationError(f"arity must be positive, got {n}")
        clean = {}
        for key, value in coeffs.items():
            word = _as_word(key)
            a = as_fraction(value)
            for letter in word:
                if not 1 <= letter <= n:
                    raise LetterRangeError(
                        f"letter {letter} in word {format_word(word)} is outside 1..{n}", word
                    )
            if not word:
                if a != 0:
                    raise EmptyWordCoefficientError(
                        f"the empty word has coefficient {a}; it must be 0", word
                    )
                continue
            if a < 0:
                raise NegativeCoefficientError(
                    f"coefficient {a} of {format_word(word)} is negative", word
                )
            if a > 0:
                clean[word] = clean.get(word, Fraction(0)) + a
        for j in range(1, n + 1):
            if clean.get((j,), 0) <= 0:
                raise MissingLinearTermError(
                    f"degree-1 coefficient of X{j} must be strictly positive", (j,)
                )
        terms = tuple(sorted(clean.items(), key=lambda kv: gradlex_key(kv[0])))
        self._n = n
        self._terms = terms
        self._coeffs = MappingProxyType(dict(terms))
        self._hash = hash((n, terms))

    @property
    def n(self) -> int:
        return self._n

    @property
    def coeffs(self) -> Mapping[Word, Fraction]:
        return self._coeffs

    @property
    def terms(self):
        """``(word, coefficient)`` pairs in graded-lex order."""
        return self._terms

    @property
    def support(self):
        return tuple(w for w, _ in self._terms)

    @property
    def degree(self) -> int:
        return len(self._terms[-1][0])

    def coeff(self, word) -> Fraction:
        return self._coeffs.get(tuple(word), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Symbol(n={self._n}, {format_symbol(self)!r})"

    def __str__(self):
        return format_symbol(self)


def validate(n: int, coeffs: Mapping) -> Symbol:
    """Check the symbol conditions and return the :class:`Symbol`.

    Raises a distinct :class:`ValidationError` subclass per violated
    condition, carrying the offending word.
    """
    return Symbol(n, coeffs)


@dataclass(frozen=True)
class FreePoly:
    """Polynomial in ``n`` noncommuting variables with complex coefficients."""

    n: int
    coeffs: Mapping

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.coeffs).items():
            word = _as_word(key)
            if any(not 1 <= i <= self.n for i in word):
                raise ArityError(f"word {format_word(word)} uses a letter outside 1..{self.n}")
            clean[word] = clean.get(word, 0) + complex(value)
        object.__setattr__(
            self, "coeffs", MappingProxyType(dict(sorted(clean.items(), key=lambda kv: gradlex_key(kv[0]))))
        )

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    @classmethod
    def from_symbol(cls, f: Symbol) -> "FreePoly":
        return cls(f.n, {w: float(a) for w, a in f.terms})

    def __call__(self, point):
        """Evaluate at a scalar point by commutative substitution."""
        if len(point) != self.n:
            raise ArityError(f"point has {len(point)} coordinates, polynomial has arity {self.n}")
        return sum((c * word_product(point, w) for w, c in self.coeffs.items()), 0j)

    def __hash__(self):
        return hash((self.n, tuple(self.coeffs.items())))


@dataclass(frozen=True)
class Witness:
    """Permutation ``sigma`` (images of 1..n) and positive scales ``lam``.

    Applied to ``g`` it produces ``g(lam_1 X_sigma(1), ..., lam_n X_sigma(n))``.
    """

    sigma: tuple
    lam: tuple

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        lam = tuple(as_fraction(x) for x in self.lam)
        if sorted(sigma) != list(range(1, len(sigma) + 1)):
            raise ValidationError(f"sigma {sigma} is not a permutation of 1..{len(sigma)}")
        if len(lam) != len(sigma):
            raise ArityError(f"sigma has {len(sigma)} entries but lambda has {len(lam)}")
        if any(x <= 0 for x in lam):
            raise ValidationError(f"scales must be strictly positive, got {lam}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, n: int) -> "Witness":
        return cls(tuple(range(1, n + 1)), (Fraction(1),) * n)

    def inverse(self) -> "Witness":
        inv = [0] * self.n
        for i, s in enumerate(self.sigma, start=1):
            inv[s - 1] = i
        return Witness(tuple(inv), tuple(1 / self.lam[inv[j] - 1] for j in range(self.n)))

    def after(self, inner: "Witness") -> "Witness":
        """Witness of ``substitute(substitute(h, inner), self)``."""
        if inner.n != self.n:
            raise ArityError("cannot compose witnesses of different sizes")
        sigma = tuple(self.sigma[inner.sigma[i] - 1] for i in range(self.n))
        lam = tuple(inner.lam[i] * self.lam[inner.sigma[i] - 1] for i in range(self.n))
        return Witness(sigma, lam)

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "lambda": [fraction_to_json(x) for x in self.lam],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Witness":
        return cls(tuple(data["sigma"]), tuple(fraction_from_json(x) for x in data["lambda"]))


def fraction_to_json(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def fraction_from_json(data: Mapping) -> Fraction:
    return Fraction(int(data["num"]), int(data["den"]))


def substitute(g: Symbol, w: Witness) -> Symbol:
    """Return ``g(lam_1 X_sigma(1), ..., lam_n X_sigma(n))`` exactly."""
    if w.n != g.n:
        raise ArityError(f"witness has size {w.n}, symbol has arity {g.n}")
    out = {}
    for word, a in g.terms:
        image = tuple(w.sigma[i - 1] for i in word)
        out[image] = a * word_product(w.lam, word)
    return Symbol(g.n, out)


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<vars>vars\b)
  | (?P<number>\d+\.\d*|\.\d+|\d+)
  | (?P<X>X)
  | (?P<op>[=;+*/])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            tokens.append((m.group() if kind == "op" else kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def kind(self):
        return self.tokens[self.i][0]

    def error(self, message):
        raise SymbolSyntaxError(message, self.text, self.tokens[self.i][2])

    def take(self, kind, what=None):
        if self.kind != kind:
            found = self.tokens[self.i][1] or "end of input"
            self.error(f"expected {what or kind!r}, found {found!r}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def integer(self, what):
        _, value, _ = self.take("number", what)
        if not value.isdigit():
            self.i -= 1
            self.error(f"expected an integer {what}, found {value!r}")
        return int(value)

    def symbol(self):
        n = None
        if self.kind == "vars":
            self.take("vars")
            self.take("=", "'='")
            pos = self.tokens[self.i][2]
            n = self.integer("variable count")
            if n < 1:
                raise SymbolSyntaxError("variable count must be positive", self.text, pos)
            self.take(";", "';'")
        terms = [self.term()]
        while self.kind == "+":
            self.take("+")
            terms.append(self.term())
        if self.kind != "end":
            self.error(f"unexpected {self.tokens[self.i][1]!r}")
        return n, terms

    def term(self):
        coeff = Fraction(1)
        if self.kind == "number":
            coeff = self.coefficient()
            if self.kind == "*":
                self.take("*")
        return coeff, self.word()

    def coefficient(self):
        _, value, _ = self.take("number")
        if self.kind == "/":
            if not value.isdigit():
                self.i -= 1
                self.error("a fraction needs an integer numerator")
            self.take("/")
            pos = self.tokens[self.i][2]
            den = self.integer("denominator")
            if den == 0:
                raise SymbolSyntaxError("zero denominator", self.text, pos)
            return Fraction(int(value), den)
        return Fraction(value)

    def word(self):
        letters = []
        while self.kind == "X" or not letters:
            self.take("X", "'X'")
            pos = self.tokens[self.i][2]
            letter = self.integer("variable index")
            if letter < 1:
                raise SymbolSyntaxError("variable indices start at 1", self.text, pos)
            letters.append(letter)
        return tuple(letters)


def parse_word(text: str) -> Word:
    """Parse ``'X1X2X1'`` into ``(1, 2, 1)``; ``''`` or ``'1'`` is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return EMPTY
    p = _Parser(text)
    word = p.word()
    if p.kind != "end":
        p.error("trailing input after word")
    return word


def parse_symbol(text: str) -> Symbol:
    """Parse and validate symbol text such as ``"vars=2; X1 + 1/2*X1X2 + X2"``.

    Duplicate monomials are summed; decimals convert exactly (``0.25 -> 1/4``).
    Without a ``vars=`` header the arity is the largest letter used.
    """
    n, terms = _Parser(text).symbol()
    coeffs = {}
    for coeff, word in terms:
        coeffs[word] = coeffs.get(word, Fraction(0)) + coeff
    if n is None:
        n = max(max(word) for word in coeffs)
    return Symbol(n, coeffs)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_symbol(f: Symbol) -> str:
    parts = []
    for word, a in f.terms:
        if a == 1:
            parts.append(format_word(word))
        else:
            parts.append(f"{format_fraction(a)}*{format_word(word)}")
    return " + ".join(parts)

