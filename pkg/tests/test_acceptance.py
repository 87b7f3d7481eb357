"""Exit criteria, one test each, at fixed tolerances and time budgets."""

import itertools
import math
import time
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from ncdomain import sampling
from ncdomain.classify import classify, operator_witness_check, verify_witness
from ncdomain.fock import (
    brute_force_weight,
    build_shifts,
    char_eval_check,
    compute_weights,
    defect,
    gauge_rotate,
    is_member,
    min_eig_hermitian,
)
from ncdomain.geometry import BallPoint, circle_image, inner, moebius, random_unitary
from ncdomain.symbol import Symbol, parse_symbol, substitute


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_c1_weight_oracle(acceptance_report):
    rng = np.random.default_rng(1001)
    symbols = [sampling.random_symbol(rng, max_n=3, max_degree=3) for _ in range(100)]

    def run():
        mismatches, count = [], 0
        for f in symbols:
            table = compute_weights(f, 6)
            for w in table.fock.words:
                count += 1
                if table[w] != brute_force_weight(f, w):
                    mismatches.append((f, w))
        return mismatches, count

    (mismatches, count), elapsed = timed(run)
    ok = not mismatches and elapsed < 10
    acceptance_report("C1 weight oracle", ok, f"{count} words over 100 symbols, {len(mismatches)} mismatches, {elapsed:.2f} s (< 10 s)")
    assert not mismatches
    assert elapsed < 10


def test_c2_fibonacci(acceptance_report):
    f = parse_symbol("X1 + X1X1")
    expected = [1, 1, 2, 3, 5, 8, 13, 21, 34]
    elapsed = math.inf
    for _ in range(5):
        table, t = timed(lambda: compute_weights(f, 8))
        elapsed = min(elapsed, t)
    got = [table[(1,) * k] for k in range(9)]
    ok = got == expected and elapsed < 1e-3
    acceptance_report("C2 Fibonacci weights", ok, f"b_0..b_8 = {[int(x) for x in got]}, {elapsed * 1e3:.3f} ms (< 1 ms)")
    assert got == expected
    assert elapsed < 1e-3


def test_c3_defect_diagonal(acceptance_report):
    rng = np.random.default_rng(1003)
    symbols = [sampling.random_symbol(rng, max_n=3, max_degree=3) for _ in range(50)]

    def run():
        worst_entry, worst_eig, all_member = 0.0, math.inf, True
        for f in symbols:
            fam = build_shifts(f, f.degree + 3)
            D = defect(f, fam)
            target = np.zeros(fam.dim)
            target[0] = 1
            worst_entry = max(worst_entry, float(np.max(np.abs(D - np.diag(target)))))
            lo = min_eig_hermitian(D)
            worst_eig = min(worst_eig, lo)
            all_member &= is_member(f, fam, 1e-9).member
        return worst_entry, worst_eig, all_member

    (worst_entry, worst_eig, all_member), elapsed = timed(run)
    ok = worst_entry <= 1e-12 and worst_eig >= -1e-12 and all_member and elapsed < 30
    acceptance_report(
        "C3 defect-diagonal identity",
        ok,
        f"max |D - diag(1,0,..)| = {worst_entry:.2e} (<= 1e-12), min_eig >= {worst_eig:.2e}, "
        f"members: {all_member}, {elapsed:.2f} s (< 30 s)",
    )
    assert worst_entry <= 1e-12
    assert worst_eig >= -1e-12
    assert all_member
    assert elapsed < 30


def test_c4_character_identity(acceptance_report):
    rng = np.random.default_rng(1004)
    cases = []
    for _ in range(50):
        f = sampling.random_symbol(rng, max_n=3, max_degree=3)
        lam = sampling.random_interior_point(rng, f)
        p = sampling.random_freepoly(rng, f.n, degree=3)
        cases.append((f, lam, p))

    def run():
        return max(char_eval_check(f, lam, p, p.degree)[2] for f, lam, p in cases)

    worst, elapsed = timed(run)
    ok = worst <= 1e-12 and elapsed < 5
    acceptance_report("C4 character identity", ok, f"max |<p(W)e, z> - p(l)| = {worst:.2e} (<= 1e-12), {elapsed:.2f} s (< 5 s)")
    assert worst <= 1e-12
    assert elapsed < 5


@pytest.fixture(scope="module")
def roundtrip_cases():
    rng = np.random.default_rng(1005)
    cases = []
    for _ in range(200):
        g = sampling.random_symbol(rng, max_n=4, max_degree=3)
        w = sampling.random_witness(rng, g.n)
        cases.append((substitute(g, w), g))
    return cases


@pytest.fixture(scope="module")
def roundtrip_results(roundtrip_cases):
    results, elapsed = timed(lambda: [(classify(f, g), classify(g, f)) for f, g in roundtrip_cases])
    return results, elapsed


def test_c5_classifier_roundtrip(acceptance_report, roundtrip_cases, roundtrip_results):
    results, elapsed = roundtrip_results
    failures = 0
    for (f, g), (fwd, back) in zip(roundtrip_cases, results):
        good = (
            fwd.equivalent
            and substitute(g, fwd.witness) == f
            and back.equivalent
            and substitute(f, back.witness) == g
        )
        failures += not good
    ok = failures == 0 and elapsed < 10
    acceptance_report("C5 classifier round-trip", ok, f"200 pairs, {failures} failures, {elapsed:.2f} s (< 10 s)")
    assert failures == 0
    assert elapsed < 10


def invariant_signature(f: Symbol):
    """Multiset of (letter pattern, a_w / prod of linear coefficients along w).

    Both parts are unchanged by scale-permutation substitution, so different
    signatures prove two symbols inequivalent.
    """
    sig = Counter()
    for word, a in f.terms:
        first = {}
        pattern = tuple(first.setdefault(i, len(first)) for i in word)
        norm = a
        for i in word:
            norm /= f.coeff((i,))
        sig[(pattern, norm)] += 1
    return sig


def make_negative(rng, g):
    """Scale-permutation image of ``g`` with one coefficient or support word changed."""
    f = substitute(g, sampling.random_witness(rng, g.n))
    coeffs = dict(f.coeffs)
    long_words = [w for w in coeffs if len(w) > 1]
    free_words = [
        w for k in (2, 3) for w in itertools.product(range(1, g.n + 1), repeat=k) if w not in coeffs
    ]
    modes = (["scale", "drop"] if long_words else []) + (["add"] if free_words else [])
    mode = modes[int(rng.integers(len(modes)))]
    if mode == "scale":
        w = long_words[int(rng.integers(len(long_words)))]
        coeffs[w] *= (F(2), F(3), F(1, 2), F(3, 2))[int(rng.integers(4))]
    elif mode == "drop":
        del coeffs[long_words[int(rng.integers(len(long_words)))]]
    else:
        coeffs[free_words[int(rng.integers(len(free_words)))]] = sampling.random_rational(rng)
    return Symbol(g.n, coeffs)


def test_c6_classifier_negatives(acceptance_report):
    rng = np.random.default_rng(1006)
    pairs = []
    while len(pairs) < 100:
        g = sampling.random_symbol(rng, max_n=4, max_degree=3)
        f = make_negative(rng, g)
        assert invariant_signature(f) != invariant_signature(g)
        pairs.append((f, g))
    pairs.append((parse_symbol("X1+X2+X1X1"), parse_symbol("X1+X2+X1X2")))

    results, elapsed = timed(lambda: [classify(f, g) for f, g in pairs])
    wrong = sum(r.equivalent for r in results)
    ok = wrong == 0 and elapsed < 10
    acceptance_report("C6 classifier negatives", ok, f"{len(pairs)} pairs (incl. X1+X2+X1X1 vs X1+X2+X1X2), {wrong} wrongly equivalent, {elapsed:.2f} s (< 10 s)")
    assert wrong == 0
    assert elapsed < 10


def test_c7_operator_bridge(acceptance_report, roundtrip_cases, roundtrip_results):
    results, _ = roundtrip_results

    def run():
        worst, checked = math.inf, 0
        for (f, g), (fwd, _) in zip(roundtrip_cases, results):
            if not fwd.equivalent:
                continue
            assert verify_witness(f, g, fwd.witness)
            r = operator_witness_check(f, g, fwd.witness, f.degree + 2, 1e-9)
            worst = min(worst, r.min_eig if r.member else -math.inf)
            checked += 1
        return worst, checked

    (worst, checked), elapsed = timed(run)
    ok = checked == 200 and worst >= -1e-9 and elapsed < 60
    acceptance_report("C7 operator bridge", ok, f"{checked} witnesses, min_eig >= {worst:.2e} (>= -1e-9), {elapsed:.2f} s (< 60 s)")
    assert checked == 200
    assert worst >= -1e-9
    assert elapsed < 60


def test_c8_moebius_suite(acceptance_report):
    rng = np.random.default_rng(1008)

    def run():
        err = {"involution": 0.0, "sphere": 0.0, "norm identity": 0.0, "plane": 0.0}
        inside = True
        for _ in range(200):
            n = int(rng.integers(1, 5))
            w = sampling.random_ball_point(rng, n, 0.9)
            z = sampling.random_ball_point(rng, n, 0.99)
            phi = moebius(w, z)
            err["involution"] = max(err["involution"], float(np.linalg.norm(moebius(w, phi).z - z)))
            inside &= phi.norm2 < 1
            zs = z / np.linalg.norm(z)
            err["sphere"] = max(err["sphere"], abs(math.sqrt(moebius(w, zs).norm2) - 1))
            ww, zz = BallPoint.of(w).norm2, BallPoint.of(z).norm2
            rhs = (1 - ww) * (1 - zz) / abs(1 - inner(z, w)) ** 2
            err["norm identity"] = max(err["norm identity"], abs((1 - phi.norm2) - rhs) / rhs)
            if ww > 0:
                c = complex(rng.normal(), rng.normal())
                zl = c * w * min(1.0, 0.95 / (abs(c) * math.sqrt(ww)))
                img = moebius(w, zl).z
                off = img - inner(img, w) / ww * w
                err["plane"] = max(err["plane"], float(np.linalg.norm(off)))
        residual, origin = 0.0, 0.0
        for _ in range(20):
            n = int(rng.integers(1, 5))
            w = sampling.random_ball_point(rng, n, 0.9)
            while BallPoint.of(w).norm2 < 1e-4:
                w = sampling.random_ball_point(rng, n, 0.9)
            fit = circle_image(w, random_unitary(n, rng), 64)
            residual = max(residual, fit.residual)
            origin = max(origin, fit.distance(np.zeros(n)))
        return err, inside, residual, origin

    (err, inside, residual, origin), elapsed = timed(run)
    ok = (
        err["involution"] <= 1e-10
        and inside
        and err["sphere"] <= 1e-12
        and err["norm identity"] <= 1e-12
        and err["plane"] <= 1e-12
        and residual <= 1e-9
        and origin <= 1e-9
        and elapsed < 5
    )
    detail = ", ".join(f"{k} {v:.1e}" for k, v in err.items())
    acceptance_report(
        "C8 Moebius suite",
        ok,
        f"{detail}, ball preserved: {inside}, circle residual {residual:.1e}, origin distance {origin:.1e}, {elapsed:.2f} s (< 5 s)",
    )
    assert err["involution"] <= 1e-10
    assert inside
    assert err["sphere"] <= 1e-12
    assert err["norm identity"] <= 1e-12
    assert err["plane"] <= 1e-12
    assert residual <= 1e-9
    assert origin <= 1e-9
    assert elapsed < 5


def test_c9_gauge_rotation(acceptance_report):
    rng = np.random.default_rng(1009)
    symbols = [sampling.random_symbol(rng, max_n=3, max_degree=3) for _ in range(20)]
    mus = np.exp(1j * rng.uniform(0, 2 * np.pi, size=10))

    def run():
        worst = 0.0
        for f in symbols:
            fam = build_shifts(f, f.degree + 2)
            base = is_member(f, fam).min_eig
            for mu in mus:
                worst = max(worst, abs(is_member(f, gauge_rotate(fam, mu)).min_eig - base))
        return worst

    worst, elapsed = timed(run)
    ok = worst <= 1e-12 and elapsed < 20
    acceptance_report("C9 gauge rotation", ok, f"max |min_eig difference| = {worst:.2e} (<= 1e-12), {elapsed:.2f} s (< 20 s)")
    assert worst <= 1e-12
    assert elapsed < 20
