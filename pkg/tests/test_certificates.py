import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.algebra import A, K, cyclic
from growthlab.certificates import (A0, A1, A2, C, COUNT_MATRICES, NoPositiveRootError,
                                    NotInSubsemigroupError, ParityError, alpha0,
                                    build_certificate, certificate_syllables, char_poly,
                                    dominant_root, eta, eta_bracket, format_poly,
                                    largest_real_root, lower_exponent_estimate, mat_mul,
                                    mat_pow, mat_vec, matrix_product, max_column_sum, norm1,
                                    period_lower_exponent, poly_eval, primitive_block,
                                    spectral, sturm_sequence, syllable_counts, syllables,
                                    word_matrix, zeta, zeta_syllables)
from growthlab.omega import OmegaSequence, parse_sequence
from growthlab.treeauto import activity_count

from . import oracles

SEQ012 = OmegaSequence.periodic([0, 1, 2])
SEQ001122 = OmegaSequence.periodic([0, 0, 1, 1, 2, 2])
b, c, d = 1, 2, 3


def test_eta_and_alpha0():
    e = eta()
    assert abs(e ** 3 + e ** 2 + e - 2) < 1e-12
    assert e == pytest.approx(oracles.eta_numeric(), abs=1e-12)
    assert e == pytest.approx(0.810536, abs=1e-6)
    assert alpha0() == pytest.approx(math.log(2) / (math.log(2) - math.log(e)), abs=1e-15)
    assert alpha0() == pytest.approx(0.76743, abs=1e-5)
    lo, hi = eta_bracket()
    assert lo <= e <= hi and hi - lo < 1e-12
    assert poly_eval((1, 1, 1, -2), lo) < 0 < poly_eval((1, 1, 1, -2), hi)


def test_matrices():
    assert A0 == ((2, 0, 1), (0, 2, 1), (0, 0, 1))
    Cinv = mat_pow(C, 2)
    assert mat_mul(C, Cinv) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert A1 == mat_mul(mat_mul(C, A0), Cinv)
    assert A2 == mat_mul(mat_mul(C, A1), Cinv)


def test_charpolys():
    assert char_poly(mat_mul(A0, C)) == (1, -1, -2, -4)
    assert format_poly((1, -1, -2, -4)) == "X^3 - X^2 - 2X - 4"
    M = mat_mul(mat_mul(A0, A0), C)
    assert char_poly(M) == (1, -3, -12, -16)
    for N in (A0, A1, A2, M, mat_mul(A1, A2), mat_pow(mat_mul(A0, C), 3)):
        assert [float(x) for x in char_poly(N)] == pytest.approx(
            list(oracles.charpoly_numeric(N)), abs=1e-8)


def test_dominant_roots():
    rep = spectral(mat_mul(A0, C))
    assert rep.root * eta() == pytest.approx(2, abs=1e-9)
    assert rep.dominant
    lo, hi = rep.bracket
    assert hi - lo <= 1e-12
    assert poly_eval(rep.charpoly, Fraction(lo)) * poly_eval(rep.charpoly, Fraction(hi)) <= 0
    rep2 = dominant_root((1, -3, -12, -16))
    assert rep2.root == pytest.approx(5.63, abs=0.01)
    assert rep2.root == pytest.approx(oracles.spectral_radius_numeric(
        mat_mul(mat_mul(A0, A0), C)), abs=1e-9)
    with pytest.raises(NoPositiveRootError):
        largest_real_root((1, 0, 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=6).filter(lambda p: p[0] != 0))
def test_sturm_enclosure(coeffs):
    import numpy as np

    real = [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-9 and r.real > 0]
    try:
        lo, hi = largest_real_root(coeffs, tol=1e-10)
    except NoPositiveRootError:
        assert not real
        return
    root = float((lo + hi) / 2)
    assert hi - lo <= 1e-10 * max(1, abs(hi)) + 1e-10
    p_lo, p_hi = poly_eval(coeffs, Fraction(lo)), poly_eval(coeffs, Fraction(hi))
    assert p_lo == 0 or p_hi == 0 or (p_lo < 0) != (p_hi < 0) or _double_root(coeffs, root)
    if real:
        assert root == pytest.approx(max(real), abs=1e-5)


def _double_root(coeffs, x):
    n = len(coeffs) - 1
    deriv = [a * (n - i) for i, a in enumerate(coeffs[:-1])]
    return abs(sum(a * x ** (n - 1 - i) for i, a in enumerate(deriv))) < 1e-3


def test_sturm_sequence_counts():
    # (X−1)(X−2)(X−3): three roots in (0, 4]
    seq = sturm_sequence((1, -6, 11, -6))
    assert len(seq) == 4


def test_zeta_examples():
    assert zeta((A, K(0, b)), 0) == (A, K(0, b), A, K(0, b))
    assert zeta((A, K(0, d)), 0) == (A, K(0, b), A, K(0, d), A, K(0, c))
    assert syllable_counts(zeta_syllables((d,), 0, check_parity=False)) == mat_vec(A0, (0, 0, 1))
    with pytest.raises(NotInSubsemigroupError):
        zeta((K(0, b), A), 0)
    with pytest.raises(NotInSubsemigroupError):
        syllables((A, K(0, 0)))
    with pytest.raises(ParityError):
        zeta_syllables((d,), 0)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from([b, c, d]), max_size=40), st.integers(0, 2))
def test_count_transform(vs, letter):
    out = zeta_syllables(tuple(vs), letter, check_parity=False)
    assert syllable_counts(out) == mat_vec(COUNT_MATRICES[letter], syllable_counts(tuple(vs)))
    word = zeta(tuple(A if i % 2 == 0 else K(0, v) for v in vs for i in (0, 1)), letter)
    assert oracles.letter_counts(word) == syllable_counts(out)


@pytest.mark.parametrize("seq", [SEQ012, SEQ001122, parse_sequence("alpha:0.85")], ids=str)
def test_certificates_exact(seq):
    F = cyclic(2)
    prev = None
    for k in range(0, 11):
        rep = build_certificate(seq, k, F)
        assert rep.s >= 2 ** k
        assert rep.counts == rep.matrix_counts
        assert oracles.letter_counts(rep.word) == rep.counts
        if k <= 6:  # the oracle is quadratic in the word length
            assert rep.s == oracles.orbit_size(rep.word, seq.index)
        assert rep.length == 2 * sum(rep.counts)
        assert rep.ratio >= k * math.log(2) / math.log(rep.length) - 1e-12
        if prev is not None:
            assert rep.s >= 2 * prev
        prev = rep.s
    assert build_certificate(seq, 0, F).word in {(A, K(0, v)) for v in (1, 2, 3)}


def test_parity_per_level():
    for seq in (SEQ012, SEQ001122):
        vs, trace = certificate_syllables(seq, 9)
        assert len(trace) == 10


def test_ratios_approach_alpha0_from_below():
    est = lower_exponent_estimate(SEQ012, 12)
    vals = [r for _, r in est]
    # the period is 3: ratios climb along k = 3, 6, 9, 12
    per_period = vals[2::3]
    assert all(x < y for x, y in zip(per_period, per_period[1:]))
    assert all(v < alpha0() for v in vals)
    assert vals[-1] > 0.73


def test_ratios_001122():
    vals = [r for _, r in lower_exponent_estimate(SEQ001122, 12)]
    assert all(v < period_lower_exponent([0, 0, 1, 1, 2, 2]) for v in vals)
    assert vals[-1] > 0.78


def test_primitive_blocks():
    B, m, unit = primitive_block([0, 1, 2])
    assert B == mat_mul(A0, C) and m == 3
    B, m, unit = primitive_block([0, 0, 1, 1, 2, 2])
    assert B == mat_mul(mat_mul(A0, A0), C)
    assert period_lower_exponent([0, 0, 1, 1, 2, 2]) == pytest.approx(0.8019, abs=1e-3)
    assert period_lower_exponent([0, 1, 2]) == pytest.approx(alpha0(), abs=1e-9)


def test_norm_submultiplicative():
    for k in range(1, 15):
        for j in range(1, 8):
            P = matrix_product(SEQ012, k)
            Q = word_matrix(SEQ001122.prefix(j - 1))
            assert norm1(mat_mul(P, Q)) <= norm1(P) * norm1(Q)
            assert max_column_sum(mat_mul(P, Q)) <= max_column_sum(P) * max_column_sum(Q)


def test_matrix_product_is_k_factors():
    assert matrix_product(SEQ012, 0) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert matrix_product(SEQ012, 3) == mat_mul(mat_mul(A0, A1), A2)
