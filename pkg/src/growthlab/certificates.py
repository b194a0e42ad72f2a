"""Lower-bound certificates: the substitution ζ, certificate words, the count
matrices A_0, A_1, A_2 and C, characteristic polynomials and certified roots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .algebra import A, K, FiniteGroup, cyclic

Matrix3 = tuple  # three rows of three ints

A0 = ((2, 0, 1), (0, 2, 1), (0, 0, 1))
A1 = ((2, 1, 0), (0, 1, 0), (0, 1, 2))
A2 = ((1, 0, 0), (1, 2, 0), (1, 0, 2))
C = ((0, 1, 0), (0, 0, 1), (1, 0, 0))
I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
COUNT_MATRICES = (A0, A1, A2)

_EPS_BITS = 44  # 2^-44 < 1e-13


# -- constants ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def eta_bracket(bits: int = _EPS_BITS) -> tuple:
    """Exact dyadic bracket [lo, hi] of width 2^-bits around the root of X³+X²+X−2."""
    scale = 1 << bits

    def sign(m):
        # 2^(3 bits) · p(m / 2^bits)
        return m * m * m + m * m * scale + m * scale * scale - 2 * scale ** 3

    lo, hi = 0, scale  # p(0) < 0 < p(1)
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if sign(mid) < 0:
            lo = mid
        else:
            hi = mid
    return Fraction(lo, scale), Fraction(hi, scale)


def eta() -> float:
    lo, hi = eta_bracket()
    return float((lo + hi) / 2)


def alpha0() -> float:
    """log 2 / (log 2 − log η), the exponent of (012)^∞."""
    return math.log(2) / (math.log(2) - math.log(eta()))


# -- matrices ---------------------------------------------------------------------------

def mat_mul(M, N) -> Matrix3:
    return tuple(tuple(sum(M[i][t] * N[t][j] for t in range(3)) for j in range(3)) for i in range(3))


def mat_vec(M, v) -> tuple:
    return tuple(sum(M[i][j] * v[j] for j in range(3)) for i in range(3))


def mat_pow(M, n: int) -> Matrix3:
    out = I3
    while n:
        if n & 1:
            out = mat_mul(out, M)
        M = mat_mul(M, M)
        n >>= 1
    return out


def norm1(M) -> int:
    """Entrywise 1-norm (the default norm)."""
    return sum(abs(x) for row in M for x in row)


def max_column_sum(M) -> int:
    return max(sum(abs(M[i][j]) for i in range(3)) for j in range(3))


def count_matrix(letter: int) -> Matrix3:
    return COUNT_MATRICES[letter]


def matrix_product(seq, k: int) -> Matrix3:
    """A_{ω_0} A_{ω_1} ⋯ A_{ω_{k-1}}: the count transform of the k-fold pull-back."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = I3
    for i in range(k):
        out = mat_mul(out, COUNT_MATRICES[seq.index(i)])
    return out


def word_matrix(letters: Sequence[int]) -> Matrix3:
    out = I3
    for x in letters:
        out = mat_mul(out, COUNT_MATRICES[x])
    return out


def primitive_block(period: Sequence[int]):
    """Reduce A_{w_1}⋯A_{w_p} to a conjugate power B^m with B a product of A_0 and C.

    A_j = C^j A_0 C^{-j}, so the period product is conjugate to
    A_0 C^{d_1} ⋯ A_0 C^{d_p} with d_i = w_{i+1} − w_i (cyclically).  B is the
    shortest cyclic unit.  Returns (B, m, unit shifts).
    """
    p = len(period)
    if p == 0 or any(x not in (0, 1, 2) for x in period):
        raise ValueError("period must be a non-empty word over {0,1,2}")
    shifts = [(period[(i + 1) % p] - period[i]) % 3 for i in range(p)]
    for q in range(1, p + 1):
        if p % q == 0 and shifts == shifts[:q] * (p // q):
            unit = shifts[:q]
            break
    B = I3
    for d in unit:
        B = mat_mul(mat_mul(B, A0), mat_pow(C, d))
    return B, p // len(unit), tuple(unit)


def char_poly(M) -> tuple:
    """Coefficients (1, c2, c1, c0) of det(X − M), highest degree first."""
    tr = M[0][0] + M[1][1] + M[2][2]
    minors = (M[0][0] * M[1][1] - M[0][1] * M[1][0]
              + M[0][0] * M[2][2] - M[0][2] * M[2][0]
              + M[1][1] * M[2][2] - M[1][2] * M[2][1])
    det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
           - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
           + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    return (1, -tr, minors, -det)


def format_poly(coeffs) -> str:
    n = len(coeffs) - 1
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        e = n - i
        mono = "" if e == 0 else ("X" if e == 1 else f"X^{e}")
        mag = abs(c)
        body = mono if (mag == 1 and mono) else (f"{mag}{mono}" if mono else str(mag))
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


# -- certified real roots ------------------------------------------------------------------

def poly_eval(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return list(p[i:])


def _poly_rem(p, q):
    p = [Fraction(x) for x in p]
    while len(p) >= len(q) and any(p):
        factor = p[0] / q[0]
        for i in range(len(q)):
            p[i] -= factor * q[i]
        p.pop(0)
    return _trim(p) if p else [Fraction(0)]


def sturm_sequence(coeffs) -> list:
    p0 = [Fraction(c) for c in _trim(coeffs)]
    n = len(p0) - 1
    p1 = [c * (n - i) for i, c in enumerate(p0[:-1])]
    seq = [p0, p1]
    while len(seq[-1]) > 1:
        r = _poly_rem(seq[-2], seq[-1])
        if r == [0]:
            break
        seq.append([-x for x in r])
    return seq


def _sign_changes(seq, x) -> int:
    signs = [s for s in (poly_eval(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _root_bound(coeffs) -> Fraction:
    lead = Fraction(coeffs[0])
    return 1 + max((abs(Fraction(c) / lead) for c in coeffs[1:]), default=Fraction(0))


@dataclass(frozen=True)
class SpectralReport:
    matrix: tuple
    charpoly: tuple
    root: float
    bracket: tuple  # exact Fractions (lo, hi) with a sign change of charpoly
    dominant: bool  # root is the eigenvalue of largest modulus

    def to_json(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix] if self.matrix else None,
            "charpoly": list(self.charpoly),
            "charpoly_text": format_poly(self.charpoly),
            "root": self.root,
            "bracket": [float(self.bracket[0]), float(self.bracket[1])],
            "bracket_exact": [str(self.bracket[0]), str(self.bracket[1])],
            "dominant": self.dominant,
        }


class NoPositiveRootError(ValueError):
    pass


def largest_real_root(coeffs, tol: float = 1e-12) -> tuple:
    """Exact dyadic bracket (lo, hi), hi − lo ≤ tol, around the largest real root.

    Sturm counts isolate the root; bisection then keeps a strict sign change
    with exact rational evaluation.
    """
    coeffs = _trim(coeffs)
    if len(coeffs) < 2:
        raise NoPositiveRootError("constant polynomial has no roots")
    seq = sturm_sequence(coeffs)
    hi = _root_bound(coeffs)
    lo = -hi

    def count(a, b):
        # distinct real roots in (a, b]
        return _sign_changes(seq, a) - _sign_changes(seq, b)

    if count(lo, hi) == 0:
        raise NoPositiveRootError("polynomial has no real root")
    # shrink from below until (lo, hi] holds only the largest root
    while count(lo, hi) > 1:
        mid = (lo + hi) / 2
        if count(mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    if poly_eval(coeffs, hi) == 0:
        return hi, hi
    tol = Fraction(tol)
    s_hi = poly_eval(coeffs, hi) > 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = poly_eval(coeffs, mid)
        if v == 0:
            return mid, mid
        if (v > 0) == s_hi:
            hi = mid
        else:
            lo = mid
    return lo, hi


def dominant_root(coeffs, matrix=None, tol: float = 1e-12) -> SpectralReport:
    lo, hi = largest_real_root(coeffs, tol)
    if hi <= 0:
        raise NoPositiveRootError("largest real root is not positive")
    root = float((lo + hi) / 2)
    dominant = _is_modulus_dominant(coeffs, root)
    return SpectralReport(matrix, tuple(coeffs), root, (lo, hi), dominant)


def _is_modulus_dominant(coeffs, root) -> bool:
    # numerically: the other roots are the roots of p(X)/(X − root)
    q = [float(coeffs[0])]
    for c in coeffs[1:-1]:
        q.append(float(c) + q[-1] * root)
    if len(q) == 1:
        return True
    if len(q) == 2:
        return abs(-q[1] / q[0]) <= root * (1 + 1e-12)
    a, b, c = q
    disc = b * b - 4 * a * c
    if disc < 0:
        return math.sqrt(c / a) <= root * (1 + 1e-12)
    r = [(-b + s * math.sqrt(disc)) / (2 * a) for s in (1, -1)]
    return max(abs(x) for x in r) <= root * (1 + 1e-12)


def spectral(M, tol: float = 1e-12) -> SpectralReport:
    return dominant_root(char_poly(M), M, tol)


def period_growth_rate(period: Sequence[int]) -> float:
    """Per-letter growth rate ρ(A_{w_1}⋯A_{w_p})^{1/p}."""
    B, m, _ = primitive_block(period)
    return spectral(B).root ** (m / len(period))


def period_lower_exponent(period: Sequence[int]) -> float:
    """log 2 / log(per-letter rate): the lower exponent certified by w_k on w^∞."""
    return math.log(2) / math.log(period_growth_rate(period))


# -- the substitution ζ -----------------------------------------------------------------------

B_, C_, D_ = 1, 2, 3
# ZETA[ω_0][v] = the syllables (Klein letters following an a) of ζ(a v)
ZETA = (
    {B_: (B_, B_), C_: (C_, C_), D_: (B_, D_, C_)},
    {B_: (B_, B_), C_: (D_, C_, B_), D_: (D_, D_)},
    {B_: (C_, B_, D_), C_: (C_, C_), D_: (D_, D_)},
)
# the letter that must occur an even number of times in the input of ζ_{ω_0}
PARITY_LETTER = (D_, C_, B_)
# the seed u_0 whose image under ζ_{ω} is a doubled syllable
SEED_LETTER = (B_, D_, D_)


class NotInSubsemigroupError(ValueError):
    pass


class ParityError(ValueError):
    pass


def syllables(w: Sequence) -> tuple:
    """a v_1 a v_2 ⋯ a v_n -> (v_1, …, v_n); rejects anything else."""
    if len(w) % 2:
        raise NotInSubsemigroupError("word is not a product of syllables a·v")
    out = []
    for i in range(0, len(w), 2):
        x, y = w[i], w[i + 1]
        if x != A or y == A or y[1] == 0:
            raise NotInSubsemigroupError(f"syllable {i // 2} is not one of ab, ac, ad")
        out.append(y[1])
    return tuple(out)


def from_syllables(vs: Sequence[int], f: int = 0) -> tuple:
    out = []
    for v in vs:
        out.append(A)
        out.append(K(f, v))
    return tuple(out)


def syllable_counts(vs: Sequence[int]) -> tuple:
    return (vs.count(B_), vs.count(C_), vs.count(D_))


def zeta_syllables(vs: Sequence[int], letter: int, check_parity: bool = True) -> tuple:
    if check_parity and vs.count(PARITY_LETTER[letter]) % 2:
        raise ParityError(f"odd number of the designated letter for ω_0={letter}")
    table = ZETA[letter]
    out = []
    for v in vs:
        out.extend(table[v])
    return tuple(out)


def zeta(w: Sequence, letter: int) -> tuple:
    """ζ: {ab, ac, ad}* over σω -> {ab, ac, ad}* over ω, for ω_0 = ``letter``."""
    vs = syllables(w)
    return from_syllables(zeta_syllables(vs, letter, check_parity=False))


@dataclass(frozen=True)
class CertificateReport:
    k: int
    word: tuple
    s: int
    counts: tuple
    matrix_counts: tuple
    seed_counts: tuple
    length: int
    ratio: float  # log s / log |w_k|
    matrix_norm: int

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "length": self.length,
            "activity": self.s,
            "counts": list(self.counts),
            "matrix_counts": list(self.matrix_counts),
            "seed_counts": list(self.seed_counts),
            "ratio": self.ratio,
            "matrix_norm": self.matrix_norm,
            "length_over_norm": self.length / self.matrix_norm,
        }


def certificate_syllables(seq, k: int, check: bool = True):
    """The syllables of w_k and the per-level count trace (level k down to 0)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    seed = SEED_LETTER[seq.index(k - 1)] if k else B_
    vs = (seed,)
    trace = [syllable_counts(vs)]
    for j in range(k - 1, -1, -1):
        letter = seq.index(j)
        before = trace[-1]
        vs = zeta_syllables(vs, letter, check_parity=check)
        after = syllable_counts(vs)
        if check and after != mat_vec(COUNT_MATRICES[letter], before):
            raise AssertionError(f"count transform broken at level {j}")
        trace.append(after)
    return vs, trace


def build_certificate(seq, k: int, F: FiniteGroup = None) -> CertificateReport:
    from .treeauto import activity_count  # local: treeauto does not depend on us

    F = F or cyclic(2)
    vs, trace = certificate_syllables(seq, k)
    word = from_syllables(vs)
    s = activity_count(word, seq, F)
    M = matrix_product(seq, k)
    seed_counts = trace[0]
    length = len(word)
    ratio = math.log(s) / math.log(length) if s > 0 else float("-inf")
    return CertificateReport(k, word, s, trace[-1], mat_vec(M, seed_counts), seed_counts,
                             length, ratio, norm1(M))


def lower_exponent_estimate(seq, kmax: int, F: FiniteGroup = None) -> list:
    """[(k, log s(w_k) / log |w_k|)] for k = 1..kmax (k = 0 has |w_0| = 2, s = 1)."""
    return [(k, build_certificate(seq, k, F).ratio) for k in range(1, kmax + 1)]
