"""The η-weighted length, the one-level contraction inequality, its multi-level
form, and the upper-exponent calculator for rotating sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import A, FiniteGroup, prereduce, split
from .certificates import eta
from .omega import NotRotatingError, alpha_from_lambda, rotation_count
from .treeauto import SWAPS, _halves, expand, require_nondegenerate

TOL = 1e-9


@dataclass(frozen=True)
class WeightTable:
    eta: float
    a: float
    rows: tuple  # rows[ω_0] = (0, ‖b‖, ‖c‖, ‖d‖); index 0 is φ_f·id
    eps: tuple = SWAPS  # eps[v][ω_0] ∈ {0, 1}

    def letter(self, v: int, letter: int) -> float:
        return self.rows[letter][v]

    @property
    def min_weight(self) -> float:
        return min([self.a] + [x for row in self.rows for x in row[1:]])

    @property
    def max_weight(self) -> float:
        return max([self.a] + [x for row in self.rows for x in row[1:]])


@lru_cache(maxsize=None)
def weight_table() -> WeightTable:
    e = eta()
    x, y, z = e ** 3, 1 - e ** 2, 1 - e
    rows = ((0.0, x, y, z), (0.0, y, z, x), (0.0, z, x, y))
    return WeightTable(e, 1 - e ** 3, rows)


def weighted_norm(w, letter: int, table: WeightTable = None) -> float:
    """‖w‖ for the row of ``letter`` (= ω_0 of the group w lives in)."""
    t = table or weight_table()
    row = t.rows[letter]
    return sum(t.a if x == A else row[x[1]] for x in w)


def seq_norm(w, seq, table: WeightTable = None) -> float:
    return weighted_norm(w, seq.index(0), table)


def bilipschitz_bounds(w, letter: int) -> tuple:
    """(min-weight·letters, ‖w‖, max-weight·letters), counting only weighted letters."""
    t = weight_table()
    n = sum(1 for x in w if x == A or x[1] != 0)
    return t.min_weight * n, weighted_norm(w, letter, t), t.max_weight * n


# -- the weight recursion display --------------------------------------------------

@dataclass(frozen=True)
class RecursionCheck:
    letter: int
    v: int
    step: str  # "rotate" or "stay"
    lhs: float  # ε_v(ω_0)‖a‖ + ‖v_σω‖
    rhs: float  # η^q (‖a‖ + ‖v_ω‖)

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs


def weight_recursion() -> list:
    t = weight_table()
    out = []
    for letter in range(3):
        for v in (1, 2, 3):
            eps_a = t.eps[v][letter] * t.a
            rot = (letter + 1) % 3
            out.append(RecursionCheck(letter, v, "rotate", eps_a + t.rows[rot][v],
                                      t.eta * (t.a + t.rows[letter][v])))
            out.append(RecursionCheck(letter, v, "stay", eps_a + t.rows[letter][v],
                                      t.a + t.rows[letter][v]))
    return out


# -- contraction ---------------------------------------------------------------------

def step_q(x: int, y: int) -> int:
    if y == x:
        return 0
    if y == (x + 1) % 3:
        return 1
    raise NotRotatingError(f"step {x}->{y} is neither a stay nor a rotation",
                           rotation_count([x, y], strict=False))


def contraction_constant() -> float:
    t = weight_table()
    return t.eta * t.a


@dataclass(frozen=True)
class ContractionReport:
    word: tuple
    letters: tuple  # (ω_0, ω_1)
    q: int
    lhs: float  # ‖w_0‖ + ‖w_1‖ over σω
    norm: float  # ‖w‖ over ω
    constant: float
    tol: float = TOL

    @property
    def rhs(self) -> float:
        return weight_table().eta ** self.q * self.norm + self.constant

    @property
    def excess(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tol


def check_contraction(w, seq, F: FiniteGroup, constant: float = None,
                      tol: float = TOL) -> ContractionReport:
    """‖w_0‖ + ‖w_1‖ ≤ η^{q(ω_0,ω_1)}‖w‖ + C, by default C = η‖a‖."""
    require_nondegenerate(seq)
    x, y = seq.index(0), seq.index(1)
    q = step_q(x, y)
    t = weight_table()
    w = prereduce(w, F, keep_trivial=True)
    i1, ks, i2 = split(w)
    h0, h1, _ = _halves(i1, ks, i2, x, F.table)
    lhs = sum(_norm_split(h, y, t) for h in (h0, h1))
    c = contraction_constant() if constant is None else constant
    return ContractionReport(tuple(w), (x, y), q, lhs, weighted_norm(w, x, t), c, tol)


def _norm_split(word, letter, t):
    i1, ks, i2 = word
    n_a = i1 + i2 + max(len(ks) - 1, 0)
    row = t.rows[letter]
    return n_a * t.a + sum(row[v] for _, v in ks)


@dataclass(frozen=True)
class SweepResult:
    letters: tuple
    checked: int
    violations: int
    worst_excess: float
    witness: tuple  # a word with the largest excess, if any violation

    @property
    def holds(self) -> bool:
        return self.violations == 0


def contraction_sweep(words, pairs, F: FiniteGroup, constant: float = None,
                      tol: float = TOL) -> dict:
    """check_contraction over many pre-reduced words, for each step (ω_0, ω_1) in pairs.

    Returns {(ω_0, ω_1): SweepResult}.  Halves are computed once per ω_0.
    """
    t = weight_table()
    c = contraction_constant() if constant is None else constant
    table = F.table
    by_x = {}
    for x, y in pairs:
        by_x.setdefault(x, []).append((y, t.eta ** step_q(x, y)))
    stats = {(x, y): [float("-inf"), None, 0] for x, y in pairs}
    n = 0
    for w in words:
        n += 1
        i1, ks, i2 = split(w)
        n_a = i1 + i2 + max(len(ks) - 1, 0)
        for x, targets in by_x.items():
            h0, h1, _ = _halves(i1, ks, i2, x, table)
            row_x = t.rows[x]
            norm = n_a * t.a + sum(row_x[v] for _, v in ks)
            for y, scale in targets:
                excess = _norm_split(h0, y, t) + _norm_split(h1, y, t) - scale * norm - c
                st = stats[(x, y)]
                if excess > tol:
                    st[2] += 1
                if excess > st[0]:
                    st[0], st[1] = excess, w
    return {key: SweepResult(key, n, bad, worst, wit if bad else None)
            for key, (worst, wit, bad) in stats.items()}


@dataclass(frozen=True)
class MultiLevelReport:
    word: tuple
    p: int
    q: int
    lhs: float  # l_1 + … + l_{2^p}
    norm: float
    constant: float  # 2^{p+1} η‖a‖
    tol: float = TOL

    @property
    def rhs(self) -> float:
        return weight_table().eta ** self.q * self.norm + self.constant

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tol


def check_multilevel(w, seq, p: int, F: FiniteGroup, tol: float = TOL) -> MultiLevelReport:
    """l_1 + … + l_{2^p} ≤ η^{q(ω_0,…,ω_p)} r + 2^{p+1} C."""
    require_nondegenerate(seq)
    letters = seq.prefix(p)
    stats = rotation_count(letters)
    w = prereduce(w, F)
    words, _ = expand(w, seq, p, F)
    t = weight_table()
    lhs = sum(weighted_norm(u, letters[p], t) for u in words)
    return MultiLevelReport(tuple(w), p, stats.q, lhs, weighted_norm(w, letters[0], t),
                            2 ** (p + 1) * contraction_constant(), tol)


# -- upper exponent --------------------------------------------------------------------

def as_fraction(lam) -> Fraction:
    """λ as an exact rational; floats go through their shortest decimal form."""
    if isinstance(lam, float):
        lam = Fraction(repr(lam))
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda {lam} outside [0, 1]")
    return lam


@dataclass(frozen=True)
class WindowReport:
    i: int
    p: int  # minimal window length found, or None
    q: int
    ratio: Fraction

    def to_json(self) -> dict:
        return {"i": self.i, "p": self.p, "q": self.q,
                "ratio": None if self.ratio is None else str(self.ratio)}


@dataclass(frozen=True)
class ExponentParams:
    lam: Fraction
    P: int
    alpha: float
    windows: list = field(default_factory=list)
    violations: list = field(default_factory=list)  # WindowReport with p=None or a non-rotating step

    @property
    def hypothesis_holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "lambda_float": float(self.lam),
            "P": self.P,
            "alpha": self.alpha,
            "hypothesis_holds": self.hypothesis_holds,
            "windows": [x.to_json() for x in self.windows],
            "violations": [x.to_json() for x in self.violations],
        }


def upper_exponent(seq, horizon: int, P: int, lam) -> ExponentParams:
    """Check ∀ i ≤ horizon ∃ p(i) ≤ P : q(ω_i…ω_{i+p(i)})/p(i) ≥ λ; return α(λ).

    The window must consist of rotating steps; a non-rotating step inside the
    best window is reported as a violation too.
    """
    if P < 1:
        raise ValueError("P must be at least 1")
    lam = as_fraction(lam)
    letters = seq.prefix(horizon + P)
    windows, bad = [], []
    for i in range(horizon + 1):
        found = None
        q = 0
        last = None
        for p in range(1, P + 1):
            x, y = letters[i + p - 1], letters[i + p]
            if y == (x + 1) % 3:
                q += 1
            elif y != x:
                break
            ratio = Fraction(q, p)
            last = WindowReport(i, None, q, ratio)
            if ratio >= lam:
                found = WindowReport(i, p, q, ratio)
                break
        if found is None:
            bad.append(last if last is not None else WindowReport(i, None, 0, None))
        else:
            windows.append(found)
    return ExponentParams(lam, P, alpha_from_lambda(float(lam)), windows, bad)


def periodic_alpha(period) -> float:
    """α = log 2 / (log 2 − (q/p) log η) for ω = period^∞ (rotating)."""
    p = len(period)
    stats = rotation_count(list(period) + [period[0]])
    return alpha_from_lambda(float(Fraction(stats.q, p)))


def upper_bound_exponent(lam) -> float:
    return math.log(2) / (math.log(2) - float(lam) * math.log(eta()))
