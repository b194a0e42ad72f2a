"""Exact balls of Γ_ω, maximal activity growth, and the structural growth checks."""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

from .algebra import A, K, FiniteGroup, prereduce, skeletons
from .treeauto import (RHO, act_on_ray, activity_count, equal, expand, portrait_root,
                       require_nondegenerate)
from .wreath import generating_set


class BudgetExceeded(RuntimeError):
    """Raised when a computation would exceed its element cap; carries partial results."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class GrowthSeries:
    counts: tuple  # b(0), …, b(R)
    description: str = ""
    fiber: str = ""
    complete: bool = True
    keys: frozenset = field(default=None, compare=False, repr=False)

    @property
    def radius(self) -> int:
        return len(self.counts) - 1

    def b(self, r: int) -> int:
        """b(r), with b(r) = 0 for r < 0."""
        if r < 0:
            return 0
        if r > self.radius:
            raise ValueError(f"radius {r} beyond computed {self.radius}")
        return self.counts[r]

    def is_monotone(self) -> bool:
        return all(x <= y for x, y in zip(self.counts, self.counts[1:]))

    def submultiplicativity_violations(self) -> list:
        R = self.radius
        return [(r, s) for r in range(R + 1) for s in range(R + 1 - r)
                if self.counts[r + s] > self.counts[r] * self.counts[s]]


class _GroupCache:
    """G_ω elements interned by portrait, with right multiplication by a, b, c, d cached."""

    def __init__(self, seq, F: FiniteGroup):
        self.seq = seq
        self.F = F
        self.memo = {}
        self.words = []
        self.roots = []
        self.index = {}
        self.trans = []
        self.base_point = []  # ρ·g⁻¹
        self.intern(())

    def intern(self, word):
        root = portrait_root(word, self.seq, self.F, self.memo)
        gid = self.index.get(root)
        if gid is None:
            gid = len(self.words)
            self.index[root] = gid
            self.words.append(word)
            self.roots.append(root)
            self.trans.append([None] * 4)
            self.base_point.append(act_on_ray(RHO, tuple(reversed(word)), self.seq))
        return gid

    def step(self, gid, letter):
        """g·x for x in 0=a, 1=b, 2=c, 3=d."""
        row = self.trans[gid]
        nxt = row[letter]
        if nxt is None:
            x = A if letter == 0 else K(0, letter)
            nxt = self.intern(prereduce(self.words[gid] + (x,), self.F))
            row[letter] = nxt
        return nxt


def _times(phi, point, f, table):
    # phi is a sorted tuple of (point, value); returns phi·φ_f at ``point``
    out = []
    done = False
    for p, x in phi:
        if p == point:
            y = table[x][f]
            if y:
                out.append((p, y))
            done = True
        else:
            out.append((p, x))
    if not done:
        out.append((point, f))
        out.sort()
    return tuple(out)


def ball(seq, F: FiniteGroup, R: int, budget: int = None, keep_keys: bool = False,
         generator_order=None) -> GrowthSeries:
    """b(0), …, b(R) by breadth-first search over canonical (portrait, φ) keys.

    ``budget`` caps the number of distinct elements; on overflow the partial
    series (complete radii only) rides on the raised :class:`BudgetExceeded`.
    """
    require_nondegenerate(seq)
    if R < 0:
        raise ValueError("radius must be non-negative")
    cache = _GroupCache(seq, F)
    gens = [g for g in generating_set(F) if not g.trivial]
    if generator_order is not None:
        gens = [gens[i] for i in generator_order]
    moves = [(0, 0) if g.letter == A else (g.letter[1], g.letter[0]) for g in gens]
    is_a = [g.letter == A for g in gens]
    table = F.table

    start = (0, ())
    seen = {start}
    frontier = [start]
    counts = [1]
    desc = str(seq)
    for r in range(1, R + 1):
        nxt = []
        for gid, phi in frontier:
            for (v, f), pure_a in zip(moves, is_a):
                if pure_a:
                    key = (cache.step(gid, 0), phi)
                else:
                    p = phi if f == 0 else _times(phi, cache.base_point[gid], f, table)
                    key = (cache.step(gid, v) if v else gid, p)
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
                    if budget is not None and len(seen) > budget:
                        partial = GrowthSeries(tuple(counts), desc, str(F), False)
                        raise BudgetExceeded(
                            f"ball exceeded {budget} elements at radius {r}", partial)
        counts.append(len(seen))
        frontier = nxt
    keys = None
    if keep_keys:
        keys = frozenset((cache.roots[g], phi) for g, phi in seen)
    return GrowthSeries(tuple(counts), desc, str(F), True, keys)


def naive_ball_counts(seq, F: FiniteGroup, R: int) -> tuple:
    """Oracle: all words of length ≤ R, deduplicated by pairwise :func:`equal`.

    Words are bucketed by their level-3 permutation first (a necessary
    condition for equality) to keep the pairwise phase small.
    """
    letters = [g.letter for g in generating_set(F)]
    reps = []  # (bucket, word)
    buckets = {}
    counts = []
    seen_words = set()
    for r in range(R + 1):
        for w in itertools.product(letters, repeat=r):
            w = prereduce(w, F)
            if w in seen_words:
                continue
            seen_words.add(w)
            bucket = expand(w, seq, 3, F)[1]
            members = buckets.setdefault(bucket, [])
            if not any(equal(w, u, seq, F) for u in members):
                members.append(w)
                reps.append(w)
        counts.append(len(reps))
    return tuple(counts)


@dataclass(frozen=True)
class ActivityGrowth:
    values: tuple  # s_ω(0), …, s_ω(R)
    witnesses: tuple  # a word reaching each value

    def s(self, r: int) -> int:
        return self.values[r]


def activity_growth(seq, R: int, F: FiniteGroup = None, budget: int = None) -> ActivityGrowth:
    """s_ω(r) = max activity over words of length ≤ r, from skeleton words only."""
    from .algebra import trivial_group

    require_nondegenerate(seq)
    F = F or trivial_group()
    max_factors = (R + 1) // 2
    if budget is not None and 4 ** max_factors * 4 > budget:
        raise BudgetExceeded(f"activity growth to radius {R} needs ~{4 ** max_factors * 4} words")
    best = [0] * (R + 1)
    wit = [()] * (R + 1)
    for w in skeletons(max_factors):
        n = len(w)
        if n > R:
            continue
        s = activity_count(w, seq, F)
        if s > best[n]:
            best[n], wit[n] = s, w
    for r in range(1, R + 1):
        if best[r - 1] >= best[r]:
            best[r], wit[r] = best[r - 1], wit[r - 1]
    return ActivityGrowth(tuple(best), tuple(wit))


@dataclass(frozen=True)
class SandwichReport:
    r: int
    k: int
    lower: int  # b_{σ^k ω}(⌊r/2^k⌋ − 1) for k ≥ 1, or b_σω(⌊(r−1)/2⌋) for the one-step form
    middle: int
    upper: int  # 2·b_σω(⌊(r+1)/2⌋)², one-step form only
    holds: bool


def check_sandwich(series: GrowthSeries, shifted: GrowthSeries, r: int) -> SandwichReport:
    """b_σω(⌊(r−1)/2⌋) ≤ b_ω(r) ≤ 2·b_σω(⌊(r+1)/2⌋)²."""
    lo = shifted.b((r - 1) // 2)
    mid = series.b(r)
    hi = 2 * shifted.b((r + 1) // 2) ** 2
    return SandwichReport(r, 1, lo, mid, hi, lo <= mid <= hi)


def check_iterated_sandwich(series: GrowthSeries, shifted_k: GrowthSeries, r: int, k: int):
    """b_{σ^k ω}(⌊r/2^k⌋ − 1) ≤ b_ω(r)."""
    lo = shifted_k.b(r // 2 ** k - 1)
    mid = series.b(r)
    return SandwichReport(r, k, lo, mid, None, lo <= mid)


def localization_depth(r: int) -> int:
    """Number of leading letters the radius-r ball depends on."""
    return max(1, math.ceil(math.log2(r)) + 1) if r > 1 else 1


@dataclass(frozen=True)
class LocalizationReport:
    r: int
    letters: int
    equal: bool
    counts: tuple
    only_in_first: int
    only_in_second: int


def check_localization(seq_a, seq_b, r: int, F: FiniteGroup, budget: int = None,
                       enforce_prefix: bool = True) -> LocalizationReport:
    """Compare the canonical key sets of the radius-r balls of two sequences."""
    n = localization_depth(r)
    if enforce_prefix and seq_a.prefix(n - 1) != seq_b.prefix(n - 1):
        raise ValueError(f"sequences differ within their first {n} letters")
    ba = ball(seq_a, F, r, budget, keep_keys=True)
    bb = ball(seq_b, F, r, budget, keep_keys=True)
    ka, kb = Counter(ba.keys), Counter(bb.keys)
    return LocalizationReport(r, n, ka == kb, (ba.b(r), bb.b(r)),
                              len(ka - kb), len(kb - ka))


def growth_csv(series: GrowthSeries, act: ActivityGrowth = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "ball", "activity"])
    for r, b in enumerate(series.counts):
        s = act.values[r] if act is not None and r < len(act.values) else ""
        writer.writerow([r, b, s])
    return buf.getvalue()
