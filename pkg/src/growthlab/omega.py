"""Defining sequences ω ∈ {0,1,2}^ℕ and their constructions.

Sequences are immutable values wrapping a total, deterministic function
``index(i)``.  The textual ``description`` uses the sequence DSL::

    periodic:<run>
    blocks:<item>(,<item>)*      item = 0^<m> | (012)^<n>, last may use ^inf
    alpha:<a>
    alphabeta:<a>,<b>
    abgd:<a>,<b>,<g>,<d>
    ... ;switch=2^i | ;switch=list:<i>,<j>,...   (alphabeta / abgd only)
    ... ;shift=<k>

and :func:`parse_sequence` reproduces a sequence from its description.
"""

from __future__ import annotations

import bisect
import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .certificates import alpha0, eta


class NotRotatingError(ValueError):
    """A window contains a step that is neither a stay nor a +1 rotation."""

    def __init__(self, msg, stats):
        super().__init__(msg)
        self.stats = stats


@dataclass(frozen=True)
class OmegaSequence:
    generator: Callable[[int], int]
    description: str
    eventually_constant: bool = False

    def index(self, i: int) -> int:
        if i < 0:
            raise IndexError("negative sequence index")
        return self.generator(i)

    __getitem__ = index

    def prefix(self, k: int) -> list:
        """ω_0 … ω_k (k+1 letters)."""
        if k < 0:
            raise ValueError("k must be non-negative")
        return [self.generator(i) for i in range(k + 1)]

    def __str__(self):
        return self.description

    @classmethod
    def periodic(cls, run: Sequence[int]) -> "OmegaSequence":
        run = tuple(int(x) for x in run)
        if not run or any(x not in (0, 1, 2) for x in run):
            raise ValueError(f"bad periodic run {run!r}")
        n = len(run)
        return cls(lambda i: run[i % n], "periodic:" + "".join(map(str, run)),
                   eventually_constant=len(set(run)) == 1)

    @classmethod
    def from_prefix(cls, letters: Sequence[int], description: str = "") -> "OmegaSequence":
        """A sequence known only on a finite prefix; reading past it raises.

        Declared non-degenerate: used to certify that a computation consumes
        no more than the given letters.
        """
        letters = tuple(letters)

        def gen(i):
            if i >= len(letters):
                raise IndexError(f"sequence known only on its first {len(letters)} letters")
            return letters[i]

        return cls(gen, description or "prefix:" + "".join(map(str, letters)))


def prefix(seq: OmegaSequence, k: int) -> list:
    return seq.prefix(k)


def shift(seq: OmegaSequence, k: int = 1) -> OmegaSequence:
    """σ^k ω."""
    if k < 1:
        raise ValueError("shift amount must be positive")
    base, mods = _split_mods(seq.description)
    mods["shift"] = str(k + int(mods.get("shift", 0)))
    g = seq.generator
    return OmegaSequence(lambda i: g(i + k), _join_mods(base, mods), seq.eventually_constant)


# -- rotation counting ------------------------------------------------------

@dataclass(frozen=True)
class RotationStats:
    p: int
    q: int
    ratio: Fraction
    invalid: int = 0


def rotation_count(letters: Sequence[int], strict: bool = True) -> RotationStats:
    """q = #{i : ω_{i+1} = ω_i + 1 mod 3} over a window of p+1 letters.

    Steps that are neither stays nor rotations raise :class:`NotRotatingError`
    unless ``strict`` is false, in which case they are counted in ``invalid``.
    """
    letters = list(letters)
    if len(letters) < 2:
        raise ValueError("a window needs at least two letters")
    p = len(letters) - 1
    q = bad = 0
    for x, y in zip(letters, letters[1:]):
        step = (y - x) % 3
        if step == 1:
            q += 1
        elif step == 2:
            bad += 1
    stats = RotationStats(p, q, Fraction(q, p), bad)
    if bad and strict:
        raise NotRotatingError(f"window {letters} is not rotating", stats)
    return stats


def is_rotating(letters: Sequence[int]) -> bool:
    return all((y - x) % 3 != 2 for x, y in zip(letters, letters[1:]))


# -- exponent conversion ----------------------------------------------------

def alpha_from_lambda(lam: float) -> float:
    """α with 2 = (2/η^λ)^α."""
    if not -1e-12 <= lam <= 1 + 1e-12:
        raise ValueError(f"lambda={lam} outside [0,1]")
    lam = min(max(lam, 0.0), 1.0)
    return math.log(2) / (math.log(2) - lam * math.log(eta()))


def lambda_from_alpha(alpha: float) -> float:
    a0 = alpha0()
    if not a0 - 1e-12 <= alpha <= 1 + 1e-12:
        raise ValueError(f"alpha={alpha} outside [{a0:.6f}, 1]")
    alpha = min(max(alpha, a0), 1.0)
    lam = math.log(2) * (1 - 1 / alpha) / math.log(eta())
    return min(max(lam, 0.0), 1.0)


def _exact_lambda(alpha: float) -> Fraction:
    lam = lambda_from_alpha(alpha)
    if lam < 1e-12:
        return Fraction(0)
    if lam > 1 - 1e-12:
        return Fraction(1)
    return Fraction(lam)


# -- block schedules --------------------------------------------------------

def default_block_policy(i: int, lam: Fraction) -> tuple:
    """(m_i, n_i) for block i ≥ 1: m_i = 4 + ⌈log₂(i+1)⌉, n_i minimal with 3n_i/p_i ≥ λ."""
    grow = 4 + i.bit_length()
    if lam == 1:
        return (0, grow)
    if lam == 0:
        return (grow, 1)
    m = grow
    n = math.ceil(lam * m / (3 * (1 - lam)))
    return (m, max(n, 1))


@dataclass(frozen=True)
class BlockSchedule:
    """ω = 0^{m_1}(012)^{n_1}0^{m_2}(012)^{n_2}…, extended lazily."""

    lam: Fraction
    policy: Callable[[int, Fraction], tuple] = default_block_policy
    _ends: list = field(default_factory=list, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    def block(self, i: int) -> tuple:
        if i < 1:
            raise IndexError("blocks are numbered from 1")
        m, n = self.policy(i, self.lam)
        if m < 0 or n < 1:
            raise ValueError(f"policy produced invalid block {(m, n)}")
        return m, n

    def blocks(self, count: int) -> list:
        return [self.block(i) for i in range(1, count + 1)]

    def end(self, i: int) -> int:
        """Position one past the last letter of block i."""
        self._extend_to_block(i)
        return self._ends[i - 1]

    def _extend_to_block(self, i):
        with self._lock:
            while len(self._ends) < i:
                j = len(self._ends) + 1
                m, n = self.block(j)
                prev = self._ends[-1] if self._ends else 0
                self._ends.append(prev + m + 3 * n)

    def _extend_to_pos(self, pos):
        with self._lock:
            while not self._ends or self._ends[-1] <= pos:
                j = len(self._ends) + 1
                m, n = self.block(j)
                prev = self._ends[-1] if self._ends else 0
                self._ends.append(prev + m + 3 * n)

    def letter(self, pos: int) -> int:
        self._extend_to_pos(pos)
        j = bisect.bisect_right(self._ends, pos)
        start = self._ends[j - 1] if j else 0
        m, _ = self.block(j + 1)
        off = pos - start
        return 0 if off < m else (off - m) % 3

    def satisfies_constraint(self, i: int) -> bool:
        """3n_i(1−λ) ≥ λ m_i, exactly."""
        m, n = self.block(i)
        return 3 * n * (1 - self.lam) >= self.lam * m


def build_alpha_sequence(alpha: float, schedule_policy=None):
    """ω(α) and its block schedule."""
    lam = _exact_lambda(alpha)
    sched = BlockSchedule(lam, schedule_policy or default_block_policy)
    desc = f"alpha:{alpha!r}"
    return OmegaSequence(sched.letter, desc), sched


# -- switching constructions ------------------------------------------------

@dataclass(frozen=True)
class SwitchSchedule:
    """Strictly increasing switch points s_1 < s_2 < …

    Window 0 is [0, s_1], window j is [s_j + 1, s_{j+1}].  ``points`` None means
    doubling s_j = 2^j; a finite list leaves the final window unbounded.
    """

    points: Optional[tuple] = None

    def __post_init__(self):
        if self.points is not None:
            pts = tuple(int(x) for x in self.points)
            if any(b <= a for a, b in zip(pts, pts[1:])) or any(x < 0 for x in pts):
                raise ValueError(f"switch points must be strictly increasing: {pts}")
            object.__setattr__(self, "points", pts)

    def window(self, i: int) -> int:
        if self.points is None:
            return max(0, (i - 1).bit_length() - 1) if i >= 1 else 0
        return bisect.bisect_left(self.points, i)

    def describe(self) -> str:
        if self.points is None:
            return "2^i"
        return "list:" + ",".join(map(str, self.points))


def _alternate(first: OmegaSequence, second: OmegaSequence, sched: SwitchSchedule):
    f, s = first.generator, second.generator
    return lambda i: (f if sched.window(i) % 2 == 0 else s)(i)


def build_alpha_beta_sequence(alpha: float, beta: float, switch_schedule=None) -> OmegaSequence:
    """ω(α)|[0,s_1] ω(β)|[s_1+1,s_2] ω(α)|… ."""
    a0 = alpha0()
    if not (a0 - 1e-12 <= alpha <= beta <= 1 + 1e-12):
        raise ValueError(f"need alpha0 <= alpha <= beta <= 1, got {alpha}, {beta}")
    sched = switch_schedule or SwitchSchedule()
    sa, _ = build_alpha_sequence(alpha)
    sb, _ = build_alpha_sequence(beta)
    desc = _join_mods(f"alphabeta:{alpha!r},{beta!r}", {"switch": sched.describe()})
    return OmegaSequence(_alternate(sa, sb, sched), desc)


def build_period_sequence(alpha, beta, gamma, delta, switch_schedule=None) -> OmegaSequence:
    """ω(δ)|[0,s_1] ω(γ)|[s_1+1,s_2] ω(δ)|… for α₀ ≤ δ ≤ α < β ≤ γ ≤ 1."""
    a0 = alpha0()
    if not (a0 - 1e-12 <= delta <= alpha < beta <= gamma <= 1 + 1e-12):
        raise ValueError("need alpha0 <= delta <= alpha < beta <= gamma <= 1")
    sched = switch_schedule or SwitchSchedule()
    sd, _ = build_alpha_sequence(delta)
    sg, _ = build_alpha_sequence(gamma)
    desc = _join_mods(f"abgd:{alpha!r},{beta!r},{gamma!r},{delta!r}",
                      {"switch": sched.describe()})
    return OmegaSequence(_alternate(sd, sg, sched), desc)


# -- DSL --------------------------------------------------------------------

_ITEM = re.compile(r"^(0|\(012\))\^(\d+|inf)$")


def blocks_sequence(items: Sequence[tuple]) -> OmegaSequence:
    """Concatenation of ("0", m) / ("012", n) items, cycled; a final ``None``
    count means the last pattern repeats forever."""
    pieces = []
    for j, (pat, count) in enumerate(items):
        if count is None and j != len(items) - 1:
            raise ValueError("only the last block item may be infinite")
        pieces.append((pat, count))
    if not pieces:
        raise ValueError("empty block list")
    run = []
    tail = None
    for pat, count in pieces:
        unit = [0] if pat == "0" else [0, 1, 2]
        if count is None:
            tail = unit
        else:
            run.extend(unit * count)
    desc = "blocks:" + ",".join(
        f"{'0' if p == '0' else '(012)'}^{'inf' if c is None else c}" for p, c in pieces)
    if tail is None:
        if not run:
            raise ValueError("block list has no letters")
        n = len(run)
        return OmegaSequence(lambda i: run[i % n], desc, eventually_constant=len(set(run)) == 1)
    head, t = tuple(run), tuple(tail)
    h = len(head)
    return OmegaSequence(lambda i: head[i] if i < h else t[(i - h) % len(t)], desc,
                         eventually_constant=len(t) == 1)


def _split_mods(desc: str):
    parts = desc.split(";")
    mods = {}
    for part in parts[1:]:
        key, _, val = part.partition("=")
        mods[key.strip()] = val.strip()
    return parts[0], mods


def _join_mods(base: str, mods: dict) -> str:
    out = base
    for key in ("switch", "shift"):
        if key in mods:
            out += f";{key}={mods[key]}"
    return out


def _parse_switch(val: str) -> SwitchSchedule:
    if val == "2^i":
        return SwitchSchedule()
    if val.startswith("list:"):
        return SwitchSchedule(tuple(int(x) for x in val[5:].split(",") if x))
    raise ValueError(f"bad switch schedule {val!r}")


def _floats(text, n):
    vals = [float(x) for x in text.split(",")]
    if len(vals) != n:
        raise ValueError(f"expected {n} numbers, got {text!r}")
    return vals


def parse_sequence(spec: str) -> OmegaSequence:
    base, mods = _split_mods(spec.strip())
    unknown = set(mods) - {"switch", "shift"}
    if unknown:
        raise ValueError(f"unknown modifiers {sorted(unknown)}")
    kind, _, body = base.partition(":")
    switch = _parse_switch(mods["switch"]) if "switch" in mods else None
    if switch is not None and kind not in ("alphabeta", "abgd"):
        raise ValueError("switch= applies only to alphabeta/abgd")
    if kind == "periodic":
        if not body or set(body) - set("012"):
            raise ValueError(f"bad periodic run {body!r}")
        seq = OmegaSequence.periodic([int(c) for c in body])
    elif kind == "blocks":
        items = []
        for tok in body.split(","):
            m = _ITEM.match(tok.strip())
            if not m:
                raise ValueError(f"bad block item {tok!r}")
            items.append(("0" if m.group(1) == "0" else "012",
                          None if m.group(2) == "inf" else int(m.group(2))))
        seq = blocks_sequence(items)
    elif kind == "alpha":
        (a,) = _floats(body, 1)
        seq, _ = build_alpha_sequence(a)
    elif kind == "alphabeta":
        a, b = _floats(body, 2)
        seq = build_alpha_beta_sequence(a, b, switch)
    elif kind == "abgd":
        a, b, g, d = _floats(body, 4)
        seq = build_period_sequence(a, b, g, d, switch)
    else:
        raise ValueError(f"unknown sequence kind {kind!r}")
    if "shift" in mods:
        k = int(mods["shift"])
        if k < 0:
            raise ValueError("negative shift")
        if k:
            seq = shift(seq, k)
    return seq
