"""Upper and lower sets of a growth series, their alternating decomposition,
and the pseudo-period exponents.

Everything runs in log-log coordinates X = log r, Y = log log b(r); then
``log b(r) ≥ r^β`` reads ``Y ≥ βX``.  Radii r ≤ 1 carry no exponent
information (X = 0) and are dropped.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

SLACK = 1e-12


class InsufficientBlocksError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesInput:
    X: np.ndarray  # log r, strictly increasing, > 0
    Y: np.ndarray  # log log b(r); -inf where log b(r) ≤ 0
    is_increasing: Optional[bool] = None
    is_submultiplicative: Optional[bool] = None
    increasing_source: str = "unknown"  # "declared" or "verified"
    submultiplicative_source: str = "unknown"
    dense: bool = False  # consecutive integer radii (pairwise check possible)
    logb_values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.X) != len(self.Y):
            raise ValueError("X and Y differ in length")
        if len(self.X) and (np.any(np.diff(self.X) <= 0) or self.X[0] <= 0):
            raise ValueError("radii must be strictly increasing and larger than 1")

    @property
    def radii(self) -> np.ndarray:
        return np.exp(self.X)

    @property
    def logb(self) -> np.ndarray:
        """log b(r); recomputed from Y where the exact values are unavailable."""
        if self.logb_values is not None:
            return self.logb_values
        return np.exp(self.Y)

    def exponents(self) -> np.ndarray:
        """log log b(r) / log r."""
        return self.Y / self.X

    # -- constructors --------------------------------------------------------------

    @classmethod
    def from_loglog(cls, X, Y, increasing=None, submultiplicative=None, verify=True):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        s = cls(X, Y)
        return s._flags(increasing, submultiplicative, verify)

    @classmethod
    def from_logb(cls, radii, logb, increasing=None, submultiplicative=None, verify=True):
        radii = np.asarray(radii, dtype=float)
        logb = np.asarray(logb, dtype=float)
        if np.any(logb < 0):
            raise ValueError("log b(r) must be non-negative")
        keep = radii > 1
        dense = bool(len(radii) > 1 and np.all(np.diff(radii) == 1)
                     and float(radii[0]).is_integer())
        with np.errstate(divide="ignore"):
            Y = np.log(logb[keep])
        s = cls(np.log(radii[keep]), Y, dense=dense, logb_values=logb[keep])
        s = s._with_full(radii, logb)
        return s._flags(increasing, submultiplicative, verify)

    @classmethod
    def from_counts(cls, radii, counts, increasing=None, submultiplicative=None, verify=True):
        """Exact integer ball sizes; logs are taken on the integers directly."""
        if any(b < 1 for b in counts):
            raise ValueError("ball sizes must be positive")
        logb = [math.log(b) for b in counts]
        return cls.from_logb(radii, logb, increasing, submultiplicative, verify)

    def _with_full(self, radii, logb):
        object.__setattr__(self, "_full", (np.asarray(radii, float), np.asarray(logb, float)))
        return self

    def _flags(self, increasing, submultiplicative, verify):
        inc_src = sub_src = "declared"
        if increasing is None and verify:
            increasing, inc_src = self.verify_increasing(), "verified"
        if submultiplicative is None and verify:
            submultiplicative, sub_src = self.verify_submultiplicative(), "verified"
        object.__setattr__(self, "is_increasing", increasing)
        object.__setattr__(self, "is_submultiplicative", submultiplicative)
        object.__setattr__(self, "increasing_source", inc_src if increasing is not None else "unknown")
        object.__setattr__(self, "submultiplicative_source",
                           sub_src if submultiplicative is not None else "unknown")
        return self

    # -- hypothesis checks -----------------------------------------------------------

    def verify_increasing(self) -> bool:
        full = getattr(self, "_full", None)
        values = full[1] if full is not None else self.Y
        scale = SLACK * np.maximum(1.0, np.abs(values[1:]))
        return bool(np.all(np.diff(values) >= -scale))

    def verify_submultiplicative(self) -> bool:
        """Pairwise log b(r+s) ≤ log b(r) + log b(s) on dense integer data; on
        sparse data the sufficient condition that log b(r)/r is non-increasing
        (which with monotonicity makes the interpolant subadditive)."""
        full = getattr(self, "_full", None)
        if full is not None and self.dense:
            radii, logb = full
            index = {int(r): v for r, v in zip(radii, logb)}
            keys = sorted(index)
            for i, r in enumerate(keys):
                for s in keys[i:]:
                    t = r + s
                    if t in index and index[t] > index[r] + index[s] + SLACK * max(1.0, index[t]):
                        return False
            return True
        # star condition in log-log form: Y − X non-increasing
        d = np.diff(self.Y - self.X)
        scale = SLACK * np.maximum(1.0, np.abs(self.X[1:]))
        finite = np.isfinite(d)
        return bool(np.all(d[finite] <= scale[finite]))


def resample_doubled(series: SeriesInput) -> SeriesInput:
    """The series of b'(r) = b(2r): the same values at radii r/2."""
    X = series.X - math.log(2)
    keep = X > 0
    return SeriesInput.from_loglog(X[keep], series.Y[keep], series.is_increasing,
                                   series.is_submultiplicative, verify=False)


# -- upper and lower sets ----------------------------------------------------------------

def upper_lower_sets(series: SeriesInput, alpha: float, beta: float, slack: float = SLACK):
    """Index arrays of U = {log b ≥ r^β} and L = {log b ≤ r^α} (closed conditions)."""
    if not alpha < beta:
        raise ValueError("need alpha < beta")
    X, Y = series.X, series.Y
    U = np.nonzero(Y >= beta * X - slack)[0]
    L = np.nonzero(Y <= alpha * X + slack)[0]
    return U, L


@dataclass(frozen=True)
class Block:
    kind: str  # "U" or "L"
    index: int  # i in U_i / L_i
    members: tuple  # positions into the series
    complete: bool  # False for the trailing run, which may continue past the data

    @property
    def first(self) -> int:
        return self.members[0]

    @property
    def last(self) -> int:
        return self.members[-1]


def alternating_decomposition(U: Sequence[int], L: Sequence[int]) -> list:
    """Maximal alternating runs.  Upper blocks U_0, L_0, U_1, …; a series that
    starts in L begins with L_0 followed by U_1, so u-ratios still pair
    (t_i', s_{i+1}) and l-ratios (s_i', t_i)."""
    U, L = set(int(x) for x in U), set(int(x) for x in L)
    if U & L:
        raise ValueError("upper and lower sets intersect")
    marks = sorted([(x, "U") for x in U] + [(x, "L") for x in L])
    runs = []
    for pos, kind in marks:
        if runs and runs[-1][0] == kind:
            runs[-1][1].append(pos)
        else:
            runs.append((kind, [pos]))
    blocks = []
    u_index = -1 if runs and runs[0][0] == "U" else 0
    l_index = -1
    for j, (kind, members) in enumerate(runs):
        if kind == "U":
            u_index += 1
            idx = u_index
        else:
            l_index += 1
            idx = l_index
        blocks.append(Block(kind, idx, tuple(members), j < len(runs) - 1))
    return blocks


def decomposition_ok(blocks: list) -> bool:
    """The three order conditions, checked literally on the blocks."""
    us = {b.index: set(b.members) for b in blocks if b.kind == "U"}
    ls = {b.index: set(b.members) for b in blocks if b.kind == "L"}
    if any(not m for m in list(us.values()) + list(ls.values())):
        return False
    for i, Ui in us.items():
        before = set().union(*[m for j, m in ls.items() if j <= i - 1])
        after = set().union(*[m for j, m in ls.items() if j >= i])
        if any((before and s < max(before)) or (after and s > min(after)) for s in Ui):
            return False
    for i, Li in ls.items():
        before = set().union(*[m for j, m in us.items() if j <= i])
        after = set().union(*[m for j, m in us.items() if j >= i + 1])
        if any((before and t < max(before)) or (after and t > min(after)) for t in Li):
            return False
    kinds = [b.kind for b in blocks]
    return all(x != y for x, y in zip(kinds, kinds[1:]))


# -- pseudo-period exponents -------------------------------------------------------------

@dataclass(frozen=True)
class Ratio:
    i: int
    value: float
    num: int  # series positions of the two markers
    den: int


@dataclass(frozen=True)
class OscillationReport:
    alpha: float
    beta: float
    U: tuple
    L: tuple
    blocks: list
    traces: dict  # name -> list of Ratio
    exponents: dict  # name -> max over i ≥ i0, or None
    i0: int

    def to_json(self, series: SeriesInput = None) -> dict:
        X = series.X if series is not None else None

        def point(k):
            return {"pos": k, "log_r": float(X[k])} if X is not None else {"pos": k}

        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "i0": self.i0,
            "U": list(self.U),
            "L": list(self.L),
            "blocks": [{"kind": b.kind, "index": b.index, "complete": b.complete,
                        "min": point(b.first), "max": point(b.last), "size": len(b.members)}
                       for b in self.blocks],
            "traces": {k: [{"i": r.i, "ratio": r.value} for r in v] for k, v in self.traces.items()},
            "exponents": self.exponents,
        }


def _markers(blocks, kind):
    return {b.index: b for b in blocks if b.kind == kind}


def pseudo_period_traces(blocks: list, X: np.ndarray) -> dict:
    """Ratio traces: u = log s_{i+1}/log t_i', l = log t_i/log s_i', and the
    four period variants over s, s', t, t'.  Max markers of the trailing
    (incomplete) block are never used."""
    us, ls = _markers(blocks, "U"), _markers(blocks, "L")

    def ratio(i, num, den):
        return Ratio(i, float(X[num] / X[den]), num, den)

    traces = {"u": [], "l": [], "p_s": [], "p_s'": [], "p_t": [], "p_t'": []}
    for i, Li in sorted(ls.items()):
        nxt = us.get(i + 1)
        if nxt is not None and Li.complete:
            traces["u"].append(ratio(i, nxt.first, Li.last))
    for i, Ui in sorted(us.items()):
        Li = ls.get(i)
        if Li is not None and Ui.complete:
            traces["l"].append(ratio(i, Li.first, Ui.last))
    for name, table, use_max in (("p_s", us, False), ("p_s'", us, True),
                                 ("p_t", ls, False), ("p_t'", ls, True)):
        for i, blk in sorted(table.items()):
            nxt = table.get(i + 1)
            if nxt is None:
                continue
            if use_max:
                if not (blk.complete and nxt.complete):
                    continue
                traces[name].append(ratio(i, nxt.last, blk.last))
            else:
                traces[name].append(ratio(i, nxt.first, blk.first))
    return traces


def pseudo_period_exponents(blocks: list, X: np.ndarray, i0: int = 1):
    """Empirical limsup = max of each trace over i ≥ i0; None where empty."""
    if not any(b.kind == "U" for b in blocks) or not any(b.kind == "L" for b in blocks):
        raise InsufficientBlocksError("need at least one upper and one lower block")
    traces = pseudo_period_traces(blocks, X)
    if not traces["u"] and not traces["l"]:
        raise InsufficientBlocksError("no complete alternation")
    exps = {}
    for name, tr in traces.items():
        vals = [r.value for r in tr if r.i >= i0]
        exps[name] = max(vals) if vals else None
    return exps, traces


def analyze(series: SeriesInput, alpha: float, beta: float, i0: int = 1) -> OscillationReport:
    U, L = upper_lower_sets(series, alpha, beta)
    blocks = alternating_decomposition(U, L)
    exps, traces = pseudo_period_exponents(blocks, series.X, i0)
    return OscillationReport(alpha, beta, tuple(int(x) for x in U), tuple(int(x) for x in L),
                             blocks, traces, exps, i0)


@dataclass(frozen=True)
class BoundsVerdict:
    u_bound: float
    l_bound: float
    u: Optional[float]
    l: Optional[float]
    u_applicable: bool  # series is submultiplicative
    l_applicable: bool  # series is increasing
    u_ok: Optional[bool]  # None: not applicable or no data
    l_ok: Optional[bool]
    pair_violations: dict  # ratio pairs below the bound, per trace

    @property
    def ok(self) -> bool:
        return self.u_ok is not False and self.l_ok is not False

    def findings(self) -> list:
        out = []
        for name, applicable, ok in (("u", self.u_applicable, self.u_ok),
                                     ("l", self.l_applicable, self.l_ok)):
            if not applicable:
                out.append(f"{name}: hypothesis not satisfied, bound not asserted")
            elif ok is False:
                out.append(f"{name}: bound violated")
        return out


def check_universal_bounds(series: SeriesInput, alpha: float, beta: float,
                           report: OscillationReport, slack: float = 1e-9) -> BoundsVerdict:
    """u ≥ (1−α)/(1−β) for submultiplicative b, l ≥ β/α for increasing b."""
    ub = (1 - alpha) / (1 - beta) if beta < 1 else math.inf
    lb = beta / alpha
    u_app = bool(series.is_submultiplicative)
    l_app = bool(series.is_increasing)
    u, l = report.exponents.get("u"), report.exponents.get("l")
    viol = {
        "u": [r.i for r in report.traces["u"] if r.value < ub - slack],
        "l": [r.i for r in report.traces["l"] if r.value < lb - slack],
    }
    u_ok = None if (not u_app or u is None) else u >= ub - slack
    l_ok = None if (not l_app or l is None) else l >= lb - slack
    return BoundsVerdict(ub, lb, u, l, u_app, l_app, u_ok, l_ok, viol)


# -- synthetic series ------------------------------------------------------------------------

def synthesize_series(profile: Sequence[tuple], x_max: float, points_per_unit: int = 40,
                      x_min: float = math.log(2)) -> SeriesInput:
    """log b(r) ≈ r^{e(r)} for a piecewise-constant exponent schedule.

    ``profile`` is [(X_start, exponent), …] in log r, the first X_start ≤ x_min.
    The points are sampled geometrically in X and pushed through a forward
    clamp Y_k ∈ [Y_{k−1}, Y_{k−1} + (X_k − X_{k−1})]: log b is then
    non-decreasing and log b(r)/r non-increasing, hence the series (and its
    monotone interpolant) is increasing and submultiplicative.
    """
    if not profile:
        raise ValueError("empty profile")
    starts = [float(x) for x, _ in profile]
    exps = [float(e) for _, e in profile]
    if any(not 0 < e <= 1 for e in exps):
        raise ValueError("exponents must lie in (0, 1]")
    if any(b <= a for a, b in zip(starts, starts[1:])):
        raise ValueError("profile switch points must increase")
    if starts[0] > x_min:
        raise ValueError("profile must start at or below x_min")
    n = max(2, int(math.ceil(points_per_unit * math.log(x_max / x_min))) + 1)
    X = np.geomspace(x_min, x_max, n)
    idx = np.searchsorted(starts, X, side="right") - 1
    target = np.asarray(exps)[idx] * X
    Y = np.empty_like(X)
    Y[0] = target[0]
    for k in range(1, n):
        Y[k] = min(max(target[k], Y[k - 1]), Y[k - 1] + (X[k] - X[k - 1]))
    return SeriesInput.from_loglog(X, Y, increasing=True, submultiplicative=True, verify=False)


def two_regime_profile(high: float, low: float, switches: Sequence[float], x_min=math.log(2)):
    """Alternate high/low exponents, switching at the given log-radii."""
    profile = [(x_min, high)]
    for j, x in enumerate(switches):
        profile.append((x, low if j % 2 == 0 else high))
    return profile


# -- CSV -----------------------------------------------------------------------------------------

def read_series_csv(text: str, increasing=None, submultiplicative=None) -> SeriesInput:
    """Header ``r,b``, ``r,logb`` or ``logr,loglogb``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty series file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if header[:2] == ["r", "b"]:
        radii = [int(r[0]) for r in body]
        counts = [int(r[1]) for r in body]
        return SeriesInput.from_counts(radii, counts, increasing, submultiplicative)
    if header[:2] == ["r", "logb"]:
        return SeriesInput.from_logb([float(r[0]) for r in body], [float(r[1]) for r in body],
                                     increasing, submultiplicative)
    if header[:2] == ["logr", "loglogb"]:
        return SeriesInput.from_loglog([float(r[0]) for r in body], [float(r[1]) for r in body],
                                       increasing, submultiplicative)
    if header[:2] == ["r", "ball"]:  # growth CSV from the ball command
        radii = [int(r[0]) for r in body]
        counts = [int(r[1]) for r in body]
        return SeriesInput.from_counts(radii, counts, increasing, submultiplicative)
    raise ValueError(f"unrecognized series header {header}")


def series_csv(series: SeriesInput) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["logr", "loglogb"])
    for x, y in zip(series.X, series.Y):
        w.writerow([repr(float(x)), repr(float(y))])
    return buf.getvalue()
