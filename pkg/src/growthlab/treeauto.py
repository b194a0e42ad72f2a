"""Words of Γ_ω acting on the binary rooted tree.

Conventions.  Elements act on rays on the right and words are read left to
right.  A vertex or ray is a binary string; the orbit point ``u`` stands for
the ray u·1^∞ and is kept canonical (no trailing ``1``), so the base ray ρ is
the empty string.  ``v_ω = (u^v(ω_0), v_σω)``: at a vertex starting with 0
the Klein letter acts by u^v(ω_0) ∈ {id, a} on the rest, at a vertex starting
with 1 it recurses.  The fiber label of φ_f v follows the base ray, i.e. the
second subtree.

Internally a pre-reduced word is a triple ``(i1, ks, i2)`` with ``ks`` a tuple
of ``(f, v)`` pairs; see :func:`growthlab.algebra.split`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import A, KLEIN_NAMES, KLEIN_INDEX, K, FiniteGroup, Word, invert, join, prereduce, split

# u^v(x) == a  <=>  SWAPS[v][x]; also the ε_v maps of the weighted norm
SWAPS = (
    (0, 0, 0),  # id
    (1, 1, 0),  # b
    (1, 0, 1),  # c
    (0, 1, 1),  # d
)

RHO = ""


class DegenerateSequenceError(ValueError):
    """The defining sequence is eventually constant."""


def require_nondegenerate(seq):
    if getattr(seq, "eventually_constant", False):
        raise DegenerateSequenceError(f"sequence {seq} is eventually constant")


# -- rewriting ----------------------------------------------------------------

def _half(ks, par, letter, table):
    """Factors of ks with index parity ``par`` land in this half; the others
    leave u^v(letter) behind.  Merged factors are kept even when trivial."""
    out = []
    lead = 0
    gap = False
    for j, (f, v) in enumerate(ks):
        if (j & 1) == par:
            if not out:
                lead = 1 if gap else 0
                out.append((f, v))
            elif gap:
                out.append((f, v))
            else:
                g, u = out[-1]
                out[-1] = (table[g][f], u ^ v)
            gap = False
        elif SWAPS[v][letter]:
            gap = True
    if not out:
        return (1 if gap else 0, (), 0)
    return (lead, tuple(out), 1 if gap else 0)


def _halves(i1, ks, i2, letter, table):
    r = len(ks)
    if r == 0:
        return (0, (), 0), (0, (), 0), (i1 + i2) & 1
    # component t receives factor j iff (j & 1) == 1 ^ t ^ i1
    h0 = _half(ks, 1 ^ i1, letter, table)
    h1 = _half(ks, i1, letter, table)
    return h0, h1, (i1 + r - 1 + i2) & 1


@dataclass(frozen=True)
class RewriteResult:
    w0: Word
    w1: Word
    rootswap: bool


def rewrite(w: Sequence, letter: int, F: FiniteGroup) -> RewriteResult:
    """w = (w0, w1)·σ(w) at a level whose sequence letter is ``letter``."""
    i1, ks, i2 = split(prereduce(w, F, keep_trivial=True))
    h0, h1, swap = _halves(i1, ks, i2, letter, F.table)
    return RewriteResult(join(*h0), join(*h1), bool(swap))


def expand(w: Sequence, seq, p: int, F: FiniteGroup):
    """The 2^p level-p sections of w (left to right) and the permutation σ_p(w)
    of the level-p vertices, as a tuple mapping vertex index to image index
    (vertex index = the vertex string read in base 2)."""
    if p < 0:
        raise ValueError("depth must be non-negative")
    w = split(prereduce(w, F, keep_trivial=True))

    def rec(word, depth, p):
        if p == 0:
            return [word], (0,)
        h0, h1, swap = _halves(*word, seq.index(depth), F.table)
        words0, perm0 = rec(h0, depth + 1, p - 1)
        words1, perm1 = rec(h1, depth + 1, p - 1)
        half = len(perm0)
        perm = []
        for t, sub in ((0, perm0), (1, perm1)):
            img_top = t ^ swap
            perm.extend(img_top * half + y for y in sub)
        return words0 + words1, tuple(perm)

    words, perm = rec(w, 0, p)
    return [join(*x) for x in words], perm


# -- identity and equality ------------------------------------------------------

def _triv_short(i1, ks, i2):
    if not ks:
        return (i1 + i2) % 2 == 0
    (f, v), = ks
    return f == 0 and v == 0 and (i1 + i2) % 2 == 0


def _is_identity(word, seq, depth, table):
    i1, ks, i2 = word
    if len(ks) <= 1:
        return _triv_short(i1, ks, i2)
    h0, h1, swap = _halves(i1, ks, i2, seq.index(depth), table)
    if swap:
        return False
    return _is_identity(h0, seq, depth + 1, table) and _is_identity(h1, seq, depth + 1, table)


def is_identity(w: Sequence, seq, F: FiniteGroup, ignore_fiber: bool = False) -> bool:
    """Whether w is trivial in Γ_ω (or only its image in G_ω, with ``ignore_fiber``).

    Recurses through the faithful embedding Γ_ω → Γ_σω ≀ S_2; factor counts
    halve, so the depth is at most ⌈log₂|w|_pr⌉.
    """
    require_nondegenerate(seq)
    if ignore_fiber:
        w = [x if x == A else K(0, x[1]) for x in w]
    word = split(prereduce(w, F))
    return _is_identity(word, seq, 0, F.table)


def equal(w1: Sequence, w2: Sequence, seq, F: FiniteGroup, ignore_fiber: bool = False) -> bool:
    return is_identity(tuple(w1) + invert(w2, F), seq, F, ignore_fiber)


# -- minimal trees and portraits ---------------------------------------------------

@dataclass(frozen=True)
class MinimalTree:
    """T(w): swap bits of interior vertices and the ≤1-factor words at leaves.

    Leaves map a vertex string to ``(eps, factor, delta)`` where factor is
    ``(f, v)`` for an active leaf, or ``None`` (then the word is a^eps).
    """

    interior: dict
    leaves: dict
    depth: int

    def active_leaves(self) -> list:
        return sorted((z for z, (_, k, _) in self.leaves.items() if k is not None),
                      key=lambda z: (len(z), z))

    @property
    def activity(self) -> int:
        return sum(1 for _, k, _ in self.leaves.values() if k is not None)

    def support_a_priori(self) -> set:
        """{z·ε_z(1)·ρ : z active}."""
        return {canonical_point(z + ("0" if e else "1"))
                for z, (e, k, _) in self.leaves.items() if k is not None}


def _minimal_tree(word, seq, table):
    interior, leaves = {}, {}
    deepest = 0
    stack = [(word, "")]
    while stack:
        (i1, ks, i2), z = stack.pop()
        if len(ks) <= 1:
            if ks:
                leaves[z] = (i1, ks[0], i2)
            else:
                leaves[z] = ((i1 + i2) & 1, None, 0)
            deepest = max(deepest, len(z))
            continue
        h0, h1, swap = _halves(i1, ks, i2, seq.index(len(z)), table)
        interior[z] = swap
        stack.append((h1, z + "1"))
        stack.append((h0, z + "0"))
    return MinimalTree(interior, leaves, deepest)


def minimal_tree(w: Sequence, seq, F: FiniteGroup) -> MinimalTree:
    require_nondegenerate(seq)
    return _minimal_tree(split(prereduce(w, F, keep_trivial=True)), seq, F.table)


def _norm_leaf(eps, f, v, delta):
    if f == 0 and v == 0:
        return (eps ^ delta, 0, 0, 0)
    return (eps, f, v, delta)


_COLLAPSE = {}


def _collapse_table(letter, table):
    """(swap, leaf0, leaf1) -> leaf, for the short elements at one level."""
    key = (letter, table)
    cached = _COLLAPSE.get(key)
    if cached is not None:
        return cached
    out = {}
    n = len(table)
    out[(0, (0, 0, 0, 0), (0, 0, 0, 0))] = (0, 0, 0, 0)
    out[(1, (0, 0, 0, 0), (0, 0, 0, 0))] = (1, 0, 0, 0)
    for eps in (0, 1):
        for delta in (0, 1):
            for f in range(n):
                for v in range(4):
                    if f == 0 and v == 0:
                        continue
                    h0, h1, swap = _halves(eps, ((f, v),), delta, letter, table)
                    leaf0 = _leaf_of(h0)
                    leaf1 = _leaf_of(h1)
                    out[(swap, leaf0, leaf1)] = (eps, f, v, delta)
    _COLLAPSE[key] = out
    return out


def _leaf_of(word):
    i1, ks, i2 = word
    if not ks:
        return ((i1 + i2) & 1, 0, 0, 0)
    (f, v), = ks
    return _norm_leaf(i1, f, v, i2)


def _portrait(word, seq, depth, table, memo):
    i1, ks, i2 = word
    if len(ks) <= 1:
        return _leaf_of(word)
    if memo is not None:
        hit = memo.get((word, depth))
        if hit is not None:
            return hit
    letter = seq.index(depth)
    h0, h1, swap = _halves(i1, ks, i2, letter, table)
    left = _portrait(h0, seq, depth + 1, table, memo)
    right = _portrait(h1, seq, depth + 1, table, memo)
    node = (swap, left, right)
    if len(left) == 4 and len(right) == 4:
        node = _collapse_table(letter, table).get(node, node)
    if memo is not None:
        memo[(word, depth)] = node
    return node


@dataclass(frozen=True)
class Portrait:
    """Canonical form of an element: the minimal tree with normalized leaves,
    every subtree representing a one-factor element collapsed to its leaf.

    ``root`` is a leaf ``(eps, f, v, delta)`` or a node ``(swap, left, right)``.
    """

    root: tuple
    prefix: tuple = field(default=(), compare=False)

    def serialize(self) -> str:
        return serialize_portrait(self.root)

    def __str__(self):
        return self.serialize()

    @property
    def depth(self) -> int:
        def d(node):
            return 0 if len(node) == 4 else 1 + max(d(node[1]), d(node[2]))
        return d(self.root)

    def is_identity(self) -> bool:
        return self.root == (0, 0, 0, 0)


def portrait_root(w: Sequence, seq, F: FiniteGroup, memo=None) -> tuple:
    word = split(prereduce(w, F, keep_trivial=True))
    return _portrait(word, seq, 0, F.table, memo)


def canonical_portrait(w: Sequence, seq, F: FiniteGroup, memo=None) -> Portrait:
    require_nondegenerate(seq)
    root = portrait_root(w, seq, F, memo)
    p = Portrait(root)
    return Portrait(root, tuple(seq.prefix(p.depth - 1)) if p.depth else ())


def serialize_portrait(node) -> str:
    if len(node) == 4:
        e, f, v, d = node
        return f"[{e} {f} {KLEIN_NAMES[v]} {d}]"
    return f"({node[0]} {serialize_portrait(node[1])} {serialize_portrait(node[2])})"


def parse_portrait(text: str) -> Portrait:
    toks = text.replace("(", " ( ").replace(")", " ) ").replace("[", " [ ").replace("]", " ] ").split()
    pos = 0

    def node():
        nonlocal pos
        tok = toks[pos]
        if tok == "[":
            e, f, v, d = toks[pos + 1:pos + 5]
            if toks[pos + 5] != "]":
                raise ValueError("unterminated leaf")
            pos += 6
            return (int(e), int(f), KLEIN_INDEX[v], int(d))
        if tok == "(":
            swap = int(toks[pos + 1])
            pos += 2
            left = node()
            right = node()
            if toks[pos] != ")":
                raise ValueError("unterminated node")
            pos += 1
            return (swap, left, right)
        raise ValueError(f"unexpected token {tok!r}")

    root = node()
    if pos != len(toks):
        raise ValueError("trailing input after portrait")
    return Portrait(root)


# -- rays ------------------------------------------------------------------------

def canonical_point(u: str) -> str:
    return u.rstrip("1")


def _flip(ch):
    return "1" if ch == "0" else "0"


def act_letter(x: str, letter, seq) -> str:
    if letter == A:
        if not x:
            return "0"
        return (_flip(x[0]) + x[1:]).rstrip("1")
    v = letter[1]
    if v == 0:
        return x
    n = x.find("0")
    if n < 0 or not SWAPS[v][seq.index(n)]:
        return x
    if n + 1 < len(x):
        return (x[:n + 1] + _flip(x[n + 1]) + x[n + 2:]).rstrip("1")
    return x + "0"


def act_on_ray(x: str, w: Sequence, seq) -> str:
    """x·w for the ray x·1^∞ (canonical encoding in and out)."""
    if x != canonical_point(x) or set(x) - {"0", "1"}:
        raise ValueError(f"{x!r} is not a canonical orbit point")
    for letter in w:
        x = act_letter(x, letter, seq)
    return x


def inverted_orbit(w: Sequence, seq) -> list:
    """Distinct points ρ·g_k^{-1}, g_k the prefix before the k-th factor, in
    order of first appearance.  Computed directly from the ray action."""
    points = []
    images = []  # images[j] = points[j] · (letters read so far)
    seen = []
    for letter in w:
        if letter != A:
            if RHO not in images:
                x = RHO
                for y in reversed(seen):
                    x = act_letter(x, y, seq)
                points.append(x)
                images.append(RHO)
        images = [act_letter(y, letter, seq) for y in images]
        seen.append(letter)
    return points


# -- activity ---------------------------------------------------------------------

def _activity(word, seq, depth, table):
    i1, ks, i2 = word
    r = len(ks)
    if r <= 1:
        return r
    h0, h1, _ = _halves(i1, ks, i2, seq.index(depth), table)
    return _activity(h0, seq, depth + 1, table) + _activity(h1, seq, depth + 1, table)


def activity_count(w: Sequence, seq, F: FiniteGroup) -> int:
    """s(w), the number of active leaves of T(w)."""
    require_nondegenerate(seq)
    return _activity(split(prereduce(w, F, keep_trivial=True)), seq, 0, F.table)


@dataclass(frozen=True)
class ActivityReport:
    s: int
    active_leaves: list
    inverted_orbit: list


def activity(w: Sequence, seq, F: FiniteGroup) -> ActivityReport:
    tree = minimal_tree(w, seq, F)
    w = prereduce(w, F, keep_trivial=True)
    return ActivityReport(tree.activity, tree.active_leaves(), inverted_orbit(w, seq))


# -- ascendance forest -----------------------------------------------------------------

@dataclass(frozen=True)
class AscendanceForest:
    """Nodes (y, i): the i-th factor at vertex y.  Edges join a factor to the
    parent factors it is the ordered product of."""

    nodes: list
    edges: list
    component_count: int
    leaf_sets: dict  # active leaf z -> J(z) ⊂ {0, …, r-1}


def _half_traced(ks, srcs, par, letter, table):
    out, origin = [], []
    lead, gap = 0, False
    for j, ((f, v), src) in enumerate(zip(ks, srcs)):
        if (j & 1) == par:
            if out and not gap:
                g, u = out[-1]
                out[-1] = (table[g][f], u ^ v)
                origin[-1].append(src)
            else:
                if not out:
                    lead = 1 if gap else 0
                out.append((f, v))
                origin.append([src])
            gap = False
        elif SWAPS[v][letter]:
            gap = True
    if not out:
        return (1 if gap else 0, (), 0), []
    return (lead, tuple(out), 1 if gap else 0), origin


def ascendance_forest(w: Sequence, seq, F: FiniteGroup) -> AscendanceForest:
    require_nondegenerate(seq)
    i1, ks, i2 = split(prereduce(w, F, keep_trivial=True))
    nodes = [("", i) for i in range(len(ks))]
    edges = []
    leaf_sets = {}
    # each entry: word, vertex, top-level index sets per factor
    stack = [((i1, ks, i2), "", [frozenset([i]) for i in range(len(ks))])]
    while stack:
        (i1, ks, i2), y, tops = stack.pop()
        if len(ks) <= 1:
            if ks:
                leaf_sets[y] = tops[0]
            continue
        letter = seq.index(len(y))
        srcs = list(range(len(ks)))
        for t in (0, 1):
            par = (1 ^ i1) if t == 0 else i1
            child, origin = _half_traced(ks, srcs, par, letter, F.table)
            z = y + str(t)
            child_tops = []
            for i, group in enumerate(origin):
                nodes.append((z, i))
                for j in group:
                    edges.append(((z, i), (y, j)))
                child_tops.append(frozenset().union(*(tops[j] for j in group)))
            stack.append((child, z, child_tops))
    # components via union-find on the edge list
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps = len({find(n) for n in nodes})
    return AscendanceForest(nodes, edges, comps, leaf_sets)
