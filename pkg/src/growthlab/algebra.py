"""Fiber groups, the generating alphabet of the wreath product, and word pre-reduction.

A word is a tuple of letters.  A letter is either the root swap ``A`` or a
``K(f, v)``: the fiber element ``f`` (an index into a :class:`FiniteGroup`)
sitting at the base ray, times the Klein element ``v``.  Klein elements are
encoded 0=id, 1=b, 2=c, 3=d so that multiplication in V is bitwise xor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence, Union

A = "a"

KLEIN_NAMES = ("1", "b", "c", "d")
KLEIN_INDEX = {name: i for i, name in enumerate(KLEIN_NAMES)}
KLEIN_INDEX["id"] = 0
ID, B, C, D = 0, 1, 2, 3


class K(NamedTuple):
    f: int
    v: int

    def __str__(self):
        return f"f{self.f}.{KLEIN_NAMES[self.v]}"


Letter = Union[str, K]
Word = tuple


def klein_mul(v: int, w: int) -> int:
    return v ^ w


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table; element 0 is the identity."""

    table: tuple
    names: tuple = field(default=(), compare=False)
    label: str = field(default="", compare=False)
    inverses: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise ValueError("empty group table")
        rows = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", rows)
        for row in rows:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ValueError("Cayley table is not a Latin square")
        for j in range(n):
            if sorted(rows[i][j] for i in range(n)) != list(range(n)):
                raise ValueError("Cayley table is not a Latin square")
        if rows[0] != tuple(range(n)) or any(rows[i][0] != i for i in range(n)):
            raise ValueError("element 0 must be the identity")
        if n <= 64:
            for x, y, z in itertools.product(range(n), repeat=3):
                if rows[rows[x][y]][z] != rows[x][rows[y][z]]:
                    raise ValueError(f"table is not associative at {(x, y, z)}")
        inv = tuple(row.index(0) for row in rows)
        object.__setattr__(self, "inverses", inv)
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(n)))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self.inverses[x]

    def __str__(self):
        return self.label or f"table[{self.order}]"


def fg_mul(F: FiniteGroup, x: int, y: int) -> int:
    n = F.order
    if not (0 <= x < n and 0 <= y < n):
        raise IndexError(f"element index out of range for group of order {n}")
    return F.table[x][y]


def fg_inv(F: FiniteGroup, x: int) -> int:
    if not 0 <= x < F.order:
        raise IndexError(f"element index out of range for group of order {F.order}")
    return F.inverses[x]


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(table, label=f"Z{n}")


def _compose(p, q):
    # (p∘q)(i) = p(q(i)): q is applied first
    return tuple(p[q[i]] for i in range(len(q)))


def symmetric3() -> FiniteGroup:
    """Sym(3) on {1,2,3}; the product x*y is the composition x∘y (y applied first)."""
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    names = ("()", "(12)", "(23)", "(13)", "(123)", "(132)")
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(index[_compose(p, q)] for q in perms) for p in perms)
    return FiniteGroup(table, names=names, label="Sym3")


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), label="Z1")


def load_table(path) -> FiniteGroup:
    """Read a Cayley table file: the order n, then n rows of n indices."""
    text = Path(path).read_text().split()
    if not text:
        raise ValueError(f"{path}: empty table file")
    n = int(text[0])
    cells = [int(x) for x in text[1:]]
    if len(cells) != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {len(cells)}")
    table = tuple(tuple(cells[i * n:(i + 1) * n]) for i in range(n))
    return FiniteGroup(table, label=f"table:{path}")


def parse_fiber(spec: str) -> FiniteGroup:
    """``Z<n>``, ``Sym3`` or ``table:PATH``."""
    if spec.startswith("table:"):
        return load_table(spec[len("table:"):])
    if spec == "Sym3":
        return symmetric3()
    if spec.startswith("Z") and spec[1:].isdigit():
        return cyclic(int(spec[1:]))
    raise ValueError(f"unknown fiber group {spec!r}")


# -- words ------------------------------------------------------------------

def parse_word(text: str) -> Word:
    """Tokens ``a`` and ``f<i>.<v>`` with v in {1,b,c,d}, e.g. ``a f0.b a f1.d``."""
    letters = []
    for tok in text.split():
        if tok == "a":
            letters.append(A)
            continue
        if not tok.startswith("f") or "." not in tok:
            raise ValueError(f"bad letter {tok!r}")
        f, v = tok[1:].split(".", 1)
        if not f.isdigit() or v not in KLEIN_INDEX:
            raise ValueError(f"bad letter {tok!r}")
        letters.append(K(int(f), KLEIN_INDEX[v]))
    return tuple(letters)


def format_word(w: Sequence[Letter]) -> str:
    return " ".join("a" if x == A else str(x) for x in w)


def check_word(w: Sequence[Letter], F: FiniteGroup):
    for x in w:
        if x == A:
            continue
        if not isinstance(x, tuple) or not (0 <= x[0] < F.order) or not (0 <= x[1] < 4):
            raise ValueError(f"letter {x!r} is not over the alphabet of {F}")


def word_length(w: Sequence[Letter]) -> int:
    return len(w)


def factor_count(w: Sequence[Letter]) -> int:
    """|w|_pr: the number of K factors."""
    return sum(1 for x in w if x != A)


def invert(w: Sequence[Letter], F: FiniteGroup) -> Word:
    """Formal inverse.  a and v are involutions and φ_f commutes with v."""
    return tuple(A if x == A else K(F.inverses[x[0]], x[1]) for x in reversed(w))


def prereduce(w: Sequence[Letter], F: FiniteGroup, keep_trivial: bool = False) -> Word:
    """Merge adjacent factors, cancel a·a, and drop K(id, id).

    With ``keep_trivial`` merged factors equal to K(id, id) are kept: they are
    still factors for the purposes of activity.  The input letters are never
    dropped for being trivial in that mode either.
    """
    table = F.table
    out = []  # stays alternating between A and K letters
    for x in w:
        if x == A:
            if out and out[-1] == A:
                out.pop()
            else:
                out.append(x)
            continue
        f, v = x
        if not keep_trivial and f == 0 and v == 0:
            continue
        if out and out[-1] != A:
            g, u = out.pop()
            f, v = table[g][f], u ^ v
            if not keep_trivial and f == 0 and v == 0:
                continue
        out.append(K(f, v))
    return tuple(out)


def is_prereduced(w: Sequence[Letter], keep_trivial: bool = False) -> bool:
    for x, y in zip(w, w[1:]):
        if (x == A) == (y == A):
            return False
    if not keep_trivial and any(x != A and x[0] == 0 and x[1] == 0 for x in w):
        return False
    return True


def split(w: Sequence[Letter]):
    """Pre-reduced word -> (i1, factors, i2)."""
    n = len(w)
    i1 = 1 if n and w[0] == A else 0
    ks = tuple(x for x in w if x != A)
    if not ks:
        return (n % 2, (), 0)
    i2 = 1 if w[-1] == A else 0
    return (i1, ks, i2)


def join(i1: int, ks: Sequence[K], i2: int) -> Word:
    if not ks:
        return (A,) if (i1 + i2) % 2 else ()
    out = [A] if i1 else []
    for j, k in enumerate(ks):
        if j:
            out.append(A)
        out.append(K(*k))
    if i2:
        out.append(A)
    return tuple(out)


def skeletons(max_factors: int, klein=(0, 1, 2, 3), min_factors: int = 0):
    """All pre-reduced words a^i1 K1 a ... a Kr a^i2 with trivial fiber labels.

    Factors of type K(0, 0) are included: as skeletons they stand for any
    φ_f with f free.
    """
    yield from ((A,) * i for i in (0, 1) if min_factors == 0)
    for r in range(max(1, min_factors), max_factors + 1):
        for vs in itertools.product(klein, repeat=r):
            ks = tuple(K(0, v) for v in vs)
            for i1 in (0, 1):
                for i2 in (0, 1):
                    yield join(i1, ks, i2)
