"""Elements φg of the permutational wreath product F ≀_X G_ω."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import A, K, FiniteGroup, format_word, prereduce
from .treeauto import (RHO, act_on_ray, canonical_point, minimal_tree, portrait_root,
                       require_nondegenerate, serialize_portrait)


def g_word(w) -> tuple:
    """The image of w in G_ω: fiber labels forgotten, pre-reduced."""
    return tuple(x if x == A else K(0, x[1]) for x in w)


def g_inverse(g) -> tuple:
    # a, b, c, d are involutions
    return tuple(reversed(g))


def _pack(phi: dict) -> tuple:
    return tuple(sorted((p, f) for p, f in phi.items() if f != 0))


@dataclass(frozen=True, eq=False)
class WreathElement:
    """phi: sorted (point, f) pairs with f ≠ e; g: a pre-reduced word in a, b, c, d.

    Two instances are the same group element iff their :meth:`key` agree; the
    word ``g`` is only a representative.
    """

    phi: tuple
    g: tuple

    def phi_map(self) -> dict:
        return dict(self.phi)

    def support(self) -> set:
        return {p for p, _ in self.phi}

    def key(self, seq, F: FiniteGroup) -> tuple:
        return (portrait_root(self.g, seq, F), self.phi)

    def same(self, other: "WreathElement", seq, F: FiniteGroup) -> bool:
        return self.key(seq, F) == other.key(seq, F)

    def is_identity(self, seq, F: FiniteGroup) -> bool:
        return not self.phi and portrait_root(self.g, seq, F) == (0, 0, 0, 0)

    def to_json(self, seq, F: FiniteGroup) -> dict:
        return {
            "g": serialize_portrait(portrait_root(self.g, seq, F)),
            "g_word": format_word(self.g),
            "phi": [{"point": p, "f": f} for p, f in self.phi],
        }


def identity_element() -> WreathElement:
    return WreathElement((), ())


def letter_element(letter, F: FiniteGroup) -> WreathElement:
    if letter == A:
        return WreathElement((), (A,))
    f, v = letter
    return WreathElement(_pack({RHO: f}), (K(0, v),) if v else ())


def act_on_phi(g, phi: dict, seq) -> dict:
    """(g.φ)(x) = φ(x·g), so supp(g.φ) = supp(φ)·g⁻¹."""
    ginv = g_inverse(g)
    return {act_on_ray(y, ginv, seq): f for y, f in phi.items()}


def wr_mul(x: WreathElement, y: WreathElement, seq, F: FiniteGroup) -> WreathElement:
    """(φ₁g₁)(φ₂g₂) = (φ₁·(g₁.φ₂)) (g₁g₂)."""
    phi = x.phi_map()
    for p, f in act_on_phi(x.g, y.phi_map(), seq).items():
        phi[p] = F.table[phi.get(p, 0)][f]
    return WreathElement(_pack(phi), prereduce(x.g + y.g, F))


def wr_inv(x: WreathElement, seq, F: FiniteGroup) -> WreathElement:
    """(φg)⁻¹ = (g⁻¹.φ⁻¹) g⁻¹."""
    phi = {act_on_ray(p, x.g, seq): F.inverses[f] for p, f in x.phi}
    return WreathElement(_pack(phi), g_inverse(x.g))


def from_word(w, seq, F: FiniteGroup) -> WreathElement:
    """Boundary function from the active leaves of the minimal tree, φ(z·ε_z(1)·ρ) = f_z."""
    require_nondegenerate(seq)
    tree = minimal_tree(w, seq, F)
    phi = {}
    for z, (eps, k, _) in tree.leaves.items():
        if k is not None:
            phi[canonical_point(z + ("0" if eps else "1"))] = k[0]
    return WreathElement(_pack(phi), prereduce(g_word(w), F))


def fold_word(w, seq, F: FiniteGroup) -> WreathElement:
    """Letter-by-letter product; the oracle for :func:`from_word`."""
    x = identity_element()
    for letter in w:
        x = wr_mul(x, letter_element(letter, F), seq, F)
    return x


@dataclass(frozen=True)
class Generator:
    letter: object
    element: WreathElement
    trivial: bool  # the identity letter φ_e·id


def generating_set(F: FiniteGroup) -> list:
    """S_ω = {a} ⊔ {φ_f v}: 1 + 4|F| letters, the identity letter flagged."""
    out = [Generator(A, letter_element(A, F), False)]
    for v in range(4):
        for f in range(F.order):
            out.append(Generator(K(f, v), letter_element(K(f, v), F), f == 0 and v == 0))
    return out
