import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.algebra import (A, K, cyclic, factor_count, invert, is_prereduced, prereduce,
                               skeletons, split, symmetric3)
from growthlab.omega import OmegaSequence, parse_sequence, shift
from growthlab.treeauto import (RHO, SWAPS, DegenerateSequenceError, act_on_ray,
                                activity, activity_count, ascendance_forest, canonical_point,
                                canonical_portrait, equal, expand, inverted_orbit, is_identity,
                                minimal_tree, parse_portrait, portrait_root, rewrite,
                                serialize_portrait)

from . import oracles
from .conftest import as_word

Z2 = cyclic(2)
SEQ012 = OmegaSequence.periodic([0, 1, 2])
SEQS = [OmegaSequence.periodic([0, 1, 2]), OmegaSequence.periodic([0, 0, 1, 1, 2, 2]),
        OmegaSequence.periodic([2, 1, 0, 0]), parse_sequence("alpha:0.85")]
b, c, d = (K(0, 1), K(0, 2), K(0, 3))


def random_prereduced(rng, n_factors, order):
    ks = [K(rng.randrange(order), rng.randrange(4)) for _ in range(n_factors)]
    out = [A] if rng.random() < 0.5 else []
    for j, k in enumerate(ks):
        if j:
            out.append(A)
        out.append(k)
    if rng.random() < 0.5:
        out.append(A)
    return tuple(out)


def test_section_table():
    # u^b = (a, a, id), u^c = (a, id, a), u^d = (id, a, a)
    assert SWAPS[1] == (1, 1, 0) and SWAPS[2] == (1, 0, 1) and SWAPS[3] == (0, 1, 1)
    for v in (1, 2, 3):
        assert SWAPS[v] == tuple(int(oracles.ACTS[v][x]) for x in range(3))


def test_rewrite_examples():
    r = rewrite([K(1, 1)], 0, Z2)
    assert (r.w0, r.w1, r.rootswap) == ((A,), (K(1, 1),), False)
    r = rewrite([A, b, A], 0, Z2)
    assert (r.w0, r.w1, r.rootswap) == ((b,), (A,), False)
    r = rewrite([d], 0, Z2)
    assert (r.w0, r.w1, r.rootswap) == ((), (d,), False)


def test_expand_examples():
    w = (A, b, A, c)
    words, perm = expand(w, SEQ012, 0, Z2)
    assert words == [w] and perm == (0,)
    words, perm = expand(w, SEQ012, 1, Z2)
    r = rewrite(w, 0, Z2)
    assert words == [r.w0, r.w1] and perm == ((1, 0) if r.rootswap else (0, 1))
    words, perm = expand(w, SEQ012, 2, Z2)
    assert len(words) == 4
    assert sum(factor_count(u) for u in words) <= factor_count(w)
    expected = []
    for half in (r.w0, r.w1):
        sub = rewrite(half, 1, Z2)
        expected += [sub.w0, sub.w1]
    assert words == expected


@pytest.mark.parametrize("letter", [0, 1, 2])
def test_halving_exhaustive(letter):
    for w in skeletons(8):
        i1, ks, i2 = split(w)
        r = rewrite(w, letter, Z2)
        n0, n1 = factor_count(r.w0), factor_count(r.w1)
        n = len(ks)
        assert n0 + n1 <= n
        assert max(n0, n1) <= (n + 1) // 2
        assert is_prereduced(r.w0, keep_trivial=True) and is_prereduced(r.w1, keep_trivial=True)
        assert r.rootswap == bool(w.count(A) % 2)


def test_sections_match_vertex_action(rng):
    """x·w on level n equals (t xor σ)(x'·w_t) for x = t x'."""
    for seq in SEQS:
        om = seq.index
        sub = shift(seq, 1).index
        for _ in range(200):
            w = random_prereduced(rng, rng.randrange(0, 7), 2)
            r = rewrite(w, om(0), Z2)
            for bits in itertools.product((0, 1), repeat=5):
                img = bits
                for x in w:
                    img = oracles.vertex_image(img, x, om)
                t, rest = bits[0], bits[1:]
                half = r.w0 if t == 0 else r.w1
                for x in half:
                    rest = oracles.vertex_image(rest, x, sub)
                assert img == (t ^ r.rootswap,) + rest


def test_is_identity_examples():
    assert is_identity([b, c, d], SEQ012, Z2)
    assert not is_identity([A], SEQ012, Z2)
    assert not is_identity([A, b, A, b], SEQ012, Z2)
    r = rewrite([A, b, A, b], 0, Z2)
    assert not r.rootswap and (r.w0, r.w1) != ((), ())
    assert not is_identity([K(1, 0)], SEQ012, Z2)
    assert is_identity([K(1, 0)], SEQ012, Z2, ignore_fiber=True)


def test_equal_examples(rng):
    assert not equal([A], [b], SEQ012, Z2)
    assert equal([b, c], [d], SEQ012, Z2)
    for _ in range(200):
        w = as_word(oracles.random_word(rng, rng.randrange(30), 2))
        assert equal(w, prereduce(w, Z2), SEQ012, Z2)


def test_dihedral_relations():
    # (ad)^4 = id over (012)^∞: d acts as (1, d) or (a, d) along the sequence
    assert is_identity((A, d) * 4, SEQ012, Z2, ignore_fiber=True)
    for v in (b, c, d):
        assert is_identity((v, v), SEQ012, Z2)


def test_equal_matches_oracle(rng):
    for seq in SEQS[:3]:
        om = seq.index
        for _ in range(300):
            n = rng.randrange(1, 12)
            w1 = as_word(oracles.random_word(rng, n, 2))
            # half the time build a second representative of the same element
            if rng.random() < 0.5:
                w2 = w1 + (A, A, b, c, d) + invert((A, b, A), Z2) + (A, b, A)
            else:
                w2 = as_word(oracles.random_word(rng, n, 2))
            same = oracles.element_key(w1, om, Z2.table) == oracles.element_key(w2, om, Z2.table)
            assert equal(w1, w2, seq, Z2) == same


def test_portrait_examples():
    assert canonical_portrait((), SEQ012, Z2).is_identity()
    p = canonical_portrait((A,), SEQ012, Z2)
    assert p.root == (1, 0, 0, 0) and p.depth == 0
    p = canonical_portrait((A, b, A, c), SEQ012, Z2)
    assert p.depth == 1
    assert p.serialize() == "(0 [0 0 b 1] [1 0 c 0])"
    assert parse_portrait(p.serialize()).root == p.root
    r = rewrite((A, b, A, c), 0, Z2)
    assert equal(r.w0, (b, A), shift(SEQ012, 1), Z2) and equal(r.w1, (A, c), shift(SEQ012, 1), Z2)


def test_portrait_collapse_of_long_representative():
    # d(ad)^4 is d, so both portraits are the single leaf of d
    w = (d,) + (A, d) * 4
    assert portrait_root(w, SEQ012, Z2) == portrait_root((d,), SEQ012, Z2)


def test_portrait_parse_errors():
    for bad in ("(0 [0 0 b 1]", "[0 0 e 0]", "(0 [0 0 b 1] [0 0 c 0]) x", "x"):
        with pytest.raises((ValueError, KeyError, IndexError)):
            parse_portrait(bad)


def test_portrait_injective_exhaustive():
    """Portrait classes = oracle classes on every pre-reduced word with ≤ 4 factors."""
    letters = [K(f, v) for f in range(2) for v in range(4) if (f, v) != (0, 0)]
    words = [(), (A,)]
    for r in range(1, 5):
        for ks in itertools.product(letters, repeat=r):
            for i1 in (0, 1):
                for i2 in (0, 1):
                    w = ([A] if i1 else []) + [x for j, k in enumerate(ks)
                                               for x in ((A, k) if j else (k,))]
                    words.append(tuple(w) + ((A,) if i2 else ()))
    om = SEQ012.index
    memo = {}
    by_portrait, by_oracle = {}, {}
    for w in words:
        by_portrait.setdefault(portrait_root(w, SEQ012, Z2, memo), []).append(w)
        by_oracle.setdefault(oracles.element_key(w, om, Z2.table, depth=6), []).append(w)
    classes_p = {frozenset(v) for v in by_portrait.values()}
    classes_o = {frozenset(v) for v in by_oracle.values()}
    assert len(by_portrait) == len(by_oracle)
    assert classes_p == classes_o


def test_portrait_invariant_under_relations(rng):
    for seq in SEQS:
        for _ in range(200):
            w = as_word(oracles.random_word(rng, rng.randrange(1, 25), 2))
            u = rng.randrange(len(w) + 1)
            padded = w[:u] + (b, c, d) + (A, A) + w[u:]
            assert portrait_root(w, seq, Z2) == portrait_root(padded, seq, Z2)


def test_activity_examples():
    for f in range(2):
        for v in range(4):
            assert activity_count([K(f, v)], SEQ012, Z2) == 1
    assert activity_count([], SEQ012, Z2) == 0
    assert activity_count([A], SEQ012, Z2) == 0
    w = (A, K(1, 1), A, K(1, 2), A, K(0, 3), A, K(1, 1))
    rep = activity(w, SEQ012, Z2)
    assert rep.s == 3 == len(rep.active_leaves) == len(rep.inverted_orbit)


def test_activity_additive_and_orbit(rng):
    for seq in SEQS:
        sub = shift(seq, 1)
        for _ in range(500):
            w = as_word(oracles.random_word(rng, rng.randrange(1, 41), 2))
            w = prereduce(w, Z2, keep_trivial=True)
            s = activity_count(w, seq, Z2)
            r = rewrite(w, seq.index(0), Z2)
            if factor_count(w) >= 1:
                assert s == activity_count(r.w0, sub, Z2) + activity_count(r.w1, sub, Z2)
            assert s == oracles.orbit_size(w, seq.index)
            assert s == len(inverted_orbit(w, seq))
            assert s == ascendance_forest(w, seq, Z2).component_count


def test_minimal_tree_properties(rng):
    for seq in SEQS:
        for _ in range(300):
            w = prereduce(as_word(oracles.random_word(rng, rng.randrange(1, 50), 3)), cyclic(3),
                          keep_trivial=True)
            tree = minimal_tree(w, seq, cyclic(3))
            n = factor_count(w)
            assert set(tree.interior).isdisjoint(tree.leaves)
            # regular: each interior vertex has both children in the tree
            for z in tree.interior:
                for t in "01":
                    assert z + t in tree.interior or z + t in tree.leaves
            if n:
                assert tree.depth <= math.ceil(math.log2(n)) + 1
                assert 2 * tree.activity >= len(tree.leaves)
            assert len(tree.support_a_priori()) == tree.activity


def test_forest_partition(rng):
    for seq in SEQS:
        for _ in range(300):
            w = prereduce(as_word(oracles.random_word(rng, rng.randrange(1, 40), 2)), Z2,
                          keep_trivial=True)
            forest = ascendance_forest(w, seq, Z2)
            r = factor_count(w)
            parts = list(forest.leaf_sets.values())
            assert sum(len(p) for p in parts) == r
            assert set().union(*parts) == set(range(r)) if parts else r == 0
            # a forest: edges = nodes − components
            assert len(forest.edges) == len(forest.nodes) - forest.component_count
    assert ascendance_forest([K(1, 2)], SEQ012, Z2).component_count == 1


def test_ray_examples():
    for f in range(2):
        for v in range(4):
            assert act_on_ray(RHO, [K(f, v)], SEQ012) == RHO
    assert act_on_ray(RHO, [A], SEQ012) == "0"
    assert act_on_ray("0", [A], SEQ012) == RHO
    with pytest.raises(ValueError):
        act_on_ray("01", [A], SEQ012)
    assert canonical_point("0111") == "0"


def test_ray_action_properties(rng):
    for seq in SEQS:
        for _ in range(300):
            x = canonical_point("".join(rng.choice("01") for _ in range(rng.randrange(8))))
            w = as_word(oracles.random_word(rng, rng.randrange(20), 2))
            w2 = as_word(oracles.random_word(rng, rng.randrange(20), 2))
            y = act_on_ray(x, w, seq)
            assert y == canonical_point(y)
            assert act_on_ray(y, w2, seq) == act_on_ray(x, w + w2, seq)
            assert act_on_ray(y, invert(w, Z2), seq) == x
            expect = x
            for letter in w:
                expect = oracles.ray_image(expect, letter, seq.index)
            assert y == expect


def test_degenerate_rejected():
    for desc in ("periodic:0", "periodic:1", "blocks:(012)^2,0^inf"):
        s = parse_sequence(desc)
        with pytest.raises(DegenerateSequenceError):
            is_identity([b], s, Z2)
        with pytest.raises(DegenerateSequenceError):
            activity_count([b], s, Z2)


def test_activity_class_count_bound():
    """Elements of activity ≤ s number at most the constructive count of
    (tree, swaps, leaf words): Catalan(L−1)·2^(L−1)·(16|F|)^s·2^L, L ≤ 2s."""
    F = Z2
    counts = {}
    memo = {}
    for w in skeletons(5):
        for labels in itertools.product(range(2), repeat=factor_count(w)):
            it = iter(labels)
            word = tuple(x if x == A else K(next(it), x[1]) for x in w)
            s = activity_count(word, SEQ012, F)
            counts.setdefault(s, set()).add(portrait_root(word, SEQ012, F, memo))
    for s in range(1, 5):
        seen = len(set().union(*(counts.get(j, set()) for j in range(s + 1))))
        bound = sum(math.comb(2 * (L - 1), L - 1) // L * 2 ** (L - 1) * (16 * F.order) ** s
                    * 2 ** L for L in range(1, 2 * s + 1))
        assert seen <= bound


@settings(max_examples=150, deadline=None)
@given(st.lists(st.one_of(st.just(A), st.builds(K, st.integers(0, 5), st.integers(0, 3))),
                max_size=30),
       st.lists(st.integers(0, 2), min_size=2, max_size=6).filter(lambda r: len(set(r)) > 1))
def test_inverse_is_identity_property(w, run):
    F = symmetric3()
    seq = OmegaSequence.periodic(run)
    assert is_identity(tuple(w) + invert(w, F), seq, F)
    assert portrait_root(tuple(w) + invert(w, F), seq, F) == (0, 0, 0, 0)


def test_serialization_golden():
    w = (A, K(1, 1), A, K(1, 2), A, K(0, 3), A, K(1, 1))
    text = serialize_portrait(portrait_root(w, SEQ012, Z2))
    assert parse_portrait(text).serialize() == text
    assert text == serialize_portrait(portrait_root(w + (b, b), SEQ012, Z2))
