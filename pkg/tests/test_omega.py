import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.certificates import alpha0
from growthlab.omega import (NotRotatingError, OmegaSequence, SwitchSchedule, alpha_from_lambda,
                             blocks_sequence, build_alpha_beta_sequence, build_alpha_sequence,
                             build_period_sequence, is_rotating, lambda_from_alpha,
                             parse_sequence, prefix, rotation_count, shift)

FIXTURES = [
    "periodic:012",
    "periodic:001122",
    "blocks:0^3,(012)^inf",
    "alpha:0.85",
    "alphabeta:0.8,0.9",
    "abgd:0.8,0.85,0.9,0.78",
]


def test_prefix_examples():
    assert prefix(OmegaSequence.periodic([0, 1, 2]), 4) == [0, 1, 2, 0, 1]
    assert prefix(blocks_sequence([("0", 2), ("012", 1)]), 4) == [0, 0, 0, 1, 2]
    s = parse_sequence("alpha:0.9")
    assert prefix(s, 0) == [s.index(0)]
    with pytest.raises(ValueError):
        prefix(s, -1)


def test_shift_examples():
    s = OmegaSequence.periodic([0, 1, 2])
    assert shift(s, 1).prefix(11) == OmegaSequence.periodic([1, 2, 0]).prefix(11)
    assert shift(shift(s, 1), 1).prefix(20) == shift(s, 2).prefix(20)
    t = parse_sequence("blocks:0^3,(012)^inf")
    assert shift(t, 3).prefix(30) == s.prefix(30)
    with pytest.raises(ValueError):
        shift(s, 0)


@pytest.mark.parametrize("desc", FIXTURES)
def test_prefix_shift_coherence(desc):
    s = parse_sequence(desc)
    full = s.prefix(130)
    for k in range(1, 65):
        sk = shift(s, k)
        for j in (0, 1, 7, 64):
            assert sk.prefix(j) == full[k:k + j + 1]


@pytest.mark.parametrize("desc", FIXTURES)
def test_description_round_trip(desc):
    s = parse_sequence(desc)
    again = parse_sequence(s.description)
    assert again.description == s.description
    assert again.prefix(200) == s.prefix(200)
    shifted = shift(s, 5)
    assert parse_sequence(shifted.description).prefix(100) == shifted.prefix(100)


def test_index_deterministic():
    s = parse_sequence("alphabeta:0.8,0.9")
    first = [s.index(i) for i in range(500)]
    assert [s.index(i) for i in reversed(range(500))][::-1] == first


def test_rotation_count_examples():
    assert (rotation_count([0, 1, 2, 0]).q, rotation_count([0, 1, 2, 0]).p) == (3, 3)
    assert (rotation_count([0, 0, 0]).q, rotation_count([0, 0, 0]).p) == (0, 2)
    st_ = rotation_count([0, 0, 1, 2])
    assert (st_.q, st_.p, st_.ratio) == (2, 3, Fraction(2, 3))
    with pytest.raises(NotRotatingError) as info:
        rotation_count([0, 2, 0])
    assert info.value.stats.q == 1 and info.value.stats.invalid == 1
    lenient = rotation_count([0, 2, 0], strict=False)
    assert (lenient.q, lenient.invalid) == (1, 1)


def test_alpha_lambda_examples():
    assert alpha_from_lambda(1) == pytest.approx(0.76743, abs=1e-5)
    assert alpha_from_lambda(1) == pytest.approx(alpha0(), abs=1e-15)
    assert alpha_from_lambda(0) == 1.0
    assert alpha_from_lambda(0.5) == pytest.approx(0.8684, abs=1e-4)
    with pytest.raises(ValueError):
        alpha_from_lambda(1.5)
    with pytest.raises(ValueError):
        lambda_from_alpha(0.5)


def test_alpha_lambda_round_trip():
    a0 = alpha0()
    for i in range(1000):
        a = a0 + (1 - a0) * i / 999
        assert abs(alpha_from_lambda(lambda_from_alpha(a)) - a) <= 1e-12


def test_alpha0_gives_012():
    s, sched = build_alpha_sequence(alpha0())
    assert sched.lam == 1
    assert s.prefix(60) == OmegaSequence.periodic([0, 1, 2]).prefix(60)
    assert all(sched.block(i)[0] == 0 for i in range(1, 20))


@pytest.mark.parametrize("alpha", [alpha0(), 0.78, 0.8, 0.8684, 0.9, 0.95, 1.0])
def test_alpha_schedule_constraint(alpha):
    s, sched = build_alpha_sequence(alpha)
    lam = sched.lam
    for i in range(1, 60):
        m, n = sched.block(i)
        assert m >= 0 and n >= 1
        assert sched.satisfies_constraint(i)
        assert 3 * n * (1 - lam) >= lam * m
        # the block window itself carries at least the target ratio
        start = sched.end(i - 1) if i > 1 else 0
        # the block's p_i letters plus the first letter of the next block
        window = s.prefix(sched.end(i))[start:]
        stats = rotation_count(window)
        assert stats.p == m + 3 * n and stats.q == 3 * n
        assert stats.ratio >= lam
    assert is_rotating(s.prefix(3000))
    assert len(set(s.prefix(3000)[-300:])) > 1


def test_alpha_8684_blocks():
    _, sched = build_alpha_sequence(0.8684)
    for i in range(1, 30):
        m, n = sched.block(i)
        assert 3 * n >= m * sched.lam / (1 - sched.lam)
    assert float(sched.lam) == pytest.approx(0.5, abs=1e-3)


def test_alpha_ratio_tends_to_lambda():
    _, sched = build_alpha_sequence(0.85)
    lam = float(sched.lam)
    m, n = sched.block(10 ** 6)
    assert abs(3 * n / (m + 3 * n) - lam) < 0.1
    assert m > sched.block(1)[0]


def test_alpha_beta_examples():
    a = build_alpha_beta_sequence(0.85, 0.85)
    b, _ = build_alpha_sequence(0.85)
    assert a.prefix(400) == b.prefix(400)
    s = build_alpha_beta_sequence(0.8, 0.9, SwitchSchedule((4, 9)))
    sa, _ = build_alpha_sequence(0.8)
    sb, _ = build_alpha_sequence(0.9)
    assert s.prefix(9) == sa.prefix(4) + sb.prefix(9)[5:]
    assert set(s.prefix(500)) <= {0, 1, 2}
    with pytest.raises(ValueError):
        SwitchSchedule((4, 4))
    with pytest.raises(ValueError):
        build_alpha_beta_sequence(0.9, 0.8)


def test_period_sequence_examples():
    sched = SwitchSchedule((5, 20, 70))
    p = build_period_sequence(0.8, 0.9, 0.9, 0.8, sched)
    q = build_alpha_beta_sequence(0.8, 0.9, sched)
    assert p.prefix(300) == q.prefix(300)
    one = build_period_sequence(0.8, 0.85, 0.9, 0.78, SwitchSchedule((50,)))
    d, _ = build_alpha_sequence(0.78)
    assert one.prefix(50) == d.prefix(50)
    with pytest.raises(ValueError):
        build_period_sequence(0.8, 0.8, 0.9, 0.78)


def test_default_switch_windows():
    s = SwitchSchedule()
    # windows [0,2], [3,4], [5,8], [9,16], ...
    assert [s.window(i) for i in range(10)] == [0, 0, 0, 1, 1, 2, 2, 2, 2, 3]


def test_parse_errors():
    for bad in ("periodic:", "periodic:013", "blocks:0^x", "gamma:1", "periodic:01;switch=2^i",
                "alpha:0.8;foo=1", "blocks:0^inf,(012)^2"):
        with pytest.raises(ValueError):
            parse_sequence(bad)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=8), st.integers(1, 40))
def test_periodic_shift_property(run, k):
    s = OmegaSequence.periodic(run)
    assert shift(s, k).prefix(30) == [run[(i + k) % len(run)] for i in range(31)]


def test_schedule_thread_safety():
    import threading

    s, sched = build_alpha_sequence(0.82)
    out = {}

    def worker(j):
        out[j] = [s.index(i) for i in range(j, 4000, 7)]

    threads = [threading.Thread(target=worker, args=(j,)) for j in range(7)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    fresh, _ = build_alpha_sequence(0.82)
    ref = fresh.prefix(4000)
    for j, vals in out.items():
        assert vals == ref[j:4000:7]
