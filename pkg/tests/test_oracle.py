import random

import pytest
from hypothesis import given, settings, strategies as st

from abelfree.oracle import (PowerWitness, find_abelian_power, find_kabelian_power, find_power_mod,
                             kabelian_equivalent, validate)
from abelfree.words import fixed_point_prefix


def enc(s):
    letters = sorted(set(s))
    return [letters.index(c) for c in s]


def test_abelian_examples():
    w = find_abelian_power(enc("abab"), 2)
    assert (w.start, w.period) == (0, 2)
    assert find_abelian_power(enc("abc"), 2) is None
    assert find_abelian_power(enc("abcacb"), 2).period == 3


def test_additive_example():
    F = [[0, 1]]
    w = find_power_mod([0, 1, 1, 0], F, 2, uniform=True)
    assert (w.start, w.period) == (0, 2)  # "01", "10" both sum to 1; start order beats "11"
    assert validate([0, 1, 1, 0], w, F=F, uniform=True)
    w = find_power_mod([0, 1, 1, 0], F, 2, uniform=True, max_period=1)
    assert (w.start, w.period) == (1, 1)


def test_nonuniform_mod():
    # values 1,2,3: blocks "c" and "ab" differ in length, not in sum
    F = [[1, 2, 3]]
    w = [2, 0, 1]
    wit = find_power_mod(w, F, 2, uniform=False)
    assert wit is not None and wit.cuts == (0, 1, 3) and validate(w, wit, F=F)
    assert find_power_mod(w, F, 2, uniform=True) is None


def test_kabelian_examples():
    w = find_kabelian_power(enc("abab"), 2, 2)
    assert (w.start, w.period) == (0, 2)
    a = enc("aabaab")
    assert find_kabelian_power(a, 2, 2).period == 1  # "aa" comes first
    w = find_kabelian_power(a, 2, 2, min_period=2)
    assert (w.start, w.period) == (0, 3)
    assert kabelian_equivalent("aab", "aab", 2) and not kabelian_equivalent("aab", "aba", 2)
    assert kabelian_equivalent("aba", "aab", 1)


@pytest.mark.parametrize("seed", range(5))
def test_kabelian_window_one_is_abelian(seed):
    rng = random.Random(seed)
    for _ in range(100):
        n = rng.randint(2, 4)
        w = [rng.randrange(n) for _ in range(rng.randint(1, 40))]
        k = rng.choice([2, 3])
        assert find_kabelian_power(w, 1, k) == _as_kab(find_abelian_power(w, k))


def _as_kab(wit):
    return None if wit is None else PowerWitness(wit.start, wit.period, wit.k, "kabelian", window=1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=40), st.sampled_from([2, 3]))
def test_invertible_group_map_is_abelian(w, k):
    F = [[1, 1, 2], [0, 1, 0], [1, 0, 0]]  # invertible over Q
    a = find_power_mod(w, F, k, uniform=True)
    b = find_abelian_power(w, k, n=3)
    assert (a is None) == (b is None)
    if a:
        assert (a.start, a.period) == (b.start, b.period)


def _planted(rng, n, k, p, pos, length):
    base = [rng.randrange(n) for _ in range(p)]
    blocks = [base] + [rng.sample(base, len(base)) for _ in range(k - 1)]
    w = [rng.randrange(n) for _ in range(length)]
    power = [x for b in blocks for x in b]
    return w[:pos] + power + w[pos:], power


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_planted_abelian_power_is_found(seed):
    rng = random.Random(seed)
    k, p = rng.choice([2, 3]), rng.randint(1, 6)
    pos = rng.randint(0, 20)
    w, _ = _planted(rng, 3, k, p, pos, 30)
    wit = find_abelian_power(w, k, p, p, n=3)
    assert wit is not None and wit.start <= pos and validate(w, wit)
    # restricted to exactly that window the planted power is the answer
    wit = find_abelian_power(w[pos:pos + k * p], k, p, p, n=3)
    assert (wit.start, wit.period) == (0, p)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_planted_kabelian_power_is_found(seed):
    rng = random.Random(seed)
    p = rng.randint(1, 6)
    base = [rng.randrange(2) for _ in range(p)]
    pos = rng.randint(0, 20)
    w = [rng.randrange(2) for _ in range(pos)] + base + base + [rng.randrange(2) for _ in range(10)]
    wit = find_kabelian_power(w, 3, 2, p, p)
    assert wit is not None and wit.start <= pos and validate(w, wit)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_planted_additive_power_is_found(seed):
    rng = random.Random(seed)
    F = [[0, 1, 3, 4]]
    k, p = 3, rng.randint(1, 5)
    pos = rng.randint(0, 15)
    w, _ = _planted(rng, 4, k, p, pos, 25)
    wit = find_power_mod(w, F, k, uniform=True, min_period=p, max_period=p)
    assert wit is not None and wit.start <= pos and validate(w, wit, F=F, uniform=True)


def test_validate_rejects_bad_witnesses():
    w = enc("abab")
    assert not validate(w, PowerWitness(0, 1, 2, "abelian"))
    assert not validate(w, PowerWitness(1, 2, 2, "abelian"))  # runs past the end
    assert validate(w, PowerWitness(0, 2, 2, "abelian"))


def test_h6_prefix_has_no_abelian_square(h6):
    w = fixed_point_prefix(h6, 10 ** 4)
    assert find_abelian_power(w, 2, n=6) is None


def test_g3_image_has_only_short_abelian_squares(h6, g3):
    w = g3.apply(fixed_point_prefix(h6, 3000))[:20000]
    assert len(w) == 20000
    assert find_abelian_power(w, 2, min_period=6, n=3) is None
    short = find_abelian_power(w, 2, max_period=5, n=3)
    assert short is not None and short.period <= 5 and validate(w, short)


@pytest.mark.slow
def test_two_abelian_scan(h6, g3, h2):
    w = h2.apply(g3.apply(fixed_point_prefix(h6, 1000)))[:20000]
    assert len(w) == 20000
    assert find_kabelian_power(w, 2, 2, min_period=61) is None
    wit = find_kabelian_power(w, 2, 2, min_period=60, max_period=60)
    assert (wit.start, wit.period) == (125, 60) and validate(w, wit)
