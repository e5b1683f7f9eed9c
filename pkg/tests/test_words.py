import pytest
from hypothesis import given, settings, strategies as st

from abelfree.words import (MethodInapplicable, Morphism, MorphismParseError, factors_of_length, factors_up_to,
                            fixed_point_prefix, image_factors_of_length, image_factors_up_to, is_primitive,
                            parikh, parse_morphism)
from conftest import FIXTURE_MORPHISMS, fixture_morphism


def test_parse_roundtrip_and_matrix():
    h = parse_morphism("# comment\nalphabet: a b\na -> a b\nb -> a\n")
    assert h.images == ((0, 1), (0,))
    assert h.matrix == ((1, 1), (1, 0))
    assert parse_morphism(h.to_mrf()) == h


def test_parse_multichar_tokens_and_target():
    h = parse_morphism("alphabet: x10 y\ntarget: 0 1\nx10 -> 0 1 1\ny -> 0\n")
    assert len(h.target) == 2 and h.images[0] == (0, 1, 1)
    assert not h.is_endomorphism


@pytest.mark.parametrize("text, line", [
    ("a -> a\n", 0),
    ("alphabet: a b\na -> a\n", 0),
    ("alphabet: a\na -> b\n", 2),
    ("alphabet: a\na -> a\na -> a\n", 3),
    ("alphabet: a\nnonsense\n", 2),
    ("alphabet: a a\n", 1),
])
def test_parse_errors(text, line):
    with pytest.raises(MorphismParseError) as exc:
        parse_morphism(text)
    assert exc.value.line == line


def test_erasing_rule_is_parsed_but_not_primitive():
    h = parse_morphism("alphabet: a b\na -> a b\nb ->\n")
    assert h.images[1] == ()
    assert is_primitive(h) == (False, None)


def test_parikh_and_apply():
    tm = fixture_morphism("thue_morse")
    assert tm.apply((0,), 3) == (0, 1, 1, 0, 1, 0, 0, 1)
    assert parikh(tm.apply((0,), 3), 2) == (4, 4)
    w = (0, 1, 1)
    assert tuple(sum(tm.matrix[a][b] * c for b, c in enumerate(parikh(w, 2))) for a in range(2)) \
        == parikh(tm.apply(w), 2)


@pytest.mark.parametrize("name", FIXTURE_MORPHISMS)
def test_fixtures_are_primitive(name):
    assert is_primitive(fixture_morphism(name))[0]


def test_reducible_morphism_is_not_primitive():
    h = Morphism.from_strings({"a": "ab", "b": "b"})
    assert is_primitive(h) == (False, None)
    with pytest.raises(MethodInapplicable):
        factors_of_length(h, 3)


def test_compose_and_power():
    tm = fixture_morphism("thue_morse")
    assert tm.power(3).images[0] == tm.apply((0,), 3)
    h6, g3 = fixture_morphism("h6"), fixture_morphism("g3")
    gh = g3.compose(h6)
    assert gh.images[0] == g3.apply(h6.images[0])
    assert gh.max_length == 30


def test_fixed_point_prefix(h6, h8):
    w = fixed_point_prefix(h6, 50)
    assert w[:3] == (0, 2, 4) and h6.apply(w)[:50] == w
    w8 = fixed_point_prefix(h8, 200)
    assert h8.power(2).apply(w8)[:200] == w8


def test_factors_thue_morse_counts():
    tm = fixture_morphism("thue_morse")
    # factor complexity of the Thue-Morse word
    assert [len(factors_of_length(tm, n)) for n in range(1, 9)] == [2, 4, 6, 10, 12, 16, 20, 22]


@pytest.mark.parametrize("name", ["h6", "h8", "thue_morse", "f_cassaigne"])
def test_factor_enumeration_is_complete_on_prefix(name):
    h = fixture_morphism(name)
    w = fixed_point_prefix(h, 4000)
    facs = factors_of_length(h, 12)
    seen = {w[i:i + 12] for i in range(len(w) - 11)}
    assert seen <= facs
    # factors are closed under taking factors
    short = factors_of_length(h, 11)
    assert {u[1:] for u in facs} | {u[:-1] for u in facs} == short
    assert factors_up_to(h, 5) == {u for n in range(1, 6) for u in factors_of_length(h, n)}


def test_image_factors(h6, g3):
    w = g3.apply(fixed_point_prefix(h6, 3000))
    facs = image_factors_of_length(g3, h6, 15)
    assert {w[i:i + 15] for i in range(len(w) - 14)} <= facs
    assert {u for u in image_factors_up_to(g3, h6, 15) if len(u) == 15} == facs


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=30))
def test_parikh_is_additive(word):
    half = len(word) // 2
    a, b, c = parikh(word[:half], 4), parikh(word[half:], 4), parikh(word, 4)
    assert tuple(x + y for x, y in zip(a, b)) == c
