import itertools

import numpy as np
import pytest

from abelfree.applications import (GroupMap, GroupMapParseError, additive_candidates, decide_additive,
                                   decide_long_abelian, effective_matrix, kernel_enumerator,
                                   lattice_kernel, long_abelian_candidates, parse_gmap)
from abelfree.bounds import contracting_bounds
from abelfree.cli import load_gmap
from abelfree.linalg.spectral import spectral_data
from abelfree.oracle import find_abelian_power, find_power_mod, validate
from abelfree.templates import EPS, DecideConfig, push_forward, realizes, trivial_template
from abelfree.words import Morphism, MethodInapplicable, factors_up_to, fixed_point_prefix
from conftest import FIXTURE_MORPHISMS, fixture_morphism


def profile(h, power=2):
    return contracting_bounds(h, spectral_data(h.matrix), power)


def test_parse_gmap():
    g = parse_gmap("# comment\ndim: 2\na -> 1 0\nb -> 0 1  # trailing\n")
    assert g.dim == 2 and g.values == {"a": (1, 0), "b": (0, 1)}
    assert g.matrix(["b", "a"]) == [[0, 1], [1, 0]]


@pytest.mark.parametrize("text,line", [
    ("a -> 1", 1),
    ("dim: 2\na -> 1", 2),
    ("dim: x", 1),
    ("dim: 1\na b -> 1", 2),
    ("dim: 1\na -> 1\na -> 2", 3),
    ("dim: 1\na -> q", 2),
    ("hello", 1),
])
def test_gmap_errors(text, line):
    with pytest.raises(GroupMapParseError) as e:
        parse_gmap(text)
    assert e.value.line == line


def test_gmap_missing_letter():
    with pytest.raises(ValueError):
        parse_gmap("dim: 1\na -> 1").matrix(["a", "b"])


def test_letter_values():
    assert GroupMap.letter_values(["0", "3"]).matrix(["0", "3"]) == [[0, 3]]
    with pytest.raises(ValueError):
        GroupMap.letter_values(["a"])


def test_effective_matrix():
    assert effective_matrix([[0, 1, 3]], True) == [[1, 1, 1], [0, 1, 3]]
    assert effective_matrix([[1, 1, 1], [0, 1, 3]], True) == [[1, 1, 1], [0, 1, 3]]
    assert effective_matrix([[0, 1, 3]], False) == [[0, 1, 3]]


def test_phi_z2_has_length_row(h6):
    F = load_gmap("phi_z2").matrix(h6.source.letters)
    assert F[0] == [1] * 6
    assert effective_matrix(F, True) == F


def test_phi_z2_candidates_in_kernel(h6):
    F = load_gmap("phi_z2").matrix(h6.source.letters)
    cand = additive_candidates(h6, F, 2, profile(h6))
    assert trivial_template(2, 6) in cand
    for t in cand:
        assert all(b == EPS for b in t.borders)
        for d in t.gaps:
            assert not (np.array(F) @ np.array(d)).any()


def test_injective_map_gives_only_trivial_template(h6):
    cand = additive_candidates(h6, np.eye(6, dtype=int).tolist(), 3, profile(h6))
    assert cand == [trivial_template(3, 6)]


@pytest.mark.parametrize("name", FIXTURE_MORPHISMS)
def test_length_only_map_is_realized(name):
    h = fixture_morphism(name)
    res = decide_additive(h, [[1] * h.n], 2, uniform=False)
    assert res.verdict == "REALIZED"
    r = res.witness
    assert r.check()
    w = list(r.word)
    b = (r.blocks[0][0], r.blocks[1][0], r.blocks[1][1])
    assert len(w[b[0]:b[1]]) == len(w[b[1]:b[2]])


def test_thue_morse_additive_squares():
    h = fixture_morphism("thue_morse")
    res = decide_additive(h, [[0, 1]], 2, uniform=True)
    assert res.verdict == "REALIZED"
    assert find_power_mod(list(res.witness.word), [[1, 1], [0, 1]], 2, uniform=True) is not None


def test_kernel_meeting_expanding_space_is_inapplicable(h6):
    with pytest.raises(MethodInapplicable):
        kernel_enumerator([[1] * 6], profile(h6))


def test_lattice_kernel(g3):
    K = lattice_kernel(g3.matrix)
    assert len(K) == 3
    assert not (np.array(g3.matrix) @ np.array(K).T).any()


def test_g3_candidates(h6, g3):
    cand = long_abelian_candidates(h6, g3, 2, profile(h6))
    assert 0 < len(cand) <= 16214
    # every candidate pushes forward to the trivial template over g3's target
    t = trivial_template(2, 3)
    facs = sorted(factors_up_to(h6, 8))
    hits = 0
    for tp, choice in itertools.islice(cand.items(), 300):
        for w in facs:
            r = realizes(w, tp)
            if r is not None:
                img = push_forward(r, t, choice, g3)
                assert img.check()
                hits += 1
                break
    assert hits > 0


def test_g3_short_period_realized(h6, g3):
    res = decide_long_abelian(h6, g3, 2, 1)
    assert res.verdict == "REALIZED"
    w = list(res.witness_word)
    assert validate(w, res.witness) and res.witness.period >= 1


def test_identity_outer_reduces_to_decide():
    tm = fixture_morphism("thue_morse")
    ident = Morphism.from_strings({"0": "0", "1": "1"})
    assert decide_long_abelian(tm, ident, 2, 1).verdict == "REALIZED"


def test_identity_outer_on_square_free_fixture(h6):
    ident = Morphism.from_strings({a: a for a in h6.source.letters})
    res = decide_long_abelian(h6, ident, 2, 1, DecideConfig(power=2))
    assert res.verdict == "AVOIDED"


def test_erasing_outer_morphism():
    """An outer map that erases a letter: candidates are exactly the realizable splits found by brute force."""
    h = Morphism.from_strings({"a": "ab", "b": "ca", "c": "a"})
    g = Morphism.from_strings({"a": "x", "b": "", "c": "y"}, target=["x", "y"])
    prof = profile(h)
    cand = long_abelian_candidates(h, g, 2, prof)
    assert cand
    # every short nondegenerate realization of the trivial template in g(Fact(h)) comes from a candidate
    t = trivial_template(2, 2)
    for w in sorted(factors_up_to(h, 12)):
        img = g.apply(w)
        if not img:
            continue
        for tp in cand:
            r = realizes(w, tp)
            if r is not None:
                assert push_forward(r, t, cand[tp], g).check()


def test_min_period_above_outer_length_iterates():
    tm = fixture_morphism("thue_morse")
    ident = Morphism.from_strings({"0": "0", "1": "1"})
    res = decide_long_abelian(tm, ident, 2, 2)
    assert res.iterations == 1 and res.outer.max_length == 2
    assert res.verdict == "REALIZED" and res.witness.period >= 2
    assert validate(list(res.witness_word), res.witness)


@pytest.mark.parametrize("j", [1, 2])
def test_hypothesis_preserved_under_composition(h6, g3, j):
    prof = profile(h6)
    kernel_enumerator(g3.matrix, prof)
    kernel_enumerator(g3.compose(h6.power(j)).matrix, prof)


def test_g3_image_morphism_matches_composition(h6, g3):
    w = fixed_point_prefix(h6, 200)
    assert g3.apply(h6.apply(w)) == g3.compose(h6).apply(w)
    assert find_abelian_power(g3.apply(w), 2, n=3) is not None
