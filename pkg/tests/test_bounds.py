from fractions import Fraction

import numpy as np
import pytest

from abelfree.bounds import CosetEnumerator, choose_power, contracting_bounds, filter_mask, in_filter
from abelfree.cli import fixtures_dir
from abelfree.linalg.intmat import smith
from abelfree.linalg.spectral import parse_jordan_override, spectral_data
from abelfree.words import factors_up_to, parikh
from conftest import FIXTURE_MORPHISMS, fixture_morphism


def h6_profile(h6, jordan=True, power=2):
    ov = parse_jordan_override((fixtures_dir() / "h6.jordan").read_text()) if jordan else None
    return contracting_bounds(h6, spectral_data(h6.matrix, jordan_override=ov), power)


def test_h6_bounds_with_companion_basis(h6):
    p = h6_profile(h6)
    assert [p.rstar[i] for i in p.indices] == [Fraction(4), Fraction(4, 3), Fraction(4, 3)]


def test_h6_bounds_default_basis(h6):
    p = h6_profile(h6, jordan=False)
    assert [p.rstar[i] for i in p.indices] == [Fraction(4), Fraction(2), Fraction(2)]
    assert all(p.rstar[i] == 2 * p.m[i] for i in p.indices)


@pytest.mark.parametrize("power,lo,hi", [(1, 5.96, 5.97), (20, 1.4341, 1.4395)])
def test_h8_factor_bound(h8, power, lo, hi):
    p = contracting_bounds(h8, spectral_data(h8.matrix), power)
    assert lo <= float(p.m[0]) <= hi
    assert p.m[0] == p.m[1]  # conjugate rows share the bound


def test_choose_power_never_worse(h8):
    sd = spectral_data(h8.matrix)
    best = choose_power(h8, sd)
    base = contracting_bounds(h8, sd, 2)
    assert best.power >= 2
    assert all(best.rstar[i] <= base.rstar[i] for i in (0, 2))


@pytest.mark.parametrize("name", FIXTURE_MORPHISMS)
def test_factor_bounds_hold_on_factors(name):
    h = fixture_morphism(name)
    sd = spectral_data(h.matrix)
    p = contracting_bounds(h, sd, 2)
    facs = factors_up_to(h, 30)
    vecs = np.array(sorted({parikh(w, h.n) for w in facs}), dtype=np.int64)
    for i in p.indices:
        vals = [abs(complex(sd.functional(i).value_float(tuple(int(x) for x in v)))) for v in vecs]
        assert max(vals) <= float(p.m[i]) * (1 + 1e-12)
    # every gap between two factors of equal length passes the filter
    by_len = {}
    for w in facs:
        by_len.setdefault(len(w), set()).add(parikh(w, h.n))
    gaps = []
    for group in by_len.values():
        group = sorted(group)
        gaps += [tuple(a - b for a, b in zip(u, v)) for u in group for v in group]
    gaps = np.array(gaps, dtype=np.int64)
    assert filter_mask(gaps, p).all()
    assert in_filter([tuple(int(x) for x in g) for g in gaps[:200]], p)


@pytest.mark.parametrize("x0", [(1, 0, 0, 0, 0, 0), (0, 0, 1, -1, 0, 0), (2, 0, 0, 0, 0, -1), (1, 1, 1, 0, 0, 0)])
def test_coset_enumerator_matches_brute_force(h6, g3, x0):
    p = h6_profile(h6)
    basis = smith(g3.matrix).kernel_basis
    enum = CosetEnumerator(tuple(basis), p)
    X = {tuple(int(v) for v in x) for x in enum.candidates(x0)}
    # search a coefficient box three times wider than the certified radius
    R = 3 * enum.radius(x0) + 2
    B = np.array(basis, dtype=np.int64).T
    rng = np.arange(-R, R + 1)
    Z = np.stack(np.meshgrid(*([rng] * B.shape[1]), indexing="ij"), axis=-1).reshape(-1, B.shape[1])
    pts = np.array(x0, dtype=np.int64)[None, :] + Z @ B.T
    brute = {tuple(int(v) for v in x) for x in pts[filter_mask(pts, p)]}
    assert X == brute


def test_kernel_too_large_is_inapplicable(h6):
    from abelfree.words import MethodInapplicable
    basis = smith([[1, 1, 1, 1, 1, 1], [1, 0, 0, 0, 0, 0]]).kernel_basis
    with pytest.raises(MethodInapplicable):
        CosetEnumerator(tuple(basis), h6_profile(h6))
