from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from abelfree.linalg import numfield as nf
from abelfree.linalg import poly as P
from abelfree.linalg.interval import CInterval, RatInterval, sqrt_lower, sqrt_upper
from abelfree.linalg.psd import interval_cholesky_ok, min_eig_lower_bound
from abelfree.linalg.spectral import ModulusOneError, parse_jordan_override, pjp_contains, spectral_data
from conftest import fixture_morphism

fracs = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@settings(max_examples=100, deadline=None)
@given(fracs, fracs, fracs, fracs)
def test_interval_arithmetic_contains_point_results(a, b, c, d):
    x = RatInterval(min(a, b), max(a, b))
    y = RatInterval(min(c, d), max(c, d))
    for p in (a, b):
        for q in (c, d):
            assert (x + y).contains(p + q)
            assert (x - y).contains(p - q)
            assert (x * y).contains(p * q)
            if not y.contains_zero():
                assert (x / y).contains(p / q)
    assert x.square().contains(a * a) and x.abs().contains(abs(a))


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1000, max_denominator=1000))
def test_sqrt_bounds(q):
    lo, hi = sqrt_lower(q, 40), sqrt_upper(q, 40)
    assert lo * lo <= q <= hi * hi
    assert hi - lo <= Fraction(2, 1 << 40)


def test_complex_interval_modulus():
    z = CInterval(RatInterval(3), RatInterval(4))
    assert z.abs_lower() <= 5 <= z.abs_upper()
    assert (z * z.conjugate()).re.contains(25)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6))
def test_sturm_counts_match_sympy(coeffs):
    if coeffs[-1] == 0 or all(c == 0 for c in coeffs[:-1]):
        return
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    if sympy.degree(sympy.gcd(poly, poly.diff(x))) > 0:
        return
    p = P.trim(coeffs)
    ref = len(set(sympy.real_roots(poly)))
    ivs = P.isolate_real_roots(p)
    assert len(ivs) == ref
    for lo, hi in ivs:
        assert P.count_real_roots(p, lo, hi) == 1


def test_roots_of_x2_minus_3():
    roots = P.roots_of_irreducible([-3, 0, 1], 100)
    assert [r.is_real for r in roots] == [True, True]
    lo, hi = roots[1].box.re.lo, roots[1].box.re.hi
    assert lo * lo <= 3 <= hi * hi and hi - lo <= Fraction(1, 1 << 100)


def test_weierstrass_disks_contain_roots():
    # x^4 + x + 1 has two complex-conjugate pairs
    q = [1, 1, 0, 0, 1]
    roots = P.roots_of_irreducible(q, 80)
    assert sum(r.is_real for r in roots) == 0
    ref = [complex(z) for z in mpmath.polyroots([1, 0, 0, 1, 1], maxsteps=200)]
    for r in roots:
        assert min(abs(r.box.mid - z) for z in ref) < 1e-12
        assert r.box.width <= Fraction(1, 1 << 79)


def test_number_field_inverse():
    K = nf.NumberField([-3, 0, 1])  # Q(sqrt 3)
    a = (Fraction(2), Fraction(1))
    assert K.mul(a, K.inv(a)) == K.one
    th = K.theta
    assert K.mul(th, th) == (Fraction(3), Fraction(0))


def test_psd_certificate():
    G = [[RatInterval(2), RatInterval(1)], [RatInterval(1), RatInterval(2)]]
    t = min_eig_lower_bound(G)
    assert 0 < t <= 1
    assert interval_cholesky_ok(G, Fraction(99, 100))
    assert not interval_cholesky_ok(G, Fraction(101, 100))


def test_h6_spectrum(h6):
    sd = spectral_data(h6.matrix)
    sizes = sorted((round(b.root.approx.real, 6), b.size) for b in sd.blocks)
    assert sizes == [(-1.732051, 1), (0.0, 1), (0.0, 2), (1.732051, 1), (3.0, 1)]
    assert sd.contracting_indices == (0, 1, 2)
    assert pjp_contains(sd)


def test_h6_fixture_basis_is_accepted(h6):
    from abelfree.cli import fixtures_dir
    ov = parse_jordan_override((fixtures_dir() / "h6.jordan").read_text())
    sd = spectral_data(h6.matrix, jordan_override=ov)
    assert pjp_contains(sd)
    # left rows pair with the supplied columns: R·P = I on the block
    M = np.array(h6.matrix, dtype=object)
    for i in sd.contracting_indices:
        row = [e[0] for e in sd.exact_row(i)]
        lhs = [sum(row[a] * M[a][b] for a in range(6)) for b in range(6)]
        nxt = [e[0] for e in sd.exact_row(i + 1)] if sd.block_range(i)[1] > i else [0] * 6
        assert lhs == nxt  # r_i M = 0·r_i + r_{i+1}


def test_bad_override_is_rejected(h6):
    with pytest.raises(ValueError):
        spectral_data(h6.matrix, jordan_override={Fraction(0): [[[1, 0, 0, 0, 0, 0]], [[0, 1, 0, 0, 0, 0]],
                                                               [[0, 0, 1, 0, 0, 0]]]})


def test_thue_morse_spectrum():
    sd = spectral_data(fixture_morphism("thue_morse").matrix)
    vals = sorted(b.root.approx.real for b in sd.blocks)
    assert vals == [0.0, 2.0] and all(b.size == 1 for b in sd.blocks)


def test_h8_spectrum(h8):
    sd = spectral_data(h8.matrix)
    assert len(sd.contracting_indices) == 4
    lam = sd.eigenvalue(0).approx
    assert abs(lam.real - 0.33292) < 1e-5 and abs(abs(lam.imag) - 0.67077) < 1e-5
    assert pjp_contains(sd)


def test_f_char_poly_roots(h6):
    f = fixture_morphism("f_cassaigne")
    sd = spectral_data(f.matrix)
    ref = sorted(np.linalg.eigvals(np.array(f.matrix, dtype=float)), key=lambda z: (z.real, z.imag))
    got = sorted((b.root.approx for b in sd.blocks), key=lambda z: (z.real, z.imag))
    assert np.allclose(ref, got, atol=1e-9)


def test_modulus_one_is_reported():
    with pytest.raises(ModulusOneError):
        spectral_data([[0, 1], [1, 0]])
    sd = spectral_data([[0, 1], [1, 0]], strict=False)
    assert sd.unresolved
