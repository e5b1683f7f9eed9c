from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from abelfree.linalg import intmat

matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))
square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n))


def _is_unimodular(A):
    return abs(intmat.det(A)) == 1


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_invariants(M):
    sd = intmat.smith(M)
    assert intmat.matmul(intmat.matmul(sd.U, sd.D), sd.V) == intmat.as_matrix(M)
    assert _is_unimodular(sd.U) and _is_unimodular(sd.V)
    n = len(sd.U)
    m = len(sd.V)
    assert intmat.matmul(sd.U, sd.Uinv) == intmat.identity(n)
    assert intmat.matmul(sd.V, sd.Vinv) == intmat.identity(m)
    diag = sd.diagonal
    for i in range(len(sd.D)):
        for j in range(len(sd.D[0])):
            if i != j:
                assert sd.D[i][j] == 0
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert len(nz) == sd.rank == intmat.rank(M)
    assert all(d == 0 for d in diag[sd.rank:])
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    # invariant factors agree with sympy's
    ref = sympy.Matrix(M)
    from sympy.matrices.normalforms import smith_normal_form
    snf = smith_normal_form(ref, domain=sympy.ZZ)
    ref_diag = sorted(abs(int(snf[i, i])) for i in range(min(snf.shape)))
    assert sorted(diag) == ref_diag


@settings(max_examples=100, deadline=None)
@given(square)
def test_cayley_hamilton_and_char_poly(M):
    cp = intmat.char_poly(M)
    n = len(M)
    assert intmat.poly_at_matrix(cp, M) == tuple(tuple(0 for _ in range(n)) for _ in range(n))
    x = sympy.Symbol("x")
    ref = sympy.Matrix(M).charpoly(x).all_coeffs()
    assert list(cp) == [int(c) for c in ref]


@settings(max_examples=100, deadline=None)
@given(matrices, st.data())
def test_diophantine_solutions(M, data):
    cols = len(M[0])
    x = data.draw(st.lists(st.integers(-4, 4), min_size=cols, max_size=cols))
    y = intmat.matvec(M, x)
    sol = intmat.solve_diophantine(M, y)
    assert sol is not None
    x0, basis = sol
    assert intmat.matvec(M, x0) == y
    for b in basis:
        assert intmat.matvec(M, b) == tuple(0 for _ in M)
    assert len(basis) == cols - intmat.rank(M)
    # the known solution lies in the coset: x - x0 is an integer combination of the basis
    diff = [a - b for a, b in zip(x, x0)]
    if basis:
        B = sympy.Matrix(basis).T
        coeffs = B.solve_least_squares(sympy.Matrix(diff))
        assert all(c.is_integer for c in coeffs)
        assert B * coeffs == sympy.Matrix(diff)
    else:
        assert not any(diff)


def test_diophantine_unsolvable():
    assert intmat.solve_diophantine([[2, 0], [0, 2]], [1, 0]) is None
    assert intmat.solve_diophantine([[1, 1], [1, 1]], [1, 2]) is None


def test_reduce_particular_example():
    assert intmat.reduce_particular((5, 1), [(2, 0)]) == (1, 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_reduce_particular_stays_in_coset(x0, b):
    if not any(b):
        return
    r = intmat.reduce_particular(x0, [b])
    diff = [p - q for p, q in zip(x0, r)]
    ratios = {Fraction(d, v) for d, v in zip(diff, b) if v}
    assert len(ratios) <= 1 and all(q.denominator == 1 for q in ratios)
    assert all(d == 0 for d, v in zip(diff, b) if v == 0)
    # no other lattice shift is closer (up to ties)
    norm = lambda v: sum(c * c for c in v)
    for s in (-1, 1):
        assert norm(r) <= norm([p + s * q for p, q in zip(r, b)])


def test_det_and_rank():
    assert intmat.det([[2, 1], [1, 1]]) == 1
    assert intmat.rank([[1, 2], [2, 4]]) == 1
    with pytest.raises(ValueError):
        intmat.char_poly([[1, 2]])
