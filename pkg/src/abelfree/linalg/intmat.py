"""Exact integer matrices: Smith normal form, Diophantine systems, kernels.

Matrices are tuples of row tuples of Python ints.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


def as_matrix(rows) -> tuple:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if m and len({len(r) for r in m}) != 1:
        raise ValueError("ragged matrix")
    return m


def shape(a) -> tuple:
    return (len(a), len(a[0]) if a else 0)


def identity(n: int) -> tuple:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(a) -> tuple:
    return tuple(zip(*a)) if a else ()


def matmul(a, b) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def det(a) -> Fraction:
    """Determinant by exact Gaussian elimination over the rationals."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return d


def rank(a) -> int:
    """Rank over the rationals."""
    if not a:
        return 0
    m = [[Fraction(x) for x in row] for row in a]
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            f = m[i][c] / m[r][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


@dataclass(frozen=True)
class SmithData:
    """``M = U·D·V`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``Uinv`` and ``Vinv`` are carried along so that solving needs no
    inversion.  ``kernel_basis`` lists the columns ``i`` of ``Vinv`` with
    ``D[i][i] == 0`` (as column vectors).
    """

    M: tuple
    U: tuple
    D: tuple
    V: tuple
    Uinv: tuple
    Vinv: tuple
    rank: int

    @property
    def diagonal(self) -> tuple:
        return tuple(self.D[i][i] for i in range(min(shape(self.D))))

    @property
    def kernel_basis(self) -> tuple:
        m = shape(self.M)[1]
        return tuple(tuple(self.Vinv[r][i] for r in range(m)) for i in range(self.rank, m))

    def kernel_matrix(self) -> tuple:
        """Kernel basis as an ``m × κ`` matrix (columns are basis vectors)."""
        return transpose(self.kernel_basis) if self.kernel_basis else tuple(() for _ in range(shape(self.M)[1]))


def smith(M) -> SmithData:
    """Smith normal form with transformation matrices.

    Pivot choice: the nonzero entry of least absolute value in the remaining
    submatrix, ties broken by row then column index.  The diagonal is made
    nonnegative and satisfies ``D[i][i] | D[i+1][i+1]``.
    """
    M = as_matrix(M)
    rows, cols = shape(M)
    a = [list(r) for r in M]
    L = [list(r) for r in identity(rows)]      # L·M·R = D
    Linv = [list(r) for r in identity(rows)]
    R = [list(r) for r in identity(cols)]
    Rinv = [list(r) for r in identity(cols)]

    def row_add(i, j, c):  # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        L[i] = [x + c * y for x, y in zip(L[i], L[j])]
        for r in range(rows):
            Linv[r][j] -= c * Linv[r][i]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        L[i], L[j] = L[j], L[i]
        for r in range(rows):
            Linv[r][i], Linv[r][j] = Linv[r][j], Linv[r][i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        L[i] = [-x for x in L[i]]
        for r in range(rows):
            Linv[r][i] = -Linv[r][i]

    def col_add(j, i, c):  # col_j += c * col_i
        for r in range(rows):
            a[r][j] += c * a[r][i]
        for r in range(cols):
            R[r][j] += c * R[r][i]
        Rinv[i] = [x - c * y for x, y in zip(Rinv[i], Rinv[j])]

    def col_swap(i, j):
        for r in range(rows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(cols):
            R[r][i], R[r][j] = R[r][j], R[r][i]
        Rinv[i], Rinv[j] = Rinv[j], Rinv[i]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = abs(a[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder of row/column t to the pivot
                best = None
                for i in range(t, rows):
                    v = abs(a[i][t])
                    if v and (best is None or v < best[0]):
                        best = (v, i, t)
                for j in range(t + 1, cols):
                    v = abs(a[t][j])
                    if v and v < best[0]:
                        best = (v, t, j)
                _, i, j = best
                if i != t:
                    row_swap(i, t)
                if j != t:
                    col_swap(j, t)
                continue
            # row and column t are clear; enforce divisibility
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1

    return SmithData(M=M, U=as_matrix(Linv), D=as_matrix(a), V=as_matrix(Rinv),
                     Uinv=as_matrix(L), Vinv=as_matrix(R), rank=t)


def solve_diophantine(M, y: Sequence[int], sd: SmithData | None = None):
    """Integer solutions of ``M·x = y``.

    Returns ``None`` when there is none, else ``(x0, basis)`` where the
    solution set is ``x0 + span_Z(basis)``.
    """
    sd = sd or smith(M)
    rows, cols = shape(sd.M)
    if len(y) != rows:
        raise ValueError("dimension mismatch")
    yp = matvec(sd.Uinv, y)
    z = [0] * cols
    for i in range(rows):
        dii = sd.D[i][i] if i < min(rows, cols) else 0
        if dii == 0:
            if yp[i]:
                return None
        else:
            q, r = divmod(yp[i], dii)
            if r:
                return None
            z[i] = q
    x0 = matvec(sd.Vinv, z)
    return x0, sd.kernel_basis


def _round_half_even(q: Fraction) -> int:
    return round(q)


def reduce_particular(x0: Sequence[int], basis: Sequence[Sequence[int]]) -> tuple:
    """Shift ``x0`` inside its coset towards the orthogonal complement of the lattice.

    ``t`` solves the least-squares problem ``min ‖x0 − B t‖`` exactly over the
    rationals; ``x0 − B·round(t)`` is returned (ties round to even).
    """
    x0 = tuple(int(v) for v in x0)
    if not basis:
        return x0
    B = [tuple(b) for b in basis]
    k = len(B)
    gram = [[Fraction(sum(p * q for p, q in zip(B[i], B[j]))) for j in range(k)] for i in range(k)]
    rhs = [Fraction(sum(p * q for p, q in zip(B[i], x0))) for i in range(k)]
    t = solve_rational(gram, rhs)
    c = [_round_half_even(v) for v in t]
    return tuple(x0[r] - sum(c[i] * B[i][r] for i in range(k)) for r in range(len(x0)))


def solve_rational(a, b):
    """Solve the square nonsingular system ``a·x = b`` over the rationals."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(a, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def char_poly(M) -> tuple:
    """Coefficients of ``det(x·I − M)``, highest degree first (monic).

    Faddeev–LeVerrier; every division is exact over the integers.
    """
    M = as_matrix(M)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("square matrix required")
    coeffs = [1]
    Mk = [list(r) for r in identity(n)]  # M_0 = I
    c = 1
    for k in range(1, n + 1):
        AM = matmul(M, Mk)
        tr = sum(AM[i][i] for i in range(n))
        c, rem = divmod(-tr, k)
        if rem:
            raise ArithmeticError("non-integral Faddeev–LeVerrier coefficient")
        coeffs.append(c)
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return tuple(coeffs)


def poly_at_matrix(coeffs: Sequence, M) -> tuple:
    """Evaluate a polynomial (highest degree first) at a square matrix (Horner)."""
    n = len(M)
    acc = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    for c in coeffs:
        acc = matmul(acc, M)
        acc = tuple(tuple(acc[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n))
    return acc
