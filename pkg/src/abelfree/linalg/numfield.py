"""Arithmetic in a number field ``Q[x]/(q)`` and exact linear algebra over it.

Elements are tuples of ``deg q`` Fractions (coefficients of ``1, θ, θ², …``).
Linear algebra routines take the field as an argument, so the same code runs
over ``Q`` (``deg q = 1``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import poly as P
from .interval import CInterval


class NumberField:
    def __init__(self, q: Sequence):
        q = P.monic(q)
        if P.degree(q) < 1:
            raise ValueError("defining polynomial must have positive degree")
        self.q = tuple(q)
        self.d = P.degree(q)
        self.zero = (Fraction(0),) * self.d
        self.one = (Fraction(1),) + (Fraction(0),) * (self.d - 1)
        self.theta = ((Fraction(0), Fraction(1)) + (Fraction(0),) * (self.d - 2)
                      if self.d > 1 else (-self.q[0],))

    def __repr__(self):
        return f"NumberField(q={[str(c) for c in self.q]})"

    def _norm(self, p) -> tuple:
        p = list(p)
        if len(p) > self.d:
            _, p = P.divmod_poly(p, self.q)
        p = list(p) + [Fraction(0)] * (self.d - len(p))
        return tuple(p)

    def embed(self, r) -> tuple:
        return (Fraction(r),) + (Fraction(0),) * (self.d - 1)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        if self.d == 1:
            return (a[0] * b[0],)
        return self._norm(P.mul(P.trim(a), P.trim(b)))

    def scale(self, a, r):
        return tuple(x * r for x in a)

    def is_zero(self, a) -> bool:
        return not any(a)

    def is_rational(self, a) -> bool:
        return not any(a[1:])

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.d == 1:
            return (1 / a[0],)
        # extended Euclid: s·a + t·q = 1
        r0, r1 = list(self.q), P.trim(a)
        s0, s1 = [], [Fraction(1)]
        while P.degree(r1) > 0:
            quo, rem = P.divmod_poly(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, P.mul(quo, s1))
        if not r1:
            raise ZeroDivisionError("element is not invertible (q reducible?)")
        c = r1[0]
        return self._norm([x / c for x in s1])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def evaluate(self, a, root_box: CInterval) -> CInterval:
        """Enclosure of the embedding ``θ ↦ root`` of ``a``."""
        acc = CInterval(0)
        for c in reversed(a):
            acc = acc * root_box + c
        return acc

    def evaluate_approx(self, a, z: complex) -> complex:
        acc = 0j
        for c in reversed(a):
            acc = acc * z + float(c)
        return acc


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return P.trim([x - y for x, y in zip(a, b)])


def matrix(K: NumberField, rows) -> list:
    """Lift a rational matrix into ``K``."""
    return [[K.embed(x) for x in row] for row in rows]


def matmul(K, a, b):
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = K.zero
            for t in range(m):
                if not K.is_zero(a[i][t]) and not K.is_zero(b[t][j]):
                    acc = K.add(acc, K.mul(a[i][t], b[t][j]))
            row.append(acc)
        out.append(row)
    return out


def vecmat(K, v, a):
    """Row vector times matrix."""
    return matmul(K, [list(v)], a)[0]


def rref(K, a):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not K.is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = K.inv(m[r][c])
        m[r] = [K.mul(x, inv) for x in m[r]]
        for i in range(rows):
            if i != r and not K.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[:r], pivots


def rank(K, a) -> int:
    return len(rref(K, a)[1]) if a else 0


def nullspace(K, a, ncols: int | None = None) -> list:
    """Basis (as vectors) of ``{x : a·x = 0}``."""
    cols = len(a[0]) if a else ncols
    red, pivots = rref(K, a) if a else ([], [])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [K.zero] * cols
        v[f] = K.one
        for row, pc in zip(red, pivots):
            v[pc] = K.neg(row[f])
        basis.append(v)
    return basis


def left_nullspace(K, a) -> list:
    """Basis of row vectors ``y`` with ``y·a = 0``."""
    at = [list(col) for col in zip(*a)]
    return nullspace(K, at, ncols=len(a))


def inverse(K, a):
    n = len(a)
    aug = [list(row) + [K.one if i == j else K.zero for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(K, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def span_rank(K, vectors) -> int:
    return rank(K, [list(v) for v in vectors]) if vectors else 0
