"""Certified lower bounds on the smallest eigenvalue of a symmetric matrix."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .interval import RatInterval, floor_frac


def interval_cholesky_ok(G, t: Fraction = Fraction(0), bits: int = 96) -> bool:
    """True when every symmetric matrix inside ``G − t·I`` is positive definite.

    Interval ``LDLᵀ``: success means all pivots ``d_j`` have a positive lower
    endpoint.  Entries are rounded outward to keep denominators small.
    """
    n = len(G)
    A = [[G[i][j] - (t if i == j else 0) for j in range(n)] for i in range(n)]
    L = [[None] * n for _ in range(n)]
    d = [None] * n
    for j in range(n):
        acc = A[j][j]
        for k in range(j):
            acc = acc - L[j][k].square() * d[k]
        acc = acc.rounded(bits)
        if acc.lo <= 0:
            return False
        d[j] = acc
        for i in range(j + 1, n):
            s = A[i][j]
            for k in range(j):
                s = s - L[i][k] * L[j][k] * d[k]
            L[i][j] = (s / d[j]).rounded(bits)
    return True


def min_eig_lower_bound(G, max_halvings: int = 80) -> Fraction:
    """A rational ``t > 0`` with ``t <= μ_min`` for every matrix in the enclosure ``G``.

    Starts just below the floating-point estimate of ``μ_min`` at the
    midpoint matrix and halves until interval Cholesky of ``G − t·I``
    succeeds.  Raises ``ArithmeticError`` when nothing positive verifies.
    """
    n = len(G)
    if n == 0:
        return Fraction(1)
    G = [[g if isinstance(g, RatInterval) else RatInterval(g) for g in row] for row in G]
    mid = np.array([[float(g.mid) for g in row] for row in G])
    est = float(np.linalg.eigvalsh((mid + mid.T) / 2).min())
    if not est > 0:
        raise ArithmeticError("Gram matrix is not positive definite")
    t = floor_frac(Fraction(est) * Fraction(999, 1000), 64)
    for _ in range(max_halvings):
        if t > 0 and interval_cholesky_ok(G, t):
            return t
        t /= 2
    raise ArithmeticError("could not certify a positive lower bound")
