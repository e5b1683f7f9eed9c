"""Univariate polynomials over the rationals and certified root enclosures.

Polynomials are lists of :class:`Fraction` coefficients, lowest degree first.
Real roots are isolated with Sturm sequences and refined by bisection.
Non-real roots are enclosed in disks certified by Gerschgorin's theorem
applied to the Weierstrass (Durand–Kerner) companion matrix
``diag(z) − w·1ᵀ``, whose eigenvalues are exactly the roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .interval import CInterval, RatInterval, floor_frac, sqrt_upper


def trim(p: Sequence) -> list:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def from_high_first(coeffs: Sequence) -> list:
    return trim(list(reversed(coeffs)))


def degree(p) -> int:
    return len(p) - 1


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p) -> list:
    return trim([i * c for i, c in enumerate(p)][1:])


def divmod_poly(a, b):
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = a[:]
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            r[shift + i] -= f * c
        r = trim(r)
    return trim(q), r


def mul(a, b) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def monic(p) -> list:
    p = trim(p)
    return [c / p[-1] for c in p]


def factor_over_q(coeffs_high_first: Sequence[int]) -> list:
    """Irreducible monic factors over the rationals with multiplicities.

    Delegates to sympy's factoring; ordering is by degree, then coefficients.
    """
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(coeffs_high_first), x, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for f, e in factors:
        c = [Fraction(int(v.p), int(v.q)) for v in reversed(f.all_coeffs())]
        out.append((monic(c), int(e)))
    out.sort(key=lambda fe: (len(fe[0]), [float(v) for v in fe[0]]))
    return out


def sturm_sequence(p) -> list:
    p = trim(p)
    seq = [p, derivative(p)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq, x) -> int:
    vals = [evaluate(s, x) for s in seq]
    vals = [v for v in vals if v != 0]
    return sum(1 for a, b in zip(vals, vals[1:]) if (a > 0) != (b > 0))


def count_real_roots(p, lo, hi, seq=None) -> int:
    """Number of distinct real roots in ``(lo, hi]``."""
    seq = seq or sturm_sequence(p)
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(p) -> Fraction:
    """Cauchy bound: every complex root has modulus below it."""
    p = monic(p)
    return 1 + max((abs(c) for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p) -> list:
    """Disjoint rational intervals ``(lo, hi]``, one per distinct real root."""
    p = trim(p)
    seq = sturm_sequence(p)
    b = root_bound(p)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        c = count_real_roots(p, lo, hi, seq)
        if c == 0:
            continue
        if c == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort()
    return out


def refine_real_root(p, lo: Fraction, hi: Fraction, width: Fraction):
    """Bisect an isolating interval ``(lo, hi]`` of a simple root of ``p``."""
    if evaluate(p, hi) == 0:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        vm = evaluate(p, mid)
        if vm == 0:
            return mid, mid
        if (vm > 0) == (evaluate(p, hi) > 0):
            hi = mid
        else:
            lo = mid
    return lo, hi


class RootIsolationError(ArithmeticError):
    pass


def mpf_to_fraction(x) -> Fraction:
    """Exact value of an mpmath ``mpf``."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if not man and exp:
        raise ValueError("non-finite value")
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


def _gmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _gdiv(a, b):
    d = b[0] ** 2 + b[1] ** 2
    return (a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d


def _geval(p, z):
    acc = (Fraction(0), Fraction(0))
    for c in reversed(p):
        acc = _gmul(acc, z)
        acc = (acc[0] + c, acc[1])
    return acc


def weierstrass_disks(p, bits: int) -> list:
    """Certified isolating disks ``(centre_re, centre_im, radius)`` for all roots.

    ``p`` must be squarefree.  Approximations come from mpmath at ``bits``
    binary digits, are rounded to dyadic rationals, and are then checked
    exactly.  Raises :class:`RootIsolationError` if the disks overlap.
    """
    p = monic(p)
    d = degree(p)
    if d == 1:
        return [(-p[0], Fraction(0), Fraction(0))]
    with mpmath.workprec(bits + 64):
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(p)],
                                 maxsteps=400, extraprec=2 * bits)
        exact = [(mpf_to_fraction(mpmath.re(r)), mpf_to_fraction(mpmath.im(r))) for r in roots]
    grid = bits + 24  # finer than the requested width so that radii come out below it
    z = [(floor_frac(re, grid), floor_frac(im, grid)) for re, im in exact]
    disks = []
    for i, zi in enumerate(z):
        num = _geval(p, zi)
        den = (Fraction(1), Fraction(0))
        for j, zj in enumerate(z):
            if j != i:
                den = _gmul(den, (zi[0] - zj[0], zi[1] - zj[1]))
        if den == (0, 0):
            raise RootIsolationError("coincident approximations")
        w = _gdiv(num, den)
        centre = (zi[0] - w[0], zi[1] - w[1])
        radius = (d - 1) * sqrt_upper(w[0] ** 2 + w[1] ** 2, grid + 8)
        centre = (floor_frac(centre[0], grid + 8), floor_frac(centre[1], grid + 8))
        radius = radius + Fraction(2, 1 << (grid + 8))  # absorbs centre rounding
        disks.append((centre[0], centre[1], radius))
    for i in range(d):
        for j in range(i + 1, d):
            dx = disks[i][0] - disks[j][0]
            dy = disks[i][1] - disks[j][1]
            rr = disks[i][2] + disks[j][2]
            if dx * dx + dy * dy <= rr * rr:
                raise RootIsolationError("root disks overlap; increase precision")
    return disks


@dataclass(frozen=True)
class Root:
    """One root of an irreducible rational polynomial ``q``.

    ``box`` is a certified rectangle containing the root and no other root of
    ``q``.  Real roots have a degenerate imaginary part ``[0, 0]``.
    """

    q: tuple
    box: CInterval
    is_real: bool
    index: int  # position among the roots of q (stable ordering)

    @property
    def approx(self) -> complex:
        return self.box.mid

    def modulus_bounds(self, bits: int = 96) -> tuple:
        """Rational ``(lo, hi)`` with ``lo <= |root| <= hi``."""
        return self.box.abs_lower(bits), self.box.abs_upper(bits)

    def classify(self) -> str:
        lo, hi = self.modulus_bounds()
        if hi < 1:
            return "contracting"
        if lo > 1:
            return "expanding"
        return "unresolved"


def roots_of_irreducible(q, bits: int = 128) -> list:
    """Certified enclosures of all roots of an irreducible ``q``.

    Real roots are listed first in increasing order, then non-real ones with
    nonnegative imaginary part first (conjugates adjacent), by real part.
    """
    q = monic(q)
    d = degree(q)
    width = Fraction(1, 1 << bits)
    if d == 1:
        r = -q[0]
        return [Root(tuple(q), CInterval(RatInterval(r), RatInterval(0)), True, 0)]
    real = []
    for lo, hi in isolate_real_roots(q):
        lo, hi = refine_real_root(q, lo, hi, width)
        real.append(CInterval(RatInterval(lo, hi), RatInterval(0)))
    nonreal = []
    if len(real) < d:
        prec = bits
        while True:
            try:
                disks = weierstrass_disks(q, prec)
            except RootIsolationError:
                prec *= 2
                if prec > 1 << 14:
                    raise
                continue
            cand = [(cr, ci, r) for cr, ci, r in disks if abs(ci) > r]
            if len(cand) == d - len(real) and all(r <= width for _, _, r in cand):
                break
            prec *= 2
            if prec > 1 << 14:
                raise RootIsolationError("could not separate non-real roots")
        cand.sort(key=lambda t: (t[0], -t[1]))
        # pair each root with its conjugate: upper half first
        upper = [t for t in cand if t[1] > 0]
        for cr, ci, r in upper:
            nonreal.append(CInterval.disk_box(cr, ci, r))
            nonreal.append(CInterval.disk_box(cr, -ci, r))
    boxes = real + nonreal
    return [Root(tuple(q), b, i < len(real), i) for i, b in enumerate(boxes)]
