"""Certified bounds on the contracting coordinates of factors.

For a contracting index ``i`` in a Jordan block ``[i_s, i_e]`` with eigenvalue
modulus at most ``ρ`` the bound used is

    m_i = Σ_{c=i}^{i_e} u_c · W(i, c),
    W(i, c) = Σ_{j>=0} C(l·j, c−i) · ρ^{l·j − (c−i)},

where ``u_c`` bounds ``|r_c(Ψ(s)+Ψ(p))|`` over suffixes ``s`` and prefixes
``p`` of images of ``h^l`` (and ``|r_c(Ψ(v))|`` over factors ``v`` of a single
image).  Every factor ``w`` of the language satisfies ``|r_i(Ψ(w))| <= m_i``
and every gap vector of a realizable template satisfies
``|r_i(d)| <= r_i* = 2·m_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import intmat
from .linalg.interval import RatInterval, sqrt_upper
from .linalg.psd import min_eig_lower_bound
from .linalg.spectral import SpectralData
from .words import MethodInapplicable, Morphism

SUPPORT_DIRECTIONS = 4096
FLOAT_MARGIN = Fraction(1, 10 ** 9)


@dataclass
class BoundsProfile:
    power: int
    indices: tuple                     # contracting indices
    u: dict                            # c -> Fraction
    m: dict                            # i -> Fraction, bound on |r_i(Ψ(w))|
    rstar: dict                        # i -> Fraction, 2·m_i
    spectral: SpectralData = field(repr=False)

    def as_floats(self) -> dict:
        return {i: float(self.rstar[i]) for i in self.indices}


def _frac_up(x: float) -> Fraction:
    """A rational at least ``x``, with a relative safety margin."""
    q = Fraction(x)
    return q + abs(q) * FLOAT_MARGIN + Fraction(1, 10 ** 30)


def border_parikh_sets(g: Morphism):
    """Distinct Parikh vectors of suffixes, prefixes and factors of the images of ``g``."""
    n = len(g.target)
    pre, suf, fac = set(), set(), set()
    for img in g.images:
        cum = np.zeros((len(img) + 1, n), dtype=np.int64)
        if img:
            onehot = np.zeros((len(img), n), dtype=np.int64)
            onehot[np.arange(len(img)), list(img)] = 1
            cum[1:] = np.cumsum(onehot, axis=0)
        total = cum[-1]
        for row in cum:
            pre.add(tuple(int(v) for v in row))
            suf.add(tuple(int(v) for v in total - row))
        if len(img) <= 400:
            for a in range(len(img) + 1):
                diff = cum[a + 1:] - cum[a]
                fac.update(map(tuple, diff.tolist()))
    fac.add((0,) * n)
    return (np.array(sorted(suf), dtype=np.int64), np.array(sorted(pre), dtype=np.int64),
            np.array(sorted(fac), dtype=np.int64))


def _max_pair_real(a_lo, a_hi, b_lo, b_hi):
    return max(a_hi + b_hi, -(a_lo + b_lo))


def _u_bound(fn, S: np.ndarray, Pp: np.ndarray, F: np.ndarray) -> Fraction:
    """Certified upper bound for ``max |r(s+p)|`` and ``max |r(v)|``."""
    if fn.is_rational:
        den = fn.denom
        row = np.array(fn.coeffs[0], dtype=object)
        a = S.astype(object) @ row
        b = Pp.astype(object) @ row
        f = F.astype(object) @ row
        best = max(_max_pair_real(min(a), max(a), min(b), max(b)), max(abs(v) for v in f))
        return Fraction(int(best), den)
    A = fn.coefficient_array(S).astype(np.float64) @ np.array(fn.lam_pows) / fn.denom
    B = fn.coefficient_array(Pp).astype(np.float64) @ np.array(fn.lam_pows) / fn.denom
    Fv = fn.coefficient_array(F).astype(np.float64) @ np.array(fn.lam_pows) / fn.denom
    errA = float(fn.batch_abs(S)[1].max())
    errB = float(fn.batch_abs(Pp)[1].max())
    errF = float(fn.batch_abs(F)[1].max())
    inner = float(np.abs(Fv).max()) + errF
    if fn.is_real:
        A, B = A.real, B.real
        pair = max(A.max() + B.max(), -(A.min() + B.min())) + errA + errB
        return _frac_up(max(pair, inner))
    if len(A) * len(B) <= 4_000_000:
        pair = float(np.abs(A[:, None] + B[None, :]).max()) + errA + errB
        return _frac_up(max(pair, inner))
    # support functions: |z| <= max_k Re(z·e^{-iθ_k}) / cos(π/K)
    K = SUPPORT_DIRECTIONS
    best = -math.inf
    for start in range(0, K, 256):
        th = 2 * math.pi * np.arange(start, min(K, start + 256)) / K
        e = np.exp(-1j * th)
        ha = (A[:, None] * e[None, :]).real.max(axis=0)
        hb = (B[:, None] * e[None, :]).real.max(axis=0)
        best = max(best, float((ha + hb).max()))
    pair = (best + errA + errB) / math.cos(math.pi / K)
    return _frac_up(max(pair, inner))


def _block_weight(rho: Fraction, ell: int, m: int, tol_bits: int = 80) -> Fraction:
    """Upper bound for ``Σ_{j>=0} C(ell·j, m) ρ^{ell·j − m}`` (``0^0 = 1``)."""
    if rho == 0:
        return Fraction(1) if m % ell == 0 else Fraction(0)
    if m == 0:
        return 1 / (1 - rho ** ell)
    if ell == 1:
        return 1 / (1 - rho) ** (m + 1)
    # direct summation with a geometric tail bound
    total = Fraction(0)
    j = (m + ell - 1) // ell
    eps = Fraction(1, 1 << tol_bits)
    while True:
        N = ell * j
        term = math.comb(N, m) * rho ** (N - m)
        total += term
        # C(N+ell, m)/C(N, m) <= ((N-m+1+ell)/(N-m+1))^m, decreasing in N
        ratio = Fraction(N - m + 1 + ell, N - m + 1) ** m * rho ** ell
        if ratio < Fraction(1, 2) and term <= eps:
            return total + term * ratio / (1 - ratio)
        j += 1
        # keep denominators bounded
        if j % 64 == 0:
            total = Fraction(math.ceil(total * (1 << tol_bits)), 1 << tol_bits)


def contracting_bounds(h: Morphism, sd: SpectralData, power: int = 2, inner: bool = True) -> BoundsProfile:
    """Certified factor bounds ``m_i`` and template bounds ``r_i* = 2 m_i`` using ``h^power``."""
    if power < 1:
        raise ValueError("power must be positive")
    if sd.unresolved:
        raise MethodInapplicable("an eigenvalue could not be separated from the unit circle")
    g = h.power(power)
    S, Pp, F = border_parikh_sets(g)
    if not inner:
        F = np.zeros((1, h.n), dtype=np.int64)
    idx = sd.contracting_indices
    u = {c: _u_bound(sd.functional(c), S, Pp, F) for c in idx}
    m = {}
    for i in idx:
        _, ie = sd.block_range(i)
        root = sd.eigenvalue(i)
        rho = root.modulus_bounds()[1]
        total = Fraction(0)
        for c in range(i, ie + 1):
            w = _block_weight(rho, power, c - i)
            if w:
                total += u[c] * w
        if total.denominator > 1 << 64:
            total = Fraction(math.ceil(total * (1 << 64)), 1 << 64)  # outward, keeps reports short
        m[i] = total
    rstar = {i: 2 * m[i] for i in idx}
    return BoundsProfile(power, idx, u, m, rstar, sd)


def in_filter(gaps: Sequence[Sequence[int]], profile: BoundsProfile) -> bool:
    """False only when some gap provably violates ``|r_i(d)| <= r_i*``."""
    sd = profile.spectral
    for d in gaps:
        if not any(d):
            continue
        for i in profile.indices:
            if sd.functional(i).abs_lower(d) > profile.rstar[i]:
                return False
    return True


def filter_mask(X: np.ndarray, profile: BoundsProfile) -> np.ndarray:
    """Vectorised ``in_filter`` for the rows of ``X`` (one gap vector per row)."""
    keep = np.ones(len(X), dtype=bool)
    if len(X) == 0:
        return keep
    sd = profile.spectral
    for i in profile.indices:
        fn = sd.functional(i)
        r = profile.rstar[i]
        if fn.is_rational:
            vals = fn.coefficient_array(X)[:, 0]
            bound = r * fn.denom
            keep &= np.array([abs(int(v)) <= bound for v in vals], dtype=bool) if vals.dtype == object \
                else (np.abs(vals) * bound.denominator <= bound.numerator)
        else:
            try:
                val, err = fn.batch_abs(X)
            except OverflowError:
                keep &= np.array([fn.abs_lower(tuple(int(v) for v in x)) <= r for x in X], dtype=bool)
                continue
            keep &= (val - err) <= float(r) * (1 + 1e-12) + 1e-300
    return keep


# ---------------------------------------------------------------------------
# kernel cosets

@dataclass
class CosetEnumerator:
    """Enumerates ``{x ∈ x0 + span_Z(B) : |r_i(x)| <= r_i* for contracting i}``.

    A set of real rows ``Q'`` (real or imaginary parts of contracting
    functionals) with ``Q'·B`` injective bounds the coefficients: with
    ``c = Σ (r*_row + |q_row(x0)|)²`` and ``μ`` a certified lower bound on
    the smallest eigenvalue of ``(Q'B)ᵀ(Q'B)``, every solution has
    ``‖z‖ <= sqrt(c/μ)``.  The circumscribing box is enumerated and filtered.
    """

    basis: tuple                         # κ columns, each of length n
    profile: BoundsProfile
    max_points: int = 20_000_000
    rows: tuple = ()
    mu: Fraction = Fraction(0)

    def __post_init__(self):
        self.basis = tuple(tuple(int(v) for v in b) for b in self.basis)
        self.kappa = len(self.basis)
        self.Bmat = np.array(self.basis, dtype=np.int64).T if self.kappa else None
        if self.kappa:
            self._choose_rows()

    def _real_rows(self):
        sd = self.profile.spectral
        out = []
        for i in self.profile.indices:
            out.append((i, "re"))
            fn = sd.functional(i)
            if not fn.is_real:
                out.append((i, "im"))
        return out

    def _row_values(self, row, vectors):
        """Enclosures (RatInterval) of the real row applied to each vector."""
        i, part = row
        fn = self.profile.spectral.functional(i)
        out = []
        for v in vectors:
            if fn.is_rational:
                val = fn.exact(v)[0]
                out.append(RatInterval(val) if part == "re" else RatInterval(0))
            else:
                enc = fn.enclosure(v)
                out.append(enc.re if part == "re" else enc.im)
        return out

    def _choose_rows(self):
        cand = self._real_rows()
        if not cand:
            raise MethodInapplicable("no contracting coordinates to bound a kernel direction")
        sd = self.profile.spectral
        QB = np.array([[complex(sd.functional(i).value_float(b)) for b in self.basis] for i, _ in cand])
        QB = np.array([QB[k].real if part == "re" else QB[k].imag for k, (_, part) in enumerate(cand)])
        rs = np.array([float(self.profile.rstar[i]) for i, _ in cand])
        options = []
        if math.comb(len(cand), self.kappa) <= 20000:
            subsets = itertools.combinations(range(len(cand)), self.kappa)
        else:
            subsets = [tuple(range(len(cand)))]
        subsets = list(subsets) + [tuple(range(len(cand)))]
        for sub in subsets:
            A = QB[list(sub)]
            G = A.T @ A
            mu = float(np.linalg.eigvalsh(G).min())
            if mu <= 1e-9 * max(1.0, float(np.abs(G).max())):
                continue
            score = float((rs[list(sub)] ** 2).sum()) / mu
            options.append((score, sub))
        if not options:
            raise MethodInapplicable("expanding space meets the kernel: no injective contracting rows")
        options.sort()
        for _, sub in options[:5]:
            rows = tuple(cand[k] for k in sub)
            vals = [self._row_values(r, self.basis) for r in rows]
            G = [[sum((vals[t][a] * vals[t][b] for t in range(len(rows))), RatInterval(0))
                  for b in range(self.kappa)] for a in range(self.kappa)]
            try:
                mu = min_eig_lower_bound(G)
            except ArithmeticError:
                continue
            self.rows, self.mu = rows, mu
            return
        raise MethodInapplicable("could not certify injectivity of the contracting rows on the kernel")

    def radius(self, x0: Sequence[int]) -> int:
        c = Fraction(0)
        for row in self.rows:
            val = self._row_values(row, [x0])[0].abs().hi
            c += (self.profile.rstar[row[0]] + val) ** 2
        return math.floor(sqrt_upper(c / self.mu, 32))

    def candidates(self, x0: Sequence[int]) -> np.ndarray:
        """Candidate vectors (rows of an int64 array), sorted lexicographically."""
        x0 = np.array(x0, dtype=np.int64)
        if not self.kappa:
            X = x0[None, :]
            return X[filter_mask(X, self.profile)]
        x0 = np.array(intmat.reduce_particular(tuple(int(v) for v in x0), self.basis), dtype=np.int64)
        R = self.radius(tuple(int(v) for v in x0))
        side = 2 * R + 1
        if side ** self.kappa > self.max_points:
            raise ResourceWarning(f"kernel box of {side}^{self.kappa} points exceeds the cap")
        rng = np.arange(-R, R + 1, dtype=np.int64)
        Z = np.stack(np.meshgrid(*([rng] * self.kappa), indexing="ij"), axis=-1).reshape(-1, self.kappa)
        X = x0[None, :] + Z @ self.Bmat.T
        X = X[filter_mask(X, self.profile)]
        if len(X) > 1:
            X = X[np.lexsort(X.T[::-1])]
        return X


def kernel_coset_candidates(x0, basis, profile: BoundsProfile) -> list:
    """Finite superset of the coset points obeying all contracting bounds."""
    return [tuple(int(v) for v in x) for x in CosetEnumerator(tuple(basis), profile).candidates(x0)]


def _volume(profile: BoundsProfile) -> float:
    """Product of the template bounds over real coordinates (complex rows count twice)."""
    sd = profile.spectral
    v = 1.0
    for i in profile.indices:
        r = float(profile.rstar[i])
        v *= r if sd.functional(i).is_real else r * r
    return v


def _max_image_length(h: Morphism, power: int) -> int:
    M = np.array(h.matrix, dtype=object)
    return int(max(np.ones(h.n, dtype=object) @ np.linalg.matrix_power(M, power)))


def choose_power(h: Morphism, sd: SpectralData, start: int = 2, max_power: int = 16,
                 gain: float = 2.0, max_image: int = 100_000) -> BoundsProfile:
    """Bounds for ``h^l`` with ``l`` doubled from ``start`` while the bound volume keeps shrinking.

    Doubling stops after the first step that fails to shrink the volume by
    ``gain``, when ``max_power`` is reached, or when an image of ``h^{2l}``
    would exceed ``max_image`` letters; the best profile seen is kept.
    """
    best = contracting_bounds(h, sd, start)
    l = start
    while 2 * l <= max_power and best.indices and _max_image_length(h, 2 * l) <= max_image:
        nxt = contracting_bounds(h, sd, 2 * l)
        improved = _volume(nxt) * gain <= _volume(best)
        if _volume(nxt) < _volume(best):
            best = nxt
        if not improved:
            break
        l *= 2
    return best
