"""Certified Jordan structure of an integer matrix.

For every irreducible factor ``q`` of the characteristic polynomial the
Jordan chains are computed exactly over ``K = Q[x]/(q)`` and only then
embedded at certified enclosures of the roots of ``q``.  Rows of ``P⁻¹``
(the functionals ``r_i``) are the left chains; columns of ``P`` are obtained
from a basis ``G`` of the right generalized eigenspace as ``G·(R·G)⁻¹``, so
``P⁻¹·P = I`` holds exactly, block by block.

Row convention: inside a block of size ``s`` occupying indices
``i_s .. i_e`` one has ``r_c·M = λ·r_c + r_{c+1}`` and ``r_{i_e}·M = λ·r_{i_e}``,
i.e. ``P⁻¹·M = J·P⁻¹`` with ones above the diagonal of ``J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import intmat
from . import numfield as nf
from . import poly as P
from .interval import CInterval


class ModulusOneError(ArithmeticError):
    """Some eigenvalue could not be separated from the unit circle."""


@dataclass
class Block:
    root: P.Root
    size: int
    field: nf.NumberField
    rows: list          # exact left chain, K-vectors, top first
    cols: list          # matching columns of P, K-vectors
    classification: str

    @property
    def is_rational(self) -> bool:
        return self.field.d == 1

    def modulus_upper(self) -> Fraction:
        return self.root.modulus_bounds()[1]


@dataclass
class RowFunctional:
    """The linear form ``r_i`` written as ``Σ_k θ^k (c_k · x)`` with ``θ`` a root."""

    index: int
    field: nf.NumberField
    root: P.Root
    denom: int                 # common denominator of all c_k entries
    coeffs: tuple              # d rows of n integers: D·c_k
    lam_pows: tuple = field(default=(), repr=False)   # float λ^k
    _abs_pows: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        z = self.root.box
        with mpmath.workprec(160):
            lam = mpmath.mpc(mpmath.mpf(z.re.mid.numerator) / z.re.mid.denominator,
                             mpmath.mpf(z.im.mid.numerator) / z.im.mid.denominator)
            pows = [complex(lam ** k) for k in range(self.field.d)]
        self.lam_pows = tuple(pows)
        self._abs_pows = np.array([abs(p) for p in pows])
        self._coef_np = np.array(self.coeffs, dtype=object).T  # n × d
        m = max((abs(c) for row in self.coeffs for c in row), default=0)
        self._fast = m < 2 ** 20

    @property
    def is_rational(self) -> bool:
        return self.field.d == 1

    @property
    def is_real(self) -> bool:
        return self.root.is_real

    def exact(self, x: Sequence[int]) -> tuple:
        """``r_i(x)`` as an element of ``K`` (``d`` Fractions)."""
        return tuple(Fraction(sum(c * v for c, v in zip(row, x)), self.denom) for row in self.coeffs)

    def value_float(self, x) -> complex:
        a = self.exact(x)
        return sum(float(c) * p for c, p in zip(a, self.lam_pows))

    def enclosure(self, x: Sequence[int]) -> CInterval:
        return self.field.evaluate(self.exact(x), self.root.box)

    def abs_upper(self, x) -> Fraction:
        if self.is_rational:
            return abs(self.exact(x)[0])
        return self.enclosure(x).abs_upper()

    def abs_lower(self, x) -> Fraction:
        if self.is_rational:
            return abs(self.exact(x)[0])
        return self.enclosure(x).abs_lower()

    def coefficient_array(self, X: np.ndarray) -> np.ndarray:
        """Integer coefficient vectors ``D·(c_k·x)`` for each row of ``X`` (N × d)."""
        C = np.array(self.coeffs, dtype=np.int64).T
        if self._fast and np.abs(X).max(initial=0) < 2 ** 30:
            return X.astype(np.int64) @ C
        return np.array(X, dtype=object) @ self._coef_np

    def batch_abs(self, X: np.ndarray):
        """Float magnitudes of ``r_i(x)`` with a rigorous absolute error bound.

        Returns ``(value, err)``; the true modulus lies in ``[value-err, value+err]``.
        Integer coefficients are exact; the float evaluation of ``d <= 8``
        terms has relative error far below the ``1e-12`` margin used.
        """
        A = self.coefficient_array(X)
        Af = A.astype(np.float64)
        if np.abs(Af).max(initial=0) >= 2.0 ** 52:
            raise OverflowError("coefficients too large for the float path")
        val = Af @ np.array(self.lam_pows) / self.denom
        scale = np.abs(Af) @ self._abs_pows / self.denom
        return np.abs(val), 1e-12 * scale + 1e-300


@dataclass
class SpectralData:
    M: tuple
    char_poly: tuple
    factors: list
    blocks: list
    precision_bits: int

    def __post_init__(self):
        self.block_of = []
        self.position = []
        for bi, b in enumerate(self.blocks):
            for c in range(b.size):
                self.block_of.append(bi)
                self.position.append(c)
        self._functionals = {}

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def contracting_indices(self) -> tuple:
        return tuple(i for i in range(self.n) if self.blocks[self.block_of[i]].classification == "contracting")

    @property
    def expanding_indices(self) -> tuple:
        return tuple(i for i in range(self.n) if self.blocks[self.block_of[i]].classification == "expanding")

    @property
    def unresolved(self) -> bool:
        return any(b.classification == "unresolved" for b in self.blocks)

    def block_range(self, i: int) -> tuple:
        """``(i_s, i_e)`` of the block containing index ``i`` (inclusive)."""
        start = i - self.position[i]
        return start, start + self.blocks[self.block_of[i]].size - 1

    def eigenvalue(self, i: int) -> P.Root:
        return self.blocks[self.block_of[i]].root

    def exact_row(self, i: int) -> list:
        b = self.blocks[self.block_of[i]]
        return b.rows[self.position[i]]

    def functional(self, i: int) -> RowFunctional:
        if i not in self._functionals:
            b = self.blocks[self.block_of[i]]
            row = b.rows[self.position[i]]
            d = b.field.d
            den = 1
            for e in row:
                for c in e:
                    den = den * c.denominator // math.gcd(den, c.denominator)
            coeffs = tuple(tuple(int(e[k] * den) for e in row) for k in range(d))
            self._functionals[i] = RowFunctional(i, b.field, b.root, den, coeffs)
        return self._functionals[i]

    def Pinv_enclosure(self) -> list:
        out = []
        for b in self.blocks:
            for row in b.rows:
                out.append([b.field.evaluate(e, b.root.box) for e in row])
        return out

    def P_enclosure(self) -> list:
        cols = []
        for b in self.blocks:
            for col in b.cols:
                cols.append([b.field.evaluate(e, b.root.box) for e in col])
        return [list(r) for r in zip(*cols)]

    def J_enclosure(self) -> list:
        n = self.n
        J = [[CInterval(0) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            J[i][i] = self.eigenvalue(i).box
            if i + 1 < n and self.block_of[i + 1] == self.block_of[i]:
                J[i][i + 1] = CInterval(1)
        return J

    def summary(self) -> list:
        out = []
        for b in self.blocks:
            lo, hi = b.root.modulus_bounds(64)
            out.append({
                "eigenvalue": b.root.approx,
                "size": b.size,
                "modulus": (float(lo), float(hi)),
                "class": b.classification,
                "degree": b.field.d,
            })
        return out


def _qm(q, M) -> tuple:
    """``q(M)`` scaled to an integer matrix (same kernel)."""
    den = 1
    for c in q:
        den = den * c.denominator // math.gcd(den, c.denominator)
    coeffs = [int(c * den) for c in reversed(q)]
    return intmat.poly_at_matrix(coeffs, M)


def _block_sizes(q, e: int, M) -> list:
    """Jordan block sizes (descending) for each root of ``q``; exact ranks."""
    n = len(M)
    d = P.degree(q)
    Q = _qm(q, M)
    kers = [0]
    Qj = intmat.identity(n)
    for _ in range(e):
        Qj = intmat.matmul(Qj, Q)
        kers.append(n - intmat.rank(Qj))
        if kers[-1] == e * d:
            break
    at_least = [(kers[j] - kers[j - 1]) // d for j in range(1, len(kers))]
    sizes = []
    for s in range(len(at_least), 0, -1):
        exactly = at_least[s - 1] - (at_least[s] if s < len(at_least) else 0)
        sizes += [s] * exactly
    if sum(sizes) != e:
        raise ArithmeticError("inconsistent Jordan structure")
    return sizes


def _left_chains(K, A, sizes) -> list:
    """Left Jordan chains of ``A = M − θI`` over ``K``; one list of rows per block."""
    smax = sizes[0]
    powers = [None, A]
    for _ in range(2, smax + 1):
        powers.append(nf.matmul(K, powers[-1], A))
    ker = {0: []}
    for j in range(1, smax + 1):
        ker[j] = nf.left_nullspace(K, powers[j])
    chains = []  # each: list of rows, top first
    for s in range(smax, 0, -1):
        need = sizes.count(s)
        if need == 0:
            continue
        existing = list(ker[s - 1])
        for ch in chains:
            top_level = len(ch)
            # vector of this chain sitting at level s
            existing.append(ch[top_level - s])
        base = nf.span_rank(K, existing)
        new = []
        for v in ker[s]:
            if len(new) == need:
                break
            if nf.span_rank(K, existing + new + [v]) > base + len(new):
                new.append(v)
        if len(new) != need:
            raise ArithmeticError("failed to extend Jordan chains")
        for top in new:
            rows = [top]
            for _ in range(s - 1):
                rows.append(nf.vecmat(K, rows[-1], A))
            chains.append(rows)
    # normalise: the left eigenvector (last row) gets first nonzero entry 1
    out = []
    for rows in sorted(chains, key=len, reverse=True):
        lead = next(e for e in rows[-1] if not K.is_zero(e))
        inv = K.inv(lead)
        out.append([[K.mul(e, inv) for e in row] for row in rows])
    return out


def _right_columns(K, A, chains_rows, total) -> list:
    """Columns of ``P`` dual to the given left rows on the right generalized eigenspace."""
    n = len(A)
    smax = max(len(c) for c in chains_rows)
    Aj = A
    for _ in range(smax - 1):
        Aj = nf.matmul(K, Aj, A)
    G = nf.nullspace(K, Aj)  # list of column vectors
    if len(G) != total:
        raise ArithmeticError("generalized eigenspace dimension mismatch")
    R = [row for ch in chains_rows for row in ch]
    Gm = [list(r) for r in zip(*G)]  # n × total
    RG = nf.matmul(K, R, Gm)
    Pm = nf.matmul(K, Gm, nf.inverse(K, RG))  # n × total
    cols = [[Pm[r][c] for r in range(n)] for c in range(total)]
    return cols


def parse_jordan_override(text: str) -> dict:
    """Parse a ``.jordan`` file: ``block <eigenvalue> <size>`` followed by columns.

    The columns of one block are ``p_1 … p_s`` with ``M p_1 = λ p_1`` and
    ``M p_c = λ p_c + p_{c-1}``.  Only rational eigenvalues can be overridden.
    Returns ``{eigenvalue: [[col, ...], ...]}``.
    """
    out: dict = {}
    cur = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "block":
            if len(tok) != 3:
                raise ValueError(f"line {lineno}: expected 'block <eigenvalue> <size>'")
            lam, size = Fraction(tok[1]), int(tok[2])
            cur = {"size": size, "cols": []}
            out.setdefault(lam, []).append(cur)
            continue
        if cur is None:
            raise ValueError(f"line {lineno}: column before any block header")
        cur["cols"].append([Fraction(t) for t in tok])
    for lam, blocks in out.items():
        for b in blocks:
            if len(b["cols"]) != b["size"]:
                raise ValueError(f"block for eigenvalue {lam} lists {len(b['cols'])} columns, expected {b['size']}")
    return {lam: [b["cols"] for b in blocks] for lam, blocks in out.items()}


def _override_chains(K, A, override_blocks, sizes, n):
    """Left rows and columns from user-supplied right chains (rational eigenvalue)."""
    got = sorted((len(b) for b in override_blocks), reverse=True)
    if got != sorted(sizes, reverse=True):
        raise ValueError(f"override block sizes {got} differ from the exact structure {sizes}")
    cols = []
    for b in override_blocks:
        cols += [[K.embed(x) for x in c] for c in b]
    # check A·p_1 = 0, A·p_c = p_{c-1}
    for b in override_blocks:
        prev = None
        for c in b:
            col = [[K.embed(x)] for x in c]
            img = [r[0] for r in nf.matmul(K, A, col)]
            want = [K.zero] * n if prev is None else [K.embed(x) for x in prev]
            if img != want:
                raise ValueError("override columns do not form Jordan chains of M")
            prev = c
    smax = max(sizes)
    Aj = A
    for _ in range(smax - 1):
        Aj = nf.matmul(K, Aj, A)
    L = nf.left_nullspace(K, Aj)
    Pm = [list(r) for r in zip(*cols)]
    LP = nf.matmul(K, L, Pm)
    R = nf.matmul(K, nf.inverse(K, LP), L)
    # split into blocks, rows top first (row c pairs with column c)
    rows_chains, col_chains, pos = [], [], 0
    for b in override_blocks:
        s = len(b)
        # column order p_1..p_s pairs with row order r_{i_s}..r_{i_e}
        rows_chains.append(R[pos:pos + s])
        col_chains.append(cols[pos:pos + s])
        pos += s
    return rows_chains, col_chains


def spectral_data(M, precision_bits: int = 128, min_width_bits: int = 256,
                  strict: bool = True, jordan_override: dict | None = None) -> SpectralData:
    """Certified Jordan data of ``M`` (see module docstring).

    Roots are refined from ``precision_bits`` up to ``min_width_bits`` when a
    modulus cannot be compared with 1; after that a :class:`ModulusOneError`
    is raised (or the block is marked ``unresolved`` when ``strict`` is off).
    """
    M = intmat.as_matrix(M)
    n = len(M)
    cp = intmat.char_poly(M)
    factors = P.factor_over_q(cp)
    blocks = []
    for q, e in factors:
        K = nf.NumberField(q)
        sizes = _block_sizes(q, e, M)
        A = [[K.sub(K.embed(M[i][j]), K.theta if i == j else K.zero) for j in range(n)] for i in range(n)]
        lam_rational = -q[0] if K.d == 1 else None
        if jordan_override and lam_rational is not None and lam_rational in jordan_override:
            rows_chains, col_chains = _override_chains(K, A, jordan_override[lam_rational], sizes, n)
        else:
            rows_chains = _left_chains(K, A, sizes)
            cols = _right_columns(K, A, rows_chains, e)
            col_chains, pos = [], 0
            for ch in rows_chains:
                col_chains.append(cols[pos:pos + len(ch)])
                pos += len(ch)
        bits = precision_bits
        while True:
            roots = P.roots_of_irreducible(q, bits)
            classes = [r.classify() for r in roots]
            if "unresolved" not in classes or bits >= min_width_bits:
                break
            bits = min(2 * bits, min_width_bits)
        if "unresolved" in classes and strict:
            bad = [r.approx for r, c in zip(roots, classes) if c == "unresolved"]
            raise ModulusOneError(f"eigenvalue(s) {bad} not separated from the unit circle "
                                  f"at width 2^-{bits}")
        for root, cls in zip(roots, classes):
            for rows, cols in zip(rows_chains, col_chains):
                blocks.append(Block(root, len(rows), K, rows, cols, cls))

    def key(b: Block):
        z = b.root.approx
        mod = abs(z)
        rank_cls = {"contracting": 0, "unresolved": 1, "expanding": 2}[b.classification]
        return (rank_cls, mod if rank_cls == 0 else -mod, -b.size, -z.real, -z.imag)

    blocks.sort(key=key)
    return SpectralData(M=M, char_poly=cp, factors=factors, blocks=blocks, precision_bits=precision_bits)


def pjp_contains(sd: SpectralData, M=None) -> bool:
    """Check that the interval product ``P·J·P⁻¹`` encloses ``M`` entrywise."""
    M = sd.M if M is None else M
    Pm, J, Pi = sd.P_enclosure(), sd.J_enclosure(), sd.Pinv_enclosure()
    n = sd.n

    def mm(a, b):
        return [[_sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]

    prod = mm(mm(Pm, J), Pi)
    return all(prod[i][j].re.contains(M[i][j]) and prod[i][j].im.contains(0)
               for i in range(n) for j in range(n))


def _sum(it):
    acc = CInterval(0)
    for x in it:
        acc = acc + x
    return acc
