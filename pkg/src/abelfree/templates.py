"""Templates, parents, ancestor closure, realizations and the factor scan.

A k-template ``[a_1..a_{k+1}, d_1..d_{k-1}]`` is stored with borders as letter
indices (``EPS = -1`` for the empty border) and gaps as integer tuples.

Parents by a morphism ``g`` are computed from border choices
``g(a'_i) = p_i a_i s_i``: for gap ``m`` the unknown ``d'_m`` satisfies

    M_g · d'_m = d_m + Ψ(s_m) + Ψ(p_{m+1}) − Ψ(s_{m+1}) − Ψ(p_{m+2}),

whose integer solutions form a coset of ``Ker M_g ∩ Z^n`` that is cut down to
a finite set by the contracting bounds of the underlying primitive morphism.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundsProfile, CosetEnumerator, choose_power, contracting_bounds
from .linalg import intmat
from .linalg.spectral import ModulusOneError, spectral_data
from .words import MethodInapplicable, Morphism, factors_of_length, is_primitive, parikh

EPS = -1


class ResourceExceeded(RuntimeError):
    """A configured cap was hit; no verdict is implied."""


@dataclass(frozen=True)
class Template:
    borders: tuple
    gaps: tuple

    def __post_init__(self):
        if len(self.borders) < 3:
            raise ValueError("a k-template needs k >= 2")
        if len(self.gaps) != len(self.borders) - 2:
            raise ValueError("k+1 borders need k-1 gaps")
        if len({len(g) for g in self.gaps}) > 1:
            raise ValueError("gap vectors must have equal length")

    @property
    def k(self) -> int:
        return len(self.borders) - 1

    @property
    def n(self) -> int:
        return len(self.gaps[0])

    @property
    def Delta(self) -> int:
        return max(sum(abs(v) for v in d) for d in self.gaps)

    @property
    def pattern(self) -> tuple:
        return tuple(b != EPS for b in self.borders)

    @property
    def sigma(self) -> tuple:
        return tuple(sum(d) for d in self.gaps)

    def describe(self, letters: Sequence[str] | None = None) -> str:
        def b(x):
            if x == EPS:
                return "ε"
            return letters[x] if letters else str(x)
        parts = [b(x) for x in self.borders] + ["(" + ",".join(map(str, d)) + ")" for d in self.gaps]
        return "[" + ", ".join(parts) + "]"


def trivial_template(k: int, n: int) -> Template:
    if k < 2:
        raise ValueError("k must be at least 2")
    return Template((EPS,) * (k + 1), ((0,) * n,) * (k - 1))


def scan_threshold_of(t: Template, delta: int) -> int:
    """``k((k−1)Δ(t)/2 + δ + 1) + 1`` (always an integer)."""
    k = t.k
    return k * (k - 1) * t.Delta // 2 + k * (delta + 1) + 1


def scan_threshold(S: Iterable[Template], h: Morphism, k: int | None = None) -> int:
    delta = h.max_length
    vals = [scan_threshold_of(t, delta) for t in S]
    if not vals:
        raise ValueError("empty template set")
    return max(vals)


# ---------------------------------------------------------------------------
# realizations

@dataclass(frozen=True)
class Realization:
    """``word = a_1 w_1 a_2 … w_k a_{k+1}``; ``blocks[i] = (start, end)`` of ``w_{i+1}``."""

    word: tuple
    blocks: tuple
    template: Template

    def check(self) -> bool:
        t = self.template
        n = t.n
        pos = 0
        for i, a in enumerate(t.borders):
            if a != EPS:
                if pos >= len(self.word) or self.word[pos] != a:
                    return False
                pos += 1
            if i < t.k:
                s, e = self.blocks[i]
                if s != pos or e < s:
                    return False
                pos = e
        if pos != len(self.word):
            return False
        ps = [parikh(self.word[s:e], n) for s, e in self.blocks]
        return all(tuple(y - x for x, y in zip(ps[i], ps[i + 1])) == tuple(t.gaps[i]) for i in range(t.k - 1))

    @property
    def nondegenerate(self) -> bool:
        t = self.template
        return any(b != EPS for b in t.borders[1:-1]) or any(e > s for s, e in self.blocks)


def _cum(word, n):
    cum = [(0,) * n]
    acc = [0] * n
    for a in word:
        acc[a] += 1
        cum.append(tuple(acc))
    return cum


def realizes(w: Sequence[int], t: Template, nondegenerate: bool = False):
    """First realization of ``t`` by ``w`` in lexicographic split order, or ``None``."""
    w = tuple(w)
    k, n = t.k, t.n
    cum = _cum(w, n)
    L = len(w)

    def rec(i, pos, blocks):
        # place border i at pos, then block i
        a = t.borders[i]
        if a != EPS:
            if pos >= L or w[pos] != a:
                return None
            pos += 1
        if i == k:
            if pos != L:
                return None
            r = Realization(w, tuple(blocks), t)
            if nondegenerate and not r.nondegenerate:
                return None
            return r
        ends = range(pos, L + 1)
        if i > 0:
            ps, pe = blocks[-1]
            target = tuple(cum[pe][c] - cum[ps][c] + t.gaps[i - 1][c] for c in range(n))
            if any(v < 0 for v in target):
                return None
            ln = sum(target)
            ends = [pos + ln] if pos + ln <= L else []
        for e in ends:
            if i > 0 and tuple(cum[e][c] - cum[pos][c] for c in range(n)) != target:
                continue
            r = rec(i + 1, e, blocks + [(pos, e)])
            if r is not None:
                return r
        return None

    return rec(0, 0, [])


# ---------------------------------------------------------------------------
# parent engine

@dataclass(frozen=True)
class BorderChoice:
    letter: int      # a'_i or EPS
    split: int       # position of a_i (or of the cut when a_i = ε) inside g(a'_i)
    p: tuple         # Ψ(p_i)
    s: tuple         # Ψ(s_i)


class ParentEngine:
    """Parents by ``g`` (source alphabet Σ, target Σ') of templates over Σ'.

    Candidate gaps are restricted with the contracting bounds ``profile`` of a
    primitive morphism on Σ; ``g`` may equal that morphism.
    """

    def __init__(self, g: Morphism, profile: BoundsProfile, cache_limit: int = 2_000_000):
        self.g = g
        self.profile = profile
        self.n_src = g.n
        self.n_tgt = len(g.target)
        self.M = g.matrix
        self.sd = intmat.smith(self.M)
        self.enum = CosetEnumerator(self.sd.kernel_basis, profile)
        self._Uinv = np.array(self.sd.Uinv, dtype=np.int64)
        r = self.sd.rank
        self._diag = np.array([self.sd.D[i][i] for i in range(r)], dtype=np.int64)
        self._rank = r
        self._cache: dict = {}
        self._options: dict = {}
        self.cache_limit = cache_limit
        self.solves = 0

    # border options -------------------------------------------------------
    def options(self, a: int, role: str) -> list:
        """Border choices for child border ``a``; ``role`` in first/middle/last.

        Choices are deduplicated on what the gap equations can see: the
        suffix for the first border, the prefix for the last one.
        """
        key = (a, role)
        if key in self._options:
            return self._options[key]
        n = self.n_tgt
        zero = (0,) * n
        out = []
        seen = set()
        if a == EPS:
            out.append(BorderChoice(EPS, 0, zero, zero))
            seen.add((EPS, zero, zero))
        for b in range(self.n_src):
            img = self.g.images[b]
            if a == EPS:
                cuts = [(t, img[:t], img[t:]) for t in range(len(img) + 1)]
            else:
                cuts = [(t, img[:t], img[t + 1:]) for t in range(len(img)) if img[t] == a]
            for t, pw, sw in cuts:
                p, s = parikh(pw, n), parikh(sw, n)
                vis = (b, zero if role == "first" else p, zero if role == "last" else s)
                if vis in seen:
                    continue
                seen.add(vis)
                out.append(BorderChoice(b, t, p, s))
        self._options[key] = out
        return out

    def solve(self, rhs: tuple) -> np.ndarray:
        """Candidate gap vectors ``d'`` with ``M d' = rhs`` inside the bounds."""
        hit = self._cache.get(rhs)
        if hit is not None:
            return hit
        sol = intmat.solve_diophantine(self.M, rhs, self.sd)
        if sol is None:
            X = np.zeros((0, self.n_src), dtype=np.int64)
        else:
            X = self.enum.candidates(sol[0])
        self.solves += 1
        if len(self._cache) < self.cache_limit:
            self._cache[rhs] = X
        return X

    def _solvable_mask(self, R: np.ndarray) -> np.ndarray:
        Y = R @ self._Uinv.T
        r = self._rank
        ok = np.all(Y[:, r:] == 0, axis=1) if Y.shape[1] > r else np.ones(len(R), dtype=bool)
        if r:
            ok &= np.all(Y[:, :r] % self._diag == 0, axis=1)
        return ok

    def parents(self, t: Template, with_choices: bool = False):
        """All parents of ``t`` inside the bounds.

        Returns a set of templates, or a dict ``parent -> choice tuple`` when
        ``with_choices`` is set (first choice found for each parent).
        """
        k = t.k
        roles = ["first"] + ["middle"] * (k - 1) + ["last"]
        opts = [self.options(a, role) for a, role in zip(t.borders, roles)]
        P = [np.array([o.p for o in op], dtype=np.int64) for op in opts]
        S = [np.array([o.s for o in op], dtype=np.int64) for op in opts]
        # per gap m (0-based): borders m, m+1, m+2
        valid = []
        for m in range(k - 1):
            i0, i1, i2 = m, m + 1, m + 2
            base = np.array(t.gaps[m], dtype=np.int64)
            A = S[i0][:, None, None, :]
            B = (P[i1] - S[i1])[None, :, None, :]
            C = (-P[i2])[None, None, :, :]
            R = base + A + B + C
            shape3 = R.shape[:3]
            R = R.reshape(-1, self.n_tgt)
            mask = self._solvable_mask(R)
            idx = np.nonzero(mask)[0]
            entries = {}
            for flat in idx:
                rhs = tuple(int(v) for v in R[flat])
                X = self.solve(rhs)
                if len(X):
                    entries[np.unravel_index(flat, shape3)] = X
            valid.append(entries)
        # join consecutive gaps on shared borders
        partial = []  # list of (border index tuple, [X_0..X_m])
        for (a, b, c), X in valid[0].items():
            partial.append(((int(a), int(b), int(c)), [X]))
        for m in range(1, k - 1):
            by_prefix = defaultdict(list)
            for (a, b, c), X in valid[m].items():
                by_prefix[(int(a), int(b))].append((int(c), X))
            nxt = []
            for idxs, Xs in partial:
                for c, X in by_prefix.get(idxs[-2:], []):
                    nxt.append((idxs + (c,), Xs + [X]))
            partial = nxt
        result = {} if with_choices else set()
        for idxs, Xs in partial:
            borders = tuple(opts[j][i].letter for j, i in enumerate(idxs))
            choice = tuple(opts[j][i] for j, i in enumerate(idxs))
            for gaps in itertools.product(*[[tuple(int(v) for v in x) for x in X] for X in Xs]):
                tp = Template(borders, gaps)
                if with_choices:
                    if tp not in result:
                        result[tp] = choice
                else:
                    result.add(tp)
        return result


# ---------------------------------------------------------------------------
# closure

@dataclass
class Closure:
    templates: set
    provenance: dict          # parent -> (child, choice tuple)
    seeds: tuple
    parents_of_seed: int      # parents of the first seed, excluding itself
    solves: int = 0


def ancestor_closure(seeds: Sequence[Template], engine: ParentEngine, max_size: int = 10_000_000,
                     progress=None) -> Closure:
    """Least set containing the seeds and closed under computed parents."""
    seeds = tuple(seeds)
    found = set(seeds)
    prov: dict = {}
    work = list(seeds)
    first_count = None
    head = 0
    while head < len(work):
        t = work[head]
        head += 1
        par = engine.parents(t, with_choices=True)
        if first_count is None:
            first_count = len(set(par) - {seeds[0]})
        for tp, choice in par.items():
            if tp not in found:
                found.add(tp)
                prov[tp] = (t, choice)
                work.append(tp)
                if len(found) > max_size:
                    raise ResourceExceeded(f"ancestor closure exceeded {max_size} templates")
        if progress and head % 1000 == 0:
            progress(head, len(found))
    return Closure(found, prov, seeds, first_count or 0, engine.solves)


def push_forward(real: Realization, child: Template, choice: tuple, g: Morphism) -> Realization:
    """Image of a realization of a parent under ``g`` as a realization of ``child``."""
    t = real.template
    w = real.word
    # image position of every letter of w
    starts = [0]
    for a in w:
        starts.append(starts[-1] + len(g.images[a]))
    image = g.apply(w)
    k = t.k
    border_pos = []
    pos = 0
    for i, a in enumerate(t.borders):
        border_pos.append(pos if a != EPS else None)
        if a != EPS:
            pos += 1
        if i < k:
            pos = real.blocks[i][1]
    # child borders and their image positions
    cut = []  # (start of a_i, end of a_i) within image
    for i, (a, ch) in enumerate(zip(child.borders, choice)):
        if ch.letter == EPS:
            # border is empty and sits at the start of the image of block i (or end of block i-1)
            if i < k:
                q = starts[real.blocks[i][0]]
            else:
                q = starts[real.blocks[k - 1][1]]
            cut.append((q, q))
        else:
            q = starts[border_pos[i]] + ch.split
            cut.append((q, q + (1 if a != EPS else 0)))
    lo, hi = cut[0][0], cut[-1][1]
    blocks = tuple((cut[i][1] - lo, cut[i + 1][0] - lo) for i in range(k))
    return Realization(tuple(image[lo:hi]), blocks, child)


def lift_witness(real: Realization, closure: Closure, g: Morphism) -> list:
    """Push a realization of a closure member down to a seed; returns the chain."""
    chain = [real]
    cur = real
    seeds = set(closure.seeds)
    guard = 0
    while cur.template not in seeds:
        child, choice = closure.provenance[cur.template]
        cur = push_forward(cur, child, choice, g)
        chain.append(cur)
        guard += 1
        if guard > 10_000:
            raise RuntimeError("provenance cycle")
    return chain


# ---------------------------------------------------------------------------
# factor scan

def scan_factors(S: Iterable[Template], h: Morphism, max_len: int | None = None, per_template: bool = True,
                 extra_length: int | None = None):
    """Search factors of ``Fact∞(h)`` for nondegenerate realizations of members of ``S``.

    Each template is checked on factors up to its own threshold (or up to
    ``max_len`` when ``per_template`` is off), and additionally up to
    ``extra_length`` when given.  Templates are grouped by border pattern
    and gap sums; for a factor of a given length the block lengths are then
    forced, so each group costs one hash lookup per factor.  Returns
    ``(realization or None, factors_scanned)``.
    """
    delta = h.max_length
    groups = defaultdict(dict)
    for t in S:
        lim = scan_threshold_of(t, delta) if per_template else None
        if lim is not None and extra_length is not None:
            lim = max(lim, extra_length)
        groups[(t.pattern, t.sigma)][(t.borders, t.gaps)] = lim
    if not groups:
        return None, 0
    ginfo = []
    for (pattern, sigma), members in groups.items():
        limit = max(v for v in members.values()) if per_template else max_len
        if max_len is not None:
            limit = min(limit, max_len)
        ginfo.append((pattern, sigma, members, limit))
    smax = max(gi[3] for gi in ginfo)
    n = h.n
    scanned = 0
    for L in range(1, smax + 1):
        active = [gi for gi in ginfo if gi[3] >= L]
        if not active:
            continue
        layouts = []
        for pattern, sigma, members, _ in active:
            k = len(pattern) - 1
            nb = sum(pattern)
            offs = [0]
            for sg in sigma:
                offs.append(offs[-1] + sg)
            rest = L - nb - sum(offs)
            if rest < 0 or rest % k:
                continue
            l1 = rest // k
            lens = [l1 + o for o in offs]
            if min(lens) < 0:
                continue
            if not any(pattern[1:-1]) and not any(lens):
                continue  # degenerate
            # positions
            layout = []
            pos = 0
            for i in range(k + 1):
                bpos = pos if pattern[i] else None
                if pattern[i]:
                    pos += 1
                if i < k:
                    layout.append((bpos, (pos, pos + lens[i])))
                    pos += lens[i]
                else:
                    layout.append((bpos, None))
            layouts.append((layout, members, L))
        if not layouts:
            continue
        facs = sorted(factors_of_length(h, L))
        scanned += len(facs)
        W = np.array(facs, dtype=np.int64)
        onehot = np.zeros((len(facs), L, n), dtype=np.int64)
        np.put_along_axis(onehot, W[:, :, None], 1, axis=2)
        cum = np.concatenate([np.zeros((len(facs), 1, n), dtype=np.int64), np.cumsum(onehot, axis=1)], axis=1)
        for layout, members, _ in layouts:
            k = len(layout) - 1
            blocks = [layout[i][1] for i in range(k)]
            psis = [cum[:, e, :] - cum[:, s, :] for s, e in blocks]
            gaps = np.stack([psis[i + 1] - psis[i] for i in range(k - 1)], axis=1)
            bcols = [W[:, bp] if bp is not None else None for bp, _ in layout]
            for r in range(len(facs)):
                borders = tuple(int(bcols[i][r]) if bcols[i] is not None else EPS for i in range(k + 1))
                key = (borders, tuple(tuple(int(v) for v in g) for g in gaps[r]))
                if key in members and (members[key] is None or L <= members[key]):
                    t = Template(*key)
                    real = Realization(tuple(facs[r]), tuple(blocks), t)
                    assert real.check()
                    return real, scanned
    return None, scanned


# ---------------------------------------------------------------------------
# decision

@dataclass
class DecideConfig:
    power: int | None = 2          # None: pick the power automatically
    scan_length: int | None = None  # scan every factor up to this length as well
    max_closure: int = 10_000_000
    precision_bits: int = 128
    jordan_override: dict | None = None
    progress: object = None


@dataclass
class Decision:
    verdict: str                       # AVOIDED | REALIZED
    profile: BoundsProfile
    closure: Closure
    threshold: int
    factors_scanned: int
    witness: Realization | None = None       # realization of a seed
    witness_chain: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)


def prepare(h: Morphism, config: DecideConfig):
    """Primitivity check, spectral data and bounds (raises on inapplicability)."""
    if not h.is_endomorphism:
        raise MethodInapplicable("the morphism must be an endomorphism")
    ok, _ = is_primitive(h)
    if not ok:
        raise MethodInapplicable("the morphism is not primitive")
    try:
        sd = spectral_data(h.matrix, precision_bits=config.precision_bits,
                           jordan_override=config.jordan_override)
    except ModulusOneError as exc:
        raise MethodInapplicable(str(exc)) from None
    if config.power is None:
        profile = choose_power(h, sd)
    else:
        profile = contracting_bounds(h, sd, config.power)
    return sd, profile


def decide_templates(seeds: Sequence[Template], h: Morphism, config: DecideConfig | None = None,
                     profile: BoundsProfile | None = None) -> Decision:
    """Decide whether ``Fact∞(h)`` realizes (nondegenerately) one of the seeds."""
    config = config or DecideConfig()
    timings = {}
    t0 = time.perf_counter()
    if profile is None:
        _, profile = prepare(h, config)
    timings["bounds"] = time.perf_counter() - t0
    engine = ParentEngine(h, profile)
    t1 = time.perf_counter()
    closure = ancestor_closure(seeds, engine, config.max_closure, config.progress)
    timings["closure"] = time.perf_counter() - t1
    s = scan_threshold(closure.templates, h)
    t2 = time.perf_counter()
    real, scanned = scan_factors(closure.templates, h, extra_length=config.scan_length)
    timings["scan"] = time.perf_counter() - t2
    if real is None:
        return Decision("AVOIDED", profile, closure, s, scanned, timings=timings)
    chain = lift_witness(real, closure, h)
    return Decision("REALIZED", profile, closure, s, scanned, chain[-1], chain, timings)


def decide(t0: Template, h: Morphism, config: DecideConfig | None = None) -> Decision:
    return decide_templates([t0], h, config)
