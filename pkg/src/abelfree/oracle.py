"""Brute-force power detectors over finite words.

These are independent verifiers: they never use templates or bounds.  Every
detector scans periods in increasing order and, for each period, all start
positions at once with prefix sums, then reports the witness that is first
in ``(start, period)`` order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ABELIAN = "abelian"
MODULO = "modulo"
KABELIAN = "kabelian"


@dataclass(frozen=True)
class PowerWitness:
    """``w[start : start + k*period]`` is a ``k``-th power of the given mode.

    For non-uniform powers modulo a group map ``cuts`` lists the ``k + 1``
    block boundaries; otherwise blocks all have length ``period``.
    """

    start: int
    period: int
    k: int
    mode: str
    window: int = 1
    cuts: tuple | None = None

    @property
    def boundaries(self) -> tuple:
        if self.cuts is not None:
            return self.cuts
        return tuple(self.start + j * self.period for j in range(self.k + 1))

    @property
    def end(self) -> int:
        return self.boundaries[-1]

    def blocks(self, word: Sequence) -> list:
        b = self.boundaries
        return [tuple(word[b[j]:b[j + 1]]) for j in range(self.k)]

    def to_json(self) -> dict:
        return {"start": self.start, "period": self.period, "k": self.k, "mode": self.mode,
                "window": self.window, "boundaries": list(self.boundaries)}


def _as_array(word: Sequence[int]) -> np.ndarray:
    return np.asarray(list(word), dtype=np.int64)


def _prefix_features(F: np.ndarray) -> np.ndarray:
    """Row ``i`` holds the sum of the first ``i`` feature rows."""
    out = np.zeros((F.shape[0] + 1, F.shape[1]), dtype=np.int64)
    np.cumsum(F, axis=0, out=out[1:])
    return out


def _onehot(w: np.ndarray, n: int) -> np.ndarray:
    F = np.zeros((len(w), n), dtype=np.int64)
    F[np.arange(len(w)), w] = 1
    return F


def _uniform_scan(cum: np.ndarray, k: int, min_period: int, max_period: int | None):
    """First ``(start, period)`` where ``k`` consecutive equal-length blocks have equal feature sums.

    ``cum`` is a prefix-sum table over positions; the features of a block
    ``[i, j)`` are ``cum[j] − cum[i]``.
    """
    L = cum.shape[0] - 1
    top = L // k if max_period is None else min(max_period, L // k)
    best = None
    for p in range(max(min_period, 1), top + 1):
        if best is not None and best[0] == 0:
            break
        span = k * p
        starts = L - span + 1
        if best is not None:
            starts = min(starts, best[0])  # only earlier starts can improve
        if starts <= 0:
            continue
        first = cum[p:p + starts] - cum[0:starts]
        ok = np.ones(starts, dtype=bool)
        for j in range(1, k):
            blk = cum[(j + 1) * p:(j + 1) * p + starts] - cum[j * p:j * p + starts]
            ok &= (blk == first).all(axis=1)
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            cand = (int(hits[0]), p)
            if best is None or cand < best:
                best = cand
    return best


def find_abelian_power(w: Sequence[int], k: int, min_period: int = 1, max_period: int | None = None,
                       n: int | None = None) -> PowerWitness | None:
    """First abelian ``k``-th power of period in ``[min_period, max_period]``."""
    a = _as_array(w)
    if a.size == 0:
        return None
    n = n or int(a.max()) + 1
    best = _uniform_scan(_prefix_features(_onehot(a, n)), k, min_period, max_period)
    return None if best is None else PowerWitness(best[0], best[1], k, ABELIAN)


def find_power_mod(w: Sequence[int], F: Sequence[Sequence[int]], k: int, uniform: bool = False,
                   min_period: int = 1, max_period: int | None = None,
                   max_length: int | None = None) -> PowerWitness | None:
    """First ``k``-th power modulo the group map with matrix ``F`` (``d × n``).

    Uniform powers have blocks of a common length ``period``.  Non-uniform
    powers have arbitrary nonempty blocks; their ``period`` is the length of
    the first block and its range is ``[min_period, max_period]``.  The
    total length of a non-uniform power is capped by ``max_length``
    (default: the whole word).
    """
    a = _as_array(w)
    if a.size == 0:
        return None
    Fm = np.asarray(F, dtype=np.int64)
    vals = Fm.T[a]  # per-letter images, shape L × d
    cum = _prefix_features(vals)
    if uniform:
        best = _uniform_scan(cum, k, min_period, max_period)
        return None if best is None else PowerWitness(best[0], best[1], k, MODULO)
    return _nonuniform_scan(cum, k, min_period, max_period, max_length)


def _nonuniform_scan(cum, k, min_period, max_period, max_length):
    L = cum.shape[0] - 1
    cap = L if max_length is None else min(L, max_length)
    index = {}
    for pos in range(L + 1):
        index.setdefault(cum[pos].tobytes(), []).append(pos)
    keys = [cum[pos] for pos in range(L + 1)]
    top = cap if max_period is None else min(max_period, cap)
    for start in range(L):
        for p in range(max(min_period, 1), top + 1):
            if start + k * 1 + p - 1 > L:
                break
            v = keys[start + p] - keys[start]
            cuts = _extend(keys, index, [start, start + p], v, k, start + cap)
            if cuts is not None:
                return PowerWitness(start, p, k, MODULO, cuts=tuple(cuts))
    return None


def _extend(keys, index, cuts, v, k, limit):
    """Depth-first completion of block boundaries in lexicographic order."""
    if len(cuts) == k + 1:
        return cuts
    last = cuts[-1]
    target = (keys[last] + v).tobytes()
    for pos in index.get(target, ()):
        if pos <= last:
            continue
        if pos > limit:
            break
        r = _extend(keys, index, cuts + [pos], v, k, limit)
        if r is not None:
            return r
    return None


def _window_features(a: np.ndarray, window: int) -> np.ndarray:
    """Prefix-count table of every factor of length ``<= window`` starting at each position.

    Column ``c`` for factor ``x`` counts occurrences of ``x`` that start
    before the given position.  A block ``[i, j)`` contains the occurrences
    of ``x`` starting in ``[i, j − |x|]``, so counts are read with a shifted
    end index (see :func:`find_kabelian_power`).
    """
    L = len(a)
    n = int(a.max()) + 1
    tables = []
    for m in range(1, window + 1):
        if m > L:
            tables.append(np.zeros((L + 1, 0), dtype=np.int64))
            continue
        codes = np.zeros(L - m + 1, dtype=np.int64)
        for off in range(m):
            codes = codes * n + a[off:L - m + 1 + off]
        uniq, inv = np.unique(codes, return_inverse=True)
        ind = np.zeros((L - m + 1, len(uniq)), dtype=np.int64)
        ind[np.arange(L - m + 1), inv] = 1
        tab = np.zeros((L + 1, len(uniq)), dtype=np.int64)
        np.cumsum(ind, axis=0, out=tab[1:L - m + 2])
        tab[L - m + 2:] = tab[L - m + 1]
        tables.append(tab)
    return tables


def find_kabelian_power(w: Sequence[int], window: int, k: int, min_period: int = 1,
                        max_period: int | None = None) -> PowerWitness | None:
    """First ``window``-abelian ``k``-th power of period in ``[min_period, max_period]``.

    Blocks are compared by the number of occurrences of each factor of
    length at most ``window``.
    """
    a = _as_array(w)
    if a.size == 0:
        return None
    L = len(a)
    tables = _window_features(a, window)
    top = L // k if max_period is None else min(max_period, L // k)
    best = None
    for p in range(max(min_period, 1), top + 1):
        if best is not None and best[0] == 0:
            break
        starts = L - k * p + 1
        if best is not None:
            starts = min(starts, best[0])
        if starts <= 0:
            continue
        ok = np.ones(starts, dtype=bool)
        for m, tab in enumerate(tables, start=1):
            if m > p:
                break  # no factor of length m fits in a block
            base = np.arange(starts)

            def counts(j):
                s = base + j * p
                e = s + p - m + 1
                return tab[e] - tab[s]

            first = counts(0)
            for j in range(1, k):
                ok &= (counts(j) == first).all(axis=1)
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            cand = (int(hits[0]), p)
            if best is None or cand < best:
                best = cand
    return None if best is None else PowerWitness(best[0], best[1], k, KABELIAN, window=window)


# ---------------------------------------------------------------------------
# direct checks used to validate reported witnesses

def _count(u: Sequence, x: tuple) -> int:
    m = len(x)
    return sum(1 for i in range(len(u) - m + 1) if tuple(u[i:i + m]) == x)


def kabelian_equivalent(u: Sequence, v: Sequence, window: int) -> bool:
    """Direct definition: equal counts of every factor of length ``<= window``."""
    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        return False
    for m in range(1, window + 1):
        xs = {u[i:i + m] for i in range(len(u) - m + 1)} | {v[i:i + m] for i in range(len(v) - m + 1)}
        if any(_count(u, x) != _count(v, x) for x in xs):
            return False
    return True


def validate(w: Sequence[int], wit: PowerWitness, F=None, uniform: bool = False) -> bool:
    """Recheck a witness from scratch against its mode's definition."""
    b = wit.boundaries
    if len(b) != wit.k + 1 or b[0] < 0 or b[-1] > len(w) or any(y <= x for x, y in zip(b, b[1:])):
        return False
    blocks = wit.blocks(w)
    if wit.mode == ABELIAN:
        return all(sorted(x) == sorted(blocks[0]) for x in blocks)
    if wit.mode == KABELIAN:
        return all(kabelian_equivalent(x, blocks[0], wit.window) for x in blocks)
    Fm = np.asarray(F, dtype=np.int64)
    imgs = [tuple(int(v) for v in Fm[:, list(x)].sum(axis=1)) for x in blocks]
    if uniform and any(len(x) != len(blocks[0]) for x in blocks):
        return False
    return all(v == imgs[0] for v in imgs)
