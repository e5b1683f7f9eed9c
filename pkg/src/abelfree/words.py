"""Alphabets, words, Parikh vectors and morphisms.

Words are tuples of letter indices.  An :class:`Alphabet` translates between
tokens (arbitrary whitespace-free strings such as ``a`` or ``(2,1)``) and
indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...]


class MorphismParseError(ValueError):
    """Malformed ``.mrf`` input.  ``line`` is 1-based (0 when global)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class MethodInapplicable(Exception):
    """The input lies outside the hypotheses of the decision procedure."""


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must contain at least one letter")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"duplicate letters in alphabet {self.letters}")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.letters)})

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"letter {token!r} not in alphabet {self.letters}") from None

    def __contains__(self, token) -> bool:
        return token in self._index

    @property
    def single_char(self) -> bool:
        return all(len(a) == 1 for a in self.letters)

    def encode(self, text: str | Sequence[str]) -> Word:
        """Tokens (or a plain string when every token is one character) to a word."""
        if isinstance(text, str):
            tokens = list(text) if self.single_char else text.split()
        else:
            tokens = list(text)
        return tuple(self.index(t) for t in tokens)

    def decode(self, word: Iterable[int]) -> str:
        sep = "" if self.single_char else " "
        return sep.join(self.letters[i] for i in word)


def parikh(word: Sequence[int], n: int) -> tuple:
    """Parikh vector of ``word`` over an alphabet of size ``n``."""
    counts = [0] * n
    for a in word:
        counts[a] += 1
    return tuple(counts)


@dataclass(frozen=True)
class Morphism:
    """A substitution ``source* -> target*``.

    ``matrix[a][b]`` is the number of occurrences of target letter ``a`` in the
    image of source letter ``b``, so ``matrix @ parikh(w) == parikh(h(w))``.
    """

    source: Alphabet
    target: Alphabet
    images: tuple
    name: str = ""
    matrix: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise ValueError("one image per source letter is required")
        m = len(self.target)
        for img in self.images:
            if any(not 0 <= a < m for a in img):
                raise ValueError(f"image {img} uses letters outside the target alphabet")
        cols = [parikh(img, m) for img in self.images]
        mat = tuple(tuple(cols[b][a] for b in range(len(self.source))) for a in range(m))
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_strings(cls, rules: dict, name: str = "", target: Sequence[str] | None = None):
        """Build from ``{letter: image}`` with single-character tokens."""
        source = Alphabet(tuple(rules))
        tgt = Alphabet(tuple(target)) if target is not None else source
        images = tuple(tgt.encode(rules[a]) for a in source.letters)
        return cls(source, tgt, images, name)

    @property
    def n(self) -> int:
        return len(self.source)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    @property
    def max_length(self) -> int:
        return max(len(img) for img in self.images)

    @property
    def min_length(self) -> int:
        return min(len(img) for img in self.images)

    def __call__(self, word: Sequence[int]) -> Word:
        return self.apply(word)

    def apply(self, word: Sequence[int], power: int = 1) -> Word:
        if power < 0:
            raise ValueError("power must be nonnegative")
        if power > 1 and not self.is_endomorphism:
            raise ValueError("iterating a morphism requires an endomorphism")
        w = tuple(word)
        for _ in range(power):
            w = tuple(a for b in w for a in self.images[b])
        return w

    def compose(self, inner: "Morphism") -> "Morphism":
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise ValueError("alphabets do not match for composition")
        images = tuple(self.apply(img) for img in inner.images)
        name = f"{self.name}∘{inner.name}" if self.name and inner.name else ""
        return Morphism(inner.source, self.target, images, name)

    def power(self, k: int) -> "Morphism":
        if k < 1:
            raise ValueError("power must be positive")
        images = tuple(self.apply((a,), k) for a in range(self.n))
        name = f"{self.name}^{k}" if self.name and k > 1 else self.name
        return Morphism(self.source, self.target, images, name)

    def image_str(self, a: int) -> str:
        return self.target.decode(self.images[a])

    def to_mrf(self) -> str:
        lines = ["alphabet: " + " ".join(self.source.letters)]
        if not self.is_endomorphism:
            lines.append("target: " + " ".join(self.target.letters))
        for a, img in zip(self.source.letters, self.images):
            lines.append(f"{a} -> " + " ".join(self.target.letters[i] for i in img))
        return "\n".join(lines) + "\n"


def parse_morphism(text: str, name: str = "") -> Morphism:
    """Parse ``.mrf`` text.

    Format: ``#`` comments, one ``alphabet:`` line, an optional ``target:`` line
    (defaults to the source alphabet), then one ``tok -> tok tok ...`` rule per
    letter.  Tokens are whitespace separated; an empty right side is an
    erasing rule.
    """
    source = target = None
    rules: dict = {}
    rule_lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip() in ("alphabet", "target") and "->" not in line:
            tokens = tuple(rest.split())
            try:
                alpha = Alphabet(tokens)
            except ValueError as exc:
                raise MorphismParseError(str(exc), lineno) from None
            if head.strip() == "alphabet":
                if source is not None:
                    raise MorphismParseError("second alphabet line", lineno)
                source = alpha
            else:
                if target is not None:
                    raise MorphismParseError("second target line", lineno)
                target = alpha
            continue
        if "->" not in line:
            raise MorphismParseError(f"cannot parse {raw.strip()!r}", lineno)
        lhs, rhs = line.split("->", 1)
        lhs_tokens = lhs.split()
        if len(lhs_tokens) != 1:
            raise MorphismParseError("rule must have exactly one letter on the left", lineno)
        letter = lhs_tokens[0]
        if letter in rules:
            raise MorphismParseError(f"duplicate rule for {letter!r}", lineno)
        rules[letter] = rhs.split()
        rule_lines[letter] = lineno
    if source is None:
        raise MorphismParseError("missing 'alphabet:' line")
    target = target or source
    for letter, lineno in rule_lines.items():
        if letter not in source:
            raise MorphismParseError(f"rule for unknown letter {letter!r}", lineno)
        for tok in rules[letter]:
            if tok not in target:
                raise MorphismParseError(f"unknown letter {tok!r} in image of {letter!r}", lineno)
    for letter in source.letters:
        if letter not in rules:
            raise MorphismParseError(f"missing rule for letter {letter!r}")
    images = tuple(tuple(target.index(t) for t in rules[a]) for a in source.letters)
    return Morphism(source, target, images, name)


def is_primitive(h: Morphism) -> tuple[bool, int | None]:
    """Return ``(True, k)`` with the least ``k`` such that ``M^k > 0``, else ``(False, None)``.

    Powers beyond the Wielandt bound ``(n-1)^2 + 1`` are never needed.
    """
    if not h.is_endomorphism:
        raise ValueError("primitivity is defined for endomorphisms")
    n = h.n
    base = [[h.matrix[i][j] > 0 for j in range(n)] for i in range(n)]
    cur = base
    for k in range(1, (n - 1) ** 2 + 2):
        if all(all(row) for row in cur):
            return True, k
        cur = [[any(cur[i][m] and base[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
    return False, None


def _require_primitive(h: Morphism) -> None:
    if not h.is_endomorphism or not is_primitive(h)[0]:
        raise MethodInapplicable(f"morphism {h.name or ''} is not primitive".replace("  ", " "))


def fixed_point_prefix(h: Morphism, length: int, letter: int | None = None) -> Word:
    """A prefix of an infinite word of ``h^∞``.

    Iterates ``h`` on a letter whose image starts with itself.  When there is
    none, the first-letter map has a cycle of length ``p`` and ``h^p`` is
    iterated instead.
    """
    g = h
    if letter is None:
        starters = [a for a in range(h.n) if h.images[a][:1] == (a,)]
        if not starters:
            for p in range(2, h.n + 1):
                g = h.power(p)
                starters = [a for a in range(h.n) if g.images[a][:1] == (a,)]
                if starters:
                    break
        if not starters:
            raise MethodInapplicable("no letter generates an infinite fixed point")
        letter = starters[0]
    if len(g.images[letter]) < 2:
        raise MethodInapplicable("the chosen letter does not generate an infinite word")
    w: Word = (letter,)
    while len(w) < length:
        nxt = g.apply(w)
        if len(nxt) <= len(w):
            raise MethodInapplicable("iteration does not grow")
        w = nxt
    return w[:length]


def _windows(word: Sequence[int], size: int):
    for i in range(len(word) - size + 1):
        yield tuple(word[i:i + size])


def _all_factors(words: Iterable[Word], max_len: int) -> set:
    out = set()
    for w in words:
        for i in range(len(w)):
            for j in range(i + 1, min(len(w), i + max_len) + 1):
                out.add(w[i:j])
    return out


def factors_of_length(h: Morphism, length: int) -> set:
    """All factors of exactly ``length`` letters of ``Fact∞(h)`` (``h`` primitive).

    The set is the least fixpoint of ``S -> S ∪ windows(h(S))`` started from the
    windows of a long enough ``h^j(a)``.  It is finite, so the iteration stops.
    """
    _require_primitive(h)
    if length <= 0:
        return set()
    if length == 1:
        return {(a,) for a in range(h.n)}
    w: Word = (0,)
    while len(w) < length:
        w = h.apply(w)
    found = set(_windows(w, length))
    frontier = list(found)
    while frontier:
        new = []
        for u in frontier:
            for v in _windows(h.apply(u), length):
                if v not in found:
                    found.add(v)
                    new.append(v)
        frontier = new
    return found


def factors_up_to(h: Morphism, max_len: int) -> set:
    """Nonempty factors of ``Fact∞(h)`` of length at most ``max_len``."""
    _require_primitive(h)
    if max_len <= 0:
        return set()
    return _all_factors(factors_of_length(h, max_len), max_len)


def _image_window(g: Morphism, h: Morphism, max_len: int) -> int:
    """Length of preimage factors whose images contain every image factor of ``max_len`` letters."""
    if g.max_length == 0:
        raise ValueError("every image of g is empty")
    if g.min_length > 0:
        return math.ceil(max_len / g.min_length) + 2
    # smallest l such that every factor of length l has an image longer than max_len
    l = 1
    while min(len(g.apply(u)) for u in factors_of_length(h, l)) <= max_len:
        l += 1
    return l + 2


def image_factors_of_length(g: Morphism, h: Morphism, length: int) -> set:
    """All factors of exactly ``length`` letters of ``g(Fact∞(h))``."""
    _require_primitive(h)
    if g.source != h.source:
        raise ValueError("g must be defined on the alphabet of h")
    if length <= 0:
        return set()
    out = set()
    for u in factors_of_length(h, _image_window(g, h, length)):
        out.update(_windows(g.apply(u), length))
    return out


def image_factors_up_to(g: Morphism, h: Morphism, max_len: int) -> set:
    """Nonempty factors of length at most ``max_len`` of ``g(Fact∞(h))``."""
    _require_primitive(h)
    if g.source != h.source:
        raise ValueError("g must be defined on the alphabet of h")
    if max_len <= 0:
        return set()
    out = set()
    for u in factors_of_length(h, _image_window(g, h, max_len)):
        out |= _all_factors([g.apply(u)], max_len)
    return out
