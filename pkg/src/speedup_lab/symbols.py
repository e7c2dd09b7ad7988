"""Words, substitutions and the classical decision procedures on them.

Symbols are the integers ``0 .. n-1``; a word is a tuple of symbols.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Word = tuple


class DomainError(ValueError):
    """A symbol or word falls outside the alphabet of a substitution."""


@dataclass(frozen=True)
class Substitution:
    """A map from each symbol of ``{0, ..., n-1}`` to a nonempty word."""

    images: tuple

    def __init__(self, images):
        if isinstance(images, dict):
            keys = sorted(int(k) for k in images)
            if keys != list(range(len(keys))):
                raise DomainError(f"image keys must be 0..n-1, got {keys}")
            images = [images[k] if k in images else images[str(k)] for k in keys]
        imgs = tuple(tuple(int(s) for s in w) for w in images)
        n = len(imgs)
        if n == 0:
            raise DomainError("empty alphabet")
        for a, w in enumerate(imgs):
            if not w:
                raise DomainError(f"image of {a} is empty")
            bad = [s for s in w if not 0 <= s < n]
            if bad:
                raise DomainError(f"image of {a} uses symbols {bad} outside 0..{n - 1}")
        object.__setattr__(self, "images", imgs)

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, word: Sequence[int]) -> Word:
        return apply(self, word, 1)

    def __getitem__(self, a: int) -> Word:
        return self.images[a]

    def lengths(self) -> list[int]:
        return [len(w) for w in self.images]

    def power(self, k: int) -> "Substitution":
        """The substitution ``a -> theta^k(a)``."""
        if k < 1:
            raise ValueError("power must be >= 1")
        return Substitution([apply(self, (a,), k) for a in range(self.size)])

    def incidence_matrix(self) -> np.ndarray:
        """Entry ``(a, b)`` counts the occurrences of ``b`` in ``theta(a)``."""
        m = np.zeros((self.size, self.size), dtype=np.int64)
        for a, w in enumerate(self.images):
            for b in w:
                m[a, b] += 1
        return m

    def to_dict(self) -> dict:
        return {"alphabet": self.size,
                "images": {str(a): list(w) for a, w in enumerate(self.images)}}

    @classmethod
    def from_dict(cls, doc: dict) -> "Substitution":
        images = {int(k): v for k, v in doc["images"].items()}
        n = int(doc.get("alphabet", len(images)))
        if sorted(images) != list(range(n)):
            raise DomainError(f"'images' must define symbols 0..{n - 1}")
        return cls([images[a] for a in range(n)])

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __str__(self):
        return ", ".join(f"{a}->{''.join(map(str, w))}" for a, w in enumerate(self.images))


def _check_word(theta: Substitution, w: Iterable[int]) -> Word:
    w = tuple(int(s) for s in w)
    for s in w:
        if not 0 <= s < theta.size:
            raise DomainError(f"symbol {s} outside alphabet 0..{theta.size - 1}")
    return w


def apply(theta: Substitution, w: Sequence[int], k: int = 1) -> Word:
    """Return ``theta^k(w)``, concatenating images symbol by symbol."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    w = _check_word(theta, w)
    for _ in range(k):
        out = []
        for s in w:
            out.extend(theta.images[s])
        w = tuple(out)
    return w


def image_lengths(theta: Substitution, k: int) -> list[int]:
    """``|theta^k(a)|`` for every symbol, without building the words."""
    lengths = np.ones(theta.size, dtype=object)
    m = theta.incidence_matrix().astype(object)
    for _ in range(k):
        lengths = m.dot(lengths)
    return [int(x) for x in lengths]


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    power: int | None = None
    # (a, b): b never occurs in any theta^k(a); or ("length", a): |theta^k(a)| stays 1
    failure: tuple | None = None

    def __bool__(self):
        return self.primitive


def is_primitive(theta: Substitution) -> PrimitivityResult:
    """Decide primitivity via boolean powers of the incidence matrix.

    Returns the least ``k >= 1`` with ``M^k > 0``.  Wielandt's bound
    ``(n-1)^2 + 1`` caps the search.
    """
    n = theta.size
    m = theta.incidence_matrix() > 0
    # reachability in >= 1 steps, to name a failing pair
    reach = m.copy()
    for _ in range(n):
        reach = reach | ((reach.astype(np.int64) @ m.astype(np.int64)) > 0)
    if not reach.all():
        a, b = map(int, np.argwhere(~reach)[0])
        return PrimitivityResult(False, None, (a, b))
    bound = (n - 1) ** 2 + 1
    power = m.copy()
    k = 1
    while not power.all():
        if k >= bound:
            # irreducible but periodic matrix
            a, b = map(int, np.argwhere(~power)[0])
            return PrimitivityResult(False, None, (a, b))
        power = (power.astype(np.int64) @ m.astype(np.int64)) > 0
        k += 1
    if n == 1 and len(theta.images[0]) < 2:
        return PrimitivityResult(False, None, ("length", 0))
    return PrimitivityResult(True, k, None)


@dataclass(frozen=True)
class ProperResult:
    proper: bool
    left: int | None = None
    right: int | None = None
    power: int | None = None
    searched: int = 0

    def __bool__(self):
        return self.proper


def is_proper(theta: Substitution) -> ProperResult:
    """Search ``k = 1 .. n^2`` for a common first and last symbol of all ``theta^k(a)``.

    The pair of maps (first symbol, last symbol) under iteration lives on a set
    of size ``n^2``, so if no constant pair shows up by then it never will.
    """
    n = theta.size
    first = [w[0] for w in theta.images]
    last = [w[-1] for w in theta.images]
    f = list(range(n))
    g = list(range(n))
    kmax = n * n
    for k in range(1, kmax + 1):
        f = [first[a] for a in f]
        g = [last[a] for a in g]
        if len(set(f)) == 1 and len(set(g)) == 1:
            return ProperResult(True, f[0], g[0], k, k)
    return ProperResult(False, searched=kmax)


def subwords(w: Sequence[int], n: int) -> set:
    w = tuple(w)
    return {w[i:i + n] for i in range(len(w) - n + 1)}


def two_letter_words(theta: Substitution) -> set:
    """All length-2 words of the language, by closure under ``theta``."""
    found = set()
    for w in theta.images:
        found |= subwords(w, 2)
    frontier = set(found)
    while frontier:
        new = set()
        for ab in frontier:
            new |= subwords(apply(theta, ab), 2)
        frontier = new - found
        found |= frontier
    return found


def language(theta: Substitution, n: int) -> list:
    """The length-``n`` words of the subshift, sorted lexicographically.

    Every ``n``-word of a point sits inside ``theta^k(ab)`` for a legal
    2-word ``ab`` once every ``|theta^k(a)| >= n - 1``.
    """
    if n < 1:
        raise ValueError("word length must be positive")
    pairs = two_letter_words(theta)
    if n == 1:
        return sorted({(s,) for ab in pairs for s in ab} or {(0,)})
    k = 0
    while min(image_lengths(theta, k)) < n - 1:
        k += 1
        if k > 64:
            raise DomainError("image lengths do not grow; is the substitution primitive?")
    words = set()
    for ab in pairs:
        words |= subwords(apply(theta, ab, k), n)
    return sorted(words)


def complexity(theta: Substitution, nmax: int) -> list[int]:
    """``[|W_1|, ..., |W_nmax|]``."""
    return [len(language(theta, n)) for n in range(1, nmax + 1)]


APERIODIC_CERTIFIED = "APERIODIC_CERTIFIED"
PERIODIC = "PERIODIC"


@dataclass(frozen=True)
class AperiodicityVerdict:
    verdict: str
    horizon: int
    counts: tuple
    witness: int | None = None  # n with |W_n| >= |W_{n+1}|

    @property
    def aperiodic(self) -> bool:
        return self.verdict == APERIODIC_CERTIFIED


def is_aperiodic_up_to(theta: Substitution, horizon: int) -> AperiodicityVerdict:
    """Certify strict growth of word complexity up to ``horizon``.

    A single non-increase ``|W_n| >= |W_{n+1}|`` forces a finite, hence
    periodic, subshift.
    """
    counts = complexity(theta, horizon)
    for n in range(1, horizon):
        if counts[n - 1] >= counts[n]:
            return AperiodicityVerdict(PERIODIC, horizon, tuple(counts), n)
    return AperiodicityVerdict(APERIODIC_CERTIFIED, horizon, tuple(counts))


def fixed_point_prefix(theta: Substitution, seed: int, length: int) -> Word:
    """First ``length`` symbols of ``lim theta^k(seed)``."""
    img = theta.images[seed]
    if img[0] != seed:
        raise DomainError(f"theta({seed}) = {''.join(map(str, img))} does not start with {seed}")
    w = (seed,)
    while len(w) < length:
        nxt = apply(theta, w)
        if len(nxt) == len(w):
            raise DomainError(f"fixed point from {seed} is finite (length {len(w)})")
        w = nxt
    return w[:length]


def parse_word(text: str) -> Word:
    """``"0011"`` or ``"0 0 1 1"`` -> ``(0, 0, 1, 1)``."""
    text = text.strip()
    if " " in text or "," in text:
        return tuple(int(t) for t in text.replace(",", " ").split())
    return tuple(int(ch) for ch in text)


def word_str(w: Sequence[int]) -> str:
    if all(0 <= s < 10 for s in w):
        return "".join(map(str, w))
    return " ".join(map(str, w))
