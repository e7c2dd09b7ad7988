"""Points of substitution subshifts, jump functions and speedup walks.

A point is stored as a finite two-sided window ``word`` of a bi-infinite
sequence, with ``origin`` the index of coordinate 0.  Reads outside the
stored window raise :class:`HorizonError`; callers extend and retry.
"""

from __future__ import annotations

import itertools
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .symbols import (DomainError, Substitution, Word, apply, image_lengths,
                      is_proper, language)

DEFAULT_MAX_PREFIX = 2 ** 20


def max_prefix() -> int:
    return int(os.environ.get("SPEEDUPLAB_MAX_PREFIX", DEFAULT_MAX_PREFIX))


class HorizonError(RuntimeError):
    """A computation ran past the stored part of a point."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InconclusiveError(RuntimeError):
    pass


class UnsupportedInputError(ValueError):
    pass


@dataclass(frozen=True)
class JumpFunction:
    """A positive integer function of the window ``x[-left .. right]``.

    ``table`` maps words of length ``left + right + 1`` to values; words not
    listed take ``default``.
    """

    left: int
    right: int
    table: dict = field(default_factory=dict)
    default: int | None = None

    def __post_init__(self):
        m = self.left + self.right + 1
        if self.left < 0 or self.right < 0:
            raise ValueError("window bounds must be nonnegative")
        table = {}
        for w, v in self.table.items():
            w = tuple(int(s) for s in w)
            if len(w) != m:
                raise ValueError(f"table word {w} has length {len(w)}, window needs {m}")
            if int(v) < 1:
                raise ValueError(f"jump value {v} for {w} is not positive")
            table[w] = int(v)
        object.__setattr__(self, "table", table)
        if self.default is not None and self.default < 1:
            raise ValueError("default jump must be positive")

    @property
    def width(self) -> int:
        return self.left + self.right + 1

    @property
    def max_value(self) -> int:
        values = list(self.table.values())
        if self.default is not None:
            values.append(self.default)
        return max(values)

    def is_constant_one(self) -> bool:
        return self.max_value == 1

    def value(self, window: Sequence[int]) -> int:
        v = self.table.get(tuple(window), self.default)
        if v is None:
            raise KeyError(f"no jump value for window {tuple(window)}")
        return v

    @classmethod
    def constant(cls, v: int) -> "JumpFunction":
        return cls(0, 0, {}, v)

    @classmethod
    def from_cylinders(cls, alphabet_size, cylinders, default):
        """Build from ``(offset, word, value)`` triples.

        ``value`` applies to points ``x`` with ``x[offset : offset+len(word)] == word``.
        """
        left = max([0] + [-off for off, _, _ in cylinders])
        right = max([0] + [off + len(w) - 1 for off, w, _ in cylinders])
        m = left + right + 1
        table = {}
        for off, w, v in cylinders:
            start = off + left
            free = [i for i in range(m) if not start <= i < start + len(w)]
            for fill in itertools.product(range(alphabet_size), repeat=len(free)):
                word = [None] * m
                word[start:start + len(w)] = list(w)
                for i, s in zip(free, fill):
                    word[i] = s
                word = tuple(word)
                if word in table and table[word] != v:
                    raise ValueError(f"cylinders overlap with different values on {word}")
                table[word] = v
        return cls(left, right, table, default)

    def restrict(self, words) -> "JumpFunction":
        """Keep only table entries for the given words (e.g. a language)."""
        words = set(map(tuple, words))
        return JumpFunction(self.left, self.right,
                            {w: v for w, v in self.table.items() if w in words},
                            self.default)

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right,
                "table": [{"word": list(w), "value": v} for w, v in sorted(self.table.items())],
                "default": self.default}

    @classmethod
    def from_dict(cls, doc: dict) -> "JumpFunction":
        table = {tuple(e["word"]): int(e["value"]) for e in doc.get("table", [])}
        return cls(int(doc.get("left", 0)), int(doc.get("right", 0)), table, doc.get("default"))


@dataclass(frozen=True)
class Point:
    """Finite view ``x[-origin .. len(word)-origin)`` of a two-sided sequence."""

    word: tuple
    origin: int = 0
    provenance: str = ""

    @property
    def right_extent(self) -> int:
        return len(self.word) - self.origin

    def symbol(self, t: int) -> int:
        i = t + self.origin
        if not 0 <= i < len(self.word):
            raise HorizonError(f"position {t} outside stored window")
        return self.word[i]

    def window(self, t: int, left: int, right: int) -> Word:
        a = t - left + self.origin
        b = t + right + 1 + self.origin
        if a < 0 or b > len(self.word):
            raise HorizonError(f"window [{t - left}, {t + right}] outside stored "
                               f"[{-self.origin}, {self.right_extent - 1}]")
        return self.word[a:b]

    def segment(self, start: int, stop: int) -> Word:
        return self.window(start, 0, stop - start - 1)


def evaluate_jump(p: JumpFunction, point: Point, t: int = 0) -> int:
    return p.value(point.window(t, p.left, p.right))


def jump_values(p: JumpFunction, point: Point, start: int, stop: int) -> np.ndarray:
    """``p(T^t x)`` for ``t`` in ``[start, stop)``."""
    return np.array([evaluate_jump(p, point, t) for t in range(start, stop)], dtype=np.int64)


def _fixed_power(theta: Substitution, seed: int) -> int:
    first = [w[0] for w in theta.images]
    a = seed
    for k in range(1, theta.size + 1):
        a = first[a]
        if a == seed:
            return k
    raise DomainError(f"no power of theta has an image of {seed} starting with {seed}")


def _grow(theta: Substitution, seed: int, length: int, from_right: bool) -> Word:
    w = (seed,)
    while len(w) < length:
        nxt = apply(theta, w)
        if len(nxt) == len(w):
            raise DomainError("image lengths do not grow")
        if from_right and nxt[-len(w):] != w or not from_right and nxt[:len(w)] != w:
            raise DomainError("seed is not a fixed symbol of this power")
        w = nxt
    return w[-length:] if from_right else w[:length]


def substitution_point(theta: Substitution, right: int, left: int = 0,
                       seed: int | None = None) -> Point:
    """A fixed point of a power of ``theta`` with ``right`` symbols at and after 0.

    With ``left > 0`` the substitution must be proper: the left half is the
    fixed left-infinite word grown from the common last symbol.
    """
    if right + left > max_prefix():
        raise HorizonError(f"requested {right + left} symbols, cap is {max_prefix()} "
                           "(raise SPEEDUPLAB_MAX_PREFIX)")
    if left == 0:
        if seed is None:
            pr = is_proper(theta)
            seed = pr.left if pr else 0
        k = _fixed_power(theta, seed)
        th = theta.power(k) if k > 1 else theta
        return Point(_grow(th, seed, right, False), 0, f"fixed point of theta^{k} from {seed}")
    pr = is_proper(theta)
    if not pr:
        raise DomainError("two-sided fixed points need a proper substitution")
    if seed is not None and seed != pr.left:
        raise DomainError(f"seed {seed} differs from the proper left symbol {pr.left}")
    th = theta.power(pr.power) if pr.power > 1 else theta
    rword = _grow(th, pr.left, right, False)
    lword = _grow(th, pr.right, left, True)
    return Point(lword + rword, left,
                 f"fixed point of theta^{pr.power}: {pr.right}.{pr.left}")


@dataclass(frozen=True)
class Walk:
    positions: tuple
    jumps: tuple

    @property
    def steps(self) -> int:
        return len(self.jumps)

    def records(self):
        """Line-oriented ``(step, position, jump)`` trace."""
        for j, (t, v) in enumerate(zip(self.positions, self.jumps)):
            yield j, t, v


def walk_point(p: JumpFunction, point: Point, steps: int, start: int = 0) -> Walk:
    positions = [start]
    jumps = []
    t = start
    for j in range(steps):
        try:
            v = evaluate_jump(p, point, t)
        except HorizonError as exc:
            raise HorizonError(f"walk stopped after {j} steps: {exc}", achieved=j) from exc
        jumps.append(v)
        t += v
        positions.append(t)
    return Walk(tuple(positions), tuple(jumps))


def walk_until(p: JumpFunction, point: Point, target: int, start: int = 0) -> Walk:
    """Walk until the position reaches ``target`` (the least such step count)."""
    positions = [start]
    jumps = []
    t = start
    while t < target:
        v = evaluate_jump(p, point, t)
        jumps.append(v)
        t += v
        positions.append(t)
    return Walk(tuple(positions), tuple(jumps))


def speedup_walk(theta: Substitution, p: JumpFunction, seed: int, steps: int) -> Walk:
    """The S-orbit of the fixed point from ``seed``, as shift offsets."""
    need = steps * p.max_value + p.right + 1
    cap = max_prefix()
    if need + p.left > cap:
        point = substitution_point(theta, cap - p.left, p.left, seed)
        walk_point(p, point, steps)  # raises with the achieved count
    point = substitution_point(theta, need, p.left, seed)
    return walk_point(p, point, steps)


@dataclass(frozen=True)
class Recoded:
    theta: Substitution
    jump: JumpFunction
    dictionary: tuple  # new symbol -> window word
    shift: int  # recoded symbol at t is x[t, t+m); its jump is p at t + shift

    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.dictionary)}


def block_recode(theta: Substitution, p: JumpFunction) -> Recoded:
    """Higher block presentation on ``m = left + right + 1`` blocks.

    The new jump function reads coordinate 0 only.
    """
    m = p.width
    if m == 1:
        table = {(a,): p.value((a,)) for a in range(theta.size)}
        return Recoded(theta, JumpFunction(0, 0, table, None),
                       tuple((a,) for a in range(theta.size)), 0)
    words = language(theta, m)
    index = {w: i for i, w in enumerate(words)}
    images = []
    for w in words:
        img = apply(theta, w)
        n0 = len(theta.images[w[0]])
        images.append([index[img[j:j + m]] for j in range(n0)])
    table = {(index[w],): p.value(w) for w in words}
    return Recoded(Substitution(images), JumpFunction(0, 0, table, None), tuple(words), p.left)


@dataclass(frozen=True)
class ThetaDecomposition:
    level: int
    cuts: tuple  # n_0 = 0 < n_1 < ... ; the last cut may pass the prefix end
    symbols: tuple
    partial: bool  # last block runs past the prefix

    def block_of(self, t: int) -> tuple[int, int]:
        """(block index, offset inside block) of position ``t >= 0``."""
        j = bisect_right(self.cuts, t) - 1
        if j < 0 or j >= len(self.symbols):
            raise HorizonError(f"position {t} outside decomposition")
        return j, t - self.cuts[j]


def decompose(theta: Substitution, prefix: Sequence[int], k: int) -> ThetaDecomposition:
    """Cut a fixed-point prefix into ``theta^k``-blocks.

    The prefix must be the start of a point fixed by ``theta``; then the
    blocks are the images of the prefix's own symbols.
    """
    prefix = tuple(prefix)
    lengths = image_lengths(theta, k)
    cuts = [0]
    syms = []
    j = 0
    while cuts[-1] < len(prefix):
        syms.append(prefix[j])
        cuts.append(cuts[-1] + lengths[prefix[j]])
        j += 1
    rebuilt = apply(theta, syms, k)
    if rebuilt[:len(prefix)] != prefix:
        raise UnsupportedInputError("prefix is not a prefix of a theta-fixed point")
    return ThetaDecomposition(k, tuple(cuts), tuple(syms), cuts[-1] > len(prefix))


def count_orbit_classes(jumps: Sequence[int], bound: int) -> list:
    """Number of forward-reachability classes meeting each window ``[s, s+bound)``.

    Vertices are the positions ``0 .. len(jumps)``; ``t -> t + jumps[t]``.
    Entry ``s`` of the result is the count for window ``s``.
    """
    n = len(jumps)
    label = np.full(n + 1, -1, dtype=np.int64)
    nxt = 0
    for t in range(n + 1):
        if label[t] < 0:
            label[t] = nxt
            nxt += 1
        if t < n and t + jumps[t] <= n:
            label[t + jumps[t]] = label[t]
    counts = []
    for s in range(0, n + 1 - bound):
        counts.append(len(set(label[s:s + bound].tolist())))
    return counts


def orbit_number_from_jumps(jumps: Sequence[int], bound: int) -> int:
    """Orbit number from jumps along a T-orbit, with the half-horizon stability rule."""
    counts = count_orbit_classes(jumps, bound)
    if len(counts) <= 2 * bound:
        raise InconclusiveError(f"horizon {len(jumps)} too short for max jump {bound}")
    c = counts[bound]
    tail = set(counts[len(counts) // 2:])
    if tail != {c}:
        raise InconclusiveError(f"class counts not stable: first {c}, tail {sorted(tail)}")
    return c


def orbit_number(theta: Substitution, p: JumpFunction, horizon: int = 4000) -> int:
    """Orbit number by reachability along the orbit of a fixed point."""
    m = p.max_value
    if horizon < 4 * m:
        raise InconclusiveError(f"horizon {horizon} too short for max jump {m}")
    point = substitution_point(theta, horizon + p.right + 1, p.left)
    return orbit_number_from_jumps(jump_values(p, point, 0, horizon), m)
