"""Labelings of Kakutani-Rokhlin towers, block permutations and the pair substitution.

Floors are addressed symbolically as ``(column, height)``; a level-``k``
partition of a substitution ``theta`` is handled as the level-1 partition of
``theta^k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .subshift import (HorizonError, JumpFunction, Point, block_recode, decompose,
                       evaluate_jump, jump_values, orbit_number_from_jumps,
                       substitution_point, walk_point, walk_until)
from .symbols import (DomainError, Substitution, image_lengths, is_aperiodic_up_to,
                      is_primitive, is_proper, language)


class LabelingError(RuntimeError):
    """The tower data violate a property the labeling relies on."""


class ConstructionError(RuntimeError):
    pass


# --- permutations as tuples: perm[l] is the image of l ---------------------

def identity(c: int) -> tuple:
    return tuple(range(c))


def compose_along(perms, word) -> tuple:
    """Apply ``perms[word[0]]`` first, then ``perms[word[1]]``, and so on."""
    c = len(perms[0])
    out = []
    for ell in range(c):
        for s in word:
            ell = perms[s][ell]
        out.append(ell)
    return tuple(out)


def perm_power(perm, k: int) -> tuple:
    return compose_along([perm], [0] * k) if k else identity(len(perm))


def cycles(perm) -> list:
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        out.append(tuple(cyc))
    return out


def is_cyclic(perm) -> bool:
    """True for a single cycle through every label."""
    return len(cycles(perm)) == 1


def perm_str(perm) -> str:
    nontrivial = [c for c in cycles(perm) if len(c) > 1]
    if not nontrivial:
        return "id"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial)


# --- floor data -------------------------------------------------------------

def _common_prefix(words) -> int:
    n = 0
    for chars in zip(*words):
        if len(set(chars)) > 1:
            break
        n += 1
    return n


def _common_suffix(words) -> int:
    return _common_prefix([w[::-1] for w in words])


def floor_jumps(theta: Substitution, p: JumpFunction) -> list:
    """``p`` on every floor ``(i, j)`` of the tower of ``theta``.

    Requires the images to share their first ``p.right`` and last ``p.left``
    symbols, so that the window of every floor is known.
    """
    images = theta.images
    if _common_prefix(images) < p.right or _common_suffix(images) < p.left:
        raise LabelingError("floor windows are not determined at this level")
    head = images[0][:p.right]
    tail = images[0][len(images[0]) - p.left:]
    out = []
    for w in images:
        ctx = tail + w + head
        out.append([p.value(ctx[j:j + p.width]) for j in range(len(w))])
    return out


@dataclass(frozen=True)
class LevelCheck:
    level: int
    windows_determined: bool
    columns_tall: bool
    low_floors_agree: bool

    @property
    def ok(self) -> bool:
        return self.windows_determined and self.columns_tall and self.low_floors_agree


def check_level(theta: Substitution, p: JumpFunction, k: int) -> LevelCheck:
    th = theta.power(k) if k > 1 else theta
    images = th.images
    m = p.max_value
    determined = (_common_prefix(images) >= p.right and _common_suffix(images) >= p.left)
    tall = min(len(w) for w in images) > m
    agree = False
    if determined and tall:
        fj = floor_jumps(th, p)
        agree = all(len({col[j] for col in fj}) == 1 for j in range(m + 1))
    return LevelCheck(k, determined, tall, agree)


@dataclass(frozen=True)
class NormalizedLevel:
    level: int
    theta: Substitution  # theta^level
    checks: tuple


def normalize_level(theta: Substitution, p: JumpFunction, cap: int = 12) -> NormalizedLevel:
    """Least ``k`` at which the tower of ``theta^k`` carries a well-defined labeling."""
    checks = []
    for k in range(1, cap + 1):
        if min(image_lengths(theta, k)) > 10 ** 6:
            break
        chk = check_level(theta, p, k)
        checks.append(chk)
        if chk.ok:
            return NormalizedLevel(k, theta.power(k) if k > 1 else theta, tuple(checks))
    raise LabelingError(f"no level <= {len(checks)} satisfies the tower conditions")


# --- labeling ---------------------------------------------------------------

@dataclass(frozen=True)
class Labeling:
    labels: tuple  # labels[i][j]
    jumps: tuple  # jumps[i][j]
    c: int

    @property
    def heights(self) -> list:
        return [len(col) for col in self.labels]

    def rows(self):
        """``(column, height, label, jump)`` records."""
        for i, (lab, jmp) in enumerate(zip(self.labels, self.jumps)):
            for j, (ell, v) in enumerate(zip(lab, jmp)):
                yield i, j, ell, v


def label_column(jumps) -> list:
    """Greedy S-path labeling of one column from its per-floor jumps."""
    h = len(jumps)
    labels = [-1] * h
    nxt = 0
    for start in range(h):
        if labels[start] >= 0:
            continue
        j = start
        while j < h:
            labels[j] = nxt
            j += jumps[j]
        nxt += 1
    return labels


def build_labeling(theta: Substitution, p: JumpFunction) -> Labeling:
    """Label the level-1 tower of ``theta`` (already normalized)."""
    fj = floor_jumps(theta, p)
    labels = [label_column(col) for col in fj]
    counts = {max(col) + 1 for col in labels}
    if len(counts) != 1:
        raise LabelingError(f"columns use different label counts {sorted(counts)}")
    return Labeling(tuple(map(tuple, labels)), tuple(map(tuple, fj)), counts.pop())


def column_permutations(labeling: Labeling) -> tuple:
    """Where the S-path of each label goes when it leaves the top of a column."""
    c = labeling.c
    perms = []
    for i, (lab, jmp) in enumerate(zip(labeling.labels, labeling.jumps)):
        h = len(lab)
        perm = []
        for ell in range(c):
            top = max(j for j in range(h) if lab[j] == ell)
            land = top + jmp[top] - h
            targets = {col[land] for col in labeling.labels}
            if len(targets) != 1:
                raise LabelingError(f"exit of label {ell} from column {i} lands on "
                                    f"column-dependent labels {sorted(targets)}")
            perm.append(targets.pop())
        if sorted(perm) != list(range(c)):
            raise LabelingError(f"column {i} exit map {perm} is not a permutation")
        perms.append(tuple(perm))
    return tuple(perms)


@dataclass(frozen=True)
class PermutationIteration:
    sequence: tuple  # pi^(1), pi^(2), ... up to the first repeat
    preperiod: int  # first relative level of the cycle (1-based)
    period: int
    K: int

    @property
    def stable(self) -> tuple:
        return self.sequence[self.preperiod - 1]


def permutation_step(perms, theta: Substitution) -> tuple:
    return tuple(compose_along(perms, w) for w in theta.images)


def iterate_permutations(perms, theta: Substitution) -> PermutationIteration:
    """Iterate the block composition rule until the tuple repeats."""
    seen = {}
    seq = []
    cur = tuple(map(tuple, perms))
    while cur not in seen:
        seen[cur] = len(seq) + 1
        seq.append(cur)
        cur = permutation_step(cur, theta)
    start = seen[cur]
    period = len(seq) + 1 - start
    K = period * -(-start // period)
    return PermutationIteration(tuple(seq), start, period, K)


# --- pair substitution ------------------------------------------------------

@dataclass(frozen=True)
class SigmaSubstitution:
    substitution: Substitution
    pairs: tuple  # index -> (symbol, label)
    c: int

    def index(self, pair) -> int:
        i, ell = pair
        return i * self.c + ell

    def image(self, pair) -> list:
        return [self.pairs[s] for s in self.substitution.images[self.index(pair)]]

    def render(self) -> list:
        return [f"σ:({i},{ell}) ↦ " + "".join(f"({a},{b})" for a, b in self.image((i, ell)))
                for i, ell in self.pairs]

    def to_dict(self) -> dict:
        doc = self.substitution.to_dict()
        doc["pairs"] = {str(k): list(pr) for k, pr in enumerate(self.pairs)}
        return doc


def build_sigma(theta: Substitution, perms) -> SigmaSubstitution:
    c = len(perms[0])
    pairs = [(i, ell) for i in range(theta.size) for ell in range(c)]
    images = []
    for i, ell in pairs:
        img = []
        for s in theta.images[i]:
            img.append(s * c + ell)
            ell = perms[s][ell]
        images.append(img)
    return SigmaSubstitution(Substitution(images), tuple(pairs), c)


# --- full pipeline ----------------------------------------------------------

@dataclass(frozen=True)
class SpeedupAnalysis:
    base: Substitution  # the proper power of the input substitution
    base_power: int
    jump: JumpFunction
    normalized: NormalizedLevel
    labeling: Labeling
    permutations: tuple  # at the normalized level
    iteration: PermutationIteration
    sigma_base: Substitution  # base^period
    sigma_level: int  # level (in base powers) whose labels sigma carries
    sigma: SigmaSubstitution
    primitivity: object
    aperiodicity: object

    @property
    def c(self) -> int:
        return self.labeling.c

    @property
    def minimal(self) -> bool:
        return bool(self.primitivity)

    @property
    def stable_permutations(self) -> tuple:
        return self.iteration.stable


def is_minimal_speedup(theta: Substitution, p: JumpFunction,
                       aperiodicity_horizon: int = 30) -> SpeedupAnalysis:
    """Decide minimality of the speedup by primitivity of the pair substitution."""
    prim = is_primitive(theta)
    if not prim:
        raise DomainError(f"substitution is not primitive: {prim.failure}")
    ap = is_aperiodic_up_to(theta, aperiodicity_horizon)
    if not ap.aperiodic:
        raise DomainError(f"subshift is periodic: |W_n| stalls at n={ap.witness}")
    pr = is_proper(theta)
    if not pr:
        raise DomainError("substitution is not proper")
    base = theta.power(pr.power) if pr.power > 1 else theta
    norm = normalize_level(base, p)
    lab = build_labeling(norm.theta, p)
    perms = column_permutations(lab)
    it = iterate_permutations(perms, base)
    level = norm.level + it.preperiod - 1
    sigma_base = base.power(it.period) if it.period > 1 else base
    sigma = build_sigma(sigma_base, it.stable)
    return SpeedupAnalysis(base, pr.power, p, norm, lab, perms, it, sigma_base, level,
                           sigma, is_primitive(sigma.substitution), ap)


def labeling_at(analysis: SpeedupAnalysis, level: int) -> Labeling:
    th = analysis.base.power(level) if level > 1 else analysis.base
    return build_labeling(th, analysis.jump)


def symbol_label_sequence(analysis: SpeedupAnalysis, blocks: int) -> list:
    """Pairs ``(symbol, label)`` of the fixed point, read off a direct S-walk."""
    base, p, level = analysis.base, analysis.jump, analysis.sigma_level
    lab = labeling_at(analysis, level)
    lengths = image_lengths(base, level)
    seed_len = max(blocks + 2, 64)
    z = substitution_point(base, seed_len + p.right + 1, max(p.left, 1))
    syms = z.segment(0, blocks + 1)
    total = sum(lengths[s] for s in syms)
    z = substitution_point(base, total + p.right + 1, max(p.left, 1))
    dec = decompose(base, z.segment(0, total), level)
    walk = walk_until(p, z, dec.cuts[blocks])
    found = [None] * blocks
    for t in walk.positions[:-1]:
        b, h = dec.block_of(t)
        ell = lab.labels[dec.symbols[b]][h]
        if found[b] is None:
            found[b] = ell
        elif found[b] != ell:
            raise LabelingError(f"block {b} visited on labels {found[b]} and {ell}")
    if None in found:
        raise LabelingError(f"block {found.index(None)} not visited")
    return list(zip(dec.symbols[:blocks], found))


def sigma_sequence(analysis: SpeedupAnalysis, blocks: int) -> list:
    """The same pairs, generated by the pair substitution from the seed pair."""
    sig = analysis.sigma
    seed = (is_proper(analysis.base).left, 0)
    word = [sig.index(seed)]
    while len(word) < blocks:
        word = list(itertools.chain.from_iterable(sig.substitution.images[s] for s in word))
    return [sig.pairs[s] for s in word[:blocks]]


# --- speedup alphabet and non-conjugacy evidence ----------------------------

def speedup_alphabet(theta: Substitution, p: JumpFunction):
    """The jump-blocks ``x[0, p(x))`` over the recoded alphabet.

    Returns ``(blocks, recoded)``; each block is a tuple of recoded symbols
    whose length is the jump of its first symbol.
    """
    rec = block_recode(theta, p)
    m = rec.jump.max_value
    blocks = set()
    for w in language(rec.theta, m):
        blocks.add(w[:rec.jump.value(w[:1])])
    return sorted(blocks), rec


def nonconjugacy_evidence(theta: Substitution, p: JumpFunction, horizon: int = 40,
                          ms=(1, 2, 3, 4, 5), positions: int = 4000) -> dict:
    """Word-complexity growth plus the least jump-sum surplus lengths."""
    ap = is_aperiodic_up_to(theta, horizon)
    report = {"horizon": horizon, "complexity": list(ap.counts),
              "strictly_increasing": ap.aperiodic, "surplus": {}}
    if p.is_constant_one():
        report["hypothesis"] = "jump function is identically 1; no surplus exists"
        return report
    m_top = max(ms)
    z = substitution_point(theta, 2 * positions + p.right + 1, p.left)
    excess = jump_values(p, z, 0, 2 * positions) - 1
    cum = np.concatenate([[0], np.cumsum(excess)])
    # longest run without a jump >= 2 bounds the return time r
    big = np.flatnonzero(excess > 0)
    r = int(np.max(np.diff(np.concatenate([[-1], big])))) if len(big) else None
    report["return_time"] = r
    for m in ms:
        N = 1
        while True:
            if N > positions:
                raise HorizonError(f"no surplus > {m} within {positions} steps")
            worst = int(np.min(cum[N:N + positions] - cum[:positions]))
            if worst > m:
                break
            N += 1
        report["surplus"][m] = {"N": N, "min_surplus": worst,
                                "bound_N": (m + 1) * r + 1 if r else None}
    report["hypothesis"] = "jump function is not identically 1"
    report["m_max"] = m_top
    return report


# --- self-induced floor map ---------------------------------------------------

@dataclass(frozen=True)
class FloorMap:
    mapping: dict  # (i, j) at level 1 -> (i, k) at level 2
    cut_heights: tuple  # per column, heights r_0 = 0 < r_1 < ... of level-1 bases
    trace: tuple = field(default=())

    @property
    def U(self) -> set:
        return set(self.mapping.values())

    @property
    def ok(self) -> bool:
        return bool(self.trace) and all(row[-1] for row in self.trace)


def normalized_base(theta: Substitution, p: JumpFunction) -> Substitution:
    """The power of ``theta`` that is proper and carries a labeling for ``p``."""
    pr = is_proper(theta)
    base = theta.power(pr.power) if pr and pr.power > 1 else theta
    return normalize_level(base, p).theta


def self_induce_map(theta: Substitution, p: JumpFunction, steps: int = 200) -> FloorMap:
    """Map level-1 floors into level-2 floors and verify the intertwining.

    Levels count powers of the normalized base, not of ``theta`` itself.
    """
    theta = normalized_base(theta, p)
    lab1 = build_labeling(theta, p)
    th2 = theta.power(2)
    lab2 = build_labeling(th2, p)
    cuts = []
    mapping = {}
    for i in range(theta.size):
        heights = [0]
        for s in theta.images[i]:
            heights.append(heights[-1] + len(theta.images[s]))
        cuts.append(tuple(heights))
        for j in range(len(theta.images[i])):
            want = lab1.labels[i][j]
            cand = [k for k in range(heights[j], heights[j + 1]) if lab2.labels[i][k] == want]
            if not cand:
                raise ConstructionError(f"no level-2 floor labeled {want} in "
                                        f"[{heights[j]}, {heights[j + 1]}) of column {i}")
            mapping[(i, j)] = (i, cand[0])
    u_heights = [set() for _ in range(theta.size)]
    for i, k in mapping.values():
        u_heights[i].add(k)

    m = p.max_value
    left = max(p.left, 1)
    l1 = image_lengths(theta, 1)
    l2 = image_lengths(theta, 2)
    z = substitution_point(theta, steps * m + 64, left)
    nblocks = 0
    acc = 0
    while acc <= steps * m + m:
        acc += l1[z.symbol(nblocks)]
        nblocks += 1
    need = sum(l2[z.symbol(b)] for b in range(nblocks + 1)) + p.right + m + 1
    z = substitution_point(theta, max(need, steps * m + 64), left)
    dec1 = decompose(theta, z.segment(0, acc), 1)
    dec2 = decompose(theta, z.segment(0, need - p.right - m - 1), 2)

    def phi(t):
        b, h = dec1.block_of(t)
        return dec2.cuts[b] + mapping[(dec1.symbols[b], h)][1]

    def in_u(u):
        b, h = dec2.block_of(u)
        return h in u_heights[dec2.symbols[b]]

    walk = walk_point(p, z, steps)
    trace = []
    for n in range(steps):
        t, t_next = walk.positions[n], walk.positions[n + 1]
        start = phi(t)
        u = start + evaluate_jump(p, z, start)
        while not in_u(u):
            u += evaluate_jump(p, z, u)
        target = phi(t_next)
        trace.append((n, t, start, u, target, u == target))
    return FloorMap(mapping, tuple(cuts), tuple(trace))


def orbit_number_by_labels(theta: Substitution, p: JumpFunction) -> int:
    """Orbit number as the common label count of a normalized tower."""
    return build_labeling(normalized_base(theta, p), p).c


def orbit_number_by_reachability(theta: Substitution, p: JumpFunction, horizon=4000) -> int:
    z: Point = substitution_point(theta, horizon + p.right + 1, p.left)
    return orbit_number_from_jumps(jump_values(p, z, 0, horizon), p.max_value)
