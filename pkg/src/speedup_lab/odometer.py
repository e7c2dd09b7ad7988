"""Odometers with eventually periodic multiplier sequences and their speedups.

The point ``T^n(0)`` of the odometer is identified with the integer ``n``;
its floor in the level-``k`` tower is ``n mod m_k``.  Exact for every
simulation below, since the jump function is constant on floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sympy import factorint

from .speedup import compose_along, cycles, is_cyclic, label_column, perm_power


@dataclass(frozen=True)
class OdometerSpec:
    """Multipliers ``preperiod`` followed by ``cycle`` repeated forever."""

    preperiod: tuple = ()
    cycle: tuple = (2,)

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(a) for a in self.preperiod))
        object.__setattr__(self, "cycle", tuple(int(a) for a in self.cycle))
        if not self.cycle:
            raise ValueError("cycle must be nonempty")
        bad = [a for a in self.preperiod + self.cycle if a < 2]
        if bad:
            raise ValueError(f"multipliers must be >= 2, got {bad}")

    def alpha(self, i: int) -> int:
        """The ``i``-th multiplier, 1-based."""
        if i < 1:
            raise IndexError(i)
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.cycle[(i - len(self.preperiod) - 1) % len(self.cycle)]

    def m(self, k: int) -> int:
        return math.prod(self.alpha(i) for i in range(1, k + 1))

    def tail_indices(self, after: int) -> range:
        """Indices ``> after`` covering every multiplier that occurs beyond ``after``."""
        return range(after + 1, max(after, len(self.preperiod)) + len(self.cycle) + 1)

    def shifted(self, level: int) -> "OdometerSpec":
        """``<m_level, alpha_{level+1}, ...>``."""
        pre = [self.m(level)] + [self.alpha(i) for i in range(level + 1, len(self.preperiod) + 1)]
        start = max(level, len(self.preperiod)) - len(self.preperiod)
        n = len(self.cycle)
        cyc = [self.cycle[(start + j) % n] for j in range(n)]
        return OdometerSpec(tuple(pre), tuple(cyc))

    def to_dict(self) -> dict:
        return {"preperiod": list(self.preperiod), "cycle": list(self.cycle)}

    @classmethod
    def from_dict(cls, doc: dict) -> "OdometerSpec":
        return cls(tuple(doc.get("preperiod", ())), tuple(doc["cycle"]))

    def __str__(self):
        pre = ",".join(map(str, self.preperiod))
        cyc = ",".join(map(str, self.cycle))
        return f"<{pre + ';' if pre else ''}({cyc})*>"


def adic_add_one(digits, spec: OdometerSpec):
    """Add 1 with carry; returns ``(digits, carried_out_of_depth)``."""
    out = list(digits)
    for i in range(len(out)):
        out[i] += 1
        if out[i] < spec.alpha(i + 1):
            return tuple(out), False
        out[i] = 0
    return tuple(out), True


def digits_of(n: int, spec: OdometerSpec, depth: int) -> tuple:
    out = []
    for i in range(1, depth + 1):
        n, d = divmod(n, spec.alpha(i))
        out.append(d)
    return tuple(out)


def supernatural(spec: OdometerSpec) -> dict:
    """Prime -> total exponent over all multipliers (``math.inf`` if unbounded)."""
    exps = {}
    for a in spec.preperiod:
        for p, e in factorint(a).items():
            exps[p] = exps.get(p, 0) + e
    for a in spec.cycle:
        for p in factorint(a):
            exps[p] = math.inf
    return dict(sorted(exps.items()))


def conjugate_odometers(a: OdometerSpec, b: OdometerSpec) -> bool:
    return supernatural(a) == supernatural(b)


@dataclass(frozen=True)
class OdometerJumpSpec:
    """Jump ``q[j]`` on the floor ``T^j A(level)``."""

    level: int
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if not self.q or min(self.q) < 1:
            raise ValueError("jump values must be positive")

    def value(self, n: int) -> int:
        return self.q[n % len(self.q)]

    @property
    def max_value(self) -> int:
        return max(self.q)

    def at_level(self, spec: OdometerSpec, k: int) -> "OdometerJumpSpec":
        """The same function written on the finer tower of level ``k``."""
        if k < self.level:
            raise ValueError("can only refine to a higher level")
        return OdometerJumpSpec(k, tuple(self.value(n) for n in range(spec.m(k))))

    def to_dict(self) -> dict:
        return {"level": self.level, "q": list(self.q)}

    @classmethod
    def from_dict(cls, doc: dict) -> "OdometerJumpSpec":
        return cls(int(doc["level"]), tuple(doc["q"]))


def _check_length(spec, jump):
    if len(jump.q) != spec.m(jump.level):
        raise ValueError(f"level {jump.level} has {spec.m(jump.level)} floors, "
                         f"got {len(jump.q)} jump values")


@dataclass(frozen=True)
class CycleCheck:
    ok: bool
    cycle: tuple = ()
    witness: dict = field(default_factory=dict)


def floor_cycle_check(spec: OdometerSpec, jump: OdometerJumpSpec) -> CycleCheck:
    """Is ``j -> (j + q_j) mod m_I`` one cycle through all floors?"""
    _check_length(spec, jump)
    m = len(jump.q)
    image = [(j + q) % m for j, q in enumerate(jump.q)]
    hit = {}
    for j, t in enumerate(image):
        if t in hit:
            return CycleCheck(False, (), {"kind": "not injective", "floors": (hit[t], j),
                                          "image": t})
        hit[t] = j
    orbit = [0]
    j = image[0]
    while j != 0:
        orbit.append(j)
        j = image[j]
    if len(orbit) < m:
        return CycleCheck(False, tuple(orbit), {"kind": "short cycle", "length": len(orbit),
                                                "floors": m})
    return CycleCheck(True, tuple(orbit))


MINIMAL = "MINIMAL"
FAILS = "FAILS"


@dataclass(frozen=True)
class JumpVerdict:
    kind: str
    c: int | None = None
    condition: int | None = None
    witness: dict = field(default_factory=dict)

    @property
    def minimal(self) -> bool:
        return self.kind == MINIMAL

    def __str__(self):
        if self.minimal:
            return f"MINIMAL(c={self.c})"
        return f"FAILS({self.condition})"


def check_jump_function(spec: OdometerSpec, jump: OdometerJumpSpec) -> JumpVerdict:
    """The three-condition test: floor cycle, integer orbit number, coprimality."""
    cyc = floor_cycle_check(spec, jump)
    if not cyc.ok:
        return JumpVerdict(FAILS, None, 2, cyc.witness)
    m = len(jump.q)
    total = sum(jump.q)
    if total % m:
        return JumpVerdict(FAILS, None, 3, {"kind": "sum not a multiple of m_I",
                                            "sum": total, "m": m})
    c = total // m
    for k in spec.tail_indices(jump.level):
        g = math.gcd(c, spec.alpha(k))
        if g > 1:
            return JumpVerdict(FAILS, c, 3, {"kind": "gcd", "index": k,
                                             "alpha": spec.alpha(k), "gcd": g})
    return JumpVerdict(MINIMAL, c)


def simulate_minimal(spec: OdometerSpec, jump: OdometerJumpSpec, depth: int | None = None) -> bool:
    """Raw oracle: does S run through all ``m_depth`` floors in one cycle?"""
    _check_length(spec, jump)
    if depth is None:
        depth = default_depth(spec, jump.level)
    md = spec.m(depth)
    q = jump.q
    mi = len(q)
    seen = bytearray(md)
    n = 0
    for step in range(md):
        if seen[n]:
            return False
        seen[n] = 1
        n = (n + q[n % mi]) % md
    return n == 0


def default_depth(spec: OdometerSpec, level: int = 1, floor: int = 1000) -> int:
    """Least depth with ``m_d >= floor`` that also runs past one full cycle."""
    d = max(level, len(spec.preperiod)) + len(spec.cycle)
    while spec.m(d) < floor:
        d += 1
    return d


# --- labels and permutations -------------------------------------------------

def column_permutation(q) -> tuple:
    """Labels of one column with per-floor jumps ``q`` and the top exit map."""
    h = len(q)
    labels = label_column(q)
    c = max(labels) + 1
    perm = []
    for ell in range(c):
        top = max(j for j in range(h) if labels[j] == ell)
        perm.append(labels[top + q[top] - h])
    if sorted(perm) != list(range(c)):
        raise ValueError(f"exit map {perm} is not a permutation")
    return tuple(labels), tuple(perm)


def _labeled_level(spec, jump):
    k = jump.level
    while spec.m(k) <= jump.max_value:
        k += 1
    return k


@dataclass(frozen=True)
class TowerLevel:
    level: int
    perm: tuple
    cyclic: bool


@dataclass(frozen=True)
class PermutationTower:
    levels: tuple
    c: int
    minimal_forever: bool  # closed form: base cyclic and coprime to every later multiplier


def odometer_permutation_tower(spec: OdometerSpec, jump: OdometerJumpSpec,
                               depth: int = 4) -> PermutationTower:
    """``pi`` at the first labeled level, then successive powers by the multipliers."""
    cyc = floor_cycle_check(spec, jump)
    if not cyc.ok:
        raise ValueError(f"S does not cycle the level-{jump.level} floors: {cyc.witness}")
    k0 = _labeled_level(spec, jump)
    _, perm = column_permutation(jump.at_level(spec, k0).q)
    c = len(perm)
    levels = [TowerLevel(k0, perm, is_cyclic(perm))]
    for k in range(k0 + 1, k0 + depth):
        perm = perm_power(perm, spec.alpha(k))
        levels.append(TowerLevel(k, perm, is_cyclic(perm)))
    coprime = all(math.gcd(c, spec.alpha(k)) == 1 for k in spec.tail_indices(k0))
    return PermutationTower(tuple(levels), c, levels[0].cyclic and coprime)


def tower_level_from_scratch(spec: OdometerSpec, jump: OdometerJumpSpec, k: int) -> tuple:
    """``pi`` at level ``k`` by relabeling the level-``k`` column directly."""
    return column_permutation(jump.at_level(spec, k).q)[1]


# --- constructions and certificates -----------------------------------------

@dataclass(frozen=True)
class Construction:
    c: int
    jump: OdometerJumpSpec | None = None
    reblocked: OdometerSpec | None = None
    verdict: JumpVerdict | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def possible(self) -> bool:
        return self.jump is not None


def construct_speedup(spec: OdometerSpec, c: int) -> Construction:
    """A minimal speedup with orbit number ``c``, or why none exists.

    The jump vector lives on the tower of level ``N + 1`` where every
    multiplier from ``N`` on is coprime to ``c``.  With ``g = gcd(c, m_N)``
    its height ``M = m_N alpha_{N+1}`` is the second level of the reblocked
    odometer ``<g, M/g, alpha_{N+2}, ...>``, or the first when ``g = 1``.
    """
    if c < 1:
        raise ValueError("orbit number must be positive")
    for a in spec.cycle:
        g = math.gcd(c, a)
        if g > 1:
            prime = min(factorint(g))
            n0 = len(spec.preperiod)
            idx = [k for k in range(n0 + 1, n0 + 4 * len(spec.cycle) + 1)
                   if spec.alpha(k) % prime == 0]
            return Construction(c, certificate={
                "prime": prime, "divides_c": c % prime == 0,
                "indices": idx, "period": len(spec.cycle),
                "reason": f"{prime} divides c and alpha_i for infinitely many i"})
    bad = [k for k in range(1, len(spec.preperiod) + 1) if math.gcd(c, spec.alpha(k)) > 1]
    N = (max(bad) + 1) if bad else 1
    while spec.m(N) <= c:
        N += 1
    m = spec.m(N)
    g = math.gcd(c, m)
    M = m * spec.alpha(N + 1)
    q = [c] * M
    for i in range(M - c, M - c + g - 1):
        q[i] = c + 1
    q[M - c + g - 1] = c - g + 1
    assert q[M - c + g - 1] >= 1
    jump = OdometerJumpSpec(N + 1, tuple(q))
    verdict = check_jump_function(spec, jump)
    if not (verdict.minimal and verdict.c == c):
        raise AssertionError(f"constructed jump vector fails its own check: {verdict}")
    pre = (g,) if g > 1 else ()
    reblocked = OdometerSpec(pre + (M // g,) + tuple(spec.alpha(k) for k in range(
        N + 2, len(spec.preperiod) + 1)), spec.shifted(N + 1).cycle)
    return Construction(c, jump, reblocked, verdict)


def universal_no_speedup(c: int, count: int = 5) -> dict:
    """For ``<2, 3, 4, 5, ...>``: a prime of ``c`` and multiplier indices it divides."""
    if c < 2:
        raise ValueError("only nontrivial orbit numbers have a certificate")
    prime = min(factorint(c))
    # alpha_i = i + 1
    return {"prime": prime, "indices": [prime * j - 1 for j in range(1, count + 1)]}


# --- conjugacy verification ---------------------------------------------------

def s_orbit(jump: OdometerJumpSpec, steps: int, start: int = 0) -> list:
    pos = [start]
    n = start
    for _ in range(steps):
        n += jump.value(n)
        pos.append(n)
    return pos


def verify_sameodom(spec: OdometerSpec, jump: OdometerJumpSpec, levels: int = 5,
                    horizon: int = 10 ** 4) -> dict:
    """Evidence that a minimal speedup is a conjugate odometer with coboundary jump."""
    verdict = check_jump_function(spec, jump)
    report = {"verdict": str(verdict), "levels": levels, "horizon": horizon}
    if not verdict.minimal:
        report["ok"] = False
        return report
    c = verdict.c
    per_level = {}
    for k in range(jump.level, levels + 1):
        finer = jump.at_level(spec, k)
        per_level[k] = floor_cycle_check(spec, finer).ok
    report["cycles_floors"] = per_level
    shifted = spec.shifted(jump.level)
    report["s_odometer"] = str(shifted)
    report["conjugate"] = conjugate_odometers(shifted, spec)
    pos = s_orbit(jump, horizon)
    sums = [0]
    for n in pos[:-1]:
        sums.append(sums[-1] + jump.value(n) - c)
    bound = c * jump.max_value
    report["partial_sums"] = {"min": min(sums), "max": max(sums),
                              "max_abs": max(map(abs, sums)), "bound": bound}
    report["bounded"] = report["partial_sums"]["max_abs"] <= bound
    report["ok"] = all(per_level.values()) and report["conjugate"] and report["bounded"]
    return report


__all__ = [
    "OdometerSpec", "OdometerJumpSpec", "adic_add_one", "digits_of", "supernatural",
    "conjugate_odometers", "floor_cycle_check", "check_jump_function", "simulate_minimal",
    "default_depth", "column_permutation", "odometer_permutation_tower",
    "tower_level_from_scratch", "construct_speedup", "universal_no_speedup",
    "verify_sameodom", "s_orbit", "JumpVerdict", "Construction", "compose_along", "cycles",
]
