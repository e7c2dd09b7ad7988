"""Ergodic-sum traces, coboundary checks, word-complexity entropy and a
hand-built two-symbol system whose speedup average stays above 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .odometer import OdometerJumpSpec, OdometerSpec, s_orbit
from .subshift import (JumpFunction, Point, jump_values, substitution_point, walk_point,
                       walk_until)
from .symbols import Substitution, image_lengths

BOUNDED = "BOUNDED"
DIVERGENT = "DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"

POLICY = {
    "bounded": "running max of |sum| unchanged over the final half of the horizon",
    "divergent": "|sum| at checkpoints grows by a factor >= 2 over three consecutive checkpoints",
    "divergence_factor": 2,
}


@dataclass(frozen=True)
class PartialSumTrace:
    horizon: int
    sums: np.ndarray  # sums[n] = sum_{j<n} (p_j - c); sums[0] = 0
    checkpoints: dict = field(default_factory=dict)  # time -> sum
    bound: float | None = None

    @property
    def max_abs(self) -> int:
        return int(np.max(np.abs(self.sums)))

    @property
    def running_max(self) -> np.ndarray:
        return np.maximum.accumulate(np.abs(self.sums))

    def flat_tail(self) -> bool:
        rm = self.running_max
        return bool(rm[-1] == rm[len(rm) // 2])

    def diverging(self) -> bool:
        vals = [abs(v) for _, v in sorted(self.checkpoints.items())]
        f = POLICY["divergence_factor"]
        for a, b, c in zip(vals, vals[1:], vals[2:]):
            if a > 0 and b >= f * a and c >= f * b:
                return True
        return False

    @property
    def verdict(self) -> str:
        if self.diverging():
            return DIVERGENT
        if self.flat_tail() and (self.bound is None or self.max_abs <= self.bound):
            return BOUNDED
        return INCONCLUSIVE

    def summary(self) -> dict:
        return {"verdict": self.verdict, "horizon": self.horizon, "max_abs": self.max_abs,
                "min": int(self.sums.min()), "max": int(self.sums.max()),
                "bound": self.bound, "checkpoints": {int(k): int(v) for k, v in
                                                     sorted(self.checkpoints.items())},
                "policy": POLICY}

    def csv_lines(self):
        yield "n,sum"
        for n, s in enumerate(self.sums.tolist()):
            yield f"{n},{s}"


def partial_sums(values, c) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(np.asarray(values, dtype=np.int64) - c)])


def t_coboundary_trace(theta: Substitution, p: JumpFunction, c: int,
                       horizon: int = 10 ** 4) -> PartialSumTrace:
    """``sum_{j<n} (p(T^j z) - c)`` along the fixed point ``z``."""
    z = substitution_point(theta, horizon + p.right + 1, p.left)
    sums = partial_sums(jump_values(p, z, 0, horizon), c)
    return PartialSumTrace(horizon, sums, {}, c * p.max_value)


def block_checkpoints(theta: Substitution, p: JumpFunction, levels: int) -> list:
    """``l_k``: S-steps needed to cross the first ``theta^k``-block of ``z``, k = 1..levels."""
    seed = substitution_point(theta, 1, p.left).symbol(0)
    targets = [image_lengths(theta, k)[seed] for k in range(1, levels + 1)]
    z = substitution_point(theta, targets[-1] + p.max_value + p.right + 1, p.left)
    walk = walk_until(p, z, targets[-1])
    pos = walk.positions
    out = []
    for target in targets:
        out.append(next(n for n, t in enumerate(pos) if t >= target))
    return out


def s_coboundary_trace(theta: Substitution, p: JumpFunction, c: int,
                       horizon: int = 10 ** 4, checkpoints="auto",
                       levels: int = 5) -> PartialSumTrace:
    """``sum_{j<n} (p(S^j z) - c)`` along the speedup orbit of ``z``."""
    if checkpoints == "auto":
        checkpoints = block_checkpoints(theta, p, levels)
    # checkpoints past the horizon are dropped, never silently extended
    checkpoints = [n for n in (checkpoints or []) if n <= horizon]
    z = substitution_point(theta, horizon * p.max_value + p.right + 1, p.left)
    walk = walk_point(p, z, horizon)
    sums = partial_sums(walk.jumps, c)
    return PartialSumTrace(horizon, sums, {n: int(sums[n]) for n in checkpoints})


def odometer_t_trace(jump: OdometerJumpSpec, c: int, horizon: int = 10 ** 4) -> PartialSumTrace:
    values = [jump.value(n) for n in range(horizon)]
    return PartialSumTrace(horizon, partial_sums(values, c), {}, c * jump.max_value)


def odometer_s_trace(jump: OdometerJumpSpec, c: int, horizon: int = 10 ** 4) -> PartialSumTrace:
    pos = s_orbit(jump, horizon)
    values = [jump.value(n) for n in pos[:-1]]
    return PartialSumTrace(horizon, partial_sums(values, c), {}, c * jump.max_value)


# --- S-coboundaries and the factor map ---------------------------------------

@dataclass(frozen=True)
class CylinderFunction:
    """Integer-valued function of the window ``x[-left .. right]``."""

    left: int
    right: int
    table: dict
    default: int | None = None

    def value(self, window) -> int:
        v = self.table.get(tuple(window), self.default)
        if v is None:
            raise KeyError(f"no value for window {tuple(window)}")
        return v

    def at(self, point: Point, t: int) -> int:
        return self.value(point.window(t, self.left, self.right))


def read_off_transfer(point: Point, positions, sums, left: int, right: int):
    """Tabulate ``g(S^n z) = sums[n]`` by window; ``None`` when a window gets two values."""
    table = {}
    for t, s in zip(positions, sums):
        w = point.window(t, left, right)
        if table.setdefault(w, s) != s:
            return None
    return CylinderFunction(left, right, table)


def find_s_coboundary(theta: Substitution, p: JumpFunction, c: int, max_window: int = 12,
                      steps: int = 5000) -> dict:
    """Try windows of width 1..max_window for a transfer function of ``p - c`` along S."""
    reach = max_window + p.left + p.right
    z = substitution_point(theta, steps * p.max_value + reach + 1, reach)
    walk = walk_point(p, z, steps)
    sums = partial_sums(walk.jumps, c)
    tried = []
    for width in range(1, max_window + 1):
        left = (width - 1) // 2
        g = read_off_transfer(z, walk.positions, sums.tolist(), left, width - 1 - left)
        tried.append(width)
        if g is not None:
            return {"found": True, "window": width, "g": g, "tried": tried, "steps": steps}
    return {"found": False, "result": f"NOT_COBOUNDARY_AT_WINDOW({max_window})",
            "tried": tried, "steps": steps}


def scob_verify(theta: Substitution, p: JumpFunction, c: int, g: CylinderFunction,
                samples: int = 1000) -> dict:
    """Check ``p = c + g∘S - g`` and ``h∘S = T^c∘h`` with ``h(x) = T^{-g(x)} x``.

    ``h`` is tracked as a shift offset: ``h(T^t z) = T^{t - g(T^t z)} z``.
    """
    reach = max(p.left, g.left) + 1
    z = substitution_point(theta, (samples + 1) * p.max_value + max(p.right, g.right) + 1,
                           reach)
    walk = walk_point(p, z, samples)
    bad_jump = bad_factor = 0
    for t, v in zip(walk.positions, walk.jumps):
        s = t + v
        gx, gs = g.at(z, t), g.at(z, s)
        if v != c + gs - gx:
            bad_jump += 1
        if s - gs != (t - gx) + c:
            bad_factor += 1
    return {"samples": samples, "jump_identity_failures": bad_jump,
            "factor_identity_failures": bad_factor, "ok": bad_jump == 0 and bad_factor == 0}


def odometer_scob(spec: OdometerSpec, jump: OdometerJumpSpec, c: int,
                  samples: int = 1000, max_level: int = 6) -> dict:
    """Read a floor-constant transfer function off S-sums, then verify both identities."""
    pos = s_orbit(jump, samples + 1)
    sums = partial_sums([jump.value(n) for n in pos[:-1]], c).tolist()
    for k in range(jump.level, max_level + 1):
        mk = spec.m(k)
        table = {}
        if all(table.setdefault(n % mk, s) == s for n, s in zip(pos, sums)):
            bad = 0
            for n, n_next in zip(pos[:-1], pos[1:]):
                v = n_next - n
                gx, gs = table[n % mk], table[n_next % mk]
                if v != c + gs - gx or (n_next - gs) != (n - gx) + c:
                    bad += 1
            return {"level": k, "g": dict(sorted(table.items())), "samples": samples,
                    "failures": bad, "ok": bad == 0}
    return {"level": None, "ok": False, "samples": samples,
            "result": f"no floor-constant transfer function up to level {max_level}"}


# --- entropy -------------------------------------------------------------------

def entropy_estimates(counts) -> list:
    """``log|W_n| / n`` for ``n = 1, 2, ...`` (natural log)."""
    return [math.log(w) / n for n, w in enumerate(counts, start=1)]


def entropy_summary(counts) -> dict:
    est = entropy_estimates(counts)
    return {"estimates": est, "last": est[-1],
            "nonincreasing_tail": all(b <= a + 1e-12 for a, b in
                                      zip(est[len(est) // 2:], est[len(est) // 2 + 1:])),
            "growth_ratio_last": math.log(counts[-1] / counts[-2]) if len(counts) > 1 else None}


# --- the hand-built example ------------------------------------------------------

MARK = (0, 0, 0, 0, 0, 1)


@dataclass(frozen=True)
class ExammeasSystem:
    n_sequence: tuple  # n_2, n_3, ...
    words0: tuple  # w_1(0), w_2(0), ...
    words1: tuple
    jump: JumpFunction

    @property
    def levels(self) -> int:
        return len(self.words0)

    def point(self) -> Point:
        """``... w_K(1) . w_K(0) w_K(0)``: a point starting with every ``w_k(0)``."""
        a, b = self.words0[-1], self.words1[-1]
        return Point(b + a + a, len(b), "w_K(1).w_K(0)w_K(0)")


def exammeas_build(n_sequence, levels: int | None = None) -> ExammeasSystem:
    """Words ``w_k(0), w_k(1)`` and the jump 4 / 1 / 1 / 2 around the marker 000001."""
    n_sequence = tuple(int(n) for n in n_sequence)
    if levels is None:
        levels = len(n_sequence) + 1
    if any(b <= a for a, b in zip(n_sequence, n_sequence[1:])):
        raise ValueError("n_sequence must be increasing")
    if n_sequence and n_sequence[0] <= 6:
        raise ValueError("the first n must exceed 6")
    if levels - 1 > len(n_sequence):
        raise ValueError(f"{levels} levels need {levels - 1} values of n")
    w0 = [MARK]
    w1 = [MARK + (1,)]
    for n in n_sequence[:levels - 1]:
        a, b = w0[-1], w1[-1]
        head = a * (n + 1) + b + a
        w0.append(head + b)
        w1.append(head + b + b)
    jump = JumpFunction.from_cylinders(2, [(0, MARK, 4), (-1, MARK, 1), (-2, MARK, 1)], 2)
    return ExammeasSystem(n_sequence[:levels - 1], tuple(w0), tuple(w1), jump)


def exammeas_check(system: ExammeasSystem) -> dict:
    """Crossing times and jump sums of each ``w_k(0)``: simulation against recursion."""
    x = system.point()
    rows = []
    ok = True
    prev = None
    for k in range(1, system.levels + 1):
        target = len(system.words0[k - 1])
        walk = walk_until(system.jump, x, target)
        s_sim, total_sim = walk.steps, walk.positions[-1]
        if k == 1:
            s_rec, total_rec = 2, 6
        else:
            n = system.n_sequence[k - 2]
            la, lb = len(system.words0[k - 2]), len(system.words1[k - 2])
            s_rec = n * prev[0] + la + lb
            total_rec = n * prev[1] + 2 * la + 2 * lb
        match = (s_sim, total_sim) == (s_rec, total_rec)
        ok &= match
        rows.append({"k": k, "length": target, "s_sim": s_sim, "s_rec": s_rec,
                     "sum_sim": total_sim, "sum_rec": total_rec, "match": match,
                     "average": total_sim / s_sim, "above_2": total_sim / s_sim > 2})
        prev = (s_sim, total_sim)
    if not ok:
        raise AssertionError(f"simulation and recursion disagree: {rows}")
    return {"levels": rows, "ok": ok, "all_above_2": all(r["above_2"] for r in rows)}
