"""The concrete systems used throughout the docs, tests and CLI."""

from __future__ import annotations

from .subshift import JumpFunction
from .symbols import Substitution, language


def marker_jump(theta: Substitution, marker, on_marker: int, after_marker: int,
                default: int) -> JumpFunction:
    """Jump ``on_marker`` where ``marker`` starts at 0, ``after_marker`` one step later.

    The table is restricted to words of the language.
    """
    marker = tuple(marker)
    p = JumpFunction.from_cylinders(theta.size, [(0, marker, on_marker),
                                                  (-1, marker, after_marker)], default)
    return p.restrict(language(theta, p.width))


def parity_example():
    """0 -> 0011, 1 -> 001011 with jumps 3, 1 around 001011 and 2 elsewhere.

    Every image has even length, so the square of the shift is not minimal,
    yet this speedup with orbit number 2 is.
    """
    theta = Substitution([(0, 0, 1, 1), (0, 0, 1, 0, 1, 1)])
    return theta, marker_jump(theta, (0, 0, 1, 0, 1, 1), 3, 1, 2)


def coboundary_example():
    """0 -> 00011, 1 -> 001 with jumps 3, 1 around 00011 and 2 elsewhere.

    ``p - 2`` is a shift coboundary but its sums along the speedup diverge.
    """
    theta = Substitution([(0, 0, 0, 1, 1), (0, 0, 1)])
    return theta, marker_jump(theta, (0, 0, 0, 1, 1), 3, 1, 2)


# sigma tables exactly as printed for the two examples above
PARITY_SIGMA_TABLE = (
    "σ:(0,0) ↦ (0,0)(0,0)(1,0)(1,1)",
    "σ:(0,1) ↦ (0,1)(0,1)(1,1)(1,0)",
    "σ:(1,0) ↦ (0,0)(0,0)(1,0)(0,1)(1,1)(1,0)",
    "σ:(1,1) ↦ (0,1)(0,1)(1,1)(0,0)(1,0)(1,1)",
)

COBOUNDARY_SIGMA_TABLE = (
    "σ:(0,0) ↦ (0,0)(0,0)(0,0)(1,0)(1,1)",
    "σ:(0,1) ↦ (0,1)(0,1)(0,1)(1,1)(1,0)",
    "σ:(1,0) ↦ (0,0)(0,0)(1,0)",
    "σ:(1,1) ↦ (0,1)(0,1)(1,1)",
)

# odometer <4, 3, 3, ...> with a level-1 jump vector: minimal, orbit number 2
ODOMETER_433 = {"preperiod": [4], "cycle": [3]}
ODOMETER_433_JUMP = {"level": 1, "q": [2, 2, 3, 1]}
