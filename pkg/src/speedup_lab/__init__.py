"""Bounded speedups of substitution subshifts and odometers."""

__version__ = "0.1.0"

from .symbols import Substitution, is_primitive, is_proper, language, complexity  # noqa: E402
from .subshift import JumpFunction, Point, orbit_number  # noqa: E402
from .speedup import is_minimal_speedup, build_sigma, column_permutations  # noqa: E402
from .odometer import OdometerSpec, OdometerJumpSpec, check_jump_function  # noqa: E402

__all__ = [
    "Substitution", "is_primitive", "is_proper", "language", "complexity", "JumpFunction",
    "Point", "orbit_number", "is_minimal_speedup", "build_sigma", "column_permutations",
    "OdometerSpec", "OdometerJumpSpec", "check_jump_function",
]
