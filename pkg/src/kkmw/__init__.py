"""Computational workbench for simplex-cover arguments: rainbow-cell solves
over cover oracles, and the piercing / mass-partition / fair-division
constructions built on them."""

__version__ = "0.1.0"

from .engine import (
    CoverOracle,
    RainbowCell,
    ResolutionExceeded,
    SolveMachine,
    solve_colorful_kkm,
    solve_dual_kkm,
    solve_kkm,
    verify_cover,
)

__all__ = [
    "CoverOracle",
    "RainbowCell",
    "ResolutionExceeded",
    "SolveMachine",
    "solve_colorful_kkm",
    "solve_dual_kkm",
    "solve_kkm",
    "verify_cover",
    "__version__",
]
