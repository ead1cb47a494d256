"""Saddle-point solvers that exploit a low-dimensional variable.

Outer methods for the small variable (ellipsoid method, multidimensional
dichotomy) are composed with accelerated inner methods for the large one,
with inner accuracies derived from the outer guarantees.
"""

from .core import (
    BallDomain,
    BoxDomain,
    CallCounter,
    Coupling,
    DimensionError,
    InfeasibleError,
    ParameterError,
    RunReport,
    SaddleConstants,
    SaddleSpec,
    SimplexDomain,
    StateCorruptionError,
)
from .dichotomy import DichotomyConfig, multidim_dichotomy
from .ellipsoid import ellipsoid_minimize
from .saddle import (
    Approach1Config,
    Approach2Config,
    composite_L,
    solve_dichotomy_outer,
    solve_small_x,
    solve_small_y,
)

__version__ = "0.1.0"

__all__ = [
    "Approach1Config",
    "Approach2Config",
    "BallDomain",
    "BoxDomain",
    "CallCounter",
    "Coupling",
    "DichotomyConfig",
    "DimensionError",
    "InfeasibleError",
    "ParameterError",
    "RunReport",
    "SaddleConstants",
    "SaddleSpec",
    "SimplexDomain",
    "StateCorruptionError",
    "composite_L",
    "ellipsoid_minimize",
    "multidim_dichotomy",
    "solve_dichotomy_outer",
    "solve_small_x",
    "solve_small_y",
]
