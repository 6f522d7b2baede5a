"""Necrotic-tumor free-boundary model: radial states, growth dynamics,
linear-stability spectrum, and an obstacle-problem cross-validation
oracle."""

from .params import ModelParams, ParameterError, kinetics_f, kinetics_g, validate
from .radial import (
    StationaryState,
    eval_F,
    eval_U,
    eval_V,
    solve_K,
    solve_Rs,
    solve_Rstar,
)

__all__ = [
    "ModelParams",
    "ParameterError",
    "validate",
    "kinetics_f",
    "kinetics_g",
    "solve_Rstar",
    "solve_K",
    "eval_U",
    "eval_F",
    "eval_V",
    "solve_Rs",
    "StationaryState",
]

__version__ = "0.1.0"
