"""Derivative-weighted RKHS functional estimation and shape-constraint testing."""

from ._shapekit import (
    InputError,
    fit,
    multi_indices,
    shape_test,
    simulate,
    validate,
)

__all__ = [
    "InputError",
    "fit",
    "multi_indices",
    "shape_test",
    "simulate",
    "validate",
]

__version__ = "0.1.0"
