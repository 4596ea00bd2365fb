"""Input validation helpers shared by the numerical modules."""

from __future__ import annotations

import numpy as np


def as_square_matrix(W, name="W"):
    """Coerce to a float64 2-D square array, copying only when needed."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {W.shape}")
    return W


def check_symmetric(W, tol=1e-12, name="W"):
    W = as_square_matrix(W, name)
    if W.size and np.max(np.abs(W - W.T)) > tol:
        raise ValueError(f"{name} must be symmetric to within {tol}")
    return W


def check_zero_diagonal(W, name="W"):
    if W.size and np.any(np.diag(W) != 0.0):
        raise ValueError(f"{name} must have a zero diagonal")
    return W


def check_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_non_negative(value, name):
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value!r}")
    return value
