"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def as_float_vector(values, *, dim: int | None = None, name: str = "vector",
                    finite: bool = True) -> np.ndarray:
    """Convert ``values`` to a 1-D float64 array, validating shape and finiteness.

    Args:
        values: Any array-like of numbers.
        dim: Required length, or None to accept any length.
        name: Label used in error messages.
        finite: Require every component to be finite.

    Returns:
        A 1-D float64 array (a copy only when conversion demands one).

    Raises:
        ValueError: If the input is not 1-D, has the wrong length, or
            contains non-finite values while ``finite`` is set.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if finite and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_non_negative_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ConfigurationError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def check_probability(value, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number in [0, 1], got {value!r}") from None
    if not np.isfinite(value) or not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value!r}")
    return value
