"""Helpers for numpy payloads held by immutable entities."""

from typing import Any

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]


def readonly_float_array(value: Any, ndim: int, name: str) -> FloatArray:
    """Coerce a value to a read-only float64 array of the given rank.

    Args:
        value: Array-like input
        ndim: Required number of dimensions
        name: Field name used in error messages

    Returns:
        A float64 array that owns its data and cannot be written to

    Raises:
        ValueError: If the rank is wrong or any entry is not finite
    """
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimensions, got {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    array.setflags(write=False)
    return array
