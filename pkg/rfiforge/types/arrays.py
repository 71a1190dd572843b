from __future__ import annotations

from typing import Annotated, Any

import numpy as np
from pydantic import BeforeValidator, PlainSerializer


def _real_array(ndim: int):
    def validate(value: Any) -> np.ndarray:
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != ndim:
            raise ValueError(f"expected a {ndim}-dimensional real array, got shape {array.shape}")
        return array

    return validate


def _complex_array(ndim: int):
    def validate(value: Any) -> np.ndarray:
        array = np.asarray(value, dtype=np.complex128)
        if array.ndim != ndim:
            raise ValueError(
                f"expected a {ndim}-dimensional complex array, got shape {array.shape}"
            )
        return array

    return validate


def _dump_real(array: np.ndarray) -> list:
    return array.tolist()


def _dump_complex(array: np.ndarray) -> list:
    # JSON has no complex numbers, so each entry becomes [real, imag]
    return np.stack([array.real, array.imag], axis=-1).tolist()


RealVector = Annotated[
    np.ndarray, BeforeValidator(_real_array(1)), PlainSerializer(_dump_real)
]
"""A 1-dimensional `float64` array"""

RealMatrix = Annotated[
    np.ndarray, BeforeValidator(_real_array(2)), PlainSerializer(_dump_real)
]
"""A 2-dimensional `float64` array"""

ComplexVector = Annotated[
    np.ndarray, BeforeValidator(_complex_array(1)), PlainSerializer(_dump_complex)
]
"""A 1-dimensional `complex128` array"""

ComplexMatrix = Annotated[
    np.ndarray, BeforeValidator(_complex_array(2)), PlainSerializer(_dump_complex)
]
"""A 2-dimensional `complex128` array"""
