"""Helper functions."""

from typing import Any

import numpy as np
import pandas as pd
from pydantic import ConfigDict, validate_call

from crossed_z2.constants import ROUND_DECIMALS
from crossed_z2.exceptions import InvalidInputError

EncodedMatrix = list[list[list[float]]]


@validate_call(config=ConfigDict(arbitrary_types_allowed=True))
def encode_matrix(matrix: np.ndarray) -> EncodedMatrix:
    """Encode a complex matrix as rows of ``[re, im]`` pairs.

    Args:
        matrix: A 2-D array, real or complex.

    Returns:
        Nested lists of plain floats, JSON serializable.
    """
    values = np.asarray(matrix, dtype=np.complex128)
    assert values.ndim == 2, f"Expected a 2-D array, got shape {values.shape}"
    return [[[float(z.real), float(z.imag)] for z in row] for row in values]


@validate_call
def decode_matrix(encoded: list[Any], location: str = "matrix") -> np.ndarray:
    """Decode rows of ``[re, im]`` pairs into a complex matrix.

    Args:
        encoded: Nested lists as produced by ``encode_matrix``.
        location: Prefix used in error messages to point at the entry.

    Returns:
        A complex128 array.

    Raises:
        InvalidInputError: If the nesting, the pair length or a number is wrong;
            the message names the offending coordinate.
    """
    if not encoded:
        raise InvalidInputError(f"{location}: matrix has no rows")
    width = None
    out = []
    for i, row in enumerate(encoded):
        if not isinstance(row, list):
            raise InvalidInputError(f"{location}[{i}]: expected a row of [re, im] pairs")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InvalidInputError(
                f"{location}[{i}]: row has {len(row)} entries, expected {width}"
            )
        values = []
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(
                    isinstance(x, int | float) and not isinstance(x, bool) for x in pair
                )
            ):
                raise InvalidInputError(
                    f"{location}[{i}][{j}]: expected a [re, im] pair of numbers, got {pair!r}"
                )
            values.append(complex(pair[0], pair[1]))
        out.append(values)
    return np.asarray(out, dtype=np.complex128)


def rounded_key(matrix: np.ndarray, decimals: int = ROUND_DECIMALS) -> tuple[float, ...]:
    """Sort key made of the rounded real and imaginary parts of an array."""
    values = np.round(np.asarray(matrix, dtype=np.complex128), decimals)
    # -0.0 and 0.0 must compare equal
    return tuple((np.concatenate([values.real.ravel(), values.imag.ravel()]) + 0.0).tolist())


def rounded_record(matrix: np.ndarray, decimals: int = 6) -> EncodedMatrix:
    """Rounded ``[re, im]`` encoding used in failure records for replay."""
    return encode_matrix(np.round(np.asarray(matrix, dtype=np.complex128), decimals))


@validate_call
def int_strings(values: list[list[int]] | list[int]) -> list[Any]:
    """Serialize integers (possibly nested one level) as decimal strings."""
    return [
        [str(x) for x in v] if isinstance(v, list) else str(v) for v in values
    ]


def set_pandas_setup() -> None:
    """Pandas setup."""
    pd.options.display.width = None
    pd.options.display.max_columns = None
    pd.set_option("display.max_rows", 3000)
    pd.set_option("display.max_columns", 3000)
    pd.set_option("display.precision", 6)
