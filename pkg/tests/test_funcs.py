import re

import numpy as np
import pytest

from crossed_z2.exceptions import InvalidInputError
from crossed_z2.funcs import decode_matrix, encode_matrix, int_strings, rounded_key


def test_encode_matrix():
    assert encode_matrix(np.array([[1 + 2j, 0], [0, -1]])) == [
        [[1.0, 2.0], [0.0, 0.0]],
        [[0.0, 0.0], [-1.0, 0.0]],
    ]


def test_decode_matrix():
    decoded = decode_matrix([[[0, 0], [1, 0]], [[0, -1], [0, 0]]])
    np.testing.assert_array_equal(decoded, np.array([[0, 1], [-1j, 0]]))


@pytest.mark.parametrize(
    ("encoded", "location"),
    [
        ([[[0, 0], [1, "x"]]], "gens[0][1]"),
        ([[[0, 0], [1]]], "gens[0][1]"),
        ([[[0, 0]], [[0, 0], [0, 0]]], "gens[1]"),
        ([[[0, 0]], 5], "gens[1]"),
        ([[[True, 0]]], "gens[0][0]"),
        ([], "gens"),
    ],
)
def test_decode_matrix_names_the_offending_entry(encoded, location):
    with pytest.raises(InvalidInputError, match="^" + re.escape(location)):
        decode_matrix(encoded, "gens")


def test_rounded_key_identifies_signed_zero():
    assert rounded_key(np.array([-0.0, 1e-12])) == rounded_key(np.array([0.0, 0.0]))


def test_int_strings():
    assert int_strings([1, 2]) == ["1", "2"]
    assert int_strings([[10**30, -1]]) == [[str(10**30), "-1"]]
