# Copyright 2024 The anchor-optimization authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the 'License'). You
# may not use this file except in compliance with the License. A copy of
# the License is located at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# or in the 'license' file accompanying this file. This file is
# distributed on an 'AS IS' BASIS, WITHOUT WARRANTIES OR CONDITIONS OF
# ANY KIND, either express or implied. See the License for the specific
# language governing permissions and limitations under the License.
from __future__ import absolute_import

import numpy as np
import pytest
from six import BytesIO

from anchor_optimization import content_types, encoders, errors

TEXT = "3 2\ncat 0.5 -1.0\ndog 1e-3 2.0\n\nfish 3 4\n"
LABELED = "2 3\ncat 1 0.1 0.2 0.3\ndog 0 1.0 2.0 3.0\n"


def test_decode_text_embeddings():
    keys, labels, matrix = encoders.decode_text_embeddings(TEXT)

    assert keys == ["cat", "dog", "fish"]
    assert labels is None
    np.testing.assert_array_equal(matrix, [[0.5, -1.0], [1e-3, 2.0], [3.0, 4.0]])
    assert matrix.dtype == np.float64


def test_decode_labeled_text_embeddings():
    keys, labels, matrix = encoders.decode_text_embeddings(LABELED, labeled=True)

    assert keys == ["cat", "dog"]
    np.testing.assert_array_equal(labels, [1, 0])
    assert matrix.shape == (2, 3)


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("", errors.ParseError, 1),
        ("three 2\na 1 2\n", errors.ParseError, 1),
        ("1 2 3\na 1 2\n", errors.ParseError, 1),
        ("0 2\n", errors.ParseError, 1),
        ("2 2\na 1 2\nb 1\n", errors.DimInconsistentError, 3),
        ("2 2\na 1 2\nb 1 x\n", errors.ParseError, 3),
        ("1 2\na 1 2\nb 1 2\n", errors.ParseError, 3),
        ("3 2\na 1 2\nb 1 2\n", errors.ParseError, 3),
    ],
)
def test_decode_text_embeddings_errors(text, error, line):
    with pytest.raises(error) as e:
        encoders.decode_text_embeddings(text)

    assert e.value.line == line
    assert str(e.value).startswith("%s: line %s" % (error.__name__, line))


def test_decode_text_embeddings_duplicate_key():
    with pytest.raises(errors.DuplicateKeyError) as e:
        encoders.decode_text_embeddings("2 1\na 1\na 2\n")

    assert e.value.key == "a"


def test_decode_labeled_text_embeddings_bad_label():
    with pytest.raises(errors.ParseError) as e:
        encoders.decode_text_embeddings("1 1\na one 2\n", labeled=True)

    assert e.value.line == 2


def test_encode_text_embeddings_is_exact():
    matrix = np.array([[0.1, 1.0 / 3.0], [-2.5e-8, 7.0]])

    text = encoders.encode_text_embeddings(["a", "b"], matrix, labels=[3, 1])

    assert text.splitlines()[0] == "2 2"
    assert text.splitlines()[1].split()[:2] == ["a", "3"]
    keys, labels, decoded = encoders.decode_text_embeddings(text, labeled=True)
    assert keys == ["a", "b"]
    np.testing.assert_array_equal(labels, [3, 1])
    np.testing.assert_array_equal(decoded, matrix)


def test_npy_refuses_pickled_objects():
    buffer = BytesIO()
    np.save(buffer, np.array([{"a": 1}], dtype=object), allow_pickle=True)

    with pytest.raises(ValueError):
        encoders.npy_to_numpy(buffer.getvalue())


def test_array_to_npy():
    matrix = np.arange(6, dtype=np.float64).reshape(2, 3)

    actual = encoders.array_to_npy(matrix)

    np.testing.assert_array_equal(np.load(BytesIO(actual)), matrix)


@pytest.mark.parametrize(
    "target, expected",
    [
        ({"b": 1, "a": [1, 2]}, '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}'),
        ({"x": np.float64(0.5)}, '{\n  "x": 0.5\n}'),
        ({"x": np.array([1, 2])}, '{\n  "x": [\n    1,\n    2\n  ]\n}'),
    ],
)
def test_array_to_json(target, expected):
    assert encoders.array_to_json(target) == expected


def test_array_to_json_exception():
    with pytest.raises(TypeError):
        encoders.array_to_json(lambda x: 3)


def test_records_to_csv_and_back():
    text = encoders.records_to_csv(
        ["name", "value"], [{"name": "a", "value": 0.1}, {"name": "b,c", "value": 2.0}]
    )

    assert text == 'name,value\na,0.1\n"b,c",2.0\n'
    assert encoders.csv_to_records(text, numeric=["value"]) == [
        {"name": "a", "value": 0.1},
        {"name": "b,c", "value": 2.0},
    ]


def test_csv_to_records_error():
    with pytest.raises(errors.ClientError):
        encoders.csv_to_records("name,value\na,b\n", numeric=["value"])



def test_encode_npy():
    encoded = encoders.encode([1.5, 2.0], content_types.NPY)

    np.testing.assert_array_equal(encoders.npy_to_numpy(encoded), [1.5, 2.0])


def test_encode_unsupported_content_type():
    with pytest.raises(errors.UnsupportedFormatError):
        encoders.encode("data", "text/html")
