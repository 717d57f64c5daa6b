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
"""This module contains utilities to encode and decode the text embedding
format and the NPY, CSV and JSON members of run artifacts.
"""
from __future__ import absolute_import

import csv
import json

import numpy as np
from six import BytesIO, StringIO

from anchor_optimization import content_types, errors


def decode_text_embeddings(text, labeled=False):  # type: (str, bool) -> tuple
    """Decode whitespace separated embeddings.

    The first line is the header ``N d``; every following line is ``key v1 ... vd``,
    or ``key label v1 ... vd`` for labeled files. Blank lines are ignored.

    Args:
        text (str): File content.
        labeled (bool): Whether an integer label follows every key.

    Returns:
        tuple(list[str], np.ndarray or None, np.ndarray): Keys, labels and the N x d matrix.

    Raises:
        ParseError: On a malformed header, key, label or value, or a wrong row count.
        DimInconsistentError: On a row whose width disagrees with the header.
        DuplicateKeyError: On a key that appears twice.
    """
    lines = text.splitlines()
    if not lines:
        raise errors.ParseError(1, "missing 'N d' header")

    header = lines[0].split()
    try:
        rows, dim = int(header[0]), int(header[1])
    except (IndexError, ValueError):
        raise errors.ParseError(1, "expected an 'N d' header, got %r" % lines[0])
    if len(header) != 2 or rows < 1 or dim < 1:
        raise errors.ParseError(1, "expected a positive 'N d' header, got %r" % lines[0])

    offset = 2 if labeled else 1
    keys = []
    labels = []
    seen = set()
    matrix = np.empty((rows, dim), dtype=np.float64)

    for number, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != offset + dim:
            raise errors.DimInconsistentError(
                number, "expected %s values, found %s" % (dim, len(tokens) - offset)
            )
        if len(keys) == rows:
            raise errors.ParseError(number, "more rows than the %s declared in the header" % rows)

        key = tokens[0]
        if key in seen:
            raise errors.DuplicateKeyError(key)
        seen.add(key)

        if labeled:
            try:
                labels.append(int(tokens[1]))
            except ValueError:
                raise errors.ParseError(number, "invalid label %r" % tokens[1])
        try:
            matrix[len(keys)] = [float(token) for token in tokens[offset:]]
        except ValueError as e:
            raise errors.ParseError(number, str(e))
        keys.append(key)

    if len(keys) != rows:
        raise errors.ParseError(
            len(lines), "expected %s rows as declared in the header, found %s" % (rows, len(keys))
        )

    return keys, (np.array(labels, dtype=np.int64) if labeled else None), matrix


def encode_text_embeddings(keys, matrix, labels=None):  # type: (list, np.ndarray, list) -> str
    """Encode embeddings in the whitespace separated text format.

    Values are written with their shortest exact representation.

    Args:
        keys (list[str]): Row keys; they must not contain whitespace.
        matrix (np.ndarray): N x d matrix.
        labels (list[int]): Optional integer label per row.

    Returns:
        str: The encoded file content.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    stream = StringIO()
    stream.write(u"%s %s\n" % matrix.shape)
    for i, key in enumerate(keys):
        fields = [key]
        if labels is not None:
            fields.append(str(int(labels[i])))
        fields.extend(repr(float(value)) for value in matrix[i])
        stream.write(u" ".join(fields))
        stream.write(u"\n")
    return stream.getvalue()


def array_to_npy(array_like):
    """Convert an array-like object to the NPY format.

    Args:
        array_like (np.array or Iterable or int or float): Array-like object to be converted to NPY.

    Returns:
        (obj): NPY array.
    """
    buffer = BytesIO()
    np.save(buffer, array_like, allow_pickle=False)
    return buffer.getvalue()


def npy_to_numpy(npy_array):
    """Convert an NPY array into numpy. Pickled object arrays are refused.

    Args:
        npy_array (npy array): NPY array to be converted.
    Returns:
        (np.array): Converted numpy array.
    """
    stream = BytesIO(npy_array)
    return np.load(stream, allow_pickle=False)


def array_to_json(obj):
    """Serialize an object holding numpy arrays or scalars to JSON, with sorted keys.

    Args:
        obj (object): Dictionaries, lists, scalars and numpy values.

    Returns:
        (str): Object serialized to JSON.
    """

    def default(_obj):
        if hasattr(_obj, "tolist"):
            return _obj.tolist()
        return json.JSONEncoder().default(_obj)

    return json.dumps(obj, default=default, sort_keys=True, indent=2)


def records_to_csv(fields, records):  # type: (list, list) -> str
    """Encode mappings as CSV rows with a header, in the given column order.

    Floats are written with their shortest exact representation.

    Args:
        fields (list[str]): Column names.
        records (list[dict]): One mapping per row.

    Returns:
        (str): CSV content.
    """
    stream = StringIO()
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(fields)
    for record in records:
        writer.writerow([_csv_value(record[field]) for field in fields])
    return stream.getvalue()


def _csv_value(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def csv_to_records(string_like, numeric=None):  # type: (str, list) -> list
    """Decode CSV content with a header into a list of dictionaries.

    Args:
        string_like (str): CSV content.
        numeric (list[str]): Columns converted to float (int for integral columns is up to
            the caller).

    Returns:
        (list[dict]): One dictionary per row.
    """
    numeric = set(numeric or [])
    try:
        reader = csv.DictReader(StringIO(string_like), strict=True)
        records = []
        for row in reader:
            records.append(
                {key: (float(value) if key in numeric else value) for key, value in row.items()}
            )
        return records
    except (csv.Error, ValueError, TypeError) as e:
        raise errors.ClientError("Error while decoding csv: {}".format(e))


encoders_map = {
    content_types.NPY: array_to_npy,
    content_types.JSON: array_to_json,
}


def encode(obj, content_type):
    """Encode an object in one of the artifact content types.

    Args:
        obj (object): Object to be encoded.
        content_type (str): Content type to be used.

    Returns:
        object: Object encoded in the given content type.
    """
    if content_type not in encoders_map:
        raise errors.UnsupportedFormatError(content_type)
    return encoders_map[content_type](obj)
