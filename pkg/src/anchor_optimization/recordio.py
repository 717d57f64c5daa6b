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
"""This module contains utility functions used to read and write the binary
embedding container.

Layout, all little-endian:

    header      magic(uint32) version(uint32) N(uint32) d(uint32) flags(uint32)
    key table   N times: length(uint32) followed by that many UTF-8 bytes
    labels      N int32, present when bit 0 of flags is set
    matrix      N * d float32, row major

Errors report the record they occur in as their line: 1 is the header, 2..N+1
are the keys, N+2 the labels and N+3 the matrix.
"""
from __future__ import absolute_import

import struct

import numpy as np

from anchor_optimization import errors

MAGIC = 0x4D454F41  # b"AOEM"
VERSION = 1
LABELED_FLAG = 0x1

_HEADER = struct.Struct("<5I")
_LENGTH = struct.Struct("<I")


def _write_header(file, rows, dim, labeled):
    flags = LABELED_FLAG if labeled else 0
    file.write(_HEADER.pack(MAGIC, VERSION, rows, dim, flags))


def _write_keys(file, keys):
    for key in keys:
        encoded = key.encode("utf-8")
        file.write(_LENGTH.pack(len(encoded)))
        file.write(encoded)


def write_embeddings(file, keys, matrix, labels=None):
    """Writes keys, optional labels and a matrix to a binary container.

    Args:
        file (file-like object): Binary stream the container is written to.
        keys (list[str]): One key per row.
        matrix (np.ndarray): N x d matrix, stored as float32.
        labels (np.ndarray): Optional integer label per row, stored as int32.
    """
    matrix = np.asarray(matrix)
    if not len(matrix.shape) == 2:
        raise ValueError("Array must be a Matrix")
    if len(keys) != matrix.shape[0]:
        raise errors.LengthMismatchError(len(keys), matrix.shape[0])
    if labels is not None and len(labels) != matrix.shape[0]:
        raise errors.LengthMismatchError(len(labels), matrix.shape[0])

    _write_header(file, matrix.shape[0], matrix.shape[1], labels is not None)
    _write_keys(file, keys)
    if labels is not None:
        file.write(np.asarray(labels, dtype="<i4").tobytes())
    file.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def _take(data, offset, size, line):  # type: (bytes, int, int, int) -> tuple
    end = offset + size
    if end > len(data):
        raise errors.ParseError(line, "truncated container")
    return data[offset:end], end


def read_embeddings(data):  # type: (bytes) -> tuple
    """Reads a binary container.

    Args:
        data (bytes): The container content.

    Returns:
        tuple(list[str], np.ndarray or None, np.ndarray): Keys, labels and the N x d float64
            matrix.

    Raises:
        ParseError: On a bad magic number, an unknown version or a truncated container.
        DuplicateKeyError: On a key that appears twice.
    """
    chunk, offset = _take(data, 0, _HEADER.size, 1)
    magic, version, rows, dim, flags = _HEADER.unpack(chunk)
    if magic != MAGIC:
        raise errors.ParseError(1, "not an embedding container (magic %#x)" % magic)
    if version != VERSION:
        raise errors.ParseError(1, "unsupported container version %s" % version)
    if rows < 1 or dim < 1:
        raise errors.ParseError(1, "empty container (%s x %s)" % (rows, dim))

    keys = []
    seen = set()
    for row in range(rows):
        line = row + 2
        chunk, offset = _take(data, offset, _LENGTH.size, line)
        (length,) = _LENGTH.unpack(chunk)
        chunk, offset = _take(data, offset, length, line)
        try:
            key = chunk.decode("utf-8")
        except UnicodeDecodeError as e:
            raise errors.ParseError(line, str(e))
        if key in seen:
            raise errors.DuplicateKeyError(key)
        seen.add(key)
        keys.append(key)

    labels = None
    if flags & LABELED_FLAG:
        chunk, offset = _take(data, offset, 4 * rows, rows + 2)
        labels = np.frombuffer(chunk, dtype="<i4").astype(np.int64)

    chunk, offset = _take(data, offset, 4 * rows * dim, rows + 3)
    if offset != len(data):
        raise errors.ParseError(rows + 3, "%s trailing bytes" % (len(data) - offset))
    matrix = np.frombuffer(chunk, dtype="<f4").reshape(rows, dim).astype(np.float64)
    return keys, labels, matrix
