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
"""This module contains utilities related to reading and writing files and
directories: embedding files, seed-pair and key-list files and JSON documents.
"""
from __future__ import absolute_import

import io
import json
import os

from anchor_optimization import (
    content_types,
    core,
    encoders,
    errors,
    logging_config,
    recordio,
)

logger = logging_config.get_logger()


def write_file(path, data, mode="w"):  # type: (str, str, str) -> None
    """Write data to a file.

    Args:
        path (str): Path to the file.
        data (str): Data to be written to the file.
        mode (str): Mode which the file will be open.
    """
    kwargs = {} if "b" in mode else {"encoding": "utf-8"}
    with io.open(path, mode, **kwargs) as f:
        f.write(data)


def read_file(path, mode="r"):
    """Read data from a file.

    Args:
        path (str): Path to the file.
        mode (str): mode which the file will be open.

    Returns:
        (str or bytes): The file content.
    """
    kwargs = {} if "b" in mode else {"encoding": "utf-8"}
    with io.open(path, mode, **kwargs) as f:
        return f.read()


def read_json(path):  # type: (str) -> dict
    """Read a JSON file.

    Args:
        path (str): Path to the file.

    Returns:
        (dict[object, object]): A dictionary representation of the JSON file.
    """
    with io.open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_json(path, obj):  # type: (str, object) -> None
    """Write an object as JSON with sorted keys, so equal objects give equal files."""
    write_file(path, encoders.array_to_json(obj) + "\n")


def makedirs(path):  # type: (str) -> str
    if not os.path.exists(path):
        os.makedirs(path)
    return path


def space_name(path):  # type: (str) -> str
    """The default identifier of a space loaded from path: its file name without extension."""
    return os.path.splitext(os.path.basename(str(path)))[0]


def _read_embeddings(path, fmt, labeled):  # type: (str, str, bool) -> tuple
    fmt = fmt or content_types.infer_format(path)
    if fmt == content_types.TEXT:
        return encoders.decode_text_embeddings(read_file(path), labeled=labeled)
    if fmt == content_types.BINARY:
        keys, labels, matrix = recordio.read_embeddings(read_file(path, "rb"))
        if labeled and labels is None:
            raise errors.ParseError(1, "%s holds no labels" % path)
        return keys, (labels if labeled else None), matrix
    raise errors.UnsupportedFormatError(fmt)


def load_word_embeddings(path, fmt=None, name=None):  # type: (str, str, str) -> core.EmbeddingSpace
    """Load an embedding file; rows are normalized on load.

    Args:
        path (str): Path to the file.
        fmt (str): "text" or "binary"; inferred from the extension when None.
        name (str): Identifier of the space; defaults to the file name.

    Returns:
        core.EmbeddingSpace: The space.

    Raises:
        ParseError, DimInconsistentError, DuplicateKeyError: On malformed files.
    """
    keys, _, matrix = _read_embeddings(path, fmt, labeled=False)
    space = core.EmbeddingSpace(keys, matrix, name=name or space_name(path))
    logger.info("Loaded %s rows of dimension %s from %s", len(space), space.dim, path)
    return space


def load_labeled_embeddings(path, fmt=None, name=None):  # type: (str, str, str) -> tuple
    """Load a labeled embedding file (an integer label follows every key).

    Returns:
        tuple(core.EmbeddingSpace, np.ndarray): The space and the label of every row.
    """
    keys, labels, matrix = _read_embeddings(path, fmt, labeled=True)
    space = core.EmbeddingSpace(keys, matrix, name=name or space_name(path))
    logger.info("Loaded %s labeled rows of dimension %s from %s", len(space), space.dim, path)
    return space, labels


def save_word_embeddings(path, space, fmt=None, labels=None):
    # type: (str, core.EmbeddingSpace, str, list) -> None
    """Save a space in the text or binary format.

    Args:
        path (str): Destination file.
        space (core.EmbeddingSpace): The space.
        fmt (str): "text" or "binary"; inferred from the extension when None.
        labels (list[int]): Optional label per row, written in the labeled variant.
    """
    fmt = fmt or content_types.infer_format(path)
    if fmt == content_types.TEXT:
        write_file(path, encoders.encode_text_embeddings(space.keys, space.vectors, labels))
    elif fmt == content_types.BINARY:
        with io.open(path, "wb") as f:
            recordio.write_embeddings(f, list(space.keys), space.vectors, labels)
    else:
        raise errors.UnsupportedFormatError(fmt)


def _content_lines(path):  # type: (str) -> list
    return [
        (number, line.split())
        for number, line in enumerate(read_file(path).splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]


def read_seed_pairs(path):  # type: (str) -> list
    """Read a seed-pair file: one ``key_x key_y`` pair per line, ``#`` starts a comment.

    Returns:
        list[tuple(str, str)]: The pairs, in file order.

    Raises:
        ParseError: On a line that is not a pair.
        DuplicateKeyError: On a source or target key that appears twice.
    """
    pairs = []
    seen_x, seen_y = set(), set()
    for number, tokens in _content_lines(path):
        if len(tokens) != 2:
            raise errors.ParseError(number, "expected 'key_x key_y'")
        key_x, key_y = tokens
        for key, seen in ((key_x, seen_x), (key_y, seen_y)):
            if key in seen:
                raise errors.DuplicateKeyError(key)
            seen.add(key)
        pairs.append((key_x, key_y))
    return pairs


def write_seed_pairs(path, pairs):  # type: (str, list) -> None
    write_file(path, u"".join(u"%s %s\n" % (x, y) for x, y in pairs))


def read_keys(path):  # type: (str) -> list
    """Read a key-list file: one key per line.

    Raises:
        ParseError: On a line holding more than one token.
        DuplicateKeyError: On a key that appears twice.
    """
    keys = []
    seen = set()
    for number, tokens in _content_lines(path):
        if len(tokens) != 1:
            raise errors.ParseError(number, "expected a single key")
        if tokens[0] in seen:
            raise errors.DuplicateKeyError(tokens[0])
        seen.add(tokens[0])
        keys.append(tokens[0])
    return keys


def write_keys(path, keys):  # type: (str, list) -> None
    write_file(path, u"".join(u"%s\n" % key for key in keys))
