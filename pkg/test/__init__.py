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

import collections
import os

import numpy as np

from anchor_optimization import core, files, synth

File = collections.namedtuple("File", ["name", "data"])  # type: (str, str) -> File


def write_files(directory, *file_list):  # type: (str, File) -> list
    """Write every ``File`` under ``directory`` and return their paths."""
    paths = []
    for f in file_list:
        path = os.path.join(str(directory), f.name)
        data = "".join(f.data) if isinstance(f.data, (list, tuple)) else f.data
        files.write_file(path, data)
        paths.append(path)
    return paths


def unit_rows(n, d, rng_seed=0):  # type: (int, int, int) -> np.ndarray
    rng = np.random.default_rng(rng_seed)
    return core.normalize_rows(rng.standard_normal((n, d)))


def random_space(n, d, rng_seed=0, name="x"):  # type: (int, int, int, str) -> core.EmbeddingSpace
    return core.EmbeddingSpace(synth.make_keys(n), unit_rows(n, d, rng_seed), name=name)


def rotated_space(space, rng_seed=1, name="y"):
    # type: (core.EmbeddingSpace, int, str) -> core.EmbeddingSpace
    """The same keys as space, every vector multiplied by one random orthogonal matrix."""
    rotation = synth.random_orthogonal(space.dim, rng_seed)
    return core.EmbeddingSpace(space.keys, np.dot(space.vectors, rotation), name=name)


def assert_same_space(actual, expected, atol=0.0):
    # type: (core.EmbeddingSpace, core.EmbeddingSpace, float) -> None
    assert actual.keys == expected.keys
    np.testing.assert_allclose(actual.vectors, expected.vectors, rtol=0.0, atol=atol)
