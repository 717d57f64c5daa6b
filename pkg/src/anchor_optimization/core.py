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
"""This module contains the embedding-space containers, row normalization,
relative projection and the cosine nearest-neighbour queries every other
module builds on.

All similarities are cosine similarities: spaces are rescaled to unit rows
once, at construction, and the operations below assume unit rows.
"""
from __future__ import absolute_import

from concurrent import futures

import numpy as np

from anchor_optimization import errors, params

ZERO_NORM = 1e-12  # type: float
UNIT_NORM_TOLERANCE = 1e-6  # type: float
SIMILARITY_TOLERANCE = 1e-6  # type: float


def _as_matrix(matrix, name="matrix"):  # type: (object, str) -> np.ndarray
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2:
        raise errors.DimMismatchError(2, array.ndim, what="%s rank" % name)
    return array


def _vectors_of(obj):  # type: (object) -> np.ndarray
    """Return the matrix held by a space, an anchor set, a relative representation
    or an array-like.
    """
    if isinstance(obj, RelativeRepresentation):
        return obj.values
    if isinstance(obj, (EmbeddingSpace, AnchorSet)):
        return obj.vectors
    return _as_matrix(obj)


def row_norms(matrix):  # type: (np.ndarray) -> np.ndarray
    """Euclidean norm of every row."""
    return np.linalg.norm(np.asarray(matrix, dtype=np.float64), axis=1)


def has_unit_rows(matrix, tolerance=UNIT_NORM_TOLERANCE):  # type: (np.ndarray, float) -> bool
    """Whether every row of matrix has unit norm within tolerance."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] == 0:
        return True
    return bool(np.all(np.abs(row_norms(matrix) - 1.0) <= tolerance))


def normalize_rows(matrix):  # type: (np.ndarray) -> np.ndarray
    """Rescale every row of matrix to unit Euclidean norm.

    Args:
        matrix (np.ndarray): An N x d real matrix.

    Returns:
        np.ndarray: A new N x d float64 matrix with unit rows.

    Raises:
        ZeroNormRowError: If a row has norm below 1e-12.
    """
    array = _as_matrix(matrix)
    norms = row_norms(array)
    small = np.flatnonzero(norms < ZERO_NORM)
    if small.size:
        raise errors.ZeroNormRowError(int(small[0]))
    return array / norms[:, None]


class EmbeddingSpace(object):
    """A labeled matrix of unit-norm embedding rows.

    Rows are normalized at construction and the matrix is read-only afterwards.

    Args:
        keys (list[str]): Unique sample identifiers, one per row.
        vectors (np.ndarray): N x d matrix.
        name (str): Identifier of the space, used in reports and anchor sets.
    """

    def __init__(self, keys, vectors, name=None):
        keys = [str(key) for key in keys]
        vectors = _as_matrix(vectors, "vectors")
        n_rows, dim = vectors.shape

        if n_rows < 1 or dim < 1:
            raise errors.ConfigurationError(
                "An embedding space needs at least one row and one column, got shape %s"
                % (vectors.shape,)
            )
        if len(keys) != n_rows:
            raise errors.LengthMismatchError(len(keys), n_rows)

        index = {}
        for i, key in enumerate(keys):
            if key in index:
                raise errors.DuplicateKeyError(key)
            index[key] = i

        self._vectors = normalize_rows(vectors)
        self._vectors.setflags(write=False)
        self._keys = tuple(keys)
        self._index = index
        self._name = name

    @property
    def keys(self):  # type: () -> tuple
        """tuple[str]: Sample identifiers in row order."""
        return self._keys

    @property
    def vectors(self):  # type: () -> np.ndarray
        """np.ndarray: Read-only N x d matrix of unit rows."""
        return self._vectors

    @property
    def dim(self):  # type: () -> int
        """int: Embedding dimension d."""
        return self._vectors.shape[1]

    @property
    def name(self):  # type: () -> str
        """str: Identifier of the space."""
        return self._name

    def __len__(self):
        return self._vectors.shape[0]

    def __contains__(self, key):
        return key in self._index

    def __repr__(self):
        return "EmbeddingSpace(name=%r, size=%s, dim=%s)" % (self._name, len(self), self.dim)

    def index_of(self, key):  # type: (str) -> int
        """Row index of key.

        Raises:
            MissingKeyError: If key is not in the space.
        """
        try:
            return self._index[key]
        except KeyError:
            raise errors.MissingKeyError(key, self._name)

    def indices_of(self, keys):  # type: (list) -> np.ndarray
        """Row indices of keys, in the given order."""
        return np.array([self.index_of(key) for key in keys], dtype=np.int64)

    def take(self, indices, name=None):  # type: (list, str) -> EmbeddingSpace
        """A new space made of the given rows, in the given order."""
        indices = np.asarray(indices, dtype=np.int64)
        return EmbeddingSpace(
            [self._keys[i] for i in indices], self._vectors[indices], name=name or self._name
        )


class AnchorSet(object):
    """An ordered list of row indices into an embedding space.

    Order is significant: it is the column order of the relative representations
    computed against the set.

    Args:
        space (EmbeddingSpace): The owning space.
        indices (list[int]): Row indices, all in [0, len(space)).
    """

    def __init__(self, space, indices):
        indices = np.array(indices, dtype=np.int64).ravel()
        size = len(space)
        out_of_range = np.flatnonzero((indices < 0) | (indices >= size))
        if out_of_range.size:
            raise errors.AnchorIndexError(int(indices[out_of_range[0]]), size)

        self._space = space
        self._indices = indices
        self._indices.setflags(write=False)

    @classmethod
    def from_keys(cls, space, keys):  # type: (EmbeddingSpace, list) -> AnchorSet
        """Build an anchor set from sample identifiers."""
        return cls(space, space.indices_of(keys))

    @property
    def space(self):  # type: () -> EmbeddingSpace
        """EmbeddingSpace: The owning space."""
        return self._space

    @property
    def space_ref(self):  # type: () -> str
        """str: Identifier of the owning space."""
        return self._space.name

    @property
    def indices(self):  # type: () -> np.ndarray
        """np.ndarray: Read-only row indices."""
        return self._indices

    @property
    def keys(self):  # type: () -> tuple
        """tuple[str]: Sample identifiers of the anchors, in anchor order."""
        return tuple(self._space.keys[i] for i in self._indices)

    @property
    def vectors(self):  # type: () -> np.ndarray
        """np.ndarray: M x d matrix of anchor embeddings, in anchor order."""
        return self._space.vectors[self._indices]

    def head(self, count):  # type: (int) -> AnchorSet
        """The first count anchors."""
        return AnchorSet(self._space, self._indices[:count])

    def __len__(self):
        return self._indices.shape[0]

    def __repr__(self):
        return "AnchorSet(space=%r, size=%s)" % (self.space_ref, len(self))


class ParallelSeed(object):
    """A pair of equal-length anchor sets in registered correspondence: anchor i of x
    and anchor i of y encode the same sample.
    """

    def __init__(self, x, y):
        if len(x) != len(y):
            raise errors.AnchorCountMismatchError(len(x), len(y))
        self._x = x
        self._y = y

    @property
    def x(self):  # type: () -> AnchorSet
        """AnchorSet: The source side of the seed."""
        return self._x

    @property
    def y(self):  # type: () -> AnchorSet
        """AnchorSet: The target side of the seed."""
        return self._y

    def __len__(self):
        return len(self._x)


class RelativeRepresentation(object):
    """An N x M matrix of cosine similarities between samples and anchors."""

    def __init__(self, values):
        values = np.array(_as_matrix(values, "relative representation"))
        if values.size and np.max(np.abs(values)) > 1.0 + SIMILARITY_TOLERANCE:
            raise errors.ConfigurationError(
                "Relative representation entries must lie in [-1, 1], found %s"
                % np.max(np.abs(values))
            )
        self._values = values
        self._values.setflags(write=False)

    @property
    def values(self):  # type: () -> np.ndarray
        """np.ndarray: Read-only N x M similarity matrix."""
        return self._values

    @property
    def anchor_count(self):  # type: () -> int
        """int: Number of anchors M."""
        return self._values.shape[1]

    def __len__(self):
        return self._values.shape[0]


def relative_projection(samples, anchors):  # type: (object, object) -> RelativeRepresentation
    """Project samples onto anchors: values[i][j] = cos(sample_i, anchor_j).

    Args:
        samples: N x d unit-row matrix (or EmbeddingSpace).
        anchors: M x d unit-row matrix (or AnchorSet).

    Returns:
        RelativeRepresentation: The N x M relative representation.

    Raises:
        DimMismatchError: If samples and anchors have different d.
    """
    samples = _vectors_of(samples)
    anchors = _vectors_of(anchors)
    if samples.shape[1] != anchors.shape[1]:
        raise errors.DimMismatchError(samples.shape[1], anchors.shape[1])
    assert has_unit_rows(samples), "relative_projection expects unit-norm samples"
    assert has_unit_rows(anchors), "relative_projection expects unit-norm anchors"
    return RelativeRepresentation(np.dot(samples, anchors.T))


def _top_k_row(row, k):  # type: (np.ndarray, int) -> np.ndarray
    """Indices of the k largest entries of row, descending, ties by ascending index."""
    n_cols = row.shape[0]
    if k < n_cols:
        threshold = np.partition(row, n_cols - k)[n_cols - k]
        candidates = np.flatnonzero(row >= threshold)
    else:
        candidates = np.arange(n_cols)
    order = np.argsort(-row[candidates], kind="stable")
    return candidates[order[:k]]


def topk_neighbors(
    queries,
    corpus,
    k,
    exclude_self=False,
    block_entries=params.DEFAULT_BLOCK_ENTRIES,
    num_threads=1,
):
    # type: (np.ndarray, np.ndarray, int, bool, int, int) -> tuple
    """Exact cosine top-k for a batch of unit-row queries against a unit-row corpus.

    Similarities are computed in row blocks of at most block_entries entries; blocks
    run on a thread pool and write disjoint output rows.

    Args:
        queries (np.ndarray): Q x d unit rows.
        corpus (np.ndarray): C x d unit rows.
        k (int): Number of neighbours.
        exclude_self (bool): Skip corpus row i for query i (queries and corpus are the
            same rows).
        block_entries (int): Maximum entries of a similarity block.
        num_threads (int): Worker threads.

    Returns:
        tuple(np.ndarray, np.ndarray): Q x k neighbour indices and similarities, sorted
            by descending similarity, ties broken by ascending index.
    """
    queries = _as_matrix(queries, "queries")
    corpus = _as_matrix(corpus, "corpus")
    if queries.shape[1] != corpus.shape[1]:
        raise errors.DimMismatchError(corpus.shape[1], queries.shape[1])
    if exclude_self and queries.shape[0] != corpus.shape[0]:
        raise errors.DimMismatchError(
            corpus.shape[0], queries.shape[0], what="query count for a self-excluding search"
        )

    n_queries, n_corpus = queries.shape[0], corpus.shape[0]
    available = n_corpus - 1 if exclude_self else n_corpus
    if k < 1 or k > available:
        raise errors.KTooLargeError(k, available)

    indices = np.empty((n_queries, k), dtype=np.int64)
    similarities = np.empty((n_queries, k), dtype=np.float64)
    rows_per_block = max(1, int(block_entries) // n_corpus)
    starts = list(range(0, n_queries, rows_per_block))

    def run(start):
        stop = min(start + rows_per_block, n_queries)
        block = np.dot(queries[start:stop], corpus.T)
        if exclude_self:
            block[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        for offset in range(stop - start):
            row = block[offset]
            order = _top_k_row(row, k)
            indices[start + offset] = order
            similarities[start + offset] = row[order]

    if num_threads > 1 and len(starts) > 1:
        with futures.ThreadPoolExecutor(max_workers=num_threads) as pool:
            list(pool.map(run, starts))
    else:
        for start in starts:
            run(start)

    return indices, similarities


def cosine_topk(query, corpus, k):  # type: (object, object, int) -> list
    """Rank the rows of corpus by cosine similarity to query.

    Works for embedding vectors and for relative-representation rows alike: both the
    query and the corpus rows are compared by cosine.

    Args:
        query (np.ndarray): A d vector.
        corpus: A C x d matrix, EmbeddingSpace or RelativeRepresentation.
        k (int): Number of results.

    Returns:
        list[tuple(int, float)]: (index, similarity) pairs, descending by similarity,
            ties broken by ascending index.

    Raises:
        DimMismatchError: If the query width differs from the corpus width.
        KTooLargeError: If k exceeds the corpus rows (or is not positive).
    """
    corpus = _vectors_of(corpus)
    query = np.asarray(query, dtype=np.float64).ravel()
    if query.shape[0] != corpus.shape[1]:
        raise errors.DimMismatchError(corpus.shape[1], query.shape[0])
    if k < 1 or k > corpus.shape[0]:
        raise errors.KTooLargeError(k, corpus.shape[0])

    indices, similarities = topk_neighbors(
        normalize_rows(query[None, :]), normalize_rows(corpus), k
    )
    return [(int(i), float(s)) for i, s in zip(indices[0], similarities[0])]
