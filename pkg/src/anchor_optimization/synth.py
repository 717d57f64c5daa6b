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
"""This module contains the synthetic parallel spaces used as ground truth:
a source space and its image under a random isometry, optionally degraded by
Gaussian noise. Isometries preserve cosine similarities, so relative
representations of the two spaces agree exactly when there is no noise.
"""
from __future__ import absolute_import

import numpy as np

from anchor_optimization import core, errors, logging_config, mapping, sampling

logger = logging_config.get_logger()

KEY_FORMAT = "w%06d"
DEFAULT_CLUSTER_STD = 0.05


class SynthSpec(mapping.MappingMixin):
    """Parameters of a synthetic benchmark.

    Args:
        n_samples (int): Rows per space.
        dim_x (int): Source dimension.
        dim_y (int): Target dimension, at least dim_x; defaults to dim_x.
        noise_sigma (float): Standard deviation of the noise added to the target.
        rng_seed (int): Seed of every draw.
        n_classes (int): Number of Gaussian clusters, or None for an unclustered space.
        cluster_std (float): Standard deviation of every cluster.
    """

    def __init__(
        self,
        n_samples,
        dim_x,
        dim_y=None,
        noise_sigma=0.0,
        rng_seed=0,
        n_classes=None,
        cluster_std=DEFAULT_CLUSTER_STD,
    ):
        dim_y = dim_x if dim_y is None else dim_y
        if int(n_samples) < 2:
            raise errors.ConfigurationError("n_samples must be >= 2, got %s" % n_samples)
        if int(dim_x) < 2 or int(dim_y) < 2:
            raise errors.ConfigurationError(
                "Dimensions must be >= 2, got %s and %s" % (dim_x, dim_y)
            )
        if int(dim_y) < int(dim_x):
            raise errors.ConfigurationError(
                "dim_y (%s) must not be smaller than dim_x (%s)" % (dim_y, dim_x)
            )
        if noise_sigma < 0 or cluster_std < 0:
            raise errors.ConfigurationError("Standard deviations must be >= 0")
        if n_classes is not None and int(n_classes) < 1:
            raise errors.ConfigurationError("n_classes must be >= 1, got %s" % n_classes)

        self._n_samples = int(n_samples)
        self._dim_x = int(dim_x)
        self._dim_y = int(dim_y)
        self._noise_sigma = float(noise_sigma)
        self._rng_seed = int(rng_seed)
        self._n_classes = None if n_classes is None else int(n_classes)
        self._cluster_std = float(cluster_std)

    @property
    def n_samples(self):  # type: () -> int
        return self._n_samples

    @property
    def dim_x(self):  # type: () -> int
        return self._dim_x

    @property
    def dim_y(self):  # type: () -> int
        return self._dim_y

    @property
    def noise_sigma(self):  # type: () -> float
        return self._noise_sigma

    @property
    def rng_seed(self):  # type: () -> int
        return self._rng_seed

    @property
    def n_classes(self):  # type: () -> int
        return self._n_classes

    @property
    def cluster_std(self):  # type: () -> float
        return self._cluster_std


def random_orthogonal(d, rng_seed=0):  # type: (int, int) -> np.ndarray
    """A random d x d orthogonal matrix.

    QR decomposition of a standard normal matrix, with the signs of the columns fixed
    so that R has a positive diagonal.
    """
    if d < 1:
        raise errors.ConfigurationError("d must be >= 1, got %s" % d)
    return random_isometry(d, d, rng_seed)


def random_isometry(dim_x, dim_y, rng_seed=0):  # type: (int, int, int) -> np.ndarray
    """A random dim_x x dim_y matrix W with orthonormal rows (W W^T = I).

    Right-multiplication by W maps R^dim_x into R^dim_y preserving inner products.
    """
    if dim_y < dim_x:
        raise errors.ConfigurationError(
            "An isometry needs dim_y >= dim_x, got %s < %s" % (dim_y, dim_x)
        )
    rng = np.random.default_rng(rng_seed)
    q, r = np.linalg.qr(rng.standard_normal((dim_y, dim_x)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs[None, :]).T


def make_keys(count):  # type: (int) -> list
    return [KEY_FORMAT % i for i in range(count)]


def make_space(n_samples, dim, rng_seed=0, name=None):
    # type: (int, int, int, str) -> core.EmbeddingSpace
    """A space of standard normal rows (uniform directions once normalized)."""
    rng = np.random.default_rng(rng_seed)
    return core.EmbeddingSpace(make_keys(n_samples), rng.standard_normal((n_samples, dim)), name)


def make_parallel_space(space_x, transform, noise_sigma=0.0, rng_seed=0, name=None):
    # type: (core.EmbeddingSpace, np.ndarray, float, int, str) -> core.EmbeddingSpace
    """The image of space_x under transform, plus Gaussian noise; keys and order are kept.

    Args:
        space_x (core.EmbeddingSpace): Source space.
        transform (np.ndarray): dim_x x dim_y isometry.
        noise_sigma (float): Standard deviation of the additive noise.
        rng_seed (int): Seed of the noise.
        name (str): Identifier of the new space.

    Raises:
        DimMismatchError: If transform does not have dim_x rows.
    """
    transform = np.asarray(transform, dtype=np.float64)
    if transform.ndim != 2 or transform.shape[0] != space_x.dim:
        raise errors.DimMismatchError(space_x.dim, transform.shape[0])
    vectors = np.dot(space_x.vectors, transform)
    if noise_sigma > 0:
        rng = np.random.default_rng(rng_seed)
        vectors = vectors + noise_sigma * rng.standard_normal(vectors.shape)
    return core.EmbeddingSpace(space_x.keys, vectors, name=name)


def make_class_clusters(spec, name=None):  # type: (SynthSpec, str) -> tuple
    """Gaussian clusters around random unit centroids, one per class.

    Classes are balanced and assigned to rows in a random order.

    Returns:
        tuple(core.EmbeddingSpace, np.ndarray): The space and the class of every row.
    """
    n_classes = spec.n_classes or 1
    rng = np.random.default_rng(spec.rng_seed)
    centroids = core.normalize_rows(rng.standard_normal((n_classes, spec.dim_x)))
    labels = rng.permutation(np.arange(spec.n_samples) % n_classes)
    vectors = centroids[labels] + spec.cluster_std * rng.standard_normal(
        (spec.n_samples, spec.dim_x)
    )
    return core.EmbeddingSpace(make_keys(spec.n_samples), vectors, name=name), labels


class Benchmark(object):
    """A synthetic source space, its shuffled parallel target and optional labels.

    Attributes:
        space_x (core.EmbeddingSpace): Source space.
        space_y (core.EmbeddingSpace): Target space; rows are shuffled, keys match the source.
        transform (np.ndarray): The isometry from source to target.
        labels (np.ndarray): Class of every source row, or None.
    """

    def __init__(self, space_x, space_y, transform, labels=None):
        self.space_x = space_x
        self.space_y = space_y
        self.transform = transform
        self.labels = labels

    def labels_of(self, space):  # type: (core.EmbeddingSpace) -> np.ndarray
        """The labels in the row order of space (matched by key)."""
        if self.labels is None:
            return None
        return self.labels[self.space_x.indices_of(space.keys)]


def make_benchmark(spec, name_x="x", name_y="y", shuffle=True):
    # type: (SynthSpec, str, str, bool) -> Benchmark
    """Generate a source space and its noisy isometric image.

    The target is generated row-aligned with the source and then shuffled, so that
    row correspondence is lost while keys keep the ground truth.
    """
    if spec.n_classes:
        space_x, labels = make_class_clusters(spec, name=name_x)
    else:
        space_x, labels = make_space(spec.n_samples, spec.dim_x, spec.rng_seed, name=name_x), None

    transform = random_isometry(spec.dim_x, spec.dim_y, spec.rng_seed + 1)
    space_y = make_parallel_space(
        space_x, transform, spec.noise_sigma, rng_seed=spec.rng_seed + 2, name=name_y
    )
    if shuffle:
        space_y = sampling.shuffle_space(space_y, spec.rng_seed + 3)

    logger.info(
        "Generated %s parallel rows, dimensions %s -> %s, noise %s",
        spec.n_samples,
        spec.dim_x,
        spec.dim_y,
        spec.noise_sigma,
    )
    return Benchmark(space_x, space_y, transform, labels)
