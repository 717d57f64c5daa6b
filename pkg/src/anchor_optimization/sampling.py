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
"""This module contains the randomized selections of a run: the shared
vocabulary sample, the seed and candidate anchors, and the shuffling that
breaks row correspondence between two spaces.

Every selection is a pure function of its inputs and rng seed: keys are put
in lexicographic order before any draw.
"""
from __future__ import absolute_import

import numpy as np

from anchor_optimization import core, errors, logging_config, params

logger = logging_config.get_logger()


def shared_keys(space_a, space_b):  # type: (core.EmbeddingSpace, core.EmbeddingSpace) -> list
    """Keys present in both spaces, in lexicographic order."""
    return sorted(set(space_a.keys).intersection(space_b.keys))


def intersect_and_subsample(space_a, space_b, n=params.DEFAULT_VOCABULARY_SIZE, rng_seed=0):
    # type: (core.EmbeddingSpace, core.EmbeddingSpace, int, int) -> tuple
    """Sample the shared vocabulary of two spaces and restrict both spaces to it.

    Args:
        space_a (core.EmbeddingSpace): First space.
        space_b (core.EmbeddingSpace): Second space.
        n (int): Sample size; the whole intersection is kept when it is not larger.
        rng_seed (int): Seed of the draw.

    Returns:
        tuple(list[str], core.EmbeddingSpace, core.EmbeddingSpace): The sampled keys in
            lexicographic order and both spaces restricted to them, rows in key order.

    Raises:
        EmptyIntersectionError: If the spaces share no key.
    """
    shared = shared_keys(space_a, space_b)
    if not shared:
        raise errors.EmptyIntersectionError(
            "Spaces %s and %s share no key" % (space_a.name, space_b.name)
        )
    if n < len(shared):
        rng = np.random.default_rng(rng_seed)
        chosen = np.sort(rng.choice(len(shared), size=int(n), replace=False))
        keys = [shared[i] for i in chosen]
    else:
        keys = shared

    logger.info(
        "Shared vocabulary of %s and %s: %s keys, %s kept",
        space_a.name,
        space_b.name,
        len(shared),
        len(keys),
    )
    return (
        keys,
        space_a.take(space_a.indices_of(keys)),
        space_b.take(space_b.indices_of(keys)),
    )


def select_seed_and_candidates(
    space_x,
    space_y,
    aligned_keys,
    n_seed=params.DEFAULT_SEED_ANCHORS,
    n_total=params.DEFAULT_TOTAL_ANCHORS,
    rng_seed=0,
):
    # type: (core.EmbeddingSpace, core.EmbeddingSpace, list, int, int, int) -> tuple
    """Draw the seed pairs and the extra source anchors from a shared vocabulary.

    The draw is n_total distinct keys without replacement: the first n_seed become
    parallel seed pairs, the rest source-side candidates.

    Args:
        space_x (core.EmbeddingSpace): Source space.
        space_y (core.EmbeddingSpace): Target space.
        aligned_keys (list[str]): Keys present in both spaces.
        n_seed (int): Number of seed pairs.
        n_total (int): Number of anchors, seed included.
        rng_seed (int): Seed of the draw.

    Returns:
        tuple(core.ParallelSeed, core.AnchorSet): The seed pairs and the
            n_total - n_seed source candidates.

    Raises:
        NotEnoughKeysError: If n_total exceeds the number of keys.
        SeedExceedsTotalError: If n_seed exceeds n_total.
    """
    if n_seed > n_total:
        raise errors.SeedExceedsTotalError(n_seed, n_total)
    keys = sorted(aligned_keys)
    if n_total > len(keys):
        raise errors.NotEnoughKeysError(n_total, len(keys))

    rng = np.random.default_rng(rng_seed)
    drawn = [keys[i] for i in rng.choice(len(keys), size=int(n_total), replace=False)]
    seed_keys, candidate_keys = drawn[:n_seed], drawn[n_seed:]

    seed = core.ParallelSeed(
        core.AnchorSet.from_keys(space_x, seed_keys), core.AnchorSet.from_keys(space_y, seed_keys)
    )
    return seed, core.AnchorSet.from_keys(space_x, candidate_keys)


def draw_candidates(space_x, exclude_keys, count, rng_seed=0, pool=None):
    # type: (core.EmbeddingSpace, list, int, int, list) -> core.AnchorSet
    """Draw source anchors uniformly among the keys of pool (all keys of space_x by
    default) that are not in exclude_keys.

    Raises:
        NotEnoughKeysError: If fewer than count keys are available.
    """
    excluded = set(exclude_keys)
    pool = sorted(key for key in (space_x.keys if pool is None else pool) if key not in excluded)
    if count > len(pool):
        raise errors.NotEnoughKeysError(count, len(pool))
    rng = np.random.default_rng(rng_seed)
    chosen = [pool[i] for i in rng.choice(len(pool), size=int(count), replace=False)]
    return core.AnchorSet.from_keys(space_x, chosen)


def seed_from_pairs(space_x, space_y, pairs):
    # type: (core.EmbeddingSpace, core.EmbeddingSpace, list) -> core.ParallelSeed
    """Build a parallel seed from (key_x, key_y) pairs.

    Raises:
        MissingKeyError: If a key is absent from its space.
    """
    return core.ParallelSeed(
        core.AnchorSet.from_keys(space_x, [x for x, _ in pairs]),
        core.AnchorSet.from_keys(space_y, [y for _, y in pairs]),
    )


def shuffle_space(space, rng_seed=0, name=None):
    # type: (core.EmbeddingSpace, int, str) -> core.EmbeddingSpace
    """A copy of space with its rows in a random order."""
    rng = np.random.default_rng(rng_seed)
    return space.take(rng.permutation(len(space)), name=name)
