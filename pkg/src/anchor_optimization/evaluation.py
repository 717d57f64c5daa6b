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
"""This module contains the retrieval metrics between two relative spaces,
their aggregation across rng seeds, the GT/Seed/AO anchor baselines and the
CSV, text and PCA exports of the results.
"""
from __future__ import absolute_import

import collections

import numpy as np

from anchor_optimization import core, encoders, errors, logging_config, mapping, params

logger = logging_config.get_logger()

CSV_FIELDS = [
    "direction_src",
    "direction_tgt",
    "method",
    "jaccard_mean",
    "jaccard_std",
    "mrr_mean",
    "mrr_std",
    "cosine_mean",
    "cosine_std",
]
_NUMERIC_FIELDS = CSV_FIELDS[3:]

_PLUS_MINUS = u"±"


class RetrievalReport(mapping.MappingMixin):
    """Retrieval metrics of one direction and method, mean and population std across runs.

    Args:
        direction_src (str): Source space identifier.
        direction_tgt (str): Target space identifier.
        method (str): "GT", "Seed" or "AO".
        jaccard_mean, jaccard_std, mrr_mean, mrr_std, cosine_mean, cosine_std (float): Metrics.
        k (int): Neighbourhood size, when known.
        n_words (int): Evaluated words per run, when known.
        n_runs (int): Number of aggregated runs.
    """

    def __init__(
        self,
        direction_src,
        direction_tgt,
        method,
        jaccard_mean,
        jaccard_std,
        mrr_mean,
        mrr_std,
        cosine_mean,
        cosine_std,
        k=None,
        n_words=None,
        n_runs=1,
    ):
        self._direction_src = direction_src
        self._direction_tgt = direction_tgt
        self._method = method
        self._jaccard_mean = float(jaccard_mean)
        self._jaccard_std = float(jaccard_std)
        self._mrr_mean = float(mrr_mean)
        self._mrr_std = float(mrr_std)
        self._cosine_mean = float(cosine_mean)
        self._cosine_std = float(cosine_std)
        self._k = k
        self._n_words = n_words
        self._n_runs = n_runs

    @property
    def direction_src(self):  # type: () -> str
        return self._direction_src

    @property
    def direction_tgt(self):  # type: () -> str
        return self._direction_tgt

    @property
    def method(self):  # type: () -> str
        return self._method

    @property
    def jaccard_mean(self):  # type: () -> float
        return self._jaccard_mean

    @property
    def jaccard_std(self):  # type: () -> float
        return self._jaccard_std

    @property
    def mrr_mean(self):  # type: () -> float
        return self._mrr_mean

    @property
    def mrr_std(self):  # type: () -> float
        return self._mrr_std

    @property
    def cosine_mean(self):  # type: () -> float
        return self._cosine_mean

    @property
    def cosine_std(self):  # type: () -> float
        return self._cosine_std

    @property
    def k(self):  # type: () -> int
        return self._k

    @property
    def n_words(self):  # type: () -> int
        return self._n_words

    @property
    def n_runs(self):  # type: () -> int
        return self._n_runs

    @property
    def direction(self):  # type: () -> tuple
        return self._direction_src, self._direction_tgt


def jaccard_at_k(neighbors_src, neighbors_tgt):  # type: (list, list) -> float
    """Jaccard similarity of two neighbour sets: |intersection| / |union|.

    Raises:
        EmptySetsError: If both sets are empty.
    """
    src, tgt = set(neighbors_src), set(neighbors_tgt)
    union = src | tgt
    if not union:
        raise errors.EmptySetsError("Jaccard similarity of two empty neighbour sets")
    return len(src & tgt) / float(len(union))


def reciprocal_rank_at_k(true_index, ranked_list, k=None):  # type: (int, list, int) -> float
    """1 / rank of true_index in ranked_list (1-based), or 0 when it is not in the top k."""
    ranked = list(ranked_list)
    if k is not None:
        ranked = ranked[:k]
    for rank, index in enumerate(ranked, start=1):
        if index == true_index:
            return 1.0 / rank
    return 0.0


def _unit_or_zero_rows(matrix):  # type: (np.ndarray) -> np.ndarray
    norms = core.row_norms(matrix)
    return matrix / np.where(norms < core.ZERO_NORM, 1.0, norms)[:, None]


def retrieval_scores(rel_src, rel_tgt, k=params.DEFAULT_TOP_K, num_threads=1, block_entries=None):
    # type: (object, object, int, int, int) -> tuple
    """Per-word retrieval metrics between row-aligned relative representations.

    Row i of both inputs encodes the same word. Relative rows are compared by cosine:
    Jaccard between the k nearest rows of word i in each space (the word itself
    excluded), reciprocal rank of target row i among the k nearest target rows of
    source row i, and cosine between the two relative rows. A word orthogonal to every
    anchor has an all-zero relative row, whose cosine with any row is 0.

    Returns:
        tuple(float, float, float): Mean Jaccard, MRR and cosine over the words.
    """
    block_entries = block_entries or params.DEFAULT_BLOCK_ENTRIES
    src = _unit_or_zero_rows(core._vectors_of(rel_src))  # pylint: disable=protected-access
    tgt = _unit_or_zero_rows(core._vectors_of(rel_tgt))  # pylint: disable=protected-access
    if src.shape != tgt.shape:
        raise errors.DimMismatchError(src.shape, tgt.shape, what="relative representation shape")

    options = dict(block_entries=block_entries, num_threads=num_threads)
    neighbors_src, _ = core.topk_neighbors(src, src, k, exclude_self=True, **options)
    neighbors_tgt, _ = core.topk_neighbors(tgt, tgt, k, exclude_self=True, **options)
    cross, _ = core.topk_neighbors(src, tgt, k, **options)

    words = src.shape[0]
    jaccard = np.array(
        [jaccard_at_k(neighbors_src[i], neighbors_tgt[i]) for i in range(words)]
    )
    reciprocal = np.array([reciprocal_rank_at_k(i, cross[i], k) for i in range(words)])
    cosine = np.einsum("ij,ij->i", src, tgt)
    return float(np.mean(jaccard)), float(np.mean(reciprocal)), float(np.mean(cosine))


def retrieval_eval(
    space_src,
    space_tgt,
    anchors_src,
    anchors_tgt,
    parallel_keys,
    k=params.DEFAULT_TOP_K,
    method=params.AO_METHOD,
    num_threads=1,
    block_entries=None,
):
    # type: (object, object, object, object, list, int, str, int, int) -> RetrievalReport
    """Evaluate how well two anchor sets align two spaces on a shared vocabulary.

    Args:
        space_src (core.EmbeddingSpace): Source space.
        space_tgt (core.EmbeddingSpace): Target space.
        anchors_src (core.AnchorSet): Source anchors.
        anchors_tgt (core.AnchorSet): Target anchors, in correspondence with anchors_src.
        parallel_keys (list[str]): Words present in both spaces.
        k (int): Neighbourhood size.
        method (str): Label of the anchor method, stored in the report.

    Returns:
        RetrievalReport: Metrics of a single run (std 0).

    Raises:
        AnchorCountMismatchError: If the anchor sets differ in size.
        MissingKeyError: If a parallel key is absent from a space.
    """
    if len(anchors_src) != len(anchors_tgt):
        raise errors.AnchorCountMismatchError(len(anchors_src), len(anchors_tgt))

    rows_src = space_src.indices_of(parallel_keys)
    rows_tgt = space_tgt.indices_of(parallel_keys)
    rel_src = core.relative_projection(space_src.vectors[rows_src], anchors_src)
    rel_tgt = core.relative_projection(space_tgt.vectors[rows_tgt], anchors_tgt)

    jaccard, mrr, cosine = retrieval_scores(
        rel_src, rel_tgt, k, num_threads=num_threads, block_entries=block_entries
    )
    logger.info(
        "%s %s -> %s: jaccard %.4f, mrr %.4f, cosine %.4f over %s words",
        method,
        space_src.name,
        space_tgt.name,
        jaccard,
        mrr,
        cosine,
        len(parallel_keys),
    )
    return RetrievalReport(
        space_src.name,
        space_tgt.name,
        method,
        jaccard,
        0.0,
        mrr,
        0.0,
        cosine,
        0.0,
        k=k,
        n_words=len(parallel_keys),
    )


def aggregate_reports(reports):  # type: (list) -> list
    """Aggregate single-run reports by (direction, method).

    Each metric becomes the mean and the population standard deviation of the per-run
    means. Groups keep the order in which they first appear.

    Returns:
        list[RetrievalReport]: One report per direction and method.
    """
    groups = collections.OrderedDict()
    for report in reports:
        key = (report.direction_src, report.direction_tgt, report.method)
        groups.setdefault(key, []).append(report)

    aggregated = []
    for (src, tgt, method), members in groups.items():
        values = {}
        for metric in ("jaccard", "mrr", "cosine"):
            means = np.array([getattr(member, metric + "_mean") for member in members])
            values[metric] = (float(np.mean(means)), float(np.std(means)))
        aggregated.append(
            RetrievalReport(
                src,
                tgt,
                method,
                values["jaccard"][0],
                values["jaccard"][1],
                values["mrr"][0],
                values["mrr"][1],
                values["cosine"][0],
                values["cosine"][1],
                k=members[0].k,
                n_words=members[0].n_words,
                n_runs=len(members),
            )
        )
    return aggregated


def baseline_anchor_sets(run, space_x, space_y):
    # type: (object, core.EmbeddingSpace, core.EmbeddingSpace) -> collections.OrderedDict
    """The anchor pairs of the GT, Seed and AO baselines of a run.

    GT pairs every source anchor with its ground-truth target (skipped when the run has
    no ground truth), Seed keeps the seed pairs only and AO pairs every source anchor
    with its discovered target.

    Args:
        run: An object with anchor_keys_x, anchor_keys_y, seed_keys_y and gt_keys_y
            (artifacts.RunArtifact).
        space_x (core.EmbeddingSpace): Source space.
        space_y (core.EmbeddingSpace): Target space.

    Returns:
        collections.OrderedDict: method -> (source AnchorSet, target AnchorSet).
    """
    anchors_x = core.AnchorSet.from_keys(space_x, run.anchor_keys_x)
    seed_count = len(run.seed_keys_y)

    baselines = collections.OrderedDict()
    if run.gt_keys_y is not None:
        baselines[params.GT_METHOD] = (anchors_x, core.AnchorSet.from_keys(space_y, run.gt_keys_y))
    else:
        logger.warning("Run has no ground-truth target anchors, skipping the GT baseline")
    baselines[params.SEED_METHOD] = (
        anchors_x.head(seed_count),
        core.AnchorSet.from_keys(space_y, run.seed_keys_y),
    )
    baselines[params.AO_METHOD] = (anchors_x, core.AnchorSet.from_keys(space_y, run.anchor_keys_y))
    return baselines


def reports_to_csv(reports):  # type: (list) -> str
    """Encode reports as CSV, one row per direction and method."""
    return encoders.records_to_csv(CSV_FIELDS, [dict(report) for report in reports])


def reports_from_csv(string_like):  # type: (str) -> list
    """Decode reports written by reports_to_csv."""
    records = encoders.csv_to_records(string_like, numeric=_NUMERIC_FIELDS)
    return [RetrievalReport(**{field: record[field] for field in CSV_FIELDS}) for record in records]


def format_summary(reports):  # type: (list) -> str
    """Render reports as a text table: Src, Tgt, method, then every metric as mean +/- std."""
    header = (u"Src", u"Tgt", u"Method", u"Jaccard", u"MRR", u"Cosine")
    rows = [header]
    for report in reports:
        rows.append(
            (
                report.direction_src,
                report.direction_tgt,
                report.method,
                _format_metric(report.jaccard_mean, report.jaccard_std),
                _format_metric(report.mrr_mean, report.mrr_std),
                _format_metric(report.cosine_mean, report.cosine_std),
            )
        )
    widths = [max(len(u"%s" % row[i]) for row in rows) for i in range(len(header))]
    lines = [
        u"  ".join((u"%s" % cell).ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]
    return u"\n".join(lines) + u"\n"


def _format_metric(mean, std):  # type: (float, float) -> str
    return u"%.2f %s %.2f" % (mean, _PLUS_MINUS, std)


def pca_project(matrix, out_dim=2):  # type: (np.ndarray, int) -> np.ndarray
    """Project mean-centered rows onto their top principal directions.

    Each direction is signed so that its largest-magnitude loading is positive.

    Args:
        matrix (np.ndarray): N x M data, N >= 2.
        out_dim (int): Number of directions.

    Returns:
        np.ndarray: N x out_dim coordinates.

    Raises:
        DegenerateDataError: If the centered data is zero.
    """
    data = core._vectors_of(matrix)  # pylint: disable=protected-access
    if data.shape[0] < 2:
        raise errors.DegenerateDataError("PCA needs at least 2 rows, got %s" % data.shape[0])
    if not 1 <= out_dim <= min(data.shape):
        raise errors.ConfigurationError(
            "out_dim must lie in [1, %s], got %s" % (min(data.shape), out_dim)
        )

    centered = data - data.mean(axis=0)
    _, singular_values, components = np.linalg.svd(centered, full_matrices=False)
    if singular_values[0] <= core.ZERO_NORM * max(1.0, np.abs(data).max()):
        raise errors.DegenerateDataError("The data has no variance to project")

    components = components[:out_dim]
    largest = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(out_dim), largest])
    components = components * signs[:, None]
    return np.dot(centered, components.T)
