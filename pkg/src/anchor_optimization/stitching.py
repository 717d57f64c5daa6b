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
"""This module contains zero-shot stitching: a linear softmax classifier trained
on the relative representations of one space and applied, unchanged, to the
relative representations of another.
"""
from __future__ import absolute_import

import numpy as np
from scipy.special import logsumexp

from anchor_optimization import (
    core,
    encoders,
    errors,
    logging_config,
    mapping,
    optimizer,
    params,
)

logger = logging_config.get_logger()

CSV_FIELDS = [
    "decoder",
    "encoder",
    "method",
    "fscore_mean",
    "fscore_std",
    "mae_mean",
    "mae_std",
]

INIT_SCALE = 0.01


class LabeledRelDataset(object):
    """Relative representations with an integer class per row.

    Args:
        rel (core.RelativeRepresentation or np.ndarray): N x M relative representation.
        labels (list[int]): Class of every row, in [0, n_classes).
        n_classes (int): Number of classes; defaults to max(labels) + 1.
    """

    def __init__(self, rel, labels, n_classes=None):
        values = core._vectors_of(rel)  # pylint: disable=protected-access
        labels = np.asarray(labels, dtype=np.int64).ravel()
        if labels.shape[0] != values.shape[0]:
            raise errors.LengthMismatchError(labels.shape[0], values.shape[0])
        if labels.size and labels.min() < 0:
            raise errors.ConfigurationError("Labels must be >= 0, found %s" % labels.min())
        top = int(labels.max()) + 1 if labels.size else 0
        n_classes = top if n_classes is None else int(n_classes)
        if top > n_classes:
            raise errors.ConfigurationError(
                "Label %s is out of range for %s classes" % (top - 1, n_classes)
            )
        self.rel = values
        self.labels = labels
        self.n_classes = n_classes

    def __len__(self):
        return self.labels.shape[0]


class LinearClassifier(object):
    """A linear softmax layer over relative representations.

    Attributes:
        weights (np.ndarray): C x M weights.
        bias (np.ndarray): C biases.
        trained_on (str): Identifier of the training space.
    """

    def __init__(self, weights, bias, trained_on=None):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.trained_on = trained_on

    @property
    def n_classes(self):  # type: () -> int
        return self.weights.shape[0]

    @property
    def anchor_count(self):  # type: () -> int
        return self.weights.shape[1]

    def logits(self, rel):  # type: (object) -> np.ndarray
        values = core._vectors_of(rel)  # pylint: disable=protected-access
        if values.shape[1] != self.anchor_count:
            raise errors.DimMismatchError(self.anchor_count, values.shape[1], what="anchor count")
        return np.dot(values, self.weights.T) + self.bias


def _pack(weights, bias):
    return np.concatenate([weights, bias[:, None]], axis=1)


def _unpack(parameters):
    return parameters[:, :-1], parameters[:, -1]


def _cross_entropy(parameters, rel, labels):  # type: (np.ndarray, np.ndarray, np.ndarray) -> tuple
    weights, bias = _unpack(parameters)
    logits = np.dot(rel, weights.T) + bias
    log_probs = logits - logsumexp(logits, axis=1, keepdims=True)
    rows = np.arange(labels.shape[0])
    loss = -float(np.mean(log_probs[rows, labels]))

    grad_logits = np.exp(log_probs)
    grad_logits[rows, labels] -= 1.0
    grad_logits /= labels.shape[0]
    return loss, _pack(np.dot(grad_logits.T, rel), grad_logits.sum(axis=0))


def train_classifier(
    data,
    epochs=params.DEFAULT_CLASSIFIER_EPOCHS,
    learning_rate=params.DEFAULT_CLASSIFIER_LEARNING_RATE,
    rng_seed=0,
    trained_on=None,
):
    # type: (LabeledRelDataset, int, float, int, str) -> LinearClassifier
    """Minimize softmax cross-entropy with full-batch Adam.

    Args:
        data (LabeledRelDataset): Training data.
        epochs (int): Number of full-batch updates.
        learning_rate (float): Adam learning rate.
        rng_seed (int): Seed of the weight initialization.
        trained_on (str): Identifier of the training space.

    Returns:
        LinearClassifier: The trained classifier.

    Raises:
        MissingClassError: If fewer than two classes are given or a class has no example.
        NonFiniteLossError: If the loss diverges.
    """
    counts = np.bincount(data.labels, minlength=data.n_classes)
    missing = [int(c) for c in np.flatnonzero(counts == 0)]
    if data.n_classes < 2:
        missing = missing or [1]
    if missing:
        raise errors.MissingClassError(missing)

    rng = np.random.default_rng(rng_seed)
    weights = INIT_SCALE * rng.standard_normal((data.n_classes, data.rel.shape[1]))
    parameters = _pack(weights, np.zeros(data.n_classes))
    state = optimizer.AdamState.zeros_like(parameters)

    loss = None
    for epoch in range(int(epochs)):
        loss, grad = _cross_entropy(parameters, data.rel, data.labels)
        if not np.isfinite(loss):
            raise errors.NonFiniteLossError("Cross-entropy diverged at epoch %s" % epoch)
        parameters, state = optimizer.adam_update(parameters, grad, state, learning_rate)
    logger.debug("Trained a %s-class classifier, final loss %s", data.n_classes, loss)

    weights, bias = _unpack(parameters)
    return LinearClassifier(weights, bias, trained_on=trained_on)


def stitch_predict(classifier, rel):  # type: (LinearClassifier, object) -> np.ndarray
    """Predicted class of every row: argmax of the logits, ties to the lowest class.

    Raises:
        DimMismatchError: If the anchor count differs from the classifier's.
    """
    return np.argmax(classifier.logits(rel), axis=1)


def _check_lengths(preds, labels):
    preds = np.asarray(preds, dtype=np.int64).ravel()
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if preds.shape != labels.shape:
        raise errors.LengthMismatchError(preds.shape[0], labels.shape[0])
    if preds.size == 0:
        raise errors.LengthMismatchError(0, 0)
    return preds, labels


def weighted_fscore(preds, labels):  # type: (list, list) -> float
    """F1 of every class present in labels, averaged with weights proportional to support.

    Raises:
        LengthMismatchError: If the sequences differ in length or are empty.
    """
    preds, labels = _check_lengths(preds, labels)
    classes, support = np.unique(labels, return_counts=True)
    score = 0.0
    for cls, count in zip(classes, support):
        true_positives = np.sum((preds == cls) & (labels == cls))
        predicted = np.sum(preds == cls)
        precision = true_positives / float(predicted) if predicted else 0.0
        recall = true_positives / float(count)
        if precision + recall > 0:
            score += count * 2.0 * precision * recall / (precision + recall)
    return score / labels.shape[0]


def mae(preds, labels):  # type: (list, list) -> float
    """Mean absolute difference between ordinal predictions and labels."""
    preds, labels = _check_lengths(preds, labels)
    return float(np.mean(np.abs(preds - labels)))


class StitchReport(mapping.MappingMixin):
    """Stitching metrics across rng seeds.

    Args:
        decoder (str): Space the classifier was trained on.
        encoder (str): Space the classifier was evaluated on.
        method (str): Anchor method ("GT", "Seed" or "AO").
        fscore_mean, fscore_std, mae_mean, mae_std (float): Mean and population std.
        n_runs (int): Number of seeds.
    """

    def __init__(
        self, decoder, encoder, method, fscore_mean, fscore_std, mae_mean, mae_std, n_runs=1
    ):
        self._decoder = decoder
        self._encoder = encoder
        self._method = method
        self._fscore_mean = float(fscore_mean)
        self._fscore_std = float(fscore_std)
        self._mae_mean = float(mae_mean)
        self._mae_std = float(mae_std)
        self._n_runs = int(n_runs)

    @property
    def decoder(self):  # type: () -> str
        return self._decoder

    @property
    def encoder(self):  # type: () -> str
        return self._encoder

    @property
    def method(self):  # type: () -> str
        return self._method

    @property
    def fscore_mean(self):  # type: () -> float
        return self._fscore_mean

    @property
    def fscore_std(self):  # type: () -> float
        return self._fscore_std

    @property
    def mae_mean(self):  # type: () -> float
        return self._mae_mean

    @property
    def mae_std(self):  # type: () -> float
        return self._mae_std

    @property
    def n_runs(self):  # type: () -> int
        return self._n_runs


def stitch_eval(
    train_space,
    train_labels,
    train_anchors,
    test_space,
    test_labels,
    test_anchors,
    method=params.AO_METHOD,
    epochs=params.DEFAULT_CLASSIFIER_EPOCHS,
    learning_rate=params.DEFAULT_CLASSIFIER_LEARNING_RATE,
    rng_seeds=params.DEFAULT_RNG_SEEDS,
):
    # type: (object, list, object, object, list, object, str, int, float, tuple) -> StitchReport
    """Train on the relative space of train_space, evaluate on that of test_space.

    One classifier is trained per rng seed; the report holds the mean and population
    std of the weighted F-score and the MAE across seeds.

    Raises:
        AnchorCountMismatchError: If the anchor sets differ in size.
    """
    if len(train_anchors) != len(test_anchors):
        raise errors.AnchorCountMismatchError(len(train_anchors), len(test_anchors))

    train_rel = core.relative_projection(train_space, train_anchors)
    test_rel = core.relative_projection(test_space, test_anchors)
    data = LabeledRelDataset(train_rel, train_labels)

    fscores, errors_ = [], []
    for rng_seed in rng_seeds:
        classifier = train_classifier(
            data, epochs, learning_rate, rng_seed=rng_seed, trained_on=train_space.name
        )
        preds = stitch_predict(classifier, test_rel)
        fscores.append(weighted_fscore(preds, test_labels))
        errors_.append(mae(preds, test_labels))

    report = StitchReport(
        train_space.name,
        test_space.name,
        method,
        np.mean(fscores),
        np.std(fscores),
        np.mean(errors_),
        np.std(errors_),
        n_runs=len(fscores),
    )
    logger.info(
        "%s stitching %s -> %s: fscore %.4f, mae %.4f",
        method,
        report.decoder,
        report.encoder,
        report.fscore_mean,
        report.mae_mean,
    )
    return report


def reports_to_csv(reports):  # type: (list) -> str
    """Encode stitching reports as CSV, one row per decoder, encoder and method."""
    return encoders.records_to_csv(CSV_FIELDS, [dict(report) for report in reports])
