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

from anchor_optimization import core, errors, stitching, synth


@pytest.fixture(name="clusters")
def labeled_benchmark():
    spec = synth.SynthSpec(120, 8, n_classes=4, rng_seed=3)
    return synth.make_benchmark(spec, shuffle=False)


def _anchors(space, count=20):
    return core.AnchorSet(space, range(count))


def test_weighted_fscore():
    assert stitching.weighted_fscore([0, 1, 1, 1, 0], [0, 0, 1, 1, 1]) == pytest.approx(0.6)


def test_weighted_fscore_ignores_classes_absent_from_labels():
    assert stitching.weighted_fscore([0, 2], [0, 0]) == pytest.approx(2.0 / 3.0)


def test_weighted_fscore_perfect():
    assert stitching.weighted_fscore([2, 0, 1], [2, 0, 1]) == 1.0


def test_mae():
    assert stitching.mae([1, 3], [2, 5]) == 1.5


@pytest.mark.parametrize("metric", [stitching.weighted_fscore, stitching.mae])
@pytest.mark.parametrize("preds, labels", [([1, 2], [1]), ([], [])])
def test_metrics_length_mismatch(metric, preds, labels):
    with pytest.raises(errors.LengthMismatchError):
        metric(preds, labels)


def test_dataset_validates_labels():
    with pytest.raises(errors.LengthMismatchError):
        stitching.LabeledRelDataset(np.zeros((3, 2)), [0, 1])
    with pytest.raises(errors.ConfigurationError):
        stitching.LabeledRelDataset(np.zeros((2, 2)), [0, 3], n_classes=2)


@pytest.mark.parametrize("labels, missing", [([0, 0, 0], [1]), ([0, 2, 2], [1])])
def test_train_classifier_missing_class(labels, missing):
    data = stitching.LabeledRelDataset(np.eye(3), labels)

    with pytest.raises(errors.MissingClassError) as e:
        stitching.train_classifier(data, epochs=1)

    assert e.value.classes == missing


def test_train_classifier_separates_linear_data():
    rng = np.random.default_rng(0)
    features = rng.uniform(-1, 1, (200, 3))
    labels = (features[:, 0] > 0).astype(int)

    classifier = stitching.train_classifier(
        stitching.LabeledRelDataset(features, labels), epochs=300, learning_rate=0.1, rng_seed=1
    )

    assert classifier.n_classes == 2
    assert classifier.anchor_count == 3
    accuracy = np.mean(stitching.stitch_predict(classifier, features) == labels)
    assert accuracy > 0.9


def test_train_classifier_is_deterministic():
    data = stitching.LabeledRelDataset(np.eye(4), [0, 1, 2, 3])

    first = stitching.train_classifier(data, epochs=5, rng_seed=2)
    second = stitching.train_classifier(data, epochs=5, rng_seed=2)

    np.testing.assert_array_equal(first.weights, second.weights)
    np.testing.assert_array_equal(first.bias, second.bias)


def test_stitch_predict_anchor_count_mismatch():
    classifier = stitching.LinearClassifier(np.zeros((2, 3)), np.zeros(2))

    with pytest.raises(errors.DimMismatchError):
        stitching.stitch_predict(classifier, np.zeros((4, 5)))


def test_stitch_predict_ties_to_lowest_class():
    classifier = stitching.LinearClassifier(np.zeros((3, 2)), np.zeros(3))

    np.testing.assert_array_equal(stitching.stitch_predict(classifier, np.ones((2, 2))), [0, 0])


def test_stitching_with_ground_truth_anchors_matches_in_domain(clusters):
    space_x, space_y = clusters.space_x, clusters.space_y
    labels_x, labels_y = clusters.labels_of(space_x), clusters.labels_of(space_y)
    anchors_x = _anchors(space_x)
    anchors_y = core.AnchorSet.from_keys(space_y, anchors_x.keys)

    in_domain = stitching.stitch_eval(
        space_x, labels_x, anchors_x, space_x, labels_x, anchors_x, rng_seeds=(0, 1)
    )
    stitched = stitching.stitch_eval(
        space_x, labels_x, anchors_x, space_y, labels_y, anchors_y, method="GT", rng_seeds=(0, 1)
    )

    assert stitched.fscore_mean == pytest.approx(in_domain.fscore_mean, abs=1e-6)
    assert stitched.fscore_mean > 0.7
    assert (stitched.decoder, stitched.encoder, stitched.method) == ("x", "y", "GT")
    assert stitched.n_runs == 2


def test_stitch_eval_anchor_count_mismatch(clusters):
    space_x, space_y = clusters.space_x, clusters.space_y
    labels = clusters.labels_of(space_x)

    with pytest.raises(errors.AnchorCountMismatchError):
        stitching.stitch_eval(
            space_x, labels, _anchors(space_x, 5), space_y, labels, _anchors(space_y, 6)
        )


def test_reports_to_csv():
    report = stitching.StitchReport("en", "es", "AO", 0.5, 0.01, 1.25, 0.0)

    lines = stitching.reports_to_csv([report]).splitlines()

    assert lines[0] == ",".join(stitching.CSV_FIELDS)
    assert lines[1] == "en,es,AO,0.5,0.01,1.25,0.0"
