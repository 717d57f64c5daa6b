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

from anchor_optimization import core, errors, optimizer, params, transport
import test


def test_config_defaults():
    config = optimizer.OptimizerConfig()

    assert config.total_anchors == 300
    assert config.seed_anchors == 15
    assert config.steps == 250
    assert config.learning_rate == 0.02
    assert (config.adam_beta1, config.adam_beta2, config.adam_eps) == (0.9, 0.999, 1e-8)
    assert config.sinkhorn == transport.SinkhornConfig()
    assert config.subsample_per_step == 2000
    assert config.frozen_seed is False
    assert config.correspondence_warmup == 0.5


def test_config_stitching_profile():
    config = optimizer.OptimizerConfig.for_profile(params.STITCHING_PROFILE, steps=None, rng_seed=3)

    assert (config.steps, config.learning_rate, config.rng_seed) == (125, 0.05, 3)


def test_config_unknown_profile():
    with pytest.raises(errors.ConfigurationError):
        optimizer.OptimizerConfig.for_profile("translation")


@pytest.mark.parametrize(
    "kwargs, error",
    [
        (dict(total_anchors=10, seed_anchors=11), errors.SeedExceedsTotalError),
        (dict(total_anchors=0, seed_anchors=0), errors.ConfigurationError),
        (dict(steps=0), errors.ConfigurationError),
        (dict(learning_rate=0.0), errors.ConfigurationError),
        (dict(adam_beta1=1.0), errors.ConfigurationError),
        (dict(adam_eps=0.0), errors.ConfigurationError),
        (dict(subsample_per_step=0), errors.ConfigurationError),
        (dict(subsample_per_step="most"), errors.ConfigurationError),
        (dict(correspondence_warmup=-0.1), errors.ConfigurationError),
        (dict(correspondence_warmup=1.5), errors.ConfigurationError),
    ],
)
def test_config_invalid(kwargs, error):
    with pytest.raises(error):
        optimizer.OptimizerConfig(**kwargs)


@pytest.mark.parametrize("value", [None, "all"])
def test_config_subsample_all(value):
    assert optimizer.OptimizerConfig(subsample_per_step=value).subsample_per_step == "all"


def test_init_anchor_estimate():
    seed = test.unit_rows(3, 4, 0)

    estimate = optimizer.init_anchor_estimate(seed, 10, rng_seed=7)

    np.testing.assert_array_equal(estimate.raw[:3], seed)
    assert (estimate.total, estimate.dim, estimate.seed_count) == (10, 4, 3)
    assert core.has_unit_rows(estimate.anchors)
    np.testing.assert_array_equal(
        optimizer.init_anchor_estimate(seed, 10, rng_seed=7).raw, estimate.raw
    )


def test_init_anchor_estimate_seed_exceeds_total():
    with pytest.raises(errors.SeedExceedsTotalError):
        optimizer.init_anchor_estimate(test.unit_rows(5, 3), 4, rng_seed=0)


def test_anchor_estimate_zero_row():
    with pytest.raises(errors.ZeroNormRowError):
        optimizer.AnchorEstimate(np.array([[1.0, 0.0], [0.0, 0.0]]), 1)


def _instance(rng_seed, samples=7, anchors=5, dim=4, frozen_seed=False):
    rng = np.random.default_rng(rng_seed)
    rel = rng.uniform(-1, 1, (samples, anchors))
    targets = test.unit_rows(samples, dim, rng_seed + 1)
    estimate = optimizer.AnchorEstimate(rng.standard_normal((anchors, dim)), 2, frozen_seed)
    return rel, targets, estimate


def test_loss_matches_definition():
    rel, targets, estimate = _instance(0)

    loss, _ = optimizer.loss_and_gradient(rel, targets, estimate)

    expected = np.mean((np.dot(targets, estimate.anchors.T) - rel) ** 2)
    np.testing.assert_allclose(loss, expected)


@pytest.mark.parametrize("rng_seed", range(20))
def test_gradient_matches_finite_differences(rng_seed):
    rel, targets, estimate = _instance(rng_seed)
    step = 1e-5

    _, grad = optimizer.loss_and_gradient(rel, targets, estimate)

    numeric = np.zeros_like(grad)
    for index in np.ndindex(*grad.shape):
        shifted = []
        for sign in (1.0, -1.0):
            raw = np.array(estimate.raw)
            raw[index] += sign * step
            shifted.append(optimizer.loss_and_gradient(rel, targets, estimate.replace(raw))[0])
        numeric[index] = (shifted[0] - shifted[1]) / (2.0 * step)

    relative_error = np.abs(grad - numeric) / np.maximum(np.abs(numeric), 1e-4)
    assert np.max(relative_error) < 1e-4


def test_gradient_is_orthogonal_to_raw_rows():
    rel, targets, estimate = _instance(3)

    _, grad = optimizer.loss_and_gradient(rel, targets, estimate)

    np.testing.assert_allclose(np.einsum("ij,ij->i", grad, estimate.raw), 0.0, atol=1e-12)


def test_gradient_frozen_seed_rows_are_zero():
    rel, targets, estimate = _instance(4, frozen_seed=True)

    _, grad = optimizer.loss_and_gradient(rel, targets, estimate)

    np.testing.assert_array_equal(grad[:2], 0.0)
    assert np.any(grad[2:] != 0.0)


def test_loss_shape_mismatch():
    rel, targets, estimate = _instance(5)

    with pytest.raises(errors.DimMismatchError):
        optimizer.loss_and_gradient(rel[:, :3], targets, estimate)


def test_loss_non_finite():
    rel, targets, estimate = _instance(6)
    rel[0, 0] = np.nan

    with pytest.raises(errors.NonFiniteLossError):
        optimizer.loss_and_gradient(rel, targets, estimate)


def test_adam_first_step_moves_by_learning_rate():
    parameters = np.array([[1.0, -2.0]])
    state = optimizer.AdamState.zeros_like(parameters)

    updated, new_state = optimizer.adam_update(parameters, np.array([[0.5, -3.0]]), state, 0.1)

    np.testing.assert_allclose(updated, [[0.9, -1.9]], rtol=1e-6)
    assert new_state.step_count == 1
    np.testing.assert_array_equal(parameters, [[1.0, -2.0]])


def test_adam_second_step_matches_hand_computation():
    parameters = np.array([0.0])
    state = optimizer.AdamState.zeros_like(parameters)
    parameters, state = optimizer.adam_update(parameters, np.array([1.0]), state, 0.1)

    parameters, state = optimizer.adam_update(parameters, np.array([2.0]), state, 0.1)

    first = (0.9 * 0.1 + 0.1 * 2.0) / (1 - 0.9 ** 2)
    second = (0.999 * 0.001 + 0.001 * 4.0) / (1 - 0.999 ** 2)
    np.testing.assert_allclose(parameters, [-0.1 - 0.1 * first / (np.sqrt(second) + 1e-8)])


def test_adam_rejects_non_finite_gradient():
    parameters = np.zeros(2)

    with pytest.raises(errors.NonFiniteGradientError):
        optimizer.adam_update(
            parameters, np.array([np.inf, 0.0]), optimizer.AdamState.zeros_like(parameters), 0.1
        )


def test_adam_rejects_gradient_shape():
    parameters = np.zeros(2)

    with pytest.raises(errors.DimMismatchError):
        optimizer.adam_update(
            parameters, np.zeros(3), optimizer.AdamState.zeros_like(parameters), 0.1
        )


def test_adam_step_reinitializes_collapsed_rows(caplog):
    estimate = optimizer.AnchorEstimate(np.array([[0.5, 0.0], [1.0, 1.0]]), 0)
    state = optimizer.AdamState.zeros_like(estimate.raw)
    grad = np.array([[1e6, 0.0], [0.0, 0.0]])

    new_estimate, new_state = optimizer.adam_step(
        estimate, grad, state, 0.5, rng=np.random.default_rng(0)
    )

    assert core.row_norms(new_estimate.raw)[0] > 1e-12
    np.testing.assert_array_equal(new_state.first_moment[0], 0.0)
    np.testing.assert_array_equal(new_state.second_moment[0], 0.0)
    assert "Re-initializing 1 collapsed anchor rows" in caplog.text


def test_order_anchors_puts_seed_first(space_x):
    anchors = core.AnchorSet(space_x, [4, 9, 2, 7])
    seed = core.AnchorSet(space_x, [7, 9])

    np.testing.assert_array_equal(optimizer.order_anchors(anchors, seed).indices, [7, 9, 4, 2])


def test_order_anchors_requires_seed(space_x):
    with pytest.raises(errors.ConfigurationError):
        optimizer.order_anchors(core.AnchorSet(space_x, [1, 2]), core.AnchorSet(space_x, [3]))


def _small_problem(space_x, space_y, total=12, seed_count=4):
    anchors_x = core.AnchorSet(space_x, range(total))
    seed = core.ParallelSeed(
        core.AnchorSet(space_x, range(seed_count)), core.AnchorSet(space_y, range(seed_count))
    )
    return anchors_x, seed


def _config(**kwargs):
    values = dict(total_anchors=12, seed_anchors=4, steps=30, learning_rate=0.02)
    values.update(kwargs)
    return optimizer.OptimizerConfig(**values)


def test_optimize_anchors_keeps_unit_rows_and_records_every_step(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y)
    seen = []

    def callback(record, estimate):
        seen.append(record.step)
        assert core.has_unit_rows(estimate.anchors)

    estimate, trace = optimizer.optimize_anchors(
        space_x, anchors_x, space_y, seed, _config(subsample_per_step=20), callback=callback
    )

    assert seen == list(range(30))
    assert len(trace) == 30
    assert estimate.raw.shape == (12, 8)
    assert np.all(np.isfinite(trace.losses))
    assert all(record.marginal_error >= 0 for record in trace)


def test_optimize_anchors_is_deterministic(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y)

    first = optimizer.optimize_anchors(space_x, anchors_x, space_y, seed, _config(rng_seed=5))
    second = optimizer.optimize_anchors(space_x, anchors_x, space_y, seed, _config(rng_seed=5))

    np.testing.assert_array_equal(first[0].raw, second[0].raw)
    assert first[1].without_timing() == second[1].without_timing()


def test_optimize_anchors_frozen_seed(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y)

    estimate, _ = optimizer.optimize_anchors(
        space_x, anchors_x, space_y, seed, _config(frozen_seed=True)
    )

    np.testing.assert_array_equal(estimate.raw[:4], seed.y.vectors)


def test_optimize_anchors_reduces_loss(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y)

    _, trace = optimizer.optimize_anchors(
        space_x, anchors_x, space_y, seed, _config(steps=200, learning_rate=0.05)
    )

    assert trace.final_loss < trace.initial_loss


def test_optimize_anchors_recovers_rotated_anchors(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y)

    estimate, trace = optimizer.optimize_anchors(
        space_x, anchors_x, space_y, seed, _config(steps=200, learning_rate=0.05)
    )

    assert trace.final_loss < 0.25 * trace.initial_loss
    anchors_y, report = optimizer.discretize_anchors(estimate, space_y)
    np.testing.assert_array_equal(anchors_y.indices, range(12))
    assert report.collisions == 0


@pytest.mark.parametrize(
    "step, warmup_steps, expected",
    [(0, 4, 0.0), (1, 4, 0.25), (4, 4, 1.0), (9, 4, 1.0), (0, 0, 1.0)],
)
def test_correspondence_weights(step, warmup_steps, expected):
    weights = optimizer.correspondence_weights(2, 5, step, warmup_steps)

    np.testing.assert_allclose(weights, [1.0, 1.0, expected, expected, expected])


def test_optimize_anchors_empty_seed(space_x, space_y):
    anchors_x, _ = _small_problem(space_x, space_y)
    seed = core.ParallelSeed(core.AnchorSet(space_x, []), core.AnchorSet(space_y, []))

    with pytest.raises(errors.EmptySeedError):
        optimizer.optimize_anchors(
            space_x, anchors_x, space_y, seed, _config(seed_anchors=0)
        )


def test_optimize_anchors_anchor_count(space_x, space_y):
    anchors_x, seed = _small_problem(space_x, space_y, total=10)

    with pytest.raises(errors.AnchorCountMismatchError):
        optimizer.optimize_anchors(space_x, anchors_x, space_y, seed, _config())


def test_optimize_anchors_different_dimensions(space_x):
    space_y = test.random_space(60, 12, rng_seed=9, name="y")
    anchors_x, seed = _small_problem(space_x, space_y)

    estimate, _ = optimizer.optimize_anchors(space_x, anchors_x, space_y, seed, _config(steps=3))

    assert estimate.dim == 12


def test_discretize_anchors_snaps_to_nearest_rows(space_y):
    raw = space_y.vectors[[5, 1, 5]] + 1e-3
    estimate = optimizer.AnchorEstimate(raw, 1)

    anchors, report = optimizer.discretize_anchors(estimate, space_y, block_entries=50)

    np.testing.assert_array_equal(anchors.indices, [5, 1, 5])
    assert report.collisions == 1
    assert report.duplicates == [5]


def test_discretize_anchors_dim_mismatch(space_y):
    estimate = optimizer.AnchorEstimate(test.unit_rows(2, 3), 1)

    with pytest.raises(errors.DimMismatchError):
        optimizer.discretize_anchors(estimate, space_y)


def test_trace_accessors():
    trace = optimizer.OptimizationTrace()
    trace.append(optimizer.StepRecord(0, 2.0, 0.1, 0.5))
    trace.append(optimizer.StepRecord(1, 1.0, 0.2, 0.7))

    assert trace.initial_loss == 2.0
    assert trace.final_loss == 1.0
    np.testing.assert_array_equal(trace.losses, [2.0, 1.0])
    assert trace.without_timing() == [(0, 2.0, 0.1), (1, 1.0, 0.2)]
    assert trace == optimizer.OptimizationTrace(list(trace))
