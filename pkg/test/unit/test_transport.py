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

import itertools

from mock import patch
import numpy as np
import pytest

from anchor_optimization import errors, transport


def test_sinkhorn_config_defaults():
    config = transport.SinkhornConfig()

    assert dict(config) == {"eps": 1e-4, "max_steps": 1, "stop_error": 1e-5}


@pytest.mark.parametrize(
    "kwargs", [dict(eps=0.0), dict(eps=-1.0), dict(max_steps=0), dict(stop_error=0.0)]
)
def test_sinkhorn_config_invalid(kwargs):
    with pytest.raises(errors.ConfigurationError):
        transport.SinkhornConfig(**kwargs)


def test_cost_matrix_is_squared_distance():
    source = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, -0.5]])
    target = np.array([[1.0, 0.0], [0.0, 0.0]])

    cost = transport.cost_matrix(source, target)

    expected = ((target[:, None, :] - source[None, :, :]) ** 2).sum(axis=2)
    assert cost.shape == (2, 3)
    np.testing.assert_allclose(cost, expected, atol=1e-12)
    assert np.all(cost >= 0.0)


def test_cost_matrix_in_blocks_matches_dense():
    rng = np.random.default_rng(0)
    source = rng.uniform(-1, 1, (17, 5))
    target = rng.uniform(-1, 1, (11, 5))

    np.testing.assert_allclose(
        transport.cost_matrix(source, target, block_entries=20),
        transport.cost_matrix(source, target),
    )


def test_cost_matrix_weights_the_columns():
    rng = np.random.default_rng(1)
    source = rng.uniform(-1, 1, (6, 3))
    target = rng.uniform(-1, 1, (4, 3))
    weights = np.array([1.0, 0.25, 0.0])

    cost = transport.cost_matrix(source, target, block_entries=10, column_weights=weights)

    expected = (weights * (target[:, None, :] - source[None, :, :]) ** 2).sum(axis=2)
    np.testing.assert_allclose(cost, expected, atol=1e-12)


def test_cost_matrix_column_weight_count_mismatch():
    with pytest.raises(errors.DimMismatchError):
        transport.cost_matrix(np.zeros((3, 2)), np.zeros((3, 2)), column_weights=[1.0])


def test_cost_matrix_anchor_count_mismatch():
    with pytest.raises(errors.DimMismatchError):
        transport.cost_matrix(np.zeros((3, 2)), np.zeros((3, 4)))


def test_sinkhorn_plan_high_temperature():
    plan = transport.sinkhorn_plan(
        np.array([[0.0, 1.0], [1.0, 0.0]]), transport.SinkhornConfig(eps=100.0, max_steps=1)
    )

    diagonal = 0.5 * np.exp(0.01) / (1.0 + np.exp(0.01))
    np.testing.assert_allclose(np.diag(plan.plan), [diagonal, diagonal], rtol=1e-9)
    np.testing.assert_allclose(plan.plan.sum(), 1.0)
    assert plan.iterations_run == 1
    assert plan.shape == (2, 2)


def test_sinkhorn_rows_are_exact_after_one_step():
    rng = np.random.default_rng(3)
    cost = rng.uniform(0, 2, (6, 9))

    plan = transport.sinkhorn_plan(cost, transport.SinkhornConfig(eps=0.1, max_steps=1))

    np.testing.assert_allclose(plan.plan.sum(axis=1), np.full(6, 1.0 / 6))
    assert np.all(plan.plan >= 0.0)


def test_sinkhorn_converges_to_uniform_marginals():
    rng = np.random.default_rng(4)
    cost = rng.uniform(0, 1, (5, 7))
    config = transport.SinkhornConfig(eps=0.5, max_steps=5000, stop_error=1e-9)

    plan = transport.sinkhorn_plan(cost, config)

    assert plan.marginal_error < 1e-9
    assert plan.iterations_run < 5000
    np.testing.assert_allclose(plan.plan.sum(axis=0), np.full(7, 1.0 / 7), atol=1e-9)


def test_sinkhorn_small_eps_does_not_overflow():
    rng = np.random.default_rng(5)
    cost = rng.uniform(0, 4, (40, 50))

    plan = transport.sinkhorn_plan(cost, transport.SinkhornConfig(eps=1e-4, max_steps=3))

    assert np.all(np.isfinite(plan.plan))
    assert np.all(np.isfinite(plan.log_plan))


def _lp_permutations(cost):
    n = cost.shape[0]
    scores = sorted(
        (sum(cost[i, p[i]] for i in range(n)), p) for p in itertools.permutations(range(n))
    )
    return scores[0], scores[1]


def _separated_instances(count, rng):
    instances = []
    while len(instances) < count:
        n = int(rng.integers(2, 4))
        cost = rng.uniform(0, 1, (n, n))
        (best, permutation), (second, _) = _lp_permutations(cost)
        if second - best >= 0.05:
            instances.append((cost, permutation))
    return instances


@pytest.mark.parametrize(
    "cost, permutation", _separated_instances(50, np.random.default_rng(2024))
)
def test_sinkhorn_matches_assignment_optimum(cost, permutation):
    n = cost.shape[0]
    config = transport.SinkhornConfig(eps=1e-3, max_steps=200000, stop_error=1e-5)

    plan = transport.sinkhorn_plan(cost, config)

    optimum = np.zeros((n, n))
    optimum[np.arange(n), list(permutation)] = 1.0 / n
    assert 0.5 * np.abs(plan.plan - optimum).sum() < 1e-3
    assert plan.marginal_error < 1e-5
    np.testing.assert_array_equal(transport.hard_correspondence(plan), list(permutation))


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_sinkhorn_non_finite_cost(bad):
    with pytest.raises(errors.NonFiniteCostError):
        transport.sinkhorn_plan(np.array([[0.0, bad], [1.0, 0.0]]))


def test_sinkhorn_overflow_is_internal_error():
    with patch("anchor_optimization.transport.logsumexp", return_value=np.full(2, -np.inf)):
        with pytest.raises(errors.NumericalOverflowError) as e:
            transport.sinkhorn_plan(np.array([[0.0, 1.0], [1.0, 0.0]]))

    assert not isinstance(e.value, errors.ClientError)


def test_hard_correspondence_breaks_ties_by_lowest_index():
    plan = np.array([[0.2, 0.2, 0.1], [0.0, 0.1, 0.4]])

    np.testing.assert_array_equal(transport.hard_correspondence(plan), [0, 2])


def test_hard_correspondence_may_repeat_columns():
    plan = np.array([[0.4, 0.1], [0.3, 0.2]])

    np.testing.assert_array_equal(transport.hard_correspondence(plan), [0, 0])
