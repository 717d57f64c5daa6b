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
"""This module contains the entropic optimal transport used to estimate the
correspondence between two relative spaces: the ground cost, a log-domain
Sinkhorn solver with uniform marginals and the hard correspondence read off
the transport plan.
"""
from __future__ import absolute_import

import numpy as np
from scipy.special import logsumexp

from anchor_optimization import core, errors, logging_config, mapping, params

logger = logging_config.get_logger()


class SinkhornConfig(mapping.MappingMixin):
    """Hyperparameters of the Sinkhorn solver.

    Args:
        eps (float): Entropic regularization strength.
        max_steps (int): Maximum number of iterations; every iteration updates the
            column potential and then the row potential.
        stop_error (float): Stop as soon as the marginal error drops below this value.
    """

    def __init__(
        self,
        eps=params.DEFAULT_SINKHORN_EPS,
        max_steps=params.DEFAULT_SINKHORN_STEPS,
        stop_error=params.DEFAULT_SINKHORN_STOP_ERROR,
    ):
        if not eps > 0:
            raise errors.ConfigurationError("Sinkhorn eps must be positive, got %s" % eps)
        if int(max_steps) < 1:
            raise errors.ConfigurationError("Sinkhorn max_steps must be >= 1, got %s" % max_steps)
        if not stop_error > 0:
            raise errors.ConfigurationError(
                "Sinkhorn stop_error must be positive, got %s" % stop_error
            )
        self._eps = float(eps)
        self._max_steps = int(max_steps)
        self._stop_error = float(stop_error)

    @property
    def eps(self):  # type: () -> float
        """float: Entropic regularization strength."""
        return self._eps

    @property
    def max_steps(self):  # type: () -> int
        """int: Maximum number of iterations."""
        return self._max_steps

    @property
    def stop_error(self):  # type: () -> float
        """float: Marginal error below which iterations stop."""
        return self._stop_error


class TransportPlan(object):
    """A nonnegative P x Nx coupling between target rows (y) and source columns (x).

    Attributes:
        plan (np.ndarray): The coupling; rows sum to 1/P, columns approximately to 1/Nx.
        log_plan (np.ndarray): Elementwise log of the coupling (finite where plan
            underflows).
        eps (float): Regularization strength that produced the plan.
        iterations_run (int): Number of Sinkhorn iterations performed.
        marginal_error (float): Max deviation of row and column sums from uniform.
    """

    def __init__(self, plan, log_plan, eps, iterations_run, marginal_error):
        self.plan = plan
        self.log_plan = log_plan
        self.eps = eps
        self.iterations_run = iterations_run
        self.marginal_error = marginal_error

    @property
    def shape(self):  # type: () -> tuple
        return self.plan.shape


def cost_matrix(
    rel_source, rel_target, block_entries=params.DEFAULT_BLOCK_ENTRIES, column_weights=None
):
    # type: (object, object, int, np.ndarray) -> np.ndarray
    """Squared Euclidean distances between target and source relative rows.

    Args:
        rel_source: Nx x M relative representation of the source samples.
        rel_target: P x M relative representation of the target samples.
        block_entries (int): When P * Nx exceeds this budget the matrix is filled in
            row blocks.
        column_weights (np.ndarray): Optional non-negative weight per anchor column. The
            distance becomes sum_m w_m * (target_im - source_jm)^2.

    Returns:
        np.ndarray: P x Nx matrix, cost[i][j] = |target_i - source_j|^2 (weighted), all >= 0.

    Raises:
        DimMismatchError: If the anchor counts or the column weight count differ.
    """
    source = core._vectors_of(rel_source)  # pylint: disable=protected-access
    target = core._vectors_of(rel_target)  # pylint: disable=protected-access
    if source.shape[1] != target.shape[1]:
        raise errors.DimMismatchError(target.shape[1], source.shape[1], what="anchor count")
    if column_weights is not None:
        scale = np.sqrt(np.asarray(column_weights, dtype=np.float64))
        if scale.shape != (source.shape[1],):
            raise errors.DimMismatchError(source.shape[1], scale.size, what="column weight count")
        source = source * scale
        target = target * scale

    source_sq = np.einsum("ij,ij->i", source, source)
    target_sq = np.einsum("ij,ij->i", target, target)
    n_target, n_source = target.shape[0], source.shape[0]

    cost = np.empty((n_target, n_source), dtype=np.float64)
    rows_per_block = n_target
    if n_target * n_source > block_entries:
        rows_per_block = max(1, int(block_entries) // max(n_source, 1))

    for start in range(0, n_target, rows_per_block):
        stop = min(start + rows_per_block, n_target)
        block = cost[start:stop]
        np.dot(target[start:stop], source.T, out=block)
        block *= -2.0
        block += target_sq[start:stop, None]
        block += source_sq[None, :]
        np.maximum(block, 0.0, out=block)

    return cost


def sinkhorn_plan(cost, config=None):  # type: (np.ndarray, SinkhornConfig) -> TransportPlan
    """Entropic optimal transport between uniform marginals, in the log domain.

    Iterations alternate a column-potential update and a row-potential update (both
    via logsumexp), so every returned plan ends with a row update and its row sums are
    exactly 1/P. Iterations stop after config.max_steps or as soon as the marginal
    error drops below config.stop_error.

    Args:
        cost (np.ndarray): Finite P x Nx cost matrix.
        config (SinkhornConfig): Solver hyperparameters.

    Returns:
        TransportPlan: The plan.

    Raises:
        NonFiniteCostError: If cost has NaN or infinite entries.
        NumericalOverflowError: If the plan is not finite (internal error).
    """
    config = config or SinkhornConfig()
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] < 1 or cost.shape[1] < 1:
        raise errors.DimMismatchError(2, cost.ndim, what="cost matrix rank")
    if not np.all(np.isfinite(cost)):
        raise errors.NonFiniteCostError("The transport cost has NaN or infinite entries")

    n_rows, n_cols = cost.shape
    log_a = -np.log(n_rows)
    log_b = -np.log(n_cols)
    scaled = -cost / config.eps

    f = np.zeros(n_rows)
    g = np.zeros(n_cols)
    log_plan = scaled
    marginal_error = np.inf
    iterations = 0

    for iterations in range(1, config.max_steps + 1):
        g = log_b - logsumexp(scaled + f[:, None], axis=0)
        f = log_a - logsumexp(scaled + g[None, :], axis=1)

        log_plan = scaled + f[:, None] + g[None, :]
        plan = np.exp(log_plan)
        marginal_error = max(
            np.max(np.abs(plan.sum(axis=1) - 1.0 / n_rows)),
            np.max(np.abs(plan.sum(axis=0) - 1.0 / n_cols)),
        )
        if marginal_error < config.stop_error:
            break

    plan = np.exp(log_plan)
    if not np.all(np.isfinite(plan)):
        raise errors.NumericalOverflowError(
            "Sinkhorn produced a non-finite plan (eps=%s)" % config.eps
        )

    logger.debug(
        "Sinkhorn finished after %s iterations, marginal error %.3e", iterations, marginal_error
    )
    return TransportPlan(plan, log_plan, config.eps, iterations, float(marginal_error))


def hard_correspondence(plan):  # type: (TransportPlan) -> np.ndarray
    """Map every target row to the source column holding most of its mass.

    Args:
        plan (TransportPlan or np.ndarray): A transport plan.

    Returns:
        np.ndarray: Pi, an int array of length P; Pi[i] = argmax_j plan[i][j], ties
            broken by ascending j. Pi need not be injective.
    """
    if isinstance(plan, TransportPlan):
        scores = plan.log_plan if plan.log_plan is not None else plan.plan
    else:
        scores = np.asarray(plan, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] < 1:
        raise errors.DimMismatchError(2, scores.ndim, what="transport plan rank")
    return np.argmax(scores, axis=1)
