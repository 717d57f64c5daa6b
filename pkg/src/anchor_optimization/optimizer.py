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
"""This module contains the anchor optimization procedure: initialization of
the candidate anchor matrix from the seed plus noise, the MSE objective and its
gradient through the unit-sphere reparameterization, Adam, the optimization
loop and the final discretization onto real target embeddings.
"""
from __future__ import absolute_import

import collections
import timeit

import numpy as np

from anchor_optimization import core, errors, logging_config, mapping, params, transport

logger = logging_config.get_logger()

ALL_ROWS = "all"


class OptimizerConfig(mapping.MappingMixin):
    """Hyperparameters of one anchor optimization run.

    Args:
        total_anchors (int): Number of anchors to approximate, seed included.
        seed_anchors (int): Number of seed anchors.
        steps (int): Number of optimization steps.
        learning_rate (float): Adam learning rate.
        adam_beta1 (float): Adam first moment decay.
        adam_beta2 (float): Adam second moment decay.
        adam_eps (float): Adam denominator constant.
        rng_seed (int): Seed of every random draw of the run.
        sinkhorn (transport.SinkhornConfig): Correspondence solver settings.
        subsample_per_step (int or str): Rows drawn per side at every step, or "all".
        frozen_seed (bool): Keep the seed rows of the estimate fixed.
        correspondence_warmup (float): Fraction of the steps over which the weight of the
            non-seed anchor columns in the correspondence cost grows linearly from 0 to 1.
    """

    def __init__(
        self,
        total_anchors=params.DEFAULT_TOTAL_ANCHORS,
        seed_anchors=params.DEFAULT_SEED_ANCHORS,
        steps=params.DEFAULT_RETRIEVAL_STEPS,
        learning_rate=params.DEFAULT_RETRIEVAL_LEARNING_RATE,
        adam_beta1=params.DEFAULT_ADAM_BETA1,
        adam_beta2=params.DEFAULT_ADAM_BETA2,
        adam_eps=params.DEFAULT_ADAM_EPS,
        rng_seed=0,
        sinkhorn=None,
        subsample_per_step=params.DEFAULT_SUBSAMPLE,
        frozen_seed=False,
        correspondence_warmup=params.DEFAULT_CORRESPONDENCE_WARMUP,
    ):
        total_anchors = int(total_anchors)
        seed_anchors = int(seed_anchors)
        if total_anchors < 1:
            raise errors.ConfigurationError("total_anchors must be >= 1, got %s" % total_anchors)
        if seed_anchors < 0:
            raise errors.ConfigurationError("seed_anchors must be >= 0, got %s" % seed_anchors)
        if seed_anchors > total_anchors:
            raise errors.SeedExceedsTotalError(seed_anchors, total_anchors)
        if int(steps) < 1:
            raise errors.ConfigurationError("steps must be >= 1, got %s" % steps)
        if not learning_rate > 0:
            raise errors.ConfigurationError(
                "learning_rate must be positive, got %s" % learning_rate
            )
        for name, beta in (("adam_beta1", adam_beta1), ("adam_beta2", adam_beta2)):
            if not 0 <= beta < 1:
                raise errors.ConfigurationError("%s must lie in [0, 1), got %s" % (name, beta))
        if not adam_eps > 0:
            raise errors.ConfigurationError("adam_eps must be positive, got %s" % adam_eps)
        if not 0 <= correspondence_warmup <= 1:
            raise errors.ConfigurationError(
                "correspondence_warmup must lie in [0, 1], got %s" % correspondence_warmup
            )

        self._total_anchors = total_anchors
        self._seed_anchors = seed_anchors
        self._steps = int(steps)
        self._learning_rate = float(learning_rate)
        self._adam_beta1 = float(adam_beta1)
        self._adam_beta2 = float(adam_beta2)
        self._adam_eps = float(adam_eps)
        self._rng_seed = int(rng_seed)
        self._sinkhorn = sinkhorn or transport.SinkhornConfig()
        self._subsample_per_step = _validate_subsample(subsample_per_step)
        self._frozen_seed = bool(frozen_seed)
        self._correspondence_warmup = float(correspondence_warmup)

    @classmethod
    def for_profile(cls, profile=params.RETRIEVAL_PROFILE, **overrides):
        # type: (str, object) -> OptimizerConfig
        """Build a config from the defaults of a task profile.

        Args:
            profile (str): "retrieval" (250 steps, lr 0.02) or "stitching" (125 steps, lr 0.05).
            **overrides: Field values replacing the profile defaults; None values are ignored.

        Returns:
            OptimizerConfig: The config.
        """
        if profile == params.RETRIEVAL_PROFILE:
            values = dict(
                steps=params.DEFAULT_RETRIEVAL_STEPS,
                learning_rate=params.DEFAULT_RETRIEVAL_LEARNING_RATE,
            )
        elif profile == params.STITCHING_PROFILE:
            values = dict(
                steps=params.DEFAULT_STITCHING_STEPS,
                learning_rate=params.DEFAULT_STITCHING_LEARNING_RATE,
            )
        else:
            raise errors.ConfigurationError(
                "Unknown profile %r, expected %r or %r"
                % (profile, params.RETRIEVAL_PROFILE, params.STITCHING_PROFILE)
            )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def total_anchors(self):  # type: () -> int
        return self._total_anchors

    @property
    def seed_anchors(self):  # type: () -> int
        return self._seed_anchors

    @property
    def steps(self):  # type: () -> int
        return self._steps

    @property
    def learning_rate(self):  # type: () -> float
        return self._learning_rate

    @property
    def adam_beta1(self):  # type: () -> float
        return self._adam_beta1

    @property
    def adam_beta2(self):  # type: () -> float
        return self._adam_beta2

    @property
    def adam_eps(self):  # type: () -> float
        return self._adam_eps

    @property
    def rng_seed(self):  # type: () -> int
        return self._rng_seed

    @property
    def sinkhorn(self):  # type: () -> transport.SinkhornConfig
        return self._sinkhorn

    @property
    def subsample_per_step(self):  # type: () -> object
        """int or str: Rows drawn per side at every step, or "all"."""
        return self._subsample_per_step

    @property
    def frozen_seed(self):  # type: () -> bool
        return self._frozen_seed

    @property
    def correspondence_warmup(self):  # type: () -> float
        return self._correspondence_warmup


def _validate_subsample(value):  # type: (object) -> object
    if value is None or value == ALL_ROWS:
        return ALL_ROWS
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise errors.ConfigurationError(
            "subsample_per_step must be a positive integer or %r, got %r" % (ALL_ROWS, value)
        )
    if count < 1:
        raise errors.ConfigurationError("subsample_per_step must be >= 1, got %s" % count)
    return count


class AnchorEstimate(object):
    """The continuous anchor matrix being optimized.

    The estimate stores unconstrained raw parameters v; the anchors it exposes are
    the normalized rows a = v / |v|, so they have unit norm whatever the raw values.

    Args:
        raw (np.ndarray): M x m raw parameters; rows never have a norm below 1e-12.
        seed_count (int): Number of leading rows initialized from seed embeddings.
        frozen_seed (bool): Whether the seed rows receive zero gradient.
    """

    def __init__(self, raw, seed_count, frozen_seed=False):
        raw = np.array(core._as_matrix(raw, "raw anchors"))  # pylint: disable=protected-access
        if not 0 <= seed_count <= raw.shape[0]:
            raise errors.SeedExceedsTotalError(seed_count, raw.shape[0])
        small = np.flatnonzero(core.row_norms(raw) < core.ZERO_NORM)
        if small.size:
            raise errors.ZeroNormRowError(int(small[0]))
        raw.setflags(write=False)
        self._raw = raw
        self._seed_count = int(seed_count)
        self._frozen_seed = bool(frozen_seed)

    @property
    def raw(self):  # type: () -> np.ndarray
        """np.ndarray: Read-only raw parameters."""
        return self._raw

    @property
    def anchors(self):  # type: () -> np.ndarray
        """np.ndarray: M x m exposed anchors, one unit row per raw row."""
        return core.normalize_rows(self._raw)

    @property
    def seed_count(self):  # type: () -> int
        return self._seed_count

    @property
    def frozen_seed(self):  # type: () -> bool
        return self._frozen_seed

    @property
    def total(self):  # type: () -> int
        return self._raw.shape[0]

    @property
    def dim(self):  # type: () -> int
        return self._raw.shape[1]

    def replace(self, raw):  # type: (np.ndarray) -> AnchorEstimate
        """A new estimate with the same seed settings and new raw parameters."""
        return AnchorEstimate(raw, self._seed_count, self._frozen_seed)

    def __repr__(self):
        return "AnchorEstimate(total=%s, dim=%s, seed_count=%s, frozen_seed=%s)" % (
            self.total,
            self.dim,
            self._seed_count,
            self._frozen_seed,
        )


class AdamState(object):
    """First and second moment estimates of Adam, and the number of updates taken."""

    def __init__(self, first_moment, second_moment, step_count=0):
        self.first_moment = first_moment
        self.second_moment = second_moment
        self.step_count = step_count

    @classmethod
    def zeros_like(cls, parameters):  # type: (np.ndarray) -> AdamState
        return cls(np.zeros_like(parameters), np.zeros_like(parameters), 0)


StepRecord = collections.namedtuple(
    "StepRecord", ["step", "mse_loss", "marginal_error", "wall_time"]
)


class OptimizationTrace(object):
    """Per-step records of an optimization run."""

    FIELDS = StepRecord._fields

    def __init__(self, records=None):
        self._records = list(records or [])

    def append(self, record):  # type: (StepRecord) -> None
        self._records.append(record)

    @property
    def records(self):  # type: () -> list
        return list(self._records)

    @property
    def losses(self):  # type: () -> np.ndarray
        return np.array([record.mse_loss for record in self._records])

    @property
    def initial_loss(self):  # type: () -> float
        return self._records[0].mse_loss

    @property
    def final_loss(self):  # type: () -> float
        return self._records[-1].mse_loss

    def without_timing(self):  # type: () -> list
        """The records with wall times dropped, for reproducibility comparisons."""
        return [(r.step, r.mse_loss, r.marginal_error) for r in self._records]

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __eq__(self, other):
        if not isinstance(other, OptimizationTrace):
            return NotImplemented
        return self._records == other.records

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None


def init_anchor_estimate(seed_embeddings, total, rng_seed, frozen_seed=False):
    # type: (np.ndarray, int, int, bool) -> AnchorEstimate
    """Initialize the anchor matrix: the seed rows first, then standard normal noise.

    Args:
        seed_embeddings (np.ndarray): L x m unit rows, the target side of the seed.
        total (int): Total number of anchors M.
        rng_seed (int): Seed of the noise.
        frozen_seed (bool): Whether the seed rows are kept fixed during optimization.

    Returns:
        AnchorEstimate: M x m estimate whose first L raw rows equal the seed.

    Raises:
        SeedExceedsTotalError: If L > M.
    """
    seed = core._as_matrix(seed_embeddings, "seed embeddings")  # pylint: disable=protected-access
    count, dim = seed.shape
    if count > total:
        raise errors.SeedExceedsTotalError(count, total)
    if dim < 1:
        raise errors.DimMismatchError(1, dim, what="embedding dimension")

    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal((total - count, dim))
    raw = np.concatenate([seed, noise], axis=0)
    return AnchorEstimate(raw, count, frozen_seed)


def loss_and_gradient(rel_x_permuted, targets_y, estimate):
    # type: (np.ndarray, np.ndarray, AnchorEstimate) -> tuple
    """Mean squared error between the permuted source relative rows and the target
    relative rows, and its gradient with respect to the raw parameters.

    With A the exposed anchors and E = targets_y . A^T - rel_x_permuted, the loss is
    mean(E^2) over P x M entries. The gradient with respect to an exposed row is
    g_i = 2 / (P M) (E^T targets_y)_i and it chains through a = v / |v| as
    (I - a a^T) g_i / |v_i|.

    Args:
        rel_x_permuted (np.ndarray): P x M source relative rows, already reordered so that
            row i corresponds to target row i.
        targets_y (np.ndarray): P x m unit target embeddings.
        estimate (AnchorEstimate): The current estimate.

    Returns:
        tuple(float, np.ndarray): The loss and the M x m raw gradient; seed rows are zero
            when the estimate freezes them.

    Raises:
        DimMismatchError: On inconsistent shapes.
        NonFiniteLossError: If the loss is NaN or infinite.
    """
    rel = core._vectors_of(rel_x_permuted)  # pylint: disable=protected-access
    targets = core._as_matrix(targets_y, "targets")  # pylint: disable=protected-access
    if rel.shape[0] != targets.shape[0]:
        raise errors.DimMismatchError(rel.shape[0], targets.shape[0], what="sample count")
    if rel.shape[1] != estimate.total:
        raise errors.DimMismatchError(estimate.total, rel.shape[1], what="anchor count")
    if targets.shape[1] != estimate.dim:
        raise errors.DimMismatchError(estimate.dim, targets.shape[1])

    anchors = estimate.anchors
    residual = np.dot(targets, anchors.T) - rel
    mse = float(np.mean(residual * residual))
    if not np.isfinite(mse):
        raise errors.NonFiniteLossError("The alignment loss evaluated to %s" % mse)

    grad_anchors = (2.0 / residual.size) * np.dot(residual.T, targets)
    radial = np.einsum("ij,ij->i", grad_anchors, anchors)
    grad_raw = (grad_anchors - anchors * radial[:, None]) / core.row_norms(estimate.raw)[:, None]
    if estimate.frozen_seed:
        grad_raw[: estimate.seed_count] = 0.0
    return mse, grad_raw


def adam_update(
    parameters,
    grad,
    state,
    learning_rate,
    beta1=params.DEFAULT_ADAM_BETA1,
    beta2=params.DEFAULT_ADAM_BETA2,
    eps=params.DEFAULT_ADAM_EPS,
):
    # type: (np.ndarray, np.ndarray, AdamState, float, float, float, float) -> tuple
    """One Adam update with bias correction. Inputs are left untouched.

    Returns:
        tuple(np.ndarray, AdamState): The updated parameters and state.

    Raises:
        DimMismatchError: If grad and parameters have different shapes.
        NonFiniteGradientError: If grad has NaN or infinite entries.
    """
    parameters = np.asarray(parameters, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != parameters.shape:
        raise errors.DimMismatchError(parameters.shape, grad.shape, what="gradient shape")
    if not np.all(np.isfinite(grad)):
        raise errors.NonFiniteGradientError("The gradient has NaN or infinite entries")

    step_count = state.step_count + 1
    first = beta1 * state.first_moment + (1.0 - beta1) * grad
    second = beta2 * state.second_moment + (1.0 - beta2) * (grad * grad)

    corrected_first = first / (1.0 - beta1 ** step_count)
    corrected_second = second / (1.0 - beta2 ** step_count)
    updated = parameters - learning_rate * corrected_first / (np.sqrt(corrected_second) + eps)
    return updated, AdamState(first, second, step_count)


def adam_step(
    estimate,
    grad_raw,
    state,
    learning_rate,
    beta1=params.DEFAULT_ADAM_BETA1,
    beta2=params.DEFAULT_ADAM_BETA2,
    eps=params.DEFAULT_ADAM_EPS,
    rng=None,
):
    # type: (AnchorEstimate, np.ndarray, AdamState, float, float, float, float, object) -> tuple
    """Apply one Adam update to the raw parameters of an estimate.

    Raw rows that collapse below a norm of 1e-12 are re-initialized with fresh
    standard normal noise and their moments reset.

    Args:
        estimate (AnchorEstimate): The current estimate.
        grad_raw (np.ndarray): Gradient with respect to the raw parameters.
        state (AdamState): Adam moments.
        learning_rate (float): Step size.
        rng (np.random.Generator): Source of the re-initialization noise.

    Returns:
        tuple(AnchorEstimate, AdamState): The new estimate and state.
    """
    raw, new_state = adam_update(
        estimate.raw, grad_raw, state, learning_rate, beta1=beta1, beta2=beta2, eps=eps
    )
    collapsed = np.flatnonzero(core.row_norms(raw) < core.ZERO_NORM)
    if collapsed.size:
        rng = rng if rng is not None else np.random.default_rng(new_state.step_count)
        logger.warning(
            "Re-initializing %s collapsed anchor rows at step %s: %s",
            collapsed.size,
            new_state.step_count,
            collapsed.tolist(),
        )
        raw[collapsed] = rng.standard_normal((collapsed.size, raw.shape[1]))
        new_state.first_moment[collapsed] = 0.0
        new_state.second_moment[collapsed] = 0.0
    return estimate.replace(raw), new_state


def order_anchors(anchors_x, seed_x):  # type: (core.AnchorSet, core.AnchorSet) -> core.AnchorSet
    """Reorder a source anchor set so that the seed anchors come first, in seed order.

    Raises:
        ConfigurationError: If anchors_x does not contain every seed anchor.
    """
    seed_indices = [int(i) for i in seed_x.indices]
    seed_lookup = set(seed_indices)
    extras = [int(i) for i in anchors_x.indices if int(i) not in seed_lookup]
    if len(seed_indices) + len(extras) != len(anchors_x):
        raise errors.ConfigurationError(
            "The source anchors must contain every source seed anchor exactly once"
        )
    return core.AnchorSet(anchors_x.space, seed_indices + extras)


def correspondence_weights(seed_count, total, step, warmup_steps):
    # type: (int, int, int, int) -> np.ndarray
    """Weights of the anchor columns in the correspondence cost at a given step.

    The first seed_count columns always weigh 1. The others grow linearly from 0 at
    step 0 to 1 at step warmup_steps and stay at 1 afterwards.
    """
    weights = np.ones(total)
    if warmup_steps > 0:
        weights[seed_count:] = min(1.0, float(step) / warmup_steps)
    return weights


def _sample_rows(count, subsample, rng):  # type: (int, object, np.random.Generator) -> np.ndarray
    if subsample == ALL_ROWS or subsample >= count:
        return np.arange(count)
    return np.sort(rng.choice(count, size=subsample, replace=False))


def optimize_anchors(
    space_x,
    anchors_x,
    space_y,
    seed,
    config=None,
    callback=None,
    block_entries=params.DEFAULT_BLOCK_ENTRIES,
):
    # type: (object, object, object, object, OptimizerConfig, object, int) -> tuple
    """Optimize the target anchors so that target relative representations match
    the source ones under the correspondence re-estimated at every step.

    Every step draws a subsample of both spaces, projects the source rows on anchors_x
    and the target rows on the current estimate, estimates the correspondence with
    Sinkhorn, permutes the source rows accordingly and takes an Adam step on the MSE.
    The correspondence cost weighs the anchor columns with correspondence_weights: it
    starts from the seed columns alone and takes in the estimated columns over the
    first config.correspondence_warmup fraction of the steps.

    Args:
        space_x (core.EmbeddingSpace): Source space.
        anchors_x (core.AnchorSet): config.total_anchors source anchors, seed included.
        space_y (core.EmbeddingSpace): Target space.
        seed (core.ParallelSeed): Known parallel anchors.
        config (OptimizerConfig): Hyperparameters.
        callback (callable): Called as callback(record, estimate) after every step.
        block_entries (int): Budget of a dense cost block.

    Returns:
        tuple(AnchorEstimate, OptimizationTrace): The final estimate, whose rows follow
            order_anchors(anchors_x, seed.x), and one record per step.

    Raises:
        EmptySeedError: If the seed is empty.
    """
    config = config or OptimizerConfig()
    if len(seed) == 0:
        raise errors.EmptySeedError("Anchor optimization needs at least one seed pair")
    if len(anchors_x) != config.total_anchors:
        raise errors.AnchorCountMismatchError(len(anchors_x), config.total_anchors)
    if seed.y.vectors.shape[1] != space_y.dim:
        raise errors.DimMismatchError(space_y.dim, seed.y.vectors.shape[1])

    ordered_x = order_anchors(anchors_x, seed.x)
    rel_x = core.relative_projection(space_x, ordered_x).values

    estimate = init_anchor_estimate(
        seed.y.vectors, config.total_anchors, config.rng_seed, frozen_seed=config.frozen_seed
    )
    state = AdamState.zeros_like(estimate.raw)
    sample_rng = np.random.default_rng([config.rng_seed, 1])
    reseed_rng = np.random.default_rng([config.rng_seed, 2])
    warmup_steps = int(round(config.correspondence_warmup * config.steps))
    trace = OptimizationTrace()

    logger.info(
        "Optimizing %s anchors (%s seed) for %s steps, %s -> %s",
        config.total_anchors,
        len(seed),
        config.steps,
        space_x.name,
        space_y.name,
    )

    for step in range(config.steps):
        started = timeit.default_timer()

        rows_x = _sample_rows(len(space_x), config.subsample_per_step, sample_rng)
        rows_y = _sample_rows(len(space_y), config.subsample_per_step, sample_rng)
        sample_rel_x = rel_x[rows_x]
        targets = space_y.vectors[rows_y]
        rel_y = np.dot(targets, estimate.anchors.T)

        weights = correspondence_weights(
            estimate.seed_count, config.total_anchors, step, warmup_steps
        )
        cost = transport.cost_matrix(
            sample_rel_x, rel_y, block_entries=block_entries, column_weights=weights
        )
        plan = transport.sinkhorn_plan(cost, config.sinkhorn)
        correspondence = transport.hard_correspondence(plan)

        loss, grad = loss_and_gradient(sample_rel_x[correspondence], targets, estimate)
        estimate, state = adam_step(
            estimate,
            grad,
            state,
            config.learning_rate,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            eps=config.adam_eps,
            rng=reseed_rng,
        )

        record = StepRecord(step, loss, plan.marginal_error, timeit.default_timer() - started)
        trace.append(record)
        if callback is not None:
            callback(record, estimate)

        logger.debug("step %s: mse %.6e, marginal error %.3e", step, loss, plan.marginal_error)
        if (step + 1) % params.LOG_EVERY_STEPS == 0 or step + 1 == config.steps:
            logger.info(
                "step %s/%s: mse %.6e, marginal error %.3e",
                step + 1,
                config.steps,
                loss,
                plan.marginal_error,
            )

    return estimate, trace


class CollisionReport(object):
    """Duplicated target rows produced by discretization.

    Attributes:
        collisions (int): Number of anchors minus number of distinct target rows.
        duplicates (list[int]): Target rows chosen more than once, ascending.
    """

    def __init__(self, collisions, duplicates):
        self.collisions = collisions
        self.duplicates = duplicates

    def __repr__(self):
        return "CollisionReport(collisions=%s, duplicates=%s)" % (self.collisions, self.duplicates)


def discretize_anchors(
    estimate, space_y, block_entries=params.DEFAULT_BLOCK_ENTRIES, num_threads=1
):
    # type: (AnchorEstimate, core.EmbeddingSpace, int, int) -> tuple
    """Snap every exposed anchor to its cosine-nearest row of the target space.

    Returns:
        tuple(core.AnchorSet, CollisionReport): Target anchors in estimate order, and the
            duplicated rows.

    Raises:
        DimMismatchError: If the estimate and space dimensions differ.
    """
    if estimate.dim != space_y.dim:
        raise errors.DimMismatchError(space_y.dim, estimate.dim)

    nearest, _ = core.topk_neighbors(
        estimate.anchors,
        space_y.vectors,
        1,
        block_entries=block_entries,
        num_threads=num_threads,
    )
    indices = nearest[:, 0]
    values, counts = np.unique(indices, return_counts=True)
    report = CollisionReport(
        int(indices.shape[0] - values.shape[0]), [int(v) for v in values[counts > 1]]
    )
    if report.collisions:
        logger.warning(
            "Discretization mapped %s anchors onto already chosen rows of %s",
            report.collisions,
            space_y.name,
        )
    return core.AnchorSet(space_y, indices), report
