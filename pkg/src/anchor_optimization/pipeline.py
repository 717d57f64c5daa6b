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
"""This module contains the commands of the command line interface and the run
function that executes one of them, mapping errors to exit codes.
"""
from __future__ import absolute_import

import os
import sys
import traceback

import numpy as np

from anchor_optimization import (
    artifacts,
    content_types,
    core,
    encoders,
    environment,
    errors,
    evaluation,
    files,
    logging_config,
    mapping,
    optimizer,
    params,
    sampling,
    stitching,
    synth,
    transport,
)

logger = logging_config.get_logger()

SUCCESS_CODE = 0
DEFAULT_FAILURE_CODE = 1

SEED_PAIRS_FILE = "seed_pairs.txt"
CANDIDATES_FILE = "candidates.txt"
GROUND_TRUTH_FILE = "ground_truth.json"

_SINKHORN_FLAGS = {
    "sinkhorn_eps": "eps",
    "sinkhorn_max_steps": "max_steps",
    "sinkhorn_stop_error": "stop_error",
}


def _load_space(path, labeled=False, name=None):  # type: (str, bool, str) -> core.EmbeddingSpace
    if labeled:
        return files.load_labeled_embeddings(path, name=name)[0]
    return files.load_word_embeddings(path, name=name)


def build_config(profile=params.RETRIEVAL_PROFILE, **flags):  # type: (str, object) -> object
    """Build an optimizer config from a profile and flag values; None values are ignored.

    Flags named sinkhorn_eps, sinkhorn_max_steps and sinkhorn_stop_error configure the
    correspondence solver; every other flag is an OptimizerConfig field.
    """
    sinkhorn = {}
    for flag, field in _SINKHORN_FLAGS.items():
        value = flags.pop(flag, None)
        if value is not None:
            sinkhorn[field] = value
    return optimizer.OptimizerConfig.for_profile(
        profile, sinkhorn=transport.SinkhornConfig(**sinkhorn), **flags
    )


def cmd_synth(
    out,
    n_samples,
    dim_x,
    dim_y=None,
    noise_sigma=0.0,
    rng_seed=0,
    n_classes=None,
    n_anchors=params.DEFAULT_TOTAL_ANCHORS,
    n_seed=params.DEFAULT_SEED_ANCHORS,
    fmt=content_types.TEXT,
):
    # type: (str, int, int, int, float, int, int, int, int, str) -> dict
    """Write a synthetic pair of spaces and their ground-truth anchors.

    The target space is written shuffled. Files: x and y embeddings (labeled when
    n_classes is set), seed_pairs.txt, candidates.txt (source-side extra anchors) and
    ground_truth.json.

    Returns:
        dict: Paths of the written files.
    """
    spec = synth.SynthSpec(
        n_samples, dim_x, dim_y=dim_y, noise_sigma=noise_sigma, rng_seed=rng_seed,
        n_classes=n_classes,
    )
    benchmark = synth.make_benchmark(spec)
    files.makedirs(out)

    extension = content_types.BINARY_EXTENSION if fmt == content_types.BINARY else ".txt"
    paths = {
        "x": os.path.join(out, "x" + extension),
        "y": os.path.join(out, "y" + extension),
        "seed_pairs": os.path.join(out, SEED_PAIRS_FILE),
        "candidates": os.path.join(out, CANDIDATES_FILE),
        "ground_truth": os.path.join(out, GROUND_TRUTH_FILE),
    }
    for side, space in (("x", benchmark.space_x), ("y", benchmark.space_y)):
        files.save_word_embeddings(paths[side], space, fmt=fmt, labels=benchmark.labels_of(space))

    seed, candidates = sampling.select_seed_and_candidates(
        benchmark.space_x,
        benchmark.space_y,
        list(benchmark.space_x.keys),
        n_seed=n_seed,
        n_total=n_anchors,
        rng_seed=rng_seed,
    )
    files.write_seed_pairs(paths["seed_pairs"], zip(seed.x.keys, seed.y.keys))
    files.write_keys(paths["candidates"], candidates.keys)
    files.write_json(
        paths["ground_truth"],
        {
            "spec": dict(spec),
            "seed_keys": list(seed.x.keys),
            "candidate_keys": list(candidates.keys),
            "anchor_keys": list(seed.x.keys) + list(candidates.keys),
        },
    )
    logger.info("Wrote synthetic benchmark to %s", out)
    return paths


def _select_anchors(space_x, space_y, config, seed_pairs, candidates, vocabulary):
    """Seed, candidates and evaluation vocabulary of an optimization run."""
    rng_seed = config.rng_seed
    extras = config.total_anchors - config.seed_anchors

    if seed_pairs:
        pairs = files.read_seed_pairs(seed_pairs)
        if len(pairs) < config.seed_anchors:
            raise errors.NotEnoughKeysError(config.seed_anchors, len(pairs))
        seed = sampling.seed_from_pairs(space_x, space_y, pairs[: config.seed_anchors])
        if sampling.shared_keys(space_x, space_y):
            keys = sampling.intersect_and_subsample(space_x, space_y, vocabulary, rng_seed)[0]
        else:
            logger.warning(
                "%s and %s share no key: no evaluation vocabulary", space_x.name, space_y.name
            )
            keys = []
        drawn = None
    else:
        keys, space_x, space_y = sampling.intersect_and_subsample(
            space_x, space_y, vocabulary, rng_seed
        )
        space_y = sampling.shuffle_space(space_y, rng_seed)
        seed, drawn = sampling.select_seed_and_candidates(
            space_x, space_y, keys, config.seed_anchors, config.total_anchors, rng_seed
        )

    if candidates:
        seed_keys = set(seed.x.keys)
        listed = [key for key in files.read_keys(candidates) if key not in seed_keys]
        if len(listed) < extras:
            raise errors.NotEnoughKeysError(extras, len(listed))
        drawn = core.AnchorSet.from_keys(space_x, listed[:extras])
    elif drawn is None:
        pool = keys if len(keys) - len(seed) >= extras else None
        drawn = sampling.draw_candidates(space_x, seed.x.keys, extras, rng_seed, pool=pool)

    return space_x, space_y, seed, drawn, keys


def cmd_optimize(
    src,
    tgt,
    out,
    seed_pairs=None,
    candidates=None,
    profile=params.RETRIEVAL_PROFILE,
    vocabulary=params.DEFAULT_VOCABULARY_SIZE,
    labeled=False,
    env=None,
    **flags
):
    # type: (str, str, str, str, str, str, int, bool, environment.Environment, object) -> object
    """Discover target anchors and save the run artifact.

    Without seed_pairs, both spaces are restricted to a sample of their shared
    vocabulary and the seed and candidates are drawn from it. With seed_pairs, the
    spaces are used whole and candidates come from the candidates key list or are
    drawn from the shared vocabulary (from the whole source space when too small).

    Args:
        src (str): Source embedding file.
        tgt (str): Target embedding file.
        out (str): Run directory.
        seed_pairs (str): Seed-pair file.
        candidates (str): Key list of source-side extra anchors.
        profile (str): "retrieval" or "stitching" defaults.
        vocabulary (int): Size of the shared vocabulary sample.
        labeled (bool): Whether the embedding files carry a label column.
        env (environment.Environment): Thread and block settings.
        **flags: OptimizerConfig fields and sinkhorn_* solver settings.

    Returns:
        artifacts.RunArtifact: The saved run.
    """
    env = env or environment.Environment()
    config = build_config(profile, **flags)
    space_x = _load_space(src, labeled)
    space_y = _load_space(tgt, labeled)

    space_x, space_y, seed, drawn, keys = _select_anchors(
        space_x, space_y, config, seed_pairs, candidates, vocabulary
    )
    anchors_x = core.AnchorSet(space_x, list(seed.x.indices) + list(drawn.indices))

    estimate, trace = optimizer.optimize_anchors(
        space_x, anchors_x, space_y, seed, config, block_entries=env.block_entries
    )
    ordered_x = optimizer.order_anchors(anchors_x, seed.x)
    discovered, collisions = optimizer.discretize_anchors(
        estimate, space_y, block_entries=env.block_entries, num_threads=env.num_threads
    )

    gt_keys_y = list(seed.y.keys) + list(drawn.keys)
    if all(key in space_y for key in drawn.keys):
        anchor_precision = float(
            np.mean([found == truth for found, truth in zip(discovered.keys, gt_keys_y)])
        )
        logger.info("Anchor precision: %.4f", anchor_precision)
    else:
        gt_keys_y, anchor_precision = None, None

    inputs = dict(
        src=src,
        tgt=tgt,
        seed_pairs=seed_pairs,
        candidates=candidates,
        vocabulary=vocabulary,
        labeled=labeled,
    )
    inputs.update(dict(config))
    artifact = artifacts.RunArtifact(
        estimate.raw,
        trace,
        config=mapping.as_dict(config),
        cmd_args=mapping.to_cmd_args(inputs),
        source=dict(path=os.path.abspath(src), name=space_x.name, labeled=labeled),
        target=dict(path=os.path.abspath(tgt), name=space_y.name, labeled=labeled),
        rng_seed=config.rng_seed,
        vocabulary=list(keys),
        anchor_keys_x=list(ordered_x.keys),
        anchor_keys_y=list(discovered.keys),
        anchor_indices_x=[int(i) for i in ordered_x.indices],
        anchor_indices_y=[int(i) for i in discovered.indices],
        seed_keys_y=list(seed.y.keys),
        gt_keys_y=gt_keys_y,
        collisions=collisions.collisions,
        anchor_precision=anchor_precision,
    )
    artifacts.save_run(out, artifact)
    return artifact


class _SpaceCache(object):
    """Spaces loaded once per path and label setting."""

    def __init__(self):
        self._spaces = {}

    def get(self, description):  # type: (dict) -> core.EmbeddingSpace
        key = (description["path"], bool(description.get("labeled")), description.get("name"))
        if key not in self._spaces:
            self._spaces[key] = _load_space(key[0], key[1], name=key[2])
        return self._spaces[key]


def _write_pca(path, name, space_x, space_y, keys, anchors_x, anchors_y):
    rows = []
    for side, space, anchors in (("src", space_x, anchors_x), ("tgt", space_y, anchors_y)):
        rel = core.relative_projection(space.vectors[space.indices_of(keys)], anchors)
        coords = evaluation.pca_project(rel)
        rows.extend(
            dict(key=key, side=side, pc1=float(c[0]), pc2=float(c[1]))
            for key, c in zip(keys, coords)
        )
    files.makedirs(path)
    files.write_file(
        os.path.join(path, name + ".csv"),
        encoders.records_to_csv(["key", "side", "pc1", "pc2"], rows),
    )


def _table_order(reports):  # type: (list) -> list
    directions = []
    for report in reports:
        if report.direction not in directions:
            directions.append(report.direction)

    def rank(report):
        method = params.METHODS.index(report.method) if report.method in params.METHODS else 99
        return directions.index(report.direction), method

    return sorted(reports, key=rank)


def cmd_eval_retrieval(
    runs=None,
    k=params.DEFAULT_TOP_K,
    seeds=None,
    out=None,
    pca_out=None,
    src=None,
    tgt=None,
    anchors_src=None,
    anchors_tgt=None,
    method=params.AO_METHOD,
    vocabulary=params.DEFAULT_VOCABULARY_SIZE,
    labeled=False,
    env=None,
):
    # type: (list, int, list, str, str, str, str, str, str, str, int, bool, object) -> list
    """Evaluate retrieval for the GT, Seed and AO anchors of runs, or for explicit anchors.

    With runs, reports are written to every run directory and aggregated across runs
    (only runs whose rng seed is in seeds, when given). Otherwise src, tgt, anchors_src
    and anchors_tgt name the spaces and two key lists, and method labels the result.

    Returns:
        list[evaluation.RetrievalReport]: Aggregated reports, by direction then GT, Seed and AO.
    """
    env = env or environment.Environment()
    options = dict(k=k, num_threads=env.num_threads, block_entries=env.block_entries)
    single = []

    if runs:
        cache = _SpaceCache()
        for run in runs:
            artifact = artifacts.load_run(run)
            if seeds is not None and artifact.rng_seed not in seeds:
                logger.info("Skipping %s (rng seed %s)", run, artifact.rng_seed)
                continue
            if not artifact.vocabulary:
                raise errors.EmptyIntersectionError("Run %s has no evaluation vocabulary" % run)
            space_x = cache.get(artifact.source)
            space_y = cache.get(artifact.target)

            reports = []
            for name, (anchors_x, anchors_y) in evaluation.baseline_anchor_sets(
                artifact, space_x, space_y
            ).items():
                reports.append(
                    evaluation.retrieval_eval(
                        space_x, space_y, anchors_x, anchors_y, artifact.vocabulary,
                        method=name, **options
                    )
                )
                if pca_out:
                    _write_pca(
                        pca_out,
                        "%s-%s" % (os.path.basename(os.path.normpath(run)), name),
                        space_x,
                        space_y,
                        artifact.vocabulary,
                        anchors_x,
                        anchors_y,
                    )
            artifacts.save_reports(run, reports)
            single.extend(reports)
        if not single:
            raise errors.ConfigurationError("No run matches rng seeds %s" % (seeds,))
    else:
        if not (src and tgt and anchors_src and anchors_tgt):
            raise errors.ConfigurationError(
                "Give --run directories, or --src, --tgt, --anchors-src and --anchors-tgt"
            )
        space_x = _load_space(src, labeled)
        space_y = _load_space(tgt, labeled)
        keys = sampling.intersect_and_subsample(
            space_x, space_y, vocabulary, (seeds or [0])[0]
        )[0]
        anchors_x = core.AnchorSet.from_keys(space_x, files.read_keys(anchors_src))
        anchors_y = core.AnchorSet.from_keys(space_y, files.read_keys(anchors_tgt))
        single.append(
            evaluation.retrieval_eval(
                space_x, space_y, anchors_x, anchors_y, keys, method=method, **options
            )
        )

    reports = _table_order(evaluation.aggregate_reports(single))
    if out:
        files.write_file(out, evaluation.reports_to_csv(reports))
    return reports


def cmd_eval_stitch(
    train_space,
    test_space,
    out=None,
    run=None,
    train_anchors=None,
    test_anchors=None,
    method=params.AO_METHOD,
    epochs=params.DEFAULT_CLASSIFIER_EPOCHS,
    learning_rate=params.DEFAULT_CLASSIFIER_LEARNING_RATE,
    seeds=params.DEFAULT_RNG_SEEDS,
):
    # type: (str, str, str, str, str, str, str, int, float, list) -> list
    """Train a classifier on the labeled train space, evaluate it on the test space.

    Anchors come from the GT, Seed and AO baselines of a run, or from two key lists
    labeled by method.

    Returns:
        list[stitching.StitchReport]: One report per anchor method.
    """
    space_train, labels_train = files.load_labeled_embeddings(train_space)
    space_test, labels_test = files.load_labeled_embeddings(test_space)

    if run:
        baselines = evaluation.baseline_anchor_sets(
            artifacts.load_run(run), space_train, space_test
        )
    elif train_anchors and test_anchors:
        baselines = {
            method: (
                core.AnchorSet.from_keys(space_train, files.read_keys(train_anchors)),
                core.AnchorSet.from_keys(space_test, files.read_keys(test_anchors)),
            )
        }
    else:
        raise errors.ConfigurationError(
            "Give a --run directory, or --train-anchors and --test-anchors"
        )

    reports = [
        stitching.stitch_eval(
            space_train,
            labels_train,
            anchors_train,
            space_test,
            labels_test,
            anchors_test,
            method=name,
            epochs=epochs,
            learning_rate=learning_rate,
            rng_seeds=seeds,
        )
        for name, (anchors_train, anchors_test) in baselines.items()
    ]
    if out:
        files.write_file(out, stitching.reports_to_csv(reports))
    return reports


def cmd_report(runs, out=None):  # type: (list, str) -> list
    """Aggregate the retrieval reports of evaluated runs by direction and method.

    Raises:
        CorruptArtifactError: If a run has not been evaluated.
    """
    single = []
    for run in runs:
        artifact = artifacts.load_run(run)
        if not artifact.reports:
            raise errors.CorruptArtifactError(
                "Run %s has no %s; evaluate it first" % (run, artifacts.REPORTS_FILE)
            )
        single.extend(artifact.reports)

    reports = _table_order(evaluation.aggregate_reports(single))
    if out:
        files.write_file(out, evaluation.reports_to_csv(reports))
    return reports


def _render(result):  # type: (object) -> str
    if isinstance(result, artifacts.RunArtifact):
        return u"run saved: %s anchors, %s collisions, anchor precision %s, final mse %.6e\n" % (
            len(result.anchor_keys_y),
            result.collisions,
            result.anchor_precision,
            result.trace.final_loss,
        )
    if isinstance(result, dict):
        return u"".join(u"%s: %s\n" % item for item in sorted(result.items()))
    if result and isinstance(result[0], stitching.StitchReport):
        return stitching.reports_to_csv(result)
    return evaluation.format_summary(result)


def _get_valid_failure_exit_code(exit_code):
    try:
        valid_exit_code = int(exit_code)
    except (TypeError, ValueError):
        valid_exit_code = DEFAULT_FAILURE_CODE

    return valid_exit_code or DEFAULT_FAILURE_CODE


def _one_line(message):  # type: (str) -> str
    return u" ".join(str(message).split())


def run(command, options, stdout=None, stderr=None):  # type: (object, dict, object, object) -> int
    """Run a command and report its outcome.

    User errors (ClientError) print one line, ``ERROR <ErrorClass>: <message>``, and exit
    with 1. Any other error is a framework error: the traceback is logged, the same one
    line is printed and the exit code is the error's errno when it has one.

    Args:
        command (callable): One of the cmd_* functions.
        options (dict): Keyword arguments of the command.

    Returns:
        int: The exit code.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    exit_code = SUCCESS_CODE
    try:
        result = command(**options)
        stdout.write(_render(result))
    except errors.ClientError as e:
        stderr.write(u"ERROR %s: %s\n" % (type(e).__name__, _one_line(e)))
        exit_code = DEFAULT_FAILURE_CODE
    except Exception as e:  # pylint: disable=broad-except
        failure_msg = "framework error: \n%s\n%s" % (traceback.format_exc(), str(e))
        logger.error(failure_msg)
        stderr.write(u"ERROR %s: %s\n" % (type(e).__name__, _one_line(e)))

        error_number = getattr(e, "errno", DEFAULT_FAILURE_CODE)
        exit_code = _get_valid_failure_exit_code(error_number)
    return exit_code
