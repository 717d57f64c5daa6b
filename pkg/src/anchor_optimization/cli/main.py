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
"""This module contains the entry point of the anchor-opt command.

Flags carry the names of the run artifact's cmd_args as aliases, so the flags
stored in a manifest can be passed back to ``anchor-opt optimize`` as they are.
"""
from __future__ import absolute_import

import argparse
import sys

from anchor_optimization import (
    content_types,
    environment,
    logging_config,
    optimizer,
    params,
    pipeline,
)


def _subsample(value):  # type: (str) -> object
    if value == optimizer.ALL_ROWS:
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected a row count or %r, got %r" % (optimizer.ALL_ROWS, value)
        )


def _add_synth(subparsers):
    parser = subparsers.add_parser(
        "synth", help="write a synthetic pair of spaces related by a random isometry"
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--n-samples", type=int, default=2000)
    parser.add_argument("--dim-x", type=int, default=64)
    parser.add_argument("--dim-y", type=int, help="target dimension, defaults to --dim-x")
    parser.add_argument("--noise-sigma", type=float, default=0.0)
    parser.add_argument("--rng-seed", type=int, default=0)
    parser.add_argument("--n-classes", type=int, help="write labeled class clusters")
    parser.add_argument(
        "--n-anchors", "--total-anchors", dest="n_anchors", type=int,
        default=params.DEFAULT_TOTAL_ANCHORS,
    )
    parser.add_argument(
        "--n-seed", "--seed-anchors", dest="n_seed", type=int, default=params.DEFAULT_SEED_ANCHORS
    )
    parser.add_argument(
        "--format", dest="fmt", choices=content_types.EMBEDDING_FORMATS, default=content_types.TEXT
    )
    parser.set_defaults(command=pipeline.cmd_synth)


def _add_optimize(subparsers):
    parser = subparsers.add_parser("optimize", help="discover parallel anchors in the target space")
    parser.add_argument("--src", required=True, help="source embedding file")
    parser.add_argument("--tgt", required=True, help="target embedding file")
    parser.add_argument("--out", required=True, help="run directory")
    parser.add_argument("--seed-pairs", help="file of 'key_x key_y' seed pairs")
    parser.add_argument("--candidates", help="key list of the source anchors beyond the seed")
    parser.add_argument(
        "--profile",
        choices=[params.RETRIEVAL_PROFILE, params.STITCHING_PROFILE],
        default=params.RETRIEVAL_PROFILE,
    )
    parser.add_argument("--vocabulary", type=int, default=params.DEFAULT_VOCABULARY_SIZE)
    parser.add_argument("--labeled", action="store_true", help="files carry a label column")

    # None means "profile default".
    parser.add_argument("--n-anchors", "--total-anchors", dest="total_anchors", type=int)
    parser.add_argument("--n-seed", "--seed-anchors", dest="seed_anchors", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--lr", "--learning-rate", dest="learning_rate", type=float)
    parser.add_argument("--adam-beta1", type=float)
    parser.add_argument("--adam-beta2", type=float)
    parser.add_argument("--adam-eps", type=float)
    parser.add_argument("--sinkhorn-eps", type=float)
    parser.add_argument(
        "--sinkhorn-steps", "--sinkhorn-max-steps", dest="sinkhorn_max_steps", type=int
    )
    parser.add_argument(
        "--sinkhorn-stop", "--sinkhorn-stop-error", dest="sinkhorn_stop_error", type=float
    )
    parser.add_argument("--rng-seed", type=int)
    parser.add_argument(
        "--freeze-seed", "--frozen-seed", dest="frozen_seed", action="store_true", default=None
    )
    parser.add_argument(
        "--subsample",
        "--subsample-per-step",
        dest="subsample_per_step",
        type=_subsample,
        help="rows drawn per side at every step, or 'all'",
    )
    parser.add_argument(
        "--correspondence-warmup",
        type=float,
        help="fraction of the steps over which the non-seed anchors enter the matching",
    )
    parser.set_defaults(command=pipeline.cmd_optimize, pass_env=True)


def _add_eval_retrieval(subparsers):
    parser = subparsers.add_parser(
        "eval-retrieval", help="evaluate the GT, Seed and AO anchors of runs"
    )
    parser.add_argument("--run", dest="runs", nargs="+", help="run directories")
    parser.add_argument("--k", type=int, default=params.DEFAULT_TOP_K)
    parser.add_argument("--seeds", type=int, nargs="+", help="only runs with these rng seeds")
    parser.add_argument("--out", help="aggregated report CSV")
    parser.add_argument("--pca-out", help="directory of 2-D PCA coordinate CSVs")
    parser.add_argument("--src")
    parser.add_argument("--tgt")
    parser.add_argument("--anchors-src", help="key list of source anchors")
    parser.add_argument("--anchors-tgt", help="key list of target anchors")
    parser.add_argument("--method", default=params.AO_METHOD)
    parser.add_argument("--vocabulary", type=int, default=params.DEFAULT_VOCABULARY_SIZE)
    parser.add_argument("--labeled", action="store_true")
    parser.set_defaults(command=pipeline.cmd_eval_retrieval, pass_env=True)


def _add_eval_stitch(subparsers):
    parser = subparsers.add_parser(
        "eval-stitch", help="train a classifier on one space and test it on another"
    )
    parser.add_argument("--train-space", required=True, help="labeled embedding file")
    parser.add_argument("--test-space", required=True, help="labeled embedding file")
    parser.add_argument("--out", help="report CSV")
    parser.add_argument("--run", help="run directory providing the GT, Seed and AO anchors")
    parser.add_argument("--train-anchors", help="key list of train-space anchors")
    parser.add_argument("--test-anchors", help="key list of test-space anchors")
    parser.add_argument("--method", default=params.AO_METHOD)
    parser.add_argument("--epochs", type=int, default=params.DEFAULT_CLASSIFIER_EPOCHS)
    parser.add_argument(
        "--lr",
        "--learning-rate",
        dest="learning_rate",
        type=float,
        default=params.DEFAULT_CLASSIFIER_LEARNING_RATE,
    )
    parser.add_argument("--seeds", type=int, nargs="+", default=list(params.DEFAULT_RNG_SEEDS))
    parser.set_defaults(command=pipeline.cmd_eval_stitch)


def _add_report(subparsers):
    parser = subparsers.add_parser("report", help="aggregate the reports of evaluated runs")
    parser.add_argument("--run", dest="runs", nargs="+", required=True)
    parser.add_argument("--out", help="aggregated report CSV")
    parser.set_defaults(command=pipeline.cmd_report)


def build_parser():  # type: () -> argparse.ArgumentParser
    parser = argparse.ArgumentParser(
        prog="anchor-opt",
        description="Discover parallel anchors between two embedding spaces and evaluate them.",
    )
    subparsers = parser.add_subparsers(dest="name", metavar="command")
    subparsers.required = True
    _add_synth(subparsers)
    _add_optimize(subparsers)
    _add_eval_retrieval(subparsers)
    _add_eval_stitch(subparsers)
    _add_report(subparsers)
    return parser


def main(argv=None):  # type: (list) -> None
    """Parse the command line, run the command and exit with its exit code.

    Usage errors exit with 2, user errors with 1.
    """
    args = build_parser().parse_args(argv)
    options = vars(args)
    name = options.pop("name")
    command = options.pop("command")

    env = environment.Environment()
    logging_config.configure_logger(env.log_level)
    logging_config.log_command_invocation(name, options, env)

    if options.pop("pass_env", False):
        options["env"] = env
    sys.exit(pipeline.run(command, options))


if __name__ == "__main__":
    main()
