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
"""This module contains the run artifact: a directory holding everything an
optimization run produced, enough to re-issue the run and to re-evaluate it.

    manifest.json   version, config, CLI arguments, spaces, vocabulary and anchors
    raw.npy         optimized raw anchor matrix (float64)
    trace.csv       step, mse_loss, marginal_error, wall_time
    reports.csv     retrieval reports, once the run has been evaluated
"""
from __future__ import absolute_import

import os

import numpy as np

from anchor_optimization import (
    content_types,
    encoders,
    errors,
    evaluation,
    files,
    functions,
    logging_config,
    optimizer,
)

logger = logging_config.get_logger()

VERSION = "1.0.0"

MANIFEST_FILE = "manifest.json"
RAW_FILE = "raw.npy"
TRACE_FILE = "trace.csv"
REPORTS_FILE = "reports.csv"

MANIFEST_FIELDS = [
    "anchor_indices_x",
    "anchor_indices_y",
    "anchor_keys_x",
    "anchor_keys_y",
    "anchor_precision",
    "cmd_args",
    "collisions",
    "config",
    "gt_keys_y",
    "rng_seed",
    "seed_keys_y",
    "source",
    "target",
    "vocabulary",
]


class RunArtifact(object):
    """Everything an optimization run produced.

    Attributes:
        config (dict): Optimizer config snapshot.
        cmd_args (list[str]): Flags re-issuing the run.
        source, target (dict): Space descriptions (path, name, labeled).
        rng_seed (int): Seed of the run.
        vocabulary (list[str]): Shared words used for evaluation.
        anchor_keys_x, anchor_keys_y (list[str]): Source anchors and discovered target
            anchors, seed first.
        anchor_indices_x, anchor_indices_y (list[int]): The same anchors as row indices.
        seed_keys_y (list[str]): Target side of the seed.
        gt_keys_y (list[str]): Ground-truth target anchors, or None when unknown.
        collisions (int): Duplicated target rows after discretization.
        anchor_precision (float): Fraction of discovered anchors equal to the ground truth,
            or None.
        raw (np.ndarray): Optimized raw anchor matrix.
        trace (optimizer.OptimizationTrace): Per-step records.
        reports (list[evaluation.RetrievalReport]): Retrieval reports, possibly empty.
        version (str): Container version.
    """

    def __init__(self, raw, trace, reports=None, version=VERSION, **manifest):
        missing = [field for field in MANIFEST_FIELDS if field not in manifest]
        if missing:
            raise errors.CorruptArtifactError("Run manifest is missing %s" % missing)
        for field in MANIFEST_FIELDS:
            setattr(self, field, manifest[field])
        self.raw = raw
        self.trace = trace
        self.reports = list(reports or [])
        self.version = version

    def manifest(self):  # type: () -> dict
        manifest = {field: getattr(self, field) for field in MANIFEST_FIELDS}
        manifest["version"] = self.version
        return manifest

    def __eq__(self, other):
        if not isinstance(other, RunArtifact):
            return NotImplemented
        return (
            self.manifest() == other.manifest()
            and np.array_equal(self.raw, other.raw)
            and self.trace == other.trace
            and _report_rows(self.reports) == _report_rows(other.reports)
        )

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None


def _report_rows(reports):
    return [{field: report[field] for field in evaluation.CSV_FIELDS} for report in reports]


def save_reports(path, reports):  # type: (str, list) -> None
    files.write_file(os.path.join(path, REPORTS_FILE), evaluation.reports_to_csv(reports))


def save_run(path, artifact):  # type: (str, RunArtifact) -> None
    """Write a run artifact directory; existing members are overwritten."""
    files.makedirs(path)
    files.write_json(os.path.join(path, MANIFEST_FILE), artifact.manifest())
    files.write_file(
        os.path.join(path, RAW_FILE),
        encoders.encode(np.asarray(artifact.raw, dtype=np.float64), content_types.NPY),
        mode="wb",
    )
    files.write_file(
        os.path.join(path, TRACE_FILE),
        encoders.records_to_csv(
            list(optimizer.OptimizationTrace.FIELDS),
            [record._asdict() for record in artifact.trace],
        ),
    )
    if artifact.reports:
        save_reports(path, artifact.reports)
    logger.info("Saved run artifact to %s", path)


def _major(version):  # type: (str) -> str
    return str(version).split(".")[0]


def _member(path, name):  # type: (str, str) -> str
    member = os.path.join(path, name)
    if not os.path.isfile(member):
        raise errors.CorruptArtifactError("Run artifact %s has no %s" % (path, name))
    return member


def _read_member(path, name, mode="r"):
    return files.read_file(_member(path, name), mode)


def _decode_trace(text):  # type: (str) -> optimizer.OptimizationTrace
    records = encoders.csv_to_records(text, numeric=optimizer.OptimizationTrace.FIELDS)
    return optimizer.OptimizationTrace(
        optimizer.StepRecord(
            int(record["step"]), record["mse_loss"], record["marginal_error"], record["wall_time"]
        )
        for record in records
    )


def load_run(path):  # type: (str) -> RunArtifact
    """Read a run artifact directory.

    Raises:
        VersionMismatchError: If the artifact has another major version.
        CorruptArtifactError: If a member is missing or cannot be decoded.
    """
    manifest = functions.error_wrapper(files.read_json, errors.CorruptArtifactError)(
        _member(path, MANIFEST_FILE)
    )
    if not isinstance(manifest, dict) or "version" not in manifest:
        raise errors.CorruptArtifactError("Run manifest of %s has no version" % path)
    version = manifest.pop("version")
    if _major(version) != _major(VERSION):
        raise errors.VersionMismatchError(version, VERSION)

    raw = functions.error_wrapper(encoders.npy_to_numpy, errors.CorruptArtifactError)(
        _read_member(path, RAW_FILE, mode="rb")
    )
    if raw.ndim != 2:
        raise errors.CorruptArtifactError("Raw anchors of %s are not a matrix" % path)
    trace = functions.error_wrapper(_decode_trace, errors.CorruptArtifactError)(
        _read_member(path, TRACE_FILE)
    )
    config = manifest.get("config")
    steps = config.get("steps") if isinstance(config, dict) else None
    if steps is not None and len(trace) != steps:
        raise errors.CorruptArtifactError(
            "Trace of %s has %s records, expected %s" % (path, len(trace), steps)
        )

    reports = []
    if os.path.isfile(os.path.join(path, REPORTS_FILE)):
        reports = functions.error_wrapper(evaluation.reports_from_csv, errors.CorruptArtifactError)(
            _read_member(path, REPORTS_FILE)
        )

    return RunArtifact(raw, trace, reports=reports, version=version, **manifest)
