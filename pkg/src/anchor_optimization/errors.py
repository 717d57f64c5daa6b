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
"""This module contains custom exceptions."""
from __future__ import absolute_import

import textwrap


class ClientError(Exception):
    """Error class used to separate user input errors from internal errors."""


class ConfigurationError(ClientError):
    """Error class indicating an invalid hyperparameter or configuration value."""


class ZeroNormRowError(ClientError):
    """This exception is raised when a row cannot be rescaled to unit norm.

    Attributes:
      row
    """

    def __init__(self, row):
        self.row = row
        super(ZeroNormRowError, self).__init__("Row %s has a norm below 1e-12" % row)


class DimMismatchError(ClientError):
    """This exception is raised when two operands disagree on a dimension.

    Attributes:
      expected, actual
    """

    def __init__(self, expected, actual, what="dimension"):
        self.expected = expected
        self.actual = actual
        super(DimMismatchError, self).__init__(
            "Mismatched %s: expected %s, got %s" % (what, expected, actual)
        )


class KTooLargeError(ClientError):
    """Error class indicating a top-k query larger than its corpus."""

    def __init__(self, k, rows):
        self.k = k
        self.rows = rows
        super(KTooLargeError, self).__init__(
            "Cannot retrieve %s neighbours from a corpus of %s rows" % (k, rows)
        )


class NonFiniteCostError(ClientError):
    """Error class indicating a transport cost matrix with NaN or infinite entries."""


class NumericalOverflowError(Exception):
    """Error class indicating a transport plan that overflowed.

    This is an internal error: the log-domain solver never overflows on finite costs.
    """


class NonFiniteLossError(ClientError):
    """Error class indicating a loss that evaluated to NaN or infinity."""


class NonFiniteGradientError(ClientError):
    """Error class indicating a gradient with NaN or infinite entries."""


class SeedExceedsTotalError(ClientError):
    """Error class indicating more seed anchors than anchors to approximate."""

    def __init__(self, seed, total):
        self.seed = seed
        self.total = total
        super(SeedExceedsTotalError, self).__init__(
            "Seed size %s exceeds the total number of anchors %s" % (seed, total)
        )


class EmptySeedError(ClientError):
    """Error class indicating that no seed anchors were given."""


class AnchorIndexError(ClientError):
    """Error class indicating an anchor index outside of its space."""

    def __init__(self, index, size):
        self.index = index
        self.size = size
        super(AnchorIndexError, self).__init__(
            "Anchor index %s is out of range for a space of %s rows" % (index, size)
        )


class AnchorCountMismatchError(ClientError):
    """Error class indicating anchor sets of different sizes."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super(AnchorCountMismatchError, self).__init__(
            "Anchor sets have different sizes: %s and %s" % (left, right)
        )


class MissingKeyError(ClientError):
    """Error class indicating a sample identifier absent from a space."""

    def __init__(self, key, space=None):
        self.key = key
        self.space = space
        super(MissingKeyError, self).__init__(
            "Key %r is not present in space %s" % (key, space or "<unnamed>")
        )


class EmptySetsError(ClientError):
    """Error class indicating a Jaccard similarity between empty neighbour sets."""


class DegenerateDataError(ClientError):
    """Error class indicating data without any variance to project."""


class MissingClassError(ClientError):
    """Error class indicating classes without training examples."""

    def __init__(self, classes):
        self.classes = classes
        super(MissingClassError, self).__init__(
            "No training examples for classes %s (at least two classes are required)" % classes
        )


class LengthMismatchError(ClientError):
    """Error class indicating predictions and labels of different lengths."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super(LengthMismatchError, self).__init__(
            "Sequences have different lengths: %s and %s" % (left, right)
        )


class _LineError(ClientError):
    """Base class for errors located on a line of an embedding file.

    Attributes:
      line, reason
    """

    def __init__(self, line, reason=""):
        self.line = line
        self.reason = reason
        super(_LineError, self).__init__()

    def __str__(self):
        message = "%s: line %s" % (type(self).__name__, self.line)
        if self.reason:
            message = "%s: %s" % (message, self.reason)
        return message


class ParseError(_LineError):
    """Error class indicating a malformed line in an embedding file."""


class DimInconsistentError(_LineError):
    """Error class indicating a row whose width disagrees with the header."""


class DuplicateKeyError(ClientError):
    """Error class indicating a sample identifier that appears twice."""

    def __init__(self, key):
        self.key = key
        super(DuplicateKeyError, self).__init__("Duplicate key %r" % key)


class EmptyIntersectionError(ClientError):
    """Error class indicating two spaces without a shared vocabulary."""


class NotEnoughKeysError(ClientError):
    """Error class indicating a vocabulary too small for the requested anchors."""

    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super(NotEnoughKeysError, self).__init__(
            "Requested %s anchors but only %s keys are available" % (requested, available)
        )


class VersionMismatchError(ClientError):
    """Error class indicating a run artifact written by an incompatible version."""

    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super(VersionMismatchError, self).__init__(
            "Artifact version %s is not compatible with version %s" % (found, supported)
        )


class CorruptArtifactError(ClientError):
    """Error class indicating a run artifact that cannot be decoded."""


class UnsupportedFormatError(ClientError):
    """Error class indicating an embedding format that is not supported."""

    def __init__(self, fmt, **kwargs):
        self.message = textwrap.dedent(
            """Embedding format %s is not supported.

            Use 'text' for whitespace separated files or 'binary' for the little-endian
            container written by save_word_embeddings."""
            % fmt
        )
        super(UnsupportedFormatError, self).__init__(self.message, **kwargs)
