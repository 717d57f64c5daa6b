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
"""This module contains string constants representing environment variables
and default hyperparameters.
"""
from __future__ import absolute_import

LOG_LEVEL_ENV = "ANCHOR_OPT_LOG_LEVEL"  # type: str
NUM_THREADS_ENV = "ANCHOR_OPT_NUM_THREADS"  # type: str
BLOCK_ENTRIES_ENV = "ANCHOR_OPT_BLOCK_ENTRIES"  # type: str

RETRIEVAL_PROFILE = "retrieval"  # type: str
STITCHING_PROFILE = "stitching"  # type: str

DEFAULT_TOTAL_ANCHORS = 300  # type: int
DEFAULT_SEED_ANCHORS = 15  # type: int
DEFAULT_RETRIEVAL_STEPS = 250  # type: int
DEFAULT_STITCHING_STEPS = 125  # type: int
DEFAULT_RETRIEVAL_LEARNING_RATE = 0.02  # type: float
DEFAULT_STITCHING_LEARNING_RATE = 0.05  # type: float
DEFAULT_ADAM_BETA1 = 0.9  # type: float
DEFAULT_ADAM_BETA2 = 0.999  # type: float
DEFAULT_ADAM_EPS = 1e-8  # type: float
DEFAULT_SINKHORN_EPS = 1e-4  # type: float
DEFAULT_SINKHORN_STEPS = 1  # type: int
DEFAULT_SINKHORN_STOP_ERROR = 1e-5  # type: float
DEFAULT_SUBSAMPLE = 2000  # type: int
DEFAULT_CORRESPONDENCE_WARMUP = 0.5  # type: float
DEFAULT_RNG_SEEDS = (0, 1, 2, 3, 4)  # type: tuple
DEFAULT_TOP_K = 10  # type: int
DEFAULT_VOCABULARY_SIZE = 20000  # type: int
DEFAULT_BLOCK_ENTRIES = 16 * 1024 * 1024  # type: int
DEFAULT_CLASSIFIER_EPOCHS = 200  # type: int
DEFAULT_CLASSIFIER_LEARNING_RATE = 0.05  # type: float

LOG_EVERY_STEPS = 25  # type: int

GT_METHOD = "GT"  # type: str
SEED_METHOD = "Seed"  # type: str
AO_METHOD = "AO"  # type: str
METHODS = (GT_METHOD, SEED_METHOD, AO_METHOD)  # type: tuple
