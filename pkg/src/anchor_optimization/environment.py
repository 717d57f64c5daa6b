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
"""This module contains functionality related to the process environment:
the environment variables that tune logging and the dense linear algebra
kernels used by the nearest-neighbour and transport code.
"""
from __future__ import absolute_import

import logging
import multiprocessing
import os

from anchor_optimization import errors, logging_config, mapping, params

logger = logging_config.get_logger()


def num_cpus():  # type: () -> int
    """Return the number of CPUs available to the current process.

    Returns:
        int: Number of CPUs.
    """
    return multiprocessing.cpu_count()


def _read_int(name, default, minimum=None):  # type: (str, int, int) -> int
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise errors.ConfigurationError("%s must be an integer, got %r" % (name, raw))
    if minimum is not None and value < minimum:
        raise errors.ConfigurationError("%s must be >= %s, got %s" % (name, minimum, value))
    return value


class Environment(mapping.MappingMixin):
    """Provides read-only access to the environment variables that configure the library.

    The Environment is a snapshot taken at construction time. It is a dictionary like
    object, allowing any builtin function that works with dictionary.

    Example:
            >>>from anchor_optimization import environment

            >>>env = environment.Environment()
            >>>env.num_threads
            8

    Attributes:
        log_level (int): Logging level, read from ANCHOR_OPT_LOG_LEVEL (default INFO).
        num_threads (int): Worker threads for blocked nearest-neighbour queries, read from
                           ANCHOR_OPT_NUM_THREADS (default: CPU count).
        block_entries (int): Maximum number of entries of a dense similarity or cost block,
                             read from ANCHOR_OPT_BLOCK_ENTRIES (default 16M).
    """

    def __init__(self):
        self._log_level = _read_int(params.LOG_LEVEL_ENV, logging.INFO, minimum=0)
        self._num_threads = _read_int(params.NUM_THREADS_ENV, num_cpus(), minimum=1)
        self._block_entries = _read_int(
            params.BLOCK_ENTRIES_ENV, params.DEFAULT_BLOCK_ENTRIES, minimum=1
        )

    @property
    def log_level(self):  # type: () -> int
        """Environment logging level.

        Returns:
            int: Environment logging level.
        """
        return self._log_level

    @property
    def num_threads(self):  # type: () -> int
        """The number of worker threads used by blocked nearest-neighbour queries.

        Returns:
            int: Number of worker threads.
        """
        return self._num_threads

    @property
    def block_entries(self):  # type: () -> int
        """The maximum number of entries of a dense similarity or cost block.

        Returns:
            int: Maximum number of block entries.
        """
        return self._block_entries
