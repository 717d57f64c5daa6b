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

import logging
import os

from mock import patch
import pytest

from anchor_optimization import environment, errors, params


@patch("multiprocessing.cpu_count", lambda: 6)
def test_environment_defaults():
    with patch.dict(os.environ, {}, clear=True):
        env = environment.Environment()

    assert env.log_level == logging.INFO
    assert env.num_threads == 6
    assert env.block_entries == params.DEFAULT_BLOCK_ENTRIES


def test_environment_reads_variables():
    variables = {
        params.LOG_LEVEL_ENV: str(logging.DEBUG),
        params.NUM_THREADS_ENV: "3",
        params.BLOCK_ENTRIES_ENV: "1024",
    }
    with patch.dict(os.environ, variables):
        env = environment.Environment()

    assert dict(env) == {"log_level": logging.DEBUG, "num_threads": 3, "block_entries": 1024}


def test_environment_is_a_snapshot():
    with patch.dict(os.environ, {params.NUM_THREADS_ENV: "3"}):
        env = environment.Environment()
    with patch.dict(os.environ, {params.NUM_THREADS_ENV: "5"}):
        assert env.num_threads == 3


def test_empty_variable_means_default():
    with patch.dict(os.environ, {params.BLOCK_ENTRIES_ENV: ""}):
        assert environment.Environment().block_entries == params.DEFAULT_BLOCK_ENTRIES


@pytest.mark.parametrize(
    "name, value",
    [
        (params.NUM_THREADS_ENV, "many"),
        (params.NUM_THREADS_ENV, "0"),
        (params.BLOCK_ENTRIES_ENV, "-1"),
        (params.LOG_LEVEL_ENV, "1.5"),
    ],
)
def test_invalid_variables(name, value):
    with patch.dict(os.environ, {name: value}):
        with pytest.raises(errors.ConfigurationError) as e:
            environment.Environment()

    assert name in str(e.value)


@patch("multiprocessing.cpu_count", lambda: 12)
def test_num_cpus():
    assert environment.num_cpus() == 12
