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

import pytest

from anchor_optimization import logging_config
import test


@pytest.fixture(autouse=True)
def reset_log_level():
    logger = logging_config.get_logger()
    level = logger.level
    yield
    logger.setLevel(level)


@pytest.fixture
def space_x():
    return test.random_space(60, 8, rng_seed=0, name="x")


@pytest.fixture
def space_y(space_x):
    return test.rotated_space(space_x, rng_seed=1, name="y")


@pytest.fixture
def run_dir(tmpdir):
    return str(tmpdir.join("run"))


@pytest.fixture
def caplog_debug(caplog):
    caplog.set_level(logging.DEBUG, logger=logging_config.LOGGER_NAME)
    return caplog
