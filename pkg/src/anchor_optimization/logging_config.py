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
"""This module contains utilities related to logging."""
from __future__ import absolute_import

import json
import logging

LOGGER_NAME = "anchor-optimization"  # type: str


def get_logger():
    """Return a logger with the name 'anchor-optimization',
    creating it if necessary.
    """
    return logging.getLogger(LOGGER_NAME)


def configure_logger(level, log_format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s"):
    # type: (int, str) -> None
    """Set logger configuration.

    Args:
        level (int): Logger level.
        log_format (str): Logger format.
    """
    logging.basicConfig(format=log_format, level=level)
    get_logger().setLevel(level)


def log_command_invocation(command, options, env=None, logger=None):
    """Log a message with level INFO describing the command about to run.

    Args:
        command (str): Name of the command.
        options (dict): Resolved command options.
        env (anchor_optimization.environment.Environment): Environment snapshot.
        logger (logging.Logger): Logger used to log the message.
    """
    logger = logger or get_logger()

    message = """Running command %s

Environment:

%s

Options:

%s
""" % (
        command,
        json.dumps(dict(env) if env is not None else {}, indent=4, sort_keys=True),
        json.dumps(options, indent=4, sort_keys=True, default=str),
    )
    logger.info(message)
