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
"""This module contains function wrappers."""
from __future__ import absolute_import

import functools
import sys

import six


def error_wrapper(fn, error_class):
    """Wraps function fn in a try catch block that re-raises error_class.

    Errors that already are instances of error_class propagate unchanged.

    Args:
        fn (function): Function to be wrapped.
        error_class (Exception): Error class to be re-raised.

    Returns:
        (object): Function wrapped in a try catch.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except error_class:
            raise
        except Exception as e:  # pylint: disable=broad-except
            six.reraise(error_class, error_class(e), sys.exc_info()[2])

    return wrapper
