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
"""This module contains constants representing the supported file formats."""
TEXT = "text"
BINARY = "binary"
EMBEDDING_FORMATS = [TEXT, BINARY]

BINARY_EXTENSION = ".bin"

NPY = "application/x-npy"
JSON = "application/json"


def infer_format(path):  # type: (str) -> str
    """The embedding format of a file, inferred from its extension."""
    return BINARY if str(path).lower().endswith(BINARY_EXTENSION) else TEXT
