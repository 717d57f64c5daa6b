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
"""This module contains utilities related to dictionaries. These include
transforming configuration dictionaries into command arguments and the
dictionary-like base class shared by configuration and report objects.
"""
from __future__ import absolute_import

import six
from six.moves import collections_abc


def to_cmd_args(mapping):  # type: (dict) -> list
    """Transform a dictionary in a list of cmd arguments.
    Example:
        >>>args = mapping.to_cmd_args({'learning_rate': 0.02, 'freeze_seed': True})
        >>>
        >>>print(args)
        ['--freeze-seed', '--learning-rate', '0.02']

    Boolean values become bare flags when true and are dropped when false, None values
    are dropped and nested mappings are flattened with underscore-joined names.

    Args:
        mapping (dict[str, object]): A Python mapping.
    Returns:
        (list): List of cmd arguments.
    """
    flat = _flatten(mapping)
    sorted_keys = sorted(flat.keys())

    def arg_name(obj):
        string = _decode(obj).replace("_", "-")
        if string:
            return u"--%s" % string if len(string) > 1 else u"-%s" % string
        return u""

    args = []
    for key in sorted_keys:
        value = flat[key]
        if value is None or value is False:
            continue
        if value is True:
            args.append(arg_name(key))
            continue
        args.extend([arg_name(key), _decode(value)])
    return args


def _flatten(mapping, prefix=""):  # type: (dict, str) -> dict
    items = {}
    for key, value in mapping.items():
        name = "%s%s" % (prefix, key)
        if hasattr(value, "items"):
            items.update(_flatten(dict(value), prefix=name + "_"))
        else:
            items[name] = value
    return items


def _decode(obj):  # type: (bytes or str or object) -> str
    """Decode an object to unicode.
    Args:
        obj (bytes or str or anything serializable): Object to be decoded.
    Returns:
        Object decoded in unicode.
    """
    if obj is None:
        return u""
    if isinstance(obj, six.binary_type):
        return obj.decode("latin1")
    if isinstance(obj, (list, tuple)):
        return u",".join(_decode(item) for item in obj)
    return str(obj)


class MappingMixin(collections_abc.Mapping):
    """A mixin class that allows for the creation of a dictionary like object,
    with any built-in function that works with a dictionary. Configuration and
    report objects use it so that ``dict(obj)`` is their serialized form.
    """

    def properties(self):  # type: () -> list
        """
            Returns:
                (list[str]) List of public properties.
        """

        _type = type(self)
        return [_property for _property in dir(_type) if self._is_property(_property)]

    def _is_property(self, _property):
        return isinstance(getattr(type(self), _property, None), property)

    def __getitem__(self, k):
        """Built-in method override."""
        if not self._is_property(k):
            raise KeyError("Trying to access non property %s" % k)
        return getattr(self, k)

    def __len__(self):
        """Built-in method override."""
        return len(self.properties())

    def __iter__(self):
        """Built-in method override."""
        return iter(self.properties())

    def __eq__(self, other):
        """Built-in method override."""
        if not isinstance(other, MappingMixin):
            return NotImplemented
        return type(self) is type(other) and dict(self) == dict(other)

    def __ne__(self, other):
        """Built-in method override."""
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __str__(self):
        """Built-in method override."""
        return str(dict(self))

    def __repr__(self):
        """Built-in method override."""
        return "%s(%s)" % (
            type(self).__name__,
            ", ".join("%s=%r" % (k, v) for k, v in sorted(dict(self).items())),
        )


def as_dict(obj):  # type: (object) -> object
    """Recursively convert dictionary like objects into plain dictionaries.

    Args:
        obj (object): A MappingMixin, a mapping, a sequence or a scalar.

    Returns:
        (object): The same structure made of dicts, lists and scalars only.
    """
    if isinstance(obj, collections_abc.Mapping):
        return {str(k): as_dict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_dict(item) for item in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return obj
