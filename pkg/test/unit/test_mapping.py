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

import numpy as np
import pytest

from anchor_optimization import mapping, optimizer, transport


class RunSettings(mapping.MappingMixin):
    @property
    def a(self):
        return 1

    @property
    def b(self):
        return 2

    def d(self):
        return 23

    def __init__(self):
        self.c = 3


def test_mapping_mixin():
    p = RunSettings()

    assert p["a"] == 1
    assert len(p) == 2
    assert p["b"] == 2
    assert str(p) in ("{'a': 1, 'b': 2}", "{'b': 2, 'a': 1}")
    assert repr(p) == "RunSettings(a=1, b=2)"


@pytest.mark.parametrize(
    "property, error, msg",
    [
        ("c", KeyError, "Trying to access non property c"),
        ("d", KeyError, "Trying to access non property d"),
        ("non_existent_field", KeyError, "Trying to access non property non_existent_field"),
    ],
)
def test_mapping_throws_exception_trying_to_access_non_properties(property, error, msg):
    with pytest.raises(error) as e:
        RunSettings()[property]

    assert str(e.value.args[0]) == msg


def test_mapping_mixin_equality():
    assert transport.SinkhornConfig() == transport.SinkhornConfig()
    assert transport.SinkhornConfig(eps=0.5) != transport.SinkhornConfig()
    assert transport.SinkhornConfig() != {"eps": 1e-4}


@pytest.mark.parametrize(
    "target, expected",
    [
        (
            {"learning_rate": 0.02, "steps": 250},
            [u"--learning-rate", u"0.02", u"--steps", u"250"],
        ),
        ({}, []),
        ({"k": 10}, [u"-k", u"10"]),
        (
            {"unicode": u"¡ø", "bytes": b"2", "floats": 4.0, "int": 2},
            [u"--bytes", u"2", u"--floats", u"4.0", u"--int", u"2", u"--unicode", u"¡ø"],
        ),
        ({"seeds": [0, 1, 2]}, [u"--seeds", u"0,1,2"]),
        ({"truthy": True, "falsy": False, "unset": None}, [u"--truthy"]),
        (
            {"sinkhorn": {"eps": 0.5, "max_steps": 3}},
            [u"--sinkhorn-eps", u"0.5", u"--sinkhorn-max-steps", u"3"],
        ),
    ],
)
def test_to_cmd_args(target, expected):
    assert mapping.to_cmd_args(target) == expected


def test_to_cmd_args_flattens_configs():
    args = mapping.to_cmd_args(dict(optimizer.OptimizerConfig(steps=7, frozen_seed=True)))

    assert args[args.index(u"--steps") + 1] == u"7"
    assert args[args.index(u"--sinkhorn-stop-error") + 1] == u"1e-05"
    assert u"--frozen-seed" in args


def test_as_dict():
    config = optimizer.OptimizerConfig(total_anchors=4, seed_anchors=2)

    converted = mapping.as_dict({"config": config, "raw": np.arange(2), "keys": ("a", "b")})

    assert converted["config"]["total_anchors"] == 4
    assert converted["config"]["sinkhorn"] == dict(transport.SinkhornConfig())
    assert type(converted["config"]["sinkhorn"]) is dict
    assert converted["raw"] == [0, 1]
    assert converted["keys"] == ["a", "b"]
