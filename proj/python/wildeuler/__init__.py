"""Python access to the wildeuler engine."""

import json as _json

from ._wildeuler import (  # noqa: F401
    InvalidArgument,
    WildEulerError,
    build_segment,
    e_kin,
    hull_functional,
    in_hull,
    in_K,
    pressure,
    toy_first_step,
)
from . import _wildeuler


def toy_iterate(steps=20, n0=8, min_points=1 << 16):
    """Iterate the |u| + |v| = 1 model from (0, 0) with doubling frequencies."""
    return _json.loads(_wildeuler._toy_iterate(steps, n0, min_points))


def resolve_config(config=None):
    """Fill in every default of a run configuration; unknown keys raise InvalidArgument."""
    return _json.loads(_wildeuler._resolve_config(_json.dumps(config or {})))


def iterate(config=None):
    """Run the perturbation iteration described by a configuration dict."""
    return _json.loads(_wildeuler._iterate(_json.dumps(config or {})))


def verify(config=None):
    """Run the invariant suites; returns one dict per suite."""
    return _json.loads(_wildeuler._verify(_json.dumps(config or {})))
