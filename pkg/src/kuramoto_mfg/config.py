"""Frozen default tolerances and run parameters.

All defaults used by the CLI and by module-level default arguments live
in ``defaults.json`` next to this file, so that a single versioned file
records the numbers a released build ran with.
"""
from __future__ import annotations

import json
from importlib import resources


def load_defaults() -> dict:
    """Return the package defaults as a plain nested dict."""
    with resources.files(__package__).joinpath("defaults.json").open() as fh:
        return json.load(fh)


DEFAULTS = load_defaults()
