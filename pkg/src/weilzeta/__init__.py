"""Weil numbers, Euler products and height zeta functions of CM fields."""
from __future__ import annotations

from .cmfield import CMField, FieldSpec, build_fan, load_field, load_preset, preset_field
from .errors import WeilZetaError

__all__ = [
    "CMField",
    "FieldSpec",
    "WeilZetaError",
    "build_fan",
    "load_field",
    "load_preset",
    "preset_field",
]
__version__ = "0.1.0"
