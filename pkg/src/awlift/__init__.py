"""Harmonic maps of the disk, their minimal-surface lifts, and the reflection
that extends a lift to a quasiconformal map of the sphere."""

from .errors import (
    AwliftError,
    ConsistencyError,
    DegeneratePointError,
    DomainError,
    IllConditionedError,
    InvariantViolation,
    ParseError,
    QuadratureError,
    SingularPointError,
    SpecError,
)
from .extension import ExtensionMap, extend_eval, qc_report, theoretical_bound
from .grid import GridParams
from .harmonic import condition_report, margin, schwarzian, sigma_at
from .jets import HoloJet
from .lift import frame_at, fundamental_forms, lift_point
from .mapspec import MapSpec, load_spec, make_spec
from .reflection import circle_at, critical_point_find, reflect_point

__version__ = "0.1.0"

__all__ = [
    "AwliftError", "ConsistencyError", "DegeneratePointError", "DomainError", "IllConditionedError",
    "InvariantViolation", "ParseError", "QuadratureError", "SingularPointError", "SpecError",
    "ExtensionMap", "extend_eval", "qc_report", "theoretical_bound", "GridParams", "condition_report",
    "margin", "schwarzian", "sigma_at", "HoloJet", "frame_at", "fundamental_forms", "lift_point",
    "MapSpec", "load_spec", "make_spec", "circle_at", "critical_point_find", "reflect_point",
]
