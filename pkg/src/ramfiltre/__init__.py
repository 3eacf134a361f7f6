"""Exact ramification filtrations of radical extensions of p-adic fields.

The top-level namespace re-exports the pieces most callers need::

    >>> from ramfiltre import RadicalSpec, build_filtration
    >>> f = build_filtration(RadicalSpec.make(3, 2, (1,), "div"))
    >>> f.jumps, f.orders
    ([0, 1, 4], [18, 9, 3])
"""

from .core import (
    ConsistencyError,
    DomainError,
    FieldLabel,
    IntegralityError,
    InternalError,
    OrderingError,
    Prime,
    RadicalSpec,
    RamificationError,
    TameFactor,
    UnreachableError,
    VClass,
    validate,
)
from .engine import JumpQuery, Path, Variant, jump, t_closed, t_nk_rec
from .filtration import Filtration, build_filtration, enumerate_jump_families, scale_tame, tower_sequence
from .herbrand import PiecewiseLinear, different_valuation, phi_from_filtration, psi, upper_jumps
from .jumps_base import t1_value

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "DomainError",
    "FieldLabel",
    "Filtration",
    "IntegralityError",
    "InternalError",
    "JumpQuery",
    "OrderingError",
    "Path",
    "PiecewiseLinear",
    "Prime",
    "RadicalSpec",
    "RamificationError",
    "TameFactor",
    "UnreachableError",
    "VClass",
    "Variant",
    "build_filtration",
    "different_valuation",
    "enumerate_jump_families",
    "jump",
    "phi_from_filtration",
    "psi",
    "scale_tame",
    "t1_value",
    "t_closed",
    "t_nk_rec",
    "tower_sequence",
    "upper_jumps",
    "validate",
]
