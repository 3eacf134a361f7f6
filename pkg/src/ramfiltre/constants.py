"""Named integer constants of the closed-form jump formulas.

Every closed form reads its small literal offsets and coefficients through
:func:`const`, so the mutation harness can perturb exactly one of them and check
that the verification grid notices.  The recursive evaluator and its two seed
formulas (the level-one radical jump and the cyclotomic jump) deliberately do
*not* read from here: they are the ground truth the mutations are judged against.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterator

DEFAULTS: dict[str, int] = {
    # n = 1, divisible class
    "t12_const": 1,  # the +1 in (p^{2a-1} + 1)
    "div_k2_exp": 1,  # the -1 in p^{a+b-1}
    "div_k1_tail": 1,  # the -1 in (p^{2b} - 1)
    # n = 1, non-divisible class
    "nd_diag_shift": 2,  # the -2 in p^{2b-2}
    "nd_low_coef": 2,  # the 2 in (2 p^{2b} + p - 1)
    "nd_mid_tail": 1,  # the trailing +1 in (p^{2a-1} - p^{2a-2} - p + 1)
    "nd_k1_coef": 2,  # the 2 in (2 p^{2b+1} - p + 1)
    # uniform values
    "u2_coef": 2,  # the 2 in 2 (p-1) p^n
    "unn1_coef": 2,  # the 2 in 2 p^{n-1} (p-1)
    "unn1_exp": 1,  # the -1 in p^{n-1}
    # tau and the general formulas
    "tau_one": 1,  # tau(1) = 1 for the non-divisible class
    "tnk_weight": 1,  # the 1 in (1 - p) of the k >= 2 double sum
    "tn1_weight": 1,  # the 1 in (1 - p) of the k = 1 sum
    "nonno_weight": 1,  # the 1 in (1 - p) of the alternative k = 1 sum
}

_active: dict[str, int] = dict(DEFAULTS)
_listeners: list[Callable[[], None]] = []


def const(name: str) -> int:
    return _active[name]


def on_change(callback: Callable[[], None]) -> None:
    """Register a cache-clearing callback run whenever constants change."""
    _listeners.append(callback)


def _notify() -> None:
    for callback in _listeners:
        callback()


def set_mutation(name: str | None, delta: int = 1) -> None:
    """Reset all constants, then shift ``name`` by ``delta`` (``None`` only resets)."""
    _active.clear()
    _active.update(DEFAULTS)
    if name is not None:
        if name not in DEFAULTS:
            raise KeyError(f"unknown constant {name!r}; known: {', '.join(sorted(DEFAULTS))}")
        _active[name] = DEFAULTS[name] + delta
    _notify()


def active_mutation() -> str | None:
    changed = [k for k, v in _active.items() if DEFAULTS[k] != v]
    return changed[0] if changed else None


@contextlib.contextmanager
def mutated(name: str, delta: int = 1) -> Iterator[None]:
    set_mutation(name, delta)
    try:
        yield
    finally:
        set_mutation(None)
