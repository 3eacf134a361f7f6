"""Jumps ``t_{n,k}(r, s_1..s_n)`` for any number of radicals.

Two independent evaluators are provided:

* path A (:func:`t_nk_closed`, :func:`t_n1`, :func:`t_n1_nonno`): explicit sums over
  the auxiliary values ``tau_m(l)`` and the uniform closed forms, each valid in a
  window of ``r`` and raising :class:`DomainError` outside it;
* path B (:func:`t_nk_rec`): a memoized recursion over unit squares of the
  subfield lattice, seeded only by the cyclotomic jump and the level-one radical
  jump.  It is total on ``r >= 1`` and serves as the oracle for path A.

``t_{n,k}`` is the jump of ``L_{r,s}`` over the field obtained by lowering
coordinate ``k - 1`` by one (``k = 1`` lowers ``r``).
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from fractions import Fraction

from . import constants
from .constants import const
from .core import (
    DomainError,
    FieldLabel,
    IntegralityError,
    JumpValue,
    UnreachableError,
    VClass,
    reduce_label,
    shift_index,
)
from .jumps_base import cyclotomic_jump, exact_div, t1_level1, t1_value


class Variant(enum.Enum):
    """Reading of the inner exponent in the k >= 2 double sum."""

    UNROLLED = "unrolled"  # p^{s_{m+1}(k) - l}
    SHIFTED = "shifted"  # p^{s_{m+1}(k) - 1 - l}, kept as a negative control


DEFAULT_VARIANT = Variant.UNROLLED


@dataclass(frozen=True)
class JumpQuery:
    p: int
    vclass: VClass
    label: FieldLabel
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "vclass", VClass.parse(self.vclass))
        if not isinstance(self.label, FieldLabel):
            r, s = self.label
            object.__setattr__(self, "label", FieldLabel(r, tuple(s)))
        n = self.label.n
        if not 1 <= self.k <= n + 1:
            raise DomainError(f"k={self.k} outside 1..{n + 1}")
        if self.label.r < 1:
            raise DomainError("jump queries need r >= 1")
        if self.k == 1 and self.label.r < 2:
            raise DomainError("k = 1 with r = 1 is the tame step")
        if self.k >= 2 and self.label.s[self.k - 2] < 1:
            raise DomainError(f"s_{self.k - 1} must be >= 1 for k = {self.k}")

    @classmethod
    def make(cls, p: int, r: int, s, k: int, vclass) -> "JumpQuery":
        return cls(int(p), VClass.parse(vclass), FieldLabel(r, tuple(s)), k)

    def __str__(self) -> str:
        n = self.label.n
        args = ",".join(map(str, self.label.coords()))
        return f"t_{{{n},{self.k}}}({args}) p={self.p} {self.vclass}"


# -- canonical form -------------------------------------------------------------


def canonical(vclass: VClass, label: FieldLabel, k: int) -> tuple[VClass, FieldLabel, int]:
    """Drop absent radicals and sort the interchangeable (divisible) ones.

    ``k`` follows its coordinate.  Radicands with divisible valuation play
    symmetric roles, so permuting them does not change any jump.
    """
    if k >= 2 and label.s[k - 2] == 0:
        raise DomainError("k points at an absent radical")
    tagged = [(x, i + 2) for i, x in enumerate(label.s)]
    reduced, vclass2 = reduce_label(label, vclass)
    kept = [t for t in tagged if t[0]]
    if vclass2.is_divisible:
        movable, fixed = kept, []
    else:
        movable, fixed = kept[:-1], kept[-1:]
    ordered = sorted(movable) + fixed
    new_k = 1
    if k >= 2:
        new_k = next(pos + 2 for pos, (_, orig) in enumerate(ordered) if orig == k)
    return vclass2, FieldLabel(reduced.r, tuple(x for x, _ in ordered)), new_k


def _canon_query(q: JumpQuery) -> tuple[int, bool, int, tuple[int, ...], int]:
    vclass, label, k = canonical(q.vclass, q.label, q.k)
    return q.p, vclass.is_divisible, label.r, label.s, k


# -- path B: unit-square recursion ------------------------------------------------


def _shift(r: int, s: tuple[int, ...], k: int) -> tuple[int, tuple[int, ...]]:
    if k == 1:
        return r - 1, s
    lst = list(s)
    lst[k - 2] -= 1
    return r, tuple(lst)


def _rec(p: int, div: bool, r: int, s: tuple[int, ...], k: int) -> int:
    vclass = VClass.DIVISIBLE if div else VClass.NONDIVISIBLE
    label = FieldLabel(r, s)
    vclass, label, k = canonical(vclass, label, k)
    return _rec_canonical(p, vclass.is_divisible, label.r, label.s, k)


@functools.lru_cache(maxsize=None)
def _rec_canonical(p: int, div: bool, r: int, s: tuple[int, ...], k: int) -> int:
    n = len(s)
    vclass = VClass.DIVISIBLE if div else VClass.NONDIVISIBLE
    if n == 0:
        if k != 1 or r < 2:
            raise UnreachableError(f"no radical left for k={k}, r={r}")
        return cyclotomic_jump(p, r)
    if n == 1 and r == 1 and k == 2:
        return t1_level1(p, s[0] - 1, vclass)
    for l in range(1, n + 2):
        if l == k:
            continue
        if (l == 1 or k == 1) and r < 2:
            continue
        # Square with corners x, x - e_l, x - e_k, x - e_l - e_k.  ``par`` is the
        # bottom edge parallel to the requested one, ``other`` the remaining one.
        par = _rec(p, div, *_shift(r, s, l), k)
        other = _rec(p, div, *_shift(r, s, k), l)
        if par <= other:
            return par
        return p * par + (1 - p) * other
    raise UnreachableError(f"no unit square available for r={r}, s={s}, k={k}")


def t_nk_rec(q: JumpQuery) -> JumpValue:
    """Path B: total recursive evaluator (the oracle for the closed forms)."""
    p, div, r, s, k = _canon_query(q)
    return _rec_canonical(p, div, r, s, k)


def clear_caches() -> None:
    _rec_canonical.cache_clear()


constants.on_change(clear_caches)


# -- path A: closed forms ---------------------------------------------------------


def uniform_t2(p: int, n: int, s: int, r: int) -> JumpValue:
    """``t_{n,2}(r, s, ..., s)`` for the divisible class, valid for ``r >= s >= 1``."""
    if n < 1 or s < 1:
        raise DomainError("uniform_t2 needs n >= 1 and s >= 1")
    if r < s:
        raise DomainError(f"uniform_t2 needs r >= s (r={r}, s={s})")
    num = const("u2_coef") * (p - 1) * p**n * (p ** ((n + 1) * (s - 1)) - 1)
    return 1 + exact_div(num, p ** (n + 1) - 1, "uniform_t2")


def uniform_tnn1(p: int, n: int, s: int, r: int) -> JumpValue:
    """``t_{n,n+1}(r, s, ..., s)`` for the non-divisible class, valid for ``r >= s + 1``."""
    if n < 1 or s < 0:
        raise DomainError("uniform_tnn1 needs n >= 1 and s >= 0")
    if s == 0:
        return 1
    if r < s + 1:
        raise DomainError(f"uniform_tnn1 needs r >= s + 1 (r={r}, s={s})")
    num = const("unn1_coef") * p ** (n - const("unn1_exp")) * (p - 1) * (p ** ((n + 1) * s) - 1)
    return 1 + exact_div(num, p ** (n + 1) - 1, "uniform_tnn1")


@dataclass(frozen=True)
class TauQuery:
    p: int
    vclass: VClass
    r: int
    n: int
    l: int
    s_last: int


def tau(q: TauQuery) -> JumpValue:
    """``tau_m(l) = t_{m,2}(r, l, ..., l, min(l, s_last))``.

    For the divisible class the clamp is idle (``s_last >= l`` on sorted input).
    """
    p, r, m, l = q.p, q.r, q.n, q.l
    if l < 1 or m < 1:
        raise DomainError("tau needs l >= 1 and n >= 1")
    if q.vclass.is_divisible:
        if m == 1:
            return t1_value(p, r, l, 2, VClass.DIVISIBLE)
        return uniform_t2(p, m, l, r)
    if m == 1:
        return t1_value(p, r, min(l, q.s_last), 2, VClass.NONDIVISIBLE)
    if q.s_last >= l:
        if l == 1:
            return const("tau_one")
        return uniform_tnn1(p, m, l - 1, r)
    sn = q.s_last
    total = p**sn * uniform_t2(p, m - 1, l, r)
    total += (1 - p) * sum(p ** (sn - j) * uniform_tnn1(p, m, j, r) for j in range(1, sn + 1))
    return total


def _canonical_closed(q: JumpQuery) -> tuple[int, VClass, int, tuple[int, ...], int]:
    vclass, label, k = canonical(q.vclass, q.label, q.k)
    return q.p, vclass, label.r, label.s, k


def t_nk_closed(q: JumpQuery, variant: Variant | str = DEFAULT_VARIANT) -> JumpValue:
    """Path A for ``k >= 2``: explicit double sum over ``tau`` values."""
    variant = Variant(variant)
    p, vclass, r, s, k = _canonical_closed(q)
    if k < 2:
        raise DomainError("t_nk_closed handles k >= 2; use t_n1 for k = 1")
    n = len(s)
    c = [min(x, s[k - 2]) for x in s]  # clamp every coordinate at s_{k-1}
    s_last = c[-1]

    def tau_at(m: int, l: int) -> int:
        return tau(TauQuery(p, vclass, r, m, l, s_last))

    head = p ** sum(c[: k - 2]) * tau_at(n - k + 2, c[k - 2])
    offset = 1 if variant is Variant.SHIFTED else 0
    acc = Fraction(0)
    for m in range(k - 2):
        inner = sum(
            Fraction(p) ** (c[m] - offset - l) * tau_at(n - m, l) for l in range(1, c[m] + 1)
        )
        acc += p ** sum(c[:m]) * inner
    total = head + (const("tnk_weight") - p) * acc
    if total.denominator != 1:
        raise IntegralityError(f"non-integral value {total} for {q} ({variant.value} exponent)")
    return int(total)


def _t_n1_window(vclass: VClass, r: int, s: tuple[int, ...]) -> None:
    if vclass.is_divisible:
        if r < s[-1] + 1:
            raise DomainError(f"t_n1 needs r >= s_n + 1 (r={r})")
    else:
        prev = s[-2] if len(s) >= 2 else 0
        if r < max(prev, s[-1]) + 2:
            raise DomainError(f"t_n1 needs r >= max(s_(n-1), s_n) + 2 (r={r})")


def _t_n1_canonical(p: int, vclass: VClass, r: int, s: tuple[int, ...]) -> int:
    if not s:
        return cyclotomic_jump(p, r)
    _t_n1_window(vclass, r, s)
    n = len(s)
    head = p ** sum(s[:-1]) * t1_value(p, r, s[-1], 1, vclass)
    acc = 0
    for m in range(n - 1):
        inner = sum(
            p ** (s[m] - l) * tau(TauQuery(p, vclass, r, n - m, l, s[-1])) for l in range(1, s[m] + 1)
        )
        acc += p ** sum(s[:m]) * inner
    return head + (const("tn1_weight") - p) * acc


def t_n1(q: JumpQuery) -> JumpValue:
    """Path A for ``k = 1``: peel the radicals one at a time down to ``t_{1,1}``."""
    p, vclass, r, s, k = _canonical_closed(q)
    if k != 1:
        raise DomainError("t_n1 handles k = 1 only")
    return _t_n1_canonical(p, vclass, r, s)


def t_n1_nonno(q: JumpQuery) -> JumpValue:
    """Alternative path A for ``k = 1``, non-divisible class with ``s_n <= s_1``:
    lower the last radical to zero first, leaving a divisible problem."""
    p, vclass, r, s, k = _canonical_closed(q)
    if k != 1:
        raise DomainError("t_n1_nonno handles k = 1 only")
    if vclass.is_divisible:
        raise DomainError("t_n1_nonno needs the non-divisible class")
    if len(s) >= 2 and s[-1] > s[0]:
        raise DomainError("t_n1_nonno needs s_n <= s_1")
    _t_n1_window(vclass, r, s)
    n, sn = len(s), s[-1]
    base = _t_n1_canonical(p, VClass.DIVISIBLE, r, s[:-1])
    acc = sum(p ** (sn - l) * uniform_tnn1(p, n, l, r) for l in range(1, sn + 1))
    return p**sn * base + (const("nonno_weight") - p) * acc


def t_closed(q: JumpQuery, variant: Variant | str = DEFAULT_VARIANT) -> JumpValue:
    """Path A dispatcher on ``k``."""
    return t_n1(q) if q.k == 1 else t_nk_closed(q, variant)


class Path(enum.Enum):
    AUTO = "auto"
    CLOSED = "closed"
    REC = "rec"


def jump(q: JumpQuery, path: Path | str = Path.AUTO) -> JumpValue:
    """Evaluate a jump; ``auto`` prefers the closed forms and falls back to path B."""
    path = Path(path)
    if path is Path.REC:
        return t_nk_rec(q)
    if path is Path.CLOSED:
        return t_closed(q)
    try:
        return t_closed(q)
    except DomainError:
        return t_nk_rec(q)
