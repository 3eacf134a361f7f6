"""Domain types, validation and index conventions.

A radical extension is described by ``L_{r,s_1..s_n} = F(zeta_{p^r}, a_1^{1/p^{s_1}}, ..., a_n^{1/p^{s_n}})``
over an unramified p-adic base F.  Only the exponent data and the valuation class of
``a_n`` enter the jump formulas, so the types below carry nothing else.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sympy.ntheory import isprime

JumpValue = int
"""Jumps are plain Python integers (arbitrary precision, always >= 0)."""


class RamificationError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RamificationError, ValueError):
    """An input lies outside the supported parameter domain."""


class IntegralityError(RamificationError, ArithmeticError):
    """An exact division that must be integral left a remainder."""


class UnreachableError(RamificationError):
    """The recursive evaluator found no applicable rewrite."""


class ConsistencyError(RamificationError):
    """Two independent computations of the same object disagree."""


class OrderingError(RamificationError):
    """Jumps that must be strictly increasing are not."""


class InternalError(RamificationError, RuntimeError):
    """A construction that must terminate did not."""


@dataclass(frozen=True, order=True)
class Prime:
    value: int

    def __post_init__(self) -> None:
        value = int(self.value)
        if value < 2 or not isprime(value):
            raise DomainError(f"{self.value} is not prime")
        object.__setattr__(self, "value", value)

    @property
    def is_two(self) -> bool:
        return self.value == 2

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


class VClass(enum.Enum):
    """Whether p divides the valuation of the last radicand ``a_n``."""

    DIVISIBLE = "div"
    NONDIVISIBLE = "nondiv"

    @classmethod
    def parse(cls, text: "str | VClass") -> "VClass":
        if isinstance(text, VClass):
            return text
        key = str(text).strip().lower()
        aliases = {
            "div": cls.DIVISIBLE,
            "divisible": cls.DIVISIBLE,
            "d": cls.DIVISIBLE,
            "nondiv": cls.NONDIVISIBLE,
            "nondivisible": cls.NONDIVISIBLE,
            "nd": cls.NONDIVISIBLE,
        }
        if key not in aliases:
            raise DomainError(f"unknown valuation class {text!r}")
        return aliases[key]

    @property
    def is_divisible(self) -> bool:
        return self is VClass.DIVISIBLE

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TameFactor:
    """Prime-to-p root exponents: ``((q_1, (e_11, e_12, ...)), (q_2, (...)), ...)``."""

    primes: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def __post_init__(self) -> None:
        normal = tuple((int(q), tuple(int(e) for e in exps)) for q, exps in self.primes)
        object.__setattr__(self, "primes", normal)

    @classmethod
    def parse(cls, text: str | None) -> "TameFactor":
        """Parse ``"q:e1:e2,q2:e1"``; an empty string means the trivial factor."""
        if not text:
            return cls()
        entries = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            try:
                q = int(parts[0])
                exps = tuple(int(e) for e in parts[1:])
            except ValueError as exc:
                raise DomainError(f"malformed tame factor entry {chunk!r}") from exc
            if not exps:
                raise DomainError(f"tame factor entry {chunk!r} has no exponent")
            entries.append((q, exps))
        return cls(tuple(entries))

    @property
    def is_trivial(self) -> bool:
        return tame_multiplier(self) == 1

    def __str__(self) -> str:
        return ",".join(":".join([str(q), *map(str, exps)]) for q, exps in self.primes)


def tame_multiplier(t: TameFactor) -> int:
    """Return ``D``, the product of ``q_j^{s_ij}`` over all tame radicals."""
    return math.prod(q**e for q, exps in t.primes for e in exps)


def validate_tame(t: TameFactor, p: int) -> None:
    seen: set[int] = set()
    for q, exps in t.primes:
        if q < 2 or not isprime(q):
            raise DomainError(f"tame prime {q} is not prime")
        if q == p:
            raise DomainError(f"tame prime {q} equals p")
        if q in seen:
            raise DomainError(f"tame prime {q} listed twice")
        seen.add(q)
        if any(e < 1 for e in exps):
            raise DomainError(f"tame exponents for {q} must be positive")


@dataclass(frozen=True, order=True)
class FieldLabel:
    """A node ``L_{r,s_1..s_n}`` of the subfield lattice; zero entries mean "absent"."""

    r: int
    s: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        if self.r < 0 or any(x < 0 for x in self.s):
            raise DomainError(f"negative coordinate in label ({self.r}, {list(self.s)})")

    @property
    def n(self) -> int:
        return len(self.s)

    def coords(self) -> tuple[int, ...]:
        return (self.r, *self.s)

    def __str__(self) -> str:
        return "L_{" + ",".join(map(str, self.coords())) + "}"

    @classmethod
    def base(cls, n: int) -> "FieldLabel":
        return cls(0, (0,) * n)


def shift_index(label: FieldLabel, k: int) -> FieldLabel:
    """Decrement coordinate ``k - 1`` of the label (``k = 1`` decrements ``r``)."""
    if not 1 <= k <= label.n + 1:
        raise DomainError(f"index k={k} outside 1..{label.n + 1}")
    if k == 1:
        if label.r < 2:
            raise DomainError("cannot lower r below 1: that step is the tame degree p-1 step")
        return FieldLabel(label.r - 1, label.s)
    if label.s[k - 2] < 1:
        raise DomainError(f"coordinate s_{k - 1} is already 0")
    s = list(label.s)
    s[k - 2] -= 1
    return FieldLabel(label.r, tuple(s))


def label_degree(label: FieldLabel, p: int) -> int:
    """``[L_label : F]``; the cyclotomic part contributes ``(p-1) p^{r-1}`` once r >= 1."""
    if label.r == 0:
        if any(label.s):
            raise DomainError("labels with r = 0 must be the base field")
        return 1
    return (p - 1) * p ** (label.r - 1 + sum(label.s))


@dataclass(frozen=True)
class RadicalSpec:
    p: Prime
    r: int
    s: tuple[int, ...]
    vclass: VClass
    tame: TameFactor = field(default_factory=TameFactor)
    p2_asserted: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.p, Prime):
            object.__setattr__(self, "p", Prime(self.p))
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        object.__setattr__(self, "vclass", VClass.parse(self.vclass))

    @classmethod
    def make(
        cls,
        p: int,
        r: int,
        s: Iterable[int],
        vclass: "str | VClass",
        tame: TameFactor | None = None,
        p2_asserted: bool = False,
    ) -> "RadicalSpec":
        return cls(Prime(p), r, tuple(s), VClass.parse(vclass), tame or TameFactor(), p2_asserted)

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def label(self) -> FieldLabel:
        return FieldLabel(self.r, self.s)

    @property
    def D(self) -> int:
        return tame_multiplier(self.tame)

    def degree(self) -> int:
        return label_degree(self.label, self.p.value) * self.D

    def __str__(self) -> str:
        text = f"p={self.p} {self.label} {self.vclass}"
        if not self.tame.is_trivial:
            text += f" tame={self.tame}"
        return text


def _is_sorted(xs: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(xs, xs[1:]))


def validate(spec: RadicalSpec) -> None:
    """Raise :class:`DomainError` naming the first violated clause, else return None."""
    p = spec.p.value
    if spec.n < 1:
        raise DomainError("n must be at least 1")
    if spec.r < 1:
        raise DomainError("r must be positive")
    if any(x < 1 for x in spec.s):
        raise DomainError("radical exponents must be positive")
    if spec.r < max(spec.s):
        raise DomainError("r < max(s)")
    ordered = spec.s if spec.vclass.is_divisible else spec.s[:-1]
    if not _is_sorted(ordered):
        raise DomainError("s not sorted for vclass")
    if spec.p.is_two and not spec.p2_asserted:
        raise DomainError("p=2 hypothesis not asserted")
    validate_tame(spec.tame, p)


def reduce_label(label: FieldLabel, vclass: VClass) -> tuple[FieldLabel, VClass]:
    """Drop absent radicals.  Losing the last radical of a non-divisible spec leaves
    only radicands with divisible valuation, so the class switches accordingly."""
    s = label.s
    if not vclass.is_divisible and s and s[-1] == 0:
        vclass = VClass.DIVISIBLE
    return FieldLabel(label.r, tuple(x for x in s if x)), vclass
