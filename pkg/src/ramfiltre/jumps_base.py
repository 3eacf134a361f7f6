"""Jumps for a single radical (n = 1).

Arguments follow one convention throughout: ``a`` is the cyclotomic exponent and
``b`` the radical exponent of the top field ``L_{a,b}``.  ``k = 1`` asks for the
jump of ``L_{a,b} / L_{a-1,b}`` and ``k = 2`` for ``L_{a,b} / L_{a,b-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constants import const
from .core import DomainError, IntegralityError, JumpValue, Prime, VClass


def exact_div(num: int, den: int, what: str = "") -> int:
    if not (isinstance(num, int) and isinstance(den, int)):
        raise IntegralityError(f"non-integer operand {num!r} / {den!r}" + (f" in {what}" if what else ""))
    q, rem = divmod(num, den)
    if rem:
        raise IntegralityError(f"{num} is not divisible by {den}" + (f" in {what}" if what else ""))
    return q


def cyclotomic_jump(p: int | Prime, a: int) -> JumpValue:
    """Jump of ``F(zeta_{p^a}) / F(zeta_{p^{a-1}})``, namely ``p^{a-1} - 1``."""
    p = int(p)
    if a < 2:
        raise DomainError("the cyclotomic jump needs a >= 2")
    return p ** (a - 1) - 1


def t1_level1(p: int | Prime, s: int, vclass: VClass) -> JumpValue:
    """``t_{1,2}(1, s+1)`` over ``F(zeta_p)``."""
    p = int(p)
    if s < 0:
        raise DomainError("s must be nonnegative")
    if VClass.parse(vclass).is_divisible:
        return p ** (s + 1) - p + 1
    return p ** (s + 1)


@dataclass(frozen=True)
class N1Query:
    p: int
    a: int
    b: int
    k: int
    vclass: VClass

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "vclass", VClass.parse(self.vclass))
        if self.k not in (1, 2):
            raise DomainError("k must be 1 or 2 when n = 1")
        if self.a < 1 or self.b < 0:
            raise DomainError("need a >= 1 and b >= 0")
        if self.k == 2 and self.b < 1:
            raise DomainError("k = 2 needs b >= 1")


@dataclass(frozen=True)
class N1Result:
    value: JumpValue
    clause: str
    """Which formula produced the value, after argument reduction."""


def _div_k2(p: int, a: int, b: int) -> N1Result:
    if a == 1:
        return N1Result(t1_level1(p, b - 1, VClass.DIVISIBLE), "div.k2.level1")
    if a > b:
        # the radical jump stops growing once a exceeds b
        inner = _div_k2(p, b, b)
        return N1Result(inner.value, "div.k2.reduce(a>b)->" + inner.clause)
    tail = exact_div((p - 1) * (p ** (2 * a - 1) + const("t12_const")), p + 1, "t_{1,2} divisible")
    return N1Result(p ** (a + b - const("div_k2_exp")) - tail, "div.k2.b>=a")


def _div_k1(p: int, a: int, b: int) -> N1Result:
    if a == 1:
        return N1Result(0, "tame")
    if b == 0:
        return N1Result(cyclotomic_jump(p, a), "cyclotomic")
    if a <= b:
        inner = _div_k1(p, a, a - 1)
        return N1Result(inner.value, "div.k1.reduce(a<=b)->" + inner.clause)
    frac = exact_div((p - 1) * (p ** (2 * b) - const("div_k1_tail")), p + 1, "t_{1,1} divisible")
    return N1Result(p ** (a + b - 1) - p ** (2 * b) + frac, "div.k1.a>b")


def _nd_k2(p: int, a: int, b: int) -> N1Result:
    if a == 1:
        return N1Result(t1_level1(p, b - 1, VClass.NONDIVISIBLE), "nd.k2.level1")
    if a == b:
        num = p ** (2 * b) + p ** (2 * b - const("nd_diag_shift")) + p - 1
        return N1Result(exact_div(num, p + 1, "t_{1,2} diagonal"), "nd.k2.a=b")
    if a < b:
        num = p ** (2 * a - 1) - p ** (2 * a - 2) - p + const("nd_mid_tail")
        return N1Result(p ** (a + b - 1) - exact_div(num, p + 1, "t_{1,2} a<b"), "nd.k2.a<b")
    num = const("nd_low_coef") * p ** (2 * b) + p - 1
    return N1Result(exact_div(num, p + 1, "t_{1,2} a>b"), "nd.k2.a>b")


def _nd_k1(p: int, a: int, b: int) -> N1Result:
    if a == 1:
        return N1Result(0, "tame")
    if b == 0:
        return N1Result(cyclotomic_jump(p, a), "cyclotomic")
    if a <= b:
        inner = _nd_k1(p, a, a - 1)
        return N1Result(inner.value, "nd.k1.reduce(a<=b)->" + inner.clause)
    if a == b + 1:
        inner = _nd_k1(p, a, b - 1)
        return N1Result(inner.value, "nd.k1.reduce(a=b+1)->" + inner.clause)
    num = const("nd_k1_coef") * p ** (2 * b + 1) - p + 1
    return N1Result(p ** (a + b - 1) - exact_div(num, p + 1, "t_{1,1} a>b+1"), "nd.k1.a>b+1")


def t1_trace(q: N1Query) -> N1Result:
    """Evaluate the closed form and report which clause fired."""
    table = {
        (True, 1): _div_k1,
        (True, 2): _div_k2,
        (False, 1): _nd_k1,
        (False, 2): _nd_k2,
    }
    return table[(q.vclass.is_divisible, q.k)](q.p, q.a, q.b)


def t1(q: N1Query) -> JumpValue:
    return t1_trace(q).value


def t1_value(p: int, a: int, b: int, k: int, vclass: VClass) -> JumpValue:
    return t1(N1Query(p, a, b, k, vclass))


def n1_recursion_table(p: int, vclass: VClass, a_max: int, b_max: int) -> dict[tuple[int, int, int], int]:
    """Independent n = 1 table built from the level-one and cyclotomic jumps alone.

    Every other entry comes from the unit square ``L_{a-1,b-1} < L_{a-1,b}, L_{a,b-1} < L_{a,b}``:
    the smaller of the two bottom jumps reappears on the parallel top edge, and the
    other top jump is ``p * larger + (1 - p) * smaller``.  Keys are ``(a, b, k)``.
    """
    p = int(p)
    vclass = VClass.parse(vclass)
    t: dict[tuple[int, int, int], int] = {}
    for b in range(1, b_max + 1):
        t[(1, b, 2)] = t1_level1(p, b - 1, vclass)
    for a in range(2, a_max + 1):
        t[(a, 0, 1)] = cyclotomic_jump(p, a)
        for b in range(1, b_max + 1):
            radical = t[(a - 1, b, 2)]  # parallel to the k = 2 edge
            cyclo = t[(a, b - 1, 1)]  # parallel to the k = 1 edge
            if radical <= cyclo:
                t[(a, b, 2)] = radical
                t[(a, b, 1)] = p * cyclo + (1 - p) * radical if radical < cyclo else cyclo
            else:
                t[(a, b, 1)] = cyclo
                t[(a, b, 2)] = p * radical + (1 - p) * cyclo
    return t
