"""Herbrand functions, different valuations, and sub/quotient filtrations.

All arithmetic is exact (:class:`fractions.Fraction`).  Filtrations use the
lower numbering with ``G_u = G_{ceil(u)}`` for real ``u``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .core import DomainError, FieldLabel, RadicalSpec, reduce_label, validate
from .filtration import Filtration, FiltrationLevel, build_filtration

Rational = Fraction


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous increasing map on ``[-1, inf)``, the identity on ``[-1, 0]``.

    ``breakpoints[i] = (u_i, value_i)`` with ``u_0 = 0``; ``slopes[i]`` applies
    on ``[u_i, u_{i+1}]`` and ``slopes[-1]`` beyond the last breakpoint.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    slopes: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.breakpoints or self.breakpoints[0] != (0, 0):
            raise DomainError("a Herbrand function starts at (0, 0)")
        if len(self.slopes) != len(self.breakpoints):
            raise DomainError("need one slope per breakpoint")
        if any(s <= 0 for s in self.slopes):
            raise DomainError("slopes must be positive")
        us = tuple(u for u, _ in self.breakpoints)
        if any(a >= b for a, b in zip(us, us[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "_us", us)

    @classmethod
    def from_slopes(cls, cuts: Sequence[Fraction], slopes: Sequence[Fraction]) -> "PiecewiseLinear":
        """``cuts`` are the interior breakpoints; ``slopes`` has one more entry."""
        points = [(Fraction(0), Fraction(0))]
        for cut, slope in zip(cuts, slopes):
            u0, v0 = points[-1]
            points.append((Fraction(cut), v0 + slope * (Fraction(cut) - u0)))
        return cls(tuple(points), tuple(Fraction(s) for s in slopes))

    def __call__(self, u: Fraction | int) -> Fraction:
        u = Fraction(u)
        if u < -1:
            raise DomainError("defined on [-1, inf) only")
        if u <= 0:
            return u
        i = bisect.bisect_right(self._us, u) - 1
        u0, v0 = self.breakpoints[i]
        return v0 + self.slopes[i] * (u - u0)

    def inverse(self) -> "PiecewiseLinear":
        points = tuple((v, u) for u, v in self.breakpoints)
        return PiecewiseLinear(points, tuple(1 / s for s in self.slopes))

    def compose(self, inner: "PiecewiseLinear") -> "PiecewiseLinear":
        """``self o inner``."""
        cuts = sorted({u for u, _ in inner.breakpoints} | {inner.inverse()(u) for u, _ in self.breakpoints})
        cuts = [c for c in cuts if c > 0]
        probes = [*cuts, (cuts[-1] + 1) if cuts else Fraction(1)]
        slopes = []
        prev = Fraction(0)
        for c in probes:
            slopes.append((self(inner(c)) - self(inner(prev))) / (c - prev))
            prev = c
        # merge collinear neighbours so that e.g. psi o phi is the bare identity
        kept_cuts, kept_slopes = [], [slopes[0]]
        for cut, slope in zip(cuts, slopes[1:]):
            if slope != kept_slopes[-1]:
                kept_cuts.append(cut)
                kept_slopes.append(slope)
        return PiecewiseLinear.from_slopes(kept_cuts, kept_slopes)


def _segments(f: Filtration) -> list[tuple[int, int]]:
    """``(t, |G_t|)`` with the first entry ``(0, |G_0|)``.

    A repeated jump adds an empty interval, so the earlier (larger) group wins.
    """
    out: list[tuple[int, int]] = []
    for lv in f.levels:
        if not out or lv.jump != out[-1][0]:
            out.append((lv.jump, lv.group_order))
    return out


def phi_from_filtration(f: Filtration) -> PiecewiseLinear:
    """``phi(u) = int_0^u dt / [G_0 : G_t]``."""
    seg = _segments(f)
    g0 = seg[0][1]
    cuts = [Fraction(t) for t, _ in seg[1:]]
    slopes = [Fraction(order, g0) for _, order in seg[1:]] + [Fraction(1, g0)]
    if not cuts:
        return PiecewiseLinear.from_slopes([], [Fraction(1, g0)])
    return PiecewiseLinear.from_slopes(cuts, slopes)


def psi(pl: PiecewiseLinear, v: Fraction | int) -> Fraction:
    """Inverse of a Herbrand function, evaluated exactly."""
    return pl.inverse()(v)


def upper_jumps(f: Filtration) -> list[Fraction]:
    phi = phi_from_filtration(f)
    return [phi(t) for t in f.jumps]


def different_valuation(f: Filtration) -> int:
    """``sum_{i >= 0} (|G_i| - 1)``, summed segment by segment."""
    seg = _segments(f)
    total = seg[0][1] - 1
    for (t0, _), (t1, order) in zip(seg, seg[1:]):
        total += (t1 - t0) * (order - 1)
    return total


def trivial_filtration(base: FieldLabel) -> Filtration:
    return Filtration((FiltrationLevel(0, ("base", 1, base), base, 1),))


def _level_index(f: Filtration, sub: FieldLabel) -> int:
    for i, lv in enumerate(f.levels):
        if lv.fixed_field == sub:
            return i
    raise DomainError(f"{sub} is not a node of the filtration")


def _top_label(f: Filtration) -> FieldLabel | None:
    return f.spec.label if f.spec is not None else None


def restrict_filtration(f: Filtration, sub: FieldLabel) -> Filtration:
    """Filtration of ``H = Gal(L / L_sub)`` via ``H_u = G_u  cap  H``."""
    if sub == _top_label(f):
        return trivial_filtration(sub)
    j = _level_index(f, sub)
    if j == 0:
        return Filtration(f.levels, None)
    h = f.levels[j].group_order
    head = replace(f.levels[0], group_order=h, fixed_field=sub)
    return Filtration((head, *f.levels[j:]), None)


def quotient_filtration(f: Filtration, mid: FieldLabel) -> Filtration:
    """Lower filtration of ``Gal(L_mid / F) = G / H``.

    Herbrand's theorem: ``(G/H)_v = G_u H / H`` with ``v = phi_{L/L_mid}(u)``.
    The groups here form a chain, so ``G_u H`` is the larger of ``G_u`` and ``H``.
    """
    if mid == _top_label(f):
        return Filtration(f.levels, None)
    j = _level_index(f, mid)
    base = f.levels[0].fixed_field
    if j == 0:
        return trivial_filtration(base)
    h = f.levels[j].group_order
    phi_h = phi_from_filtration(restrict_filtration(f, mid))
    levels = []
    for lv in f.levels[:j]:
        v = phi_h(lv.jump)
        if v.denominator != 1:
            raise DomainError(f"quotient jump {v} is not an integer")
        levels.append(replace(lv, jump=int(v), group_order=lv.group_order // h))
    return Filtration(tuple(levels), None)


def _subspec(spec: RadicalSpec, mid: FieldLabel) -> RadicalSpec | None:
    label, vclass = reduce_label(mid, spec.vclass)
    if not label.s:
        return None
    sub = RadicalSpec(spec.p, label.r, label.s, vclass, spec.tame, spec.p2_asserted)
    try:
        validate(sub)
    except DomainError:
        return None
    return sub


def _same_levels(a: Filtration, b: Filtration) -> bool:
    return _segments(a) == _segments(b)


def tower_different_check(f: Filtration, mid: FieldLabel) -> bool:
    """Check ``v_L(D_{L/F}) = v_L(D_{L/M}) + e(L|M) v_M(D_{M/F})`` at ``M = L_mid``.

    ``v_M(D_{M/F})`` comes from the Herbrand quotient; when ``M`` is itself a
    radical extension with a valid description, it is also rebuilt from scratch
    and the two filtrations of ``Gal(M/F)`` must coincide.
    """
    top = _top_label(f)
    if mid == top or mid == f.levels[0].fixed_field:
        return True
    lower = restrict_filtration(f, mid)
    quotient = quotient_filtration(f, mid)
    e = lower.g0_order
    ok = different_valuation(f) == different_valuation(lower) + e * different_valuation(quotient)
    if f.spec is not None:
        sub = _subspec(f.spec, mid)
        if sub is not None:
            ok = ok and _same_levels(build_filtration(sub), quotient)
    return ok


def step_differents(f: Filtration) -> list[tuple[int, int, int, int]]:
    """For each tower step ``K_j < K_{j+1}`` return ``(lhs, degree, jump, e)``.

    ``lhs`` is ``v_L(D_{L/K_j}) - v_L(D_{L/K_{j+1}})``; for a single-jump step
    of degree d it must equal ``e(L|K_{j+1}) (d - 1)(t + 1)``.
    """
    out = []
    nodes = [lv.fixed_field for lv in f.levels[1:]]
    top = _top_label(f)
    for j, lv in enumerate(f.levels[1:], start=1):
        upper = nodes[j] if j < len(nodes) else top
        if upper is None:
            break
        here = different_valuation(restrict_filtration(f, lv.fixed_field))
        above = different_valuation(restrict_filtration(f, upper))
        e = f.levels[j + 1].group_order if j + 1 < len(f.levels) else 1
        degree = lv.group_order // e
        out.append((here - above, degree, lv.jump, e))
    return out
