"""The ramification filtration of ``Gal(L_{r,s}/F)``.

The filtration is read off an explicit tower ``K_1 < K_2 < ... < K_m = L`` of
subfields in which every step has a single jump and the jumps strictly
increase.  Then ``G_{t_j} = Gal(L / K_j)``.  A second, independent description
lists the jumps by closed families of queries; the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .core import (
    ConsistencyError,
    FieldLabel,
    InternalError,
    JumpValue,
    OrderingError,
    RadicalSpec,
    TameFactor,
    VClass,
    label_degree,
    tame_multiplier,
    validate,
)
from .engine import JumpQuery, Path, jump


def _clamped_step(current: FieldLabel, target: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(min(t, c + 1) for c, t in zip(current.s, target))


def _tower_divisible(spec: RadicalSpec) -> list[FieldLabel]:
    n, r, s = spec.n, spec.r, spec.s
    nodes = [FieldLabel(1, (0,) * n)]
    limit = r + sum(s) + n
    while nodes[-1] != spec.label:
        if len(nodes) > limit:
            raise InternalError(f"tower walk for {spec} did not terminate")
        cur = nodes[-1]
        if cur.s[-1] == s[-1]:
            nxt = FieldLabel(min(r, cur.r + 1), cur.s)
        elif cur.r == cur.s[-1]:
            nxt = FieldLabel(cur.r + 1, cur.s)
        elif cur.r > cur.s[-1]:
            nxt = FieldLabel(cur.r, _clamped_step(cur, s))
        else:
            raise InternalError(f"tower walk for {spec} reached {cur} with r < s_n")
        nodes.append(nxt)
    return nodes


def _tower_nondivisible(spec: RadicalSpec) -> list[FieldLabel]:
    n, r, s = spec.n, spec.r, spec.s
    nodes = [FieldLabel(1, (0,) * n)]
    second = FieldLabel(1, (1,) * (n - 1) + (0,))
    if second != nodes[0]:
        nodes.append(second)
    limit = r + sum(s) + n
    while nodes[-1] != spec.label:
        if len(nodes) > limit:
            raise InternalError(f"tower walk for {spec} did not terminate")
        cur = nodes[-1]
        if cur.s == s:
            nxt = FieldLabel(min(r, cur.r + 1), cur.s)
        elif cur.r == r:
            nxt = FieldLabel(cur.r, _clamped_step(cur, s))
        else:
            last = cur.s[-1]
            prev = cur.s[-2] if n >= 2 else None
            pivot = prev if prev is not None and last < prev else last + 1
            if cur.r > pivot:
                nxt = FieldLabel(cur.r, _clamped_step(cur, s))
            elif cur.r == pivot:
                nxt = FieldLabel(cur.r + 1, cur.s)
            else:
                raise InternalError(f"tower walk for {spec} reached {cur} below its pivot")
        nodes.append(nxt)
    return nodes


def tower_sequence(spec: RadicalSpec) -> list[FieldLabel]:
    """The subfield tower ``K_1, ..., K_m`` ending at the full label."""
    validate(spec)
    if spec.vclass.is_divisible:
        return _tower_divisible(spec)
    return _tower_nondivisible(spec)


@dataclass(frozen=True)
class TowerStep:
    lower: FieldLabel
    upper: FieldLabel
    k: int
    changed: tuple[int, ...]
    """Indices 1..n+1 of the coordinates that grow (1 means r)."""

    def query(self, p: int, vclass: VClass) -> JumpQuery:
        return JumpQuery(p, vclass, self.upper, self.k)

    @property
    def log_degree(self) -> int:
        return len(self.changed)


def tower_steps(spec: RadicalSpec) -> list[TowerStep]:
    nodes = tower_sequence(spec)
    steps = []
    for lower, upper in zip(nodes, nodes[1:]):
        changed = tuple(i + 1 for i, (a, b) in enumerate(zip(lower.coords(), upper.coords())) if a != b)
        if changed == (1,):
            k = 1
        elif 1 in changed:
            raise InternalError(f"step {lower} -> {upper} mixes r with radicals")
        else:
            # several radicals may grow together; they share one jump, any of them names it
            k = max(changed)
        steps.append(TowerStep(lower, upper, k, changed))
    return steps


def enumerate_jump_families(spec: RadicalSpec) -> list[tuple[str, JumpQuery]]:
    """List the nonzero jumps as closed families of queries.

    The non-divisible ranges differ from a naive reading by one at each end:
    family ii stops at ``r - 1`` and family iv stops at ``min(s_n, r - 1)``
    (larger members would need a cyclotomic level above ``r``), and family iv
    starts at ``0`` when ``n >= 2``.  That first member is the step adjoining the
    first roots of ``a_1 .. a_{n-1}`` and is reported with ``k = n``.
    """
    validate(spec)
    p, r, s, n = spec.p.value, spec.r, spec.s, spec.n
    vc = spec.vclass
    out: list[tuple[str, JumpQuery]] = []

    def q(rr: int, ss: Iterable[int], k: int) -> JumpQuery:
        return JumpQuery(p, vc, FieldLabel(rr, tuple(ss)), k)

    if vc.is_divisible:
        for top in range(s[-1] + 1, r + 1):
            out.append(("i", q(top, s, 1)))
        for sp in range(1, s[-1]):
            out.append(("ii", q(sp + 1, [min(x, sp) for x in s], 1)))
        for sp in range(1, s[-1] + 1):
            out.append(("iii", q(sp, [min(x, sp) for x in s], n + 1)))
        return out

    sn = s[-1]
    if r == sn:
        out.append(("i", q(r, s, n + 1)))
    for sp in range(1, r):
        head = [min(x, sp) for x in s[:-1]]
        out.append(("ii", q(sp + 1, head + [min(sp - 1, sn)], 1)))
    if n >= 2:
        for sp in range(sn + 2, s[-2] + 1):
            head = [min(x, sp) for x in s[:-1]]
            out.append(("iii", q(sp, head + [sn], n)))
        out.append(("iv", q(1, [1] * (n - 1) + [0], n)))
    for sp in range(1, min(sn, r - 1) + 1):
        head = [min(x, sp + 1) for x in s[:-1]]
        out.append(("iv", q(sp + 1, head + [sp], n + 1)))
    return out


@dataclass(frozen=True)
class FiltrationLevel:
    jump: JumpValue
    kind: tuple[str, int, FieldLabel]
    """(family tag, k-index, label the jump is evaluated at)."""
    fixed_field: FieldLabel
    group_order: int


@dataclass(frozen=True)
class Filtration:
    """Levels ``(t_j, G_{t_j})``; level 0 is ``G_0 = G`` and has jump 0.

    The group ``G_u`` for ``t_{j-1} < u <= t_j`` is the one of level ``j``, and
    ``G_u`` is trivial beyond the last jump.
    """

    levels: tuple[FiltrationLevel, ...]
    spec: RadicalSpec | None = None

    @property
    def jumps(self) -> list[JumpValue]:
        return [lv.jump for lv in self.levels]

    @property
    def orders(self) -> list[int]:
        return [lv.group_order for lv in self.levels]

    @property
    def nonzero_jumps(self) -> list[JumpValue]:
        return [lv.jump for lv in self.levels[1:]]

    @property
    def g0_order(self) -> int:
        return self.levels[0].group_order

    @property
    def g1_order(self) -> int:
        return self.levels[1].group_order if len(self.levels) > 1 else 1

    def fixed_fields(self) -> list[FieldLabel]:
        return [lv.fixed_field for lv in self.levels]


def _family_tags(spec: RadicalSpec) -> dict[tuple[FieldLabel, int], str]:
    tags = {}
    for tag, q in enumerate_jump_families(spec):
        key = (q.label, q.k)
        if key in tags:
            raise ConsistencyError(f"family query {q} emitted twice")
        tags[key] = tag
    return tags


def build_filtration(spec: RadicalSpec, path: Path | str = Path.AUTO) -> Filtration:
    validate(spec)
    p = spec.p.value
    top = label_degree(spec.label, p)
    steps = tower_steps(spec)
    tags = _family_tags(spec)
    if set(tags) != {(st.upper, st.k) for st in steps}:
        raise ConsistencyError(f"family enumeration and tower walk disagree for {spec}")
    base = FieldLabel.base(spec.n)
    levels = [FiltrationLevel(0, ("base", 1, base), base, top)]
    for st in steps:
        value = jump(st.query(p, spec.vclass), path)
        order = top // label_degree(st.lower, p)
        kind = (tags[(st.upper, st.k)], st.k, st.upper)
        levels.append(FiltrationLevel(value, kind, st.lower, order))
    levels = _merge_ties(levels, spec)
    f = Filtration(tuple(levels), replace(spec, tame=TameFactor()))
    if not spec.tame.is_trivial:
        f = scale_tame(f, spec.tame)
    return f


def _merge_ties(levels: list[FiltrationLevel], spec: RadicalSpec) -> list[FiltrationLevel]:
    """Enforce the ordering of tower jumps.

    For odd p consecutive tower steps have strictly increasing jumps, and a tie
    is an error.  For p = 2 the first cyclotomic jump ``p - 1 = 1`` can meet a
    level-one radical jump; two consecutive steps then share one jump and
    ``G_t`` is the larger group, so the later level is absorbed.
    """
    out = levels[:2]
    for lv in levels[2:]:
        prev = out[-1]
        if lv.jump > prev.jump:
            out.append(lv)
        elif lv.jump == prev.jump and spec.p.is_two:
            continue
        else:
            raise OrderingError(f"jumps {prev.jump} then {lv.jump} are not strictly increasing for {spec}")
    return out


def scale_tame(f: Filtration, t: TameFactor) -> Filtration:
    """Adjoin prime-to-p radicals: wild jumps scale by ``D``, ``G_0`` grows by ``D``."""
    d = tame_multiplier(t)
    if d == 1:
        return f
    levels = list(f.levels)
    head = levels[0]
    levels[0] = replace(head, group_order=head.group_order * d)
    levels[1:] = [replace(lv, jump=lv.jump * d) for lv in levels[1:]]
    spec = f.spec
    if spec is not None:
        merged = TameFactor(spec.tame.primes + t.primes)
        spec = replace(spec, tame=merged)
    return Filtration(tuple(levels), spec)
