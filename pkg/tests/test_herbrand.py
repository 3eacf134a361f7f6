from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ramfiltre.core import DomainError, FieldLabel, RadicalSpec, TameFactor
from ramfiltre.filtration import Filtration, FiltrationLevel, build_filtration
from ramfiltre.herbrand import (
    PiecewiseLinear,
    different_valuation,
    phi_from_filtration,
    psi,
    quotient_filtration,
    restrict_filtration,
    step_differents,
    tower_different_check,
    upper_jumps,
)

F = Fraction


def small():
    return build_filtration(RadicalSpec.make(3, 2, [1], "div"))


def test_phi_of_small_example():
    phi = phi_from_filtration(small())
    assert phi.slopes == (F(1, 2), F(1, 6), F(1, 18))
    assert phi(1) == F(1, 2)
    assert phi(4) == F(1)
    assert phi(10) == F(1) + F(6, 18)
    assert phi(F(-1, 2)) == F(-1, 2)


def test_upper_jumps_and_different():
    f = small()
    assert upper_jumps(f) == [0, F(1, 2), 1]
    # (18-1) + 1*(9-1) + 3*(3-1)
    assert different_valuation(f) == 31


def test_hypothetical_filtration_phi():
    # a C_p x C_p style chain: G_0 = G_1 of order 9, then order 3 up to 2
    base = FieldLabel(0, ())
    levels = (
        FiltrationLevel(0, ("base", 1, base), base, 9),
        FiltrationLevel(1, ("x", 1, base), base, 9),
        FiltrationLevel(2, ("x", 1, base), base, 3),
    )
    phi = phi_from_filtration(Filtration(levels))
    assert phi(1) == 1
    assert phi(2) == F(4, 3)
    assert phi(5) == F(4, 3) + F(3, 9)


def test_inverse_and_compose():
    phi = phi_from_filtration(small())
    ident = phi.inverse().compose(phi)
    assert ident.slopes == (F(1),)
    for u in (F(0), F(1, 3), F(1), F(7, 2), F(4), F(100)):
        assert psi(phi, phi(u)) == u


def test_domain():
    phi = phi_from_filtration(small())
    with pytest.raises(DomainError):
        phi(F(-3, 2))
    with pytest.raises(DomainError):
        PiecewiseLinear(((F(1), F(1)),), (F(1),))
    with pytest.raises(DomainError):
        PiecewiseLinear(((F(0), F(0)),), (F(0),))


def test_restriction_and_quotient_shapes():
    f = build_filtration(RadicalSpec.make(3, 4, [1, 2, 3], "div"))
    mid = FieldLabel(2, (1, 1, 1))
    sub = restrict_filtration(f, mid)
    assert sub.g0_order == 3**5
    assert sub.jumps[1:] == [109, 838, 3025, 9586]
    quo = quotient_filtration(f, mid)
    assert quo.orders[0] == 2 * 3**4
    assert tower_different_check(f, mid)


def test_quotient_matches_fresh_computation():
    f = build_filtration(RadicalSpec.make(3, 4, [1, 2, 3], "nondiv"))
    mid = FieldLabel(2, (1, 2, 1))
    fresh = build_filtration(RadicalSpec.make(3, 2, [1, 2, 1], "nondiv"))
    assert quotient_filtration(f, mid).jumps == fresh.jumps
    assert quotient_filtration(f, mid).orders == fresh.orders


def test_restrict_to_unknown_node():
    with pytest.raises(DomainError):
        restrict_filtration(small(), FieldLabel(2, (0,)))


def test_step_differents_single_jump_formula():
    f = build_filtration(RadicalSpec.make(5, 3, [1, 2], "nondiv"))
    for lhs, d, t, e in step_differents(f):
        assert lhs == e * (d - 1) * (t + 1)


@st.composite
def specs_with_tame(draw):
    p = draw(st.sampled_from((3, 5)))
    vc = draw(st.sampled_from(("div", "nondiv")))
    n = draw(st.integers(1, 3))
    r = draw(st.integers(1, 5))
    s = draw(st.lists(st.integers(1, r), min_size=n, max_size=n))
    s = sorted(s) if vc == "div" else sorted(s[:-1]) + s[-1:]
    tame = draw(st.sampled_from(("", "7:1", "2:1,7:1")))
    return RadicalSpec.make(p, r, s, vc, TameFactor.parse(tame))


@given(specs_with_tame(), st.fractions(min_value=-1, max_value=10**6))
@settings(max_examples=200, deadline=None)
def test_psi_phi_identity(spec, u):
    phi = phi_from_filtration(build_filtration(spec))
    assert psi(phi, phi(u)) == u


@given(specs_with_tame())
@settings(max_examples=60, deadline=None)
def test_tower_formula_everywhere(spec):
    f = build_filtration(spec)
    for lv in f.levels:
        assert tower_different_check(f, lv.fixed_field)


def test_two_level_phi():
    base = FieldLabel(0, ())
    levels = (
        FiltrationLevel(0, ("base", 1, base), base, 6),
        FiltrationLevel(1, ("x", 1, base), base, 3),
    )
    phi = phi_from_filtration(Filtration(levels))
    assert phi(1) == F(1, 2)
    assert phi(2) == F(2, 3)
    assert phi(-1) == -1


def test_single_level_phi_is_scaling():
    base = FieldLabel(0, ())
    f = Filtration((FiltrationLevel(0, ("base", 1, base), base, 4),))
    phi = phi_from_filtration(f)
    assert phi(F(10)) == F(10, 4)
    assert different_valuation(f) == 3
