import pytest

from ramfiltre.core import (
    DomainError,
    FieldLabel,
    Prime,
    RadicalSpec,
    TameFactor,
    VClass,
    label_degree,
    reduce_label,
    shift_index,
    tame_multiplier,
    validate,
)


@pytest.mark.parametrize("bad", [0, 1, 4, 9, -3])
def test_prime_rejects_composites(bad):
    with pytest.raises(DomainError):
        Prime(bad)


def test_prime_two_flag():
    assert Prime(2).is_two
    assert not Prime(3).is_two


@pytest.mark.parametrize("text,expected", [("div", VClass.DIVISIBLE), ("nondiv", VClass.NONDIVISIBLE)])
def test_vclass_parse(text, expected):
    assert VClass.parse(text) is expected
    assert VClass.parse(expected) is expected


def test_vclass_parse_unknown():
    with pytest.raises(DomainError):
        VClass.parse("sometimes")


def test_tame_parse_and_multiplier():
    t = TameFactor.parse("5:1:2,7:1")
    assert t.primes == ((5, (1, 2)), (7, (1,)))
    assert tame_multiplier(t) == 875
    assert str(t) == "5:1:2,7:1"
    assert TameFactor.parse("").is_trivial
    with pytest.raises(DomainError):
        TameFactor.parse("5")
    with pytest.raises(DomainError):
        TameFactor.parse("x:1")


def test_label_degree():
    assert label_degree(FieldLabel(2, (1,)), 3) == 2 * 9
    assert label_degree(FieldLabel.base(3), 5) == 1
    with pytest.raises(DomainError):
        label_degree(FieldLabel(0, (1,)), 3)


def test_shift_index():
    lab = FieldLabel(3, (1, 2))
    assert shift_index(lab, 1) == FieldLabel(2, (1, 2))
    assert shift_index(lab, 3) == FieldLabel(3, (1, 1))
    with pytest.raises(DomainError):
        shift_index(FieldLabel(1, (1,)), 1)
    with pytest.raises(DomainError):
        shift_index(FieldLabel(2, (0, 1)), 2)
    with pytest.raises(DomainError):
        shift_index(lab, 4)


def test_reduce_label_drops_zeros_and_switches_class():
    lab, vc = reduce_label(FieldLabel(3, (0, 2, 0)), VClass.NONDIVISIBLE)
    assert lab == FieldLabel(3, (2,))
    assert vc is VClass.DIVISIBLE
    lab, vc = reduce_label(FieldLabel(3, (0, 2)), VClass.NONDIVISIBLE)
    assert lab == FieldLabel(3, (2,))
    assert vc is VClass.NONDIVISIBLE


@pytest.mark.parametrize(
    "args,fragment",
    [
        ((3, 2, (1, 3), "div"), "r < max(s)"),
        ((3, 4, (2, 1), "div"), "not sorted"),
        ((3, 4, (3, 1, 2), "nondiv"), "not sorted"),
        ((2, 2, (1,), "div"), "p=2"),
    ],
)
def test_validate_rejects(args, fragment):
    with pytest.raises(DomainError, match=fragment.replace("(", r"\(").replace(")", r"\)")):
        validate(RadicalSpec.make(*args))


def test_validate_accepts_unsorted_tail_for_nondivisible():
    # the last radical is special and may be smaller than the others
    validate(RadicalSpec.make(3, 4, (1, 2, 1), "nondiv"))
    validate(RadicalSpec.make(2, 2, (1,), "div", p2_asserted=True))


def test_validate_tame_prime_equal_to_p():
    with pytest.raises(DomainError):
        validate(RadicalSpec.make(5, 2, (1,), "div", TameFactor.parse("5:1")))


def test_spec_degree_includes_tame_part():
    spec = RadicalSpec.make(3, 2, (1,), "div", TameFactor.parse("5:1"))
    assert spec.degree() == 18 * 5
    assert spec.D == 5
