import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lovasz_abstain import (
    Label,
    PolymatroidCollection,
    SetFunction,
    check_condition1,
    make_concave_card,
    make_jaccard,
    make_modular,
    make_sqrt_card,
    make_zero_one,
    mean_value,
    random_polymatroid,
    validate_polymatroid,
)

from conftest import symmetric_builtins


def brute_force_submodular(f, strict=False):
    """All-pairs oracle for the submodular inequality, independent of the
    exchange-based validator."""
    n = 1 << f.k
    ok = True
    strict_ok = True
    for s in range(n):
        for t in range(n):
            lhs = f.values[s] + f.values[t]
            rhs = f.values[s | t] + f.values[s & t]
            if lhs < rhs - 1e-9:
                ok = False
            incomparable = (s & ~t) and (t & ~s)
            if incomparable and lhs <= rhs + 1e-9:
                strict_ok = False
    return (ok, strict_ok) if strict else ok


def brute_force_increasing(f, strict=False):
    n = 1 << f.k
    ok = True
    strict_ok = True
    for s in range(n):
        for t in range(n):
            if s & t:
                continue
            if f.values[s | t] < f.values[s] - 1e-9:
                ok = False
            if t and f.values[s | t] <= f.values[s] + 1e-9:
                strict_ok = False
    return (ok, strict_ok) if strict else ok


def test_eval_examples():
    zo = make_zero_one(2)
    assert zo.eval(0b00) == 0.0
    assert zo.eval(0b01) == 1.0
    assert make_modular([2, 3]).eval(0b11) == 5.0


def test_eval_range_error():
    with pytest.raises(ValueError):
        make_zero_one(2).eval(4)


def test_modular_examples():
    assert make_modular([1, 1]).eval(0b11) == 2.0
    assert make_modular([2, 3]).eval(0b10) == 3.0
    assert make_modular([0, 5]).eval(0b01) == 0.0
    with pytest.raises(ValueError):
        make_modular([1, -0.5])


def test_zero_one_table():
    zo = make_zero_one(3)
    assert zo.eval(0) == 0.0
    assert zo.eval(0b010) == 1.0
    assert zo.eval(0b111) == 1.0


def test_jaccard_values():
    jac = make_jaccard(3)
    y = Label.from_string("++-")
    # |S|=1 committed miss against a 2-element foreground: 1 / |{3} u {1,2}|
    assert jac.for_label(y.bits).eval(0b100) == pytest.approx(1 / 3)
    for bits in range(8):
        assert jac.for_label(bits).eval(0) == 0.0
    jac2 = make_jaccard(2)
    assert jac2.for_label(Label.from_string("--").bits).eval(0b11) == pytest.approx(1.0)


def test_jaccard_full_is_one_and_condition1():
    for k in (1, 2, 3, 4):
        jac = make_jaccard(k)
        for y in range(1 << k):
            assert jac.for_label(y).full() == pytest.approx(1.0)
        assert check_condition1(jac).passed
    with pytest.raises(ValueError):
        make_jaccard(13)


def test_builtins_validate_up_to_k6(rng):
    for k in range(1, 7):
        for f in (make_zero_one(k), make_sqrt_card(k),
                  make_modular(rng.uniform(0, 2, k))):
            assert validate_polymatroid(f).valid


def test_concave_card():
    f = make_sqrt_card(4)
    assert f.eval(0b1111) == pytest.approx(2.0)
    assert f.eval(0) == 0.0
    assert f.eval(0b0101) == pytest.approx(math.sqrt(2), abs=1e-12)
    with pytest.raises(ValueError):
        make_concave_card(3, lambda c: c * c)  # convex
    with pytest.raises(ValueError):
        make_concave_card(3, lambda c: -c)  # decreasing
    with pytest.raises(ValueError):
        make_concave_card(3, lambda c: c + 1)  # not normalized


def test_validate_modular():
    rep = validate_polymatroid(make_modular([1, 2]), strict=True)
    assert rep.valid and rep.modular
    assert rep.strictly_submodular is False


def test_validate_zero_one():
    rep = validate_polymatroid(make_zero_one(2), strict=True)
    assert rep.valid and not rep.modular
    # k=2 has a single incomparable pair and it is strict
    assert rep.strictly_submodular is True
    assert rep.strictly_increasing is False
    rep3 = validate_polymatroid(make_zero_one(3), strict=True)
    assert rep3.valid and not rep3.modular
    assert rep3.strictly_submodular is False  # {1,2} vs {2,3} ties


def test_validate_sqrt():
    rep = validate_polymatroid(make_sqrt_card(3), strict=True)
    assert rep.valid and rep.strictly_submodular and rep.strictly_increasing


def test_validator_matches_all_pairs_oracle(rng):
    for k in (2, 3, 4):
        for _ in range(10):
            f = random_polymatroid(k, rng)
            rep = validate_polymatroid(f, strict=True)
            sub, strict_sub = brute_force_submodular(f, strict=True)
            inc, strict_inc = brute_force_increasing(f, strict=True)
            assert rep.submodular == sub
            assert rep.increasing == inc
            assert rep.strictly_submodular == strict_sub
            assert rep.strictly_increasing == strict_inc


def test_validator_catches_non_submodular():
    # indicator of containing {1,2}: supermodular at the corner
    vals = np.zeros(8)
    vals[0b011] = vals[0b111] = 1.0
    vals[0b011] = 1.0
    bad = SetFunction.from_values(3, [0, 0, 0, 1, 0, 1, 1, 1])
    rep = validate_polymatroid(bad)
    assert not rep.submodular and not brute_force_submodular(bad)
    assert rep.violations


def test_zero_singletons_reported():
    f = SetFunction.from_values(2, [0, 0, 1, 1])
    assert validate_polymatroid(f).zero_singletons == [1]


def test_condition1_modular_fails():
    rep = check_condition1(make_modular([1, 1, 1]))
    assert not rep.passed
    assert rep.reason == "strictness fails"


def test_condition1_perfect_recall_fails():
    # f_y(S) = 1 iff the +1 set of y is inside S: degenerate, not normalized at
    # the all-minus label, and rejected by the condition check.
    k = 2
    per_label = {}
    for y in range(1 << k):
        vals = np.array([1.0 if (s & y) == y else 0.0 for s in range(1 << k)])
        per_label[y] = SetFunction(k, vals)
    fc = PolymatroidCollection.from_per_label(k, per_label)
    assert not check_condition1(fc).passed


def test_mean_value():
    assert mean_value(make_zero_one(2)) == pytest.approx(0.75)
    w = [0.5, 2.0, 3.25]
    assert mean_value(make_modular(w)) == pytest.approx(sum(w) / 2)
    assert mean_value(SetFunction.from_values(2, [0, 0, 0, 0])) == 0.0


def test_mean_value_lemma(rng):
    """mean >= f([k])/2 always, equality exactly in the modular case."""
    for k in (2, 3, 4, 5):
        for name, f in symmetric_builtins(k).items():
            gap = mean_value(f) - f.full() / 2
            if validate_polymatroid(f).modular:
                assert abs(gap) < 1e-9, name
            else:
                assert gap > 1e-9, name
        for _ in range(5):
            f = random_polymatroid(k, rng)
            gap = mean_value(f) - f.full() / 2
            if validate_polymatroid(f).modular:
                assert abs(gap) < 1e-9
            else:
                assert gap > 1e-9


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=6))
def test_modular_always_validates_modular(w):
    rep = validate_polymatroid(make_modular(w))
    assert rep.valid and rep.modular


def test_random_polymatroid_valid(rng):
    for k in (1, 2, 3, 4, 5, 6):
        rep = validate_polymatroid(random_polymatroid(k, rng))
        assert rep.valid


def test_label_round_trip():
    for s in ("+", "-", "+-+", "---", "++++"):
        assert str(Label.from_string(s)) == s
    y = Label.from_string("+-+")
    assert list(y.signs()) == [1.0, -1.0, 1.0]
    assert Label.from_signs(y.signs()).bits == y.bits
    assert Label(3, 0).signs().tolist() == [-1.0, -1.0, -1.0]


def test_setfn_construction_errors():
    with pytest.raises(ValueError):
        SetFunction.from_values(2, [0.5, 0, 0, 0])  # not normalized
    with pytest.raises(ValueError):
        SetFunction.from_values(2, [0, -1, 0, 0])  # negative
    with pytest.raises(ValueError):
        SetFunction.from_values(2, [0, 1, 1])  # wrong length
    # escape hatch for deliberately degenerate tables
    f = SetFunction(2, np.array([1.0, 1, 1, 1]))
    assert f.eval(0) == 1.0
