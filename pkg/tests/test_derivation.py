import math

import numpy as np
import pytest

from swisscheese.derivation import (
    D,
    DerivationCheckRecord,
    PreconditionError,
    cauchy_deflection_check,
    cauchy_split_check,
    cyclicity_check,
    fubini_check,
    inputs_digest,
    l1_unboundedness_demo,
    leibniz_check,
    monomial_checks,
    morris_bound_check,
    oracle_agreement_check,
    restriction_bound_check,
)
from swisscheese.geometry import SwissCheese
from swisscheese.rational import RationalFunction as RF, add, random_member, scale

TWO_PI_I = 2j * math.pi
ONE = RF.constant(1)
Z = RF.monomial(1)


def test_D_examples():
    assert D(ONE, RF.from_parts([1, 2], [(0.1, 1)])) == 0
    assert D(Z, RF.monomial(-1)) == pytest.approx(TWO_PI_I, abs=1e-13)
    assert D(RF.monomial(-1), Z) == pytest.approx(-TWO_PI_I, abs=1e-13)
    for n in range(1, 9):
        assert abs(D(RF.monomial(n), RF.monomial(-n)) - TWO_PI_I * n) <= 1e-10


def test_oracle_agreement(default_cheese):
    for seed in range(10):
        f = random_member(default_cheese, 6, 3, 0.02, seed)
        g = random_member(default_cheese, 6, 3, 0.02, seed + 100)
        rec = oracle_agreement_check(f, g)
        assert rec.passed, rec


def test_cyclicity_examples(default_cheese):
    rec = cyclicity_check(Z, RF.monomial(-1))
    assert rec.passed and rec.defect < 1e-13
    f = random_member(default_cheese, 5, 3, 0.02, 3)
    same = cyclicity_check(f, f)
    assert same.passed
    assert cyclicity_check(f, ONE).detail["constant_g"]
    assert cyclicity_check(f, ONE).passed


def test_leibniz_examples(default_cheese):
    assert leibniz_check(ONE, ONE, ONE).defect == 0
    rec = leibniz_check(Z, Z, RF.monomial(-2))
    # D(z^2, z^-2) = 4 pi i, split as D(z, z^-1) twice
    assert rec.lhs == pytest.approx(2 * TWO_PI_I, abs=1e-12)
    assert rec.passed
    fs = [random_member(default_cheese, 6, 3, 0.02, s) for s in range(9)]
    for i in range(3):
        assert leibniz_check(*fs[3 * i:3 * i + 3]).passed


def test_bilinearity(default_cheese):
    f1 = random_member(default_cheese, 5, 2, 0.02, 21)
    f2 = random_member(default_cheese, 5, 2, 0.02, 22)
    g = random_member(default_cheese, 5, 2, 0.02, 23)
    a = 0.4 - 2j
    lhs = D(add(scale(f1, a), f2), g)
    rhs = a * D(f1, g) + D(f2, g)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_pair_bound_examples(default_cheese):
    assert morris_bound_check(ONE, ONE, default_cheese).lhs == 0
    p = RF.polynomial([0, 0, 1])
    q = RF.polynomial([0.5, 0, 0, 0.5j])
    rec = morris_bound_check(p, q, default_cheese)
    assert rec.passed and rec.lhs < 1e-13
    assert rec.detail["constant_bound_holds"]


def test_pair_bound_nonvacuous(default_cheese):
    d = default_cheese.discs[0]
    f = RF.polynomial([0, 1])
    g = RF.from_parts([1], [(d.center, 1)])
    rec = morris_bound_check(f, g, default_cheese)
    assert rec.lhs == pytest.approx(2 * math.pi, rel=1e-12)
    assert rec.passed
    assert rec.rhs > rec.lhs


def test_cauchy_split_polynomial(default_cheese):
    rec = cauchy_split_check(RF.polynomial([1, -2j, 0.5, 0.25, 1]), default_cheese)
    assert rec.passed
    assert rec.detail["h2_max"] <= 1e-11


def test_cauchy_split_inside_pole(default_cheese):
    d = default_cheese.discs[4]
    f = RF.from_parts([1], [(d.center, 1)])
    rec = cauchy_split_check(f, default_cheese)
    assert rec.passed
    # f is analytic outside the disc, so the outer circle sees nothing and
    # the deleted circle carries the whole derivative
    assert rec.detail["h1_max"] < 1e-12
    assert rec.detail["h2_max"] == pytest.approx(rec.lhs, rel=1e-9)


def test_cauchy_split_precondition(default_cheese):
    with pytest.raises(PreconditionError):
        cauchy_split_check(RF.from_parts([1], [(0.0, 1)]), default_cheese)
    with pytest.raises(PreconditionError):
        cauchy_split_check(RF.from_parts([1], [(1.25, 1)]), default_cheese, rho=1.25)
    with pytest.raises(ValueError):
        cauchy_split_check(Z, default_cheese, rho=0.9)


def test_fubini_examples(default_cheese):
    rec = fubini_check(ONE, ONE, default_cheese)
    assert rec.passed and abs(rec.lhs) < 1e-14
    rec = fubini_check(RF.monomial(2), RF.monomial(-1), default_cheese)
    assert rec.passed
    # D(z^2, 1/z) = int_T 2 dz = 0
    assert abs(rec.lhs) < 1e-13
    rec = fubini_check(RF.monomial(2), RF.monomial(-2), default_cheese)
    assert rec.passed
    # D(z^2, z^-2) = int_T 2/z dz = 4 pi i
    assert rec.lhs == pytest.approx(2 * TWO_PI_I, abs=1e-10)


def test_fubini_random(default_cheese):
    for s in range(3):
        f = random_member(default_cheese, 5, 3, 0.02, s, outside=(2.0, 3.5))
        g = random_member(default_cheese, 5, 3, 0.02, s + 50, outside=(2.0, 3.5))
        assert fubini_check(f, g, default_cheese).passed


def test_deflection_examples(default_cheese):
    for g in (ONE, RF.polynomial([1, 2, 3j])):
        rec = cauchy_deflection_check(g, 1.5, default_cheese)
        assert rec.passed and abs(rec.lhs) < 1e-13


def test_deflection_inside_pole(default_cheese):
    d = default_cheese.discs[2]
    g = RF.from_parts([1], [(d.center, 1)])
    w = 1.5j
    rec = cauchy_deflection_check(g, w, default_cheese)
    # residue of g(z)/(w-z)^2 at the pole
    assert rec.lhs == pytest.approx(TWO_PI_I / (w - d.center) ** 2, rel=1e-10)
    assert rec.passed
    assert rec.defect <= 1e-9


def test_deflection_precondition(default_cheese):
    with pytest.raises(PreconditionError):
        cauchy_deflection_check(ONE, 0.5, default_cheese)
    with pytest.raises(PreconditionError):
        cauchy_deflection_check(RF.from_parts([1], [(0.0, 1)]), 1.5, default_cheese)


def test_restriction_examples():
    rec = restriction_bound_check(Z, ONE)
    assert rec.passed and rec.lhs < 1e-15
    assert rec.detail["bound_fprime_g"] == pytest.approx(2 * math.pi)
    for n in (1, 4, 8):
        rec = restriction_bound_check(RF.monomial(n), RF.monomial(-n))
        assert rec.passed
        assert rec.detail["bound_fprime_g"] == pytest.approx(2 * math.pi * n, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_monomial_checks(n):
    pairing, equality = monomial_checks(n)
    assert pairing.check_name == "monomial_pairing" and pairing.passed
    assert equality.check_name == "monomial_equality" and equality.passed
    assert equality.defect <= 1e-9


def test_l1_demo(default_cheese):
    rows = l1_unboundedness_demo(8, cheese=default_cheese)
    assert [r.n for r in rows] == list(range(1, 9))
    assert all(r.ok for r in rows)
    assert rows[4].l1_norm == pytest.approx(10 * math.pi, abs=1e-9)
    assert all(a.l1_norm < b.l1_norm for a, b in zip(rows, rows[1:]))
    with pytest.raises(ValueError):
        l1_unboundedness_demo(0)


def test_record_round_trip(default_cheese):
    rec = oracle_agreement_check(Z, RF.monomial(-1))
    d = rec.to_dict()
    assert set(d) == {"check", "lhs", "rhs", "defect", "tolerance", "pass", "inputs", "detail"}
    assert d["lhs"] == {"re": rec.lhs.real, "im": rec.lhs.imag}
    assert DerivationCheckRecord.from_dict(d) == rec


def test_inputs_digest_stable():
    assert inputs_digest(Z, 1.5j) == inputs_digest(RF.monomial(1), 1.5j)
    assert inputs_digest(Z) != inputs_digest(RF.monomial(2))
    assert len(inputs_digest(Z)) == 16


def test_empty_cheese_pair_bound_is_zero():
    empty = SwissCheese(1.0)
    rec = morris_bound_check(RF.polynomial([1, 1]), RF.polynomial([0, 0, 1]), empty)
    assert rec.rhs == 0 and rec.passed
