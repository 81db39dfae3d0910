import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riemann_holder.local import (
    TableRow,
    TwistedPhi,
    asymptotic_coefficient,
    asymptotic_term,
    asymptotic_terms,
    classify_re_behavior,
    expansion_constants,
    increment_model,
    is_differentiable_f,
    is_differentiable_phi,
    remainder,
    sqrt_minus,
    sqrt_plus,
    twisted_phi_eval,
)
from riemann_holder.numtheory import gauss_sum_general_brute
from riemann_holder.phi import phi_increment_contour, phi_series


def contour(p, q, h, tol=1e-11):
    return complex(phi_increment_contour(Fraction(p, q), h, tol).value.value)


def test_constants_one_fifth():
    e = expansion_constants(1, 5)
    assert abs(e.c_plus.value.real - 1 / (2 * math.sqrt(5))) < 1e-15
    assert abs(e.c_minus.value.real + 1 / (2 * math.sqrt(5))) < 1e-15
    want = cmath.exp(1j * math.pi / 4) * math.sqrt(5) / (5 * math.sqrt(2))
    assert abs(complex(e.c_plus.value) - want) < 1e-15
    assert e.table_row is TableRow.Q1


def test_constants_one_half_vanish():
    e = expansion_constants(1, 2)
    assert complex(e.c_plus.value) == 0 and complex(e.c_minus.value) == 0
    assert e.differentiable_phi and is_differentiable_phi(1, 2)


def test_constants_one_quarter():
    e = expansion_constants(1, 4)
    assert abs(e.c_minus.value.real + 0.5) < 1e-15
    assert abs(e.c_plus.value.real) < 1e-15


@settings(max_examples=100)
@given(st.integers(1, 300), st.integers(-1000, 1000))
def test_c_minus_is_i_c_plus(q, p):
    if math.gcd(p, q) != 1:
        return
    e = expansion_constants(p, q)
    assert abs(complex(e.c_plus.value) * 1j - complex(e.c_minus.value)) < 1e-14


def test_half_powers():
    assert sqrt_plus(4.0) == 2.0 and sqrt_plus(-4.0) == 0.0
    assert sqrt_minus(-4.0) == 2.0 and sqrt_minus(4.0) == 0.0


@pytest.mark.parametrize("p,q,row,left,right", [
    (1, 5, TableRow.Q1, -1 / (2 * math.sqrt(5)), 1 / (2 * math.sqrt(5))),
    (1, 3, TableRow.Q3, -1 / (2 * math.sqrt(3)), -1 / (2 * math.sqrt(3))),
    (1, 2, TableRow.Q2, 0.0, 0.0),
    (1, 4, TableRow.Q0_P1, -0.5, 0.0),
    (3, 4, TableRow.Q0_P3, 0.0, 0.5),
])
def test_classify_re_behavior(p, q, row, left, right):
    b = classify_re_behavior(p, q)
    assert b.row is row
    assert abs(b.left - left) < 1e-15 and abs(b.right - right) < 1e-15


@settings(max_examples=100)
@given(st.integers(1, 300), st.integers(1, 1000))
def test_table_matches_constants(q, p):
    if math.gcd(p, q) != 1:
        return
    e = expansion_constants(p, q)
    b = classify_re_behavior(p, q)
    assert abs(e.re_coeff_left - b.left) < 1e-14
    assert abs(e.re_coeff_right - b.right) < 1e-14


@pytest.mark.parametrize("p,q,want", [(1, 3, True), (1, 2, False), (3, 5, True), (2, 3, False)])
def test_is_differentiable_f(p, q, want):
    assert is_differentiable_f(p, q) is want


def test_twisted_q1_is_phi():
    for x in (Fraction(0), Fraction(1, 7), Fraction(5, 11)):
        t = twisted_phi_eval(TwistedPhi(1, 1, 0), x, 1e-7)
        s = phi_series(x, 0.0, 1e-7)
        assert abs(complex(t.value) - complex(s.value)) <= t.err + s.err


def test_twisted_against_brute_coefficients():
    q, p, k, x = 6, 5, 1, Fraction(3, 13)
    n = 300
    oracle = sum(
        complex(gauss_sum_general_brute(q, p, m).value) / (2j * math.pi * m * m) ** (k + 1)
        * cmath.exp(2j * math.pi * float(m * m * x % 1))
        for m in range(1, n + 1)
    )
    v = twisted_phi_eval(TwistedPhi(q, p, k), x, n_terms=n)
    assert abs(complex(v.value) - oracle) < 1e-12


@pytest.mark.parametrize("q,p,k", [(3, 1, 0), (4, 3, 1), (10, 3, 0), (7, 2, 2)])
def test_twisted_sup_bound_and_period(q, p, k):
    t = TwistedPhi(q, p, k)
    rng = np.random.default_rng(3)
    bound = t.sup_bound()
    for x in rng.random(100):
        v = twisted_phi_eval(t, Fraction(x), 1e-4)
        assert abs(complex(v.value)) <= bound + v.err
    a = twisted_phi_eval(t, Fraction(2, 9), 1e-8)
    b = twisted_phi_eval(t, Fraction(11, 9), 1e-8)
    assert complex(a.value) == complex(b.value)


def test_asymptotic_coefficients():
    assert [asymptotic_coefficient(k) for k in range(3)] == [4, -24, 240]


def test_k0_first_term_is_remainder_first_term():
    h = Fraction(1, 2**10)
    a = asymptotic_terms(1, 3, h, 0, 1e-10)
    t0 = asymptotic_term(1, 3, h, 0, 1e-10 / 2)
    assert complex(a.terms[0].value) == complex(t0.value)


def test_telescoping_k2():
    for s in (1, -1):
        h = Fraction(s, 2**12)
        r = remainder(1, 3, h, 1e-11)
        tot = asymptotic_terms(1, 3, h, 2, 1e-11).total
        assert abs(complex(r.value) - complex(tot.value)) <= r.err + tot.err


@pytest.mark.parametrize("s", [1, -1])
def test_reconstruction_one_third(s):
    h = Fraction(s, 2**10)
    model = increment_model(1, 3, h, 1e-10)
    assert abs(complex(model.value) - contour(1, 3, h)) <= 1e-8


def test_q2_increment_is_pure_remainder():
    for s in (1, -1):
        h = Fraction(s, 2**9)
        r = remainder(1, 2, h, 1e-10)
        assert abs(contour(1, 2, h) + float(h) / 2 - complex(r.value)) <= 1e-8


def test_remainder_scaling():
    for k in (8, 12, 16, 20, 24):
        for s in (1, -1):
            h = Fraction(s, 2**k)
            r = remainder(1, 3, h, 1e-3 * float(abs(h)) ** 1.5)
            assert abs(complex(r.value)) <= 10 * 3**1.5 * float(abs(h)) ** 1.5


def test_remainder_domain():
    with pytest.raises(ValueError):
        remainder(1, 3, Fraction(1, 5))
    with pytest.raises(ValueError):
        asymptotic_terms(1, 3, Fraction(1, 100), -1)
    with pytest.raises(ValueError):
        expansion_constants(2, 4)
