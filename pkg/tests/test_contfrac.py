import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from riemann_holder.contfrac import (
    CertifiedReal,
    alpha_from_tau,
    cf_expand,
    tau_estimate,
    tau_sequence,
    tau_test_number,
)

GOLDEN = CertifiedReal.quadratic([0], [1])
SILVER = CertifiedReal.quadratic([0], [2])


def pairs(exp):
    return [(c.p, c.q) for c in exp.convergents]


def test_golden_decimal_convergents():
    x = CertifiedReal.decimal("0.618033988749894848")
    assert pairs(cf_expand(x, 6))[:6] == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]


def test_rational_terminates():
    exp = cf_expand(CertifiedReal.rational(3, 4), 10)
    assert pairs(exp) == [(1, 1), (3, 4)]
    assert exp.terminated


def test_silver_convergents():
    assert pairs(cf_expand(SILVER, 4)) == [(1, 2), (2, 5), (5, 12), (12, 29)]


def test_parse_forms():
    assert CertifiedReal.parse("rat:6/8").lo == Fraction(3, 4)
    assert CertifiedReal.parse("quad:0,(2)").terms(4) == [0, 2, 2, 2]
    lo, hi = CertifiedReal.parse("dec:0.25").enclosure()
    assert lo < Fraction(1, 4) < hi
    with pytest.raises(ValueError):
        CertifiedReal.parse("foo:1")


def test_tau_examples():
    cs = cf_expand(GOLDEN, 10).convergents
    by_q = {c.q: c for c in cs}
    g = (mpmath.sqrt(5) - 1) / 2
    for q, p, want in ((8, 5, 2.389), (21, 13, 2.264)):
        oracle = float(-mpmath.log(abs(g - mpmath.mpf(p) / q)) / mpmath.log(q))
        assert abs(by_q[q].tau - oracle) < 1e-9
        assert abs(by_q[q].tau - want) < 1e-3


def test_tau_undefined_at_q1():
    cs = cf_expand(GOLDEN, 5).convergents
    assert cs[0].q == 1 and cs[0].tau is None
    assert tau_sequence(GOLDEN, cs)[0] is None


def test_tau_above_two():
    for c in cf_expand(GOLDEN, 30).convergents[1:]:
        assert c.tau > 2


@pytest.mark.parametrize("x", [GOLDEN, SILVER])
def test_tau_window(x):
    est = tau_estimate(x, 25)
    assert 2.0 <= est.tau_hat <= 2.1
    assert est.exact_tau == 2.0


def test_tau_estimate_rejects_rational():
    with pytest.raises(ValueError):
        tau_estimate(CertifiedReal.rational(1, 3), 10)


@pytest.mark.parametrize("tau,want", [(2, 0.75), (math.inf, 0.5), (4, 0.625)])
def test_alpha_from_tau(tau, want):
    assert alpha_from_tau(tau) == want


def test_alpha_from_tau_domain():
    with pytest.raises(ValueError):
        alpha_from_tau(1.5)


@given(st.floats(2, 1e6), st.floats(2, 1e6))
def test_alpha_from_tau_decreasing(a, b):
    if a < b:
        assert alpha_from_tau(a) > alpha_from_tau(b)


def test_tau4_number_scales():
    exp = cf_expand(tau_test_number(), 40)
    big = [c for c in exp.convergents if c.tau is not None and c.tau >= 3 and c.q % 4 != 2]
    assert 10 in [c.q for c in exp.convergents]
    assert [c.q for c in big][:2] == [10**4, 10**16]


def test_decimal_truncates_when_uncertain():
    exp = cf_expand(CertifiedReal.decimal("0.618"), 50)
    assert exp.truncated and len(exp.convergents) < 10


@settings(max_examples=80)
@given(st.integers(1, 10**12), st.integers(1, 10**12))
def test_determinant_identity_rationals(p, q):
    exp = cf_expand(CertifiedReal.rational(p, q), 200)
    ps = exp.all_pairs
    for n in range(len(ps) - 1):
        (p0, q0), (p1, q1) = ps[n], ps[n + 1]
        assert p1 * q0 - p0 * q1 == (-1) ** n
        assert not (q0 % 4 == 2 and q1 % 4 == 2)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=4))
def test_quadratic_convergents_properties(period):
    x = CertifiedReal.quadratic([0], period)
    cs = cf_expand(x, 24).convergents
    lo, hi = x.enclosure(400)
    for a, b in zip(cs, cs[1:]):
        assert a.side != b.side
        assert abs(lo - b.value) < abs(lo - a.value)
        if a.tau is not None:
            lq = math.log(a.q)
            assert -(a.tau + a.tau_err - 1) * lq - 1e-12 <= -math.log(b.q)
            assert -math.log(b.q) <= math.log(2) - (a.tau - a.tau_err - 1) * lq + 1e-12
