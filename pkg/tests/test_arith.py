from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelekit import GF, QQ, Poly, Rat
from adelekit.poly import factor, pgcd

F5 = GF(5)
coeffs = st.lists(st.integers(-7, 7), max_size=6)


def P(cs, f=F5):
    return Poly(f, cs)


@given(coeffs, coeffs.filter(lambda c: any(x % 5 for x in c)))
def test_divmod_reconstructs(a, b):
    A, B = P(a), P(b)
    if not B:
        return
    q, r = divmod(A, B)
    assert q * B + r == A
    assert r.degree < B.degree or not r


@given(coeffs, coeffs, coeffs)
def test_ring_axioms(a, b, c):
    A, B, C = P(a), P(b), P(c)
    assert A * (B + C) == A * B + A * C
    assert (A - B) + B == A
    assert A * B == B * A


@given(st.lists(st.fractions(max_denominator=5).map(lambda q: Fraction(q).limit_denominator(5)), max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_rat_normalized_over_q(num, den):
    d = Poly(QQ, den)
    if not d:
        return
    r = Rat(Poly(QQ, num), d)
    assert r.den.lc == 1
    assert pgcd(r.num, r.den).degree == 0


@settings(max_examples=50)
@given(coeffs, coeffs)
def test_rat_field_ops(a, b):
    A, B = P(a), P(b)
    if not A or not B:
        return
    x = Rat(A, B)
    assert x * x.inverse() == 1
    assert x - x == 0
    assert (x + 1) * B == A + B


def test_parse_roundtrip():
    for s in ["t^2+4*t+1", "3*t", "t", "2"]:
        assert str(Poly.parse(F5, s)) == s
    assert str(Poly.parse(QQ, "t^2-1/2*t+3")) == "t^2-1/2*t+3"


def test_factor_monic_irreducible():
    t = Poly.t(F5)
    fs = factor((t * t + 2) * (t + 1) ** 2)
    assert [(str(p), m) for p, m in fs] == [("t+1", 2), ("t^2+2", 1)]


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        GF(6)
