from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelekit import GF, P1, QQ, Comparison, Divisor, Poly, PrecisionError, SpecZ, expand
from adelekit.local import digits_wrt, working_precision

X = P1(GF(5))
t = X.t
small = st.lists(st.integers(0, 4), min_size=1, max_size=4)


def test_geometric_series():
    s = expand(1 / X.rat(1 - t), X.point("t"), 6, X)
    assert s.val == 0 and s.prec == 6
    assert all(c == 1 for c in s.coeffs)


def test_contract_examples():
    s = expand(X.rat(t), X.inf, 2, X)
    assert (s.val, s.prec, s.coeffs) == (-1, 2, (1, 0, 0))
    z = expand(0, X.point("t"), 7, X)
    assert z.is_zero() and z.prec == 7
    assert X.valuation(X.rat(t**2) / X.rat(t + 1), X.point("t")) == 2
    assert X.valuation(X.rat(1), X.inf) == 0
    assert str(z.valuation()) == ">=7 (precision-limited)"


def test_expansion_at_infinity():
    s = expand(X.rat(t**2 + t), X.inf, 4, X)
    assert s.val == -2
    assert [s.digit(j) for j in (-2, -1, 0)] == [1, 1, 0]
    with pytest.raises(PrecisionError):
        s.digit(4)


def test_degree_two_point_digits_are_residues():
    x = X.point("t^2+2")
    s = expand(X.rat(t**3), x, 3, X)
    assert s.val == 0
    # t^3 = -2t mod (t^2+2)
    assert str(s.digit(0)) == "3*t"


def test_valuations():
    assert X.valuation(X.rat(t**2) / X.rat(t + 1), X.point("t+1")) == -1
    assert X.valuation(X.rat(t**3), X.inf) == -3
    Z = SpecZ()
    assert Z.valuation(Fraction(50, 3), Z.point(5)) == 2
    assert expand(10, Z.point(5), 3, Z).val == 1


def test_precision_error_when_no_digit_survives():
    with pytest.raises(PrecisionError):
        expand(X.rat(t**5), X.point("t"), 3, X)


def test_inverse_of_zero_series():
    with pytest.raises(PrecisionError):
        expand(0, X.point("t"), 4, X).inverse()


def test_compare_is_indeterminate_not_equal():
    x = X.point("t")
    a = expand(X.rat(1 + t**8), x, 4, X)
    b = expand(1, x, 4, X)
    assert a.compare(b) is Comparison.INDETERMINATE
    assert a.compare(expand(2, x, 4, X)) is Comparison.NOT_EQUAL


@settings(max_examples=60, deadline=None)
@given(small, small, small, small, st.sampled_from(["t", "t+3", "inf", "t^2+2"]))
def test_expand_is_ring_hom(a, b, c, d, pt):
    x = X.point(pt)
    f = X.rat(Poly(X.field, a)) / X.rat(Poly(X.field, b)) if any(b) else X.rat(Poly(X.field, a))
    g = X.rat(Poly(X.field, c)) / X.rat(Poly(X.field, d)) if any(d) else X.rat(Poly(X.field, c))
    N = 8
    ef, eg = expand(f, x, N, X), expand(g, x, N, X)
    assert (ef + eg).compare(expand(f + g, x, N, X)).consistent
    if f and g:
        lo = min(ef.val + eg.val, N)
        prod = expand(f * g, x, max(lo + 1, N + min(ef.val, eg.val, 0)), X)
        assert (ef * eg).compare(prod).consistent


@settings(max_examples=40, deadline=None)
@given(small, st.integers(2, 10))
def test_precision_monotone(a, n):
    f = X.rat(Poly(X.field, a))
    if not f:
        return
    x = X.point("t+1")
    if X.valuation(f, x) >= n:
        with pytest.raises(PrecisionError):
            expand(f, x, n, X)
        return
    hi = expand(f, x, n + 3, X)
    assert hi.truncate(n) == expand(f, x, n, X)


def test_to_global_roundtrip():
    x = X.point("t+2")
    f = X.rat(t**3 + 1) / X.rat(t + 2)
    s = expand(f, x, 6, X)
    assert expand(s.to_global(), x, 6, X) == s


def test_json_roundtrip():
    for pt in ["t", "t^2+2", "inf"]:
        s = expand(X.rat(t**2 + 3) / X.rat(t), X.point(pt), 5, X)
        assert type(s).from_json(X, s.to_json()) == s


def test_digits_with_other_uniformizer():
    x = X.point("t")
    s = expand(X.rat(t + t**2), x, 4, X)
    assert digits_wrt(s, 0, 3) == [0, 1, 1]
    # in u = t + t^2 the same element is u itself
    assert digits_wrt(s, 0, 3, uniformizer=X.rat(t + t**2)) == [0, 1, 0]


def test_divisor_parse_and_degree():
    D = Divisor.parse(X, "2*[t]-[inf]+[t^2+2]")
    assert D.degree() == 3
    assert D(X.point("t")) == 2


def test_rationals():
    Q = P1(QQ)
    s = expand(Q.rat(1) / Q.rat(Q.t - 2), Q.point("t"), 3, Q)
    assert [s.digit(j) for j in range(3)] == [Fraction(-1, 2), Fraction(-1, 4), Fraction(-1, 8)]


def test_env_precision(monkeypatch):
    monkeypatch.setenv("ADELEKIT_PRECISION", "9")
    assert working_precision() == 9
