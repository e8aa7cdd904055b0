import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polykay.errors import UsageError
from polykay.polyring import (
    Polynomial,
    RationalFunctionOfN,
    emit,
    filter_y,
    make_monomial,
    moment,
    parse_json,
    power_sum,
    rational_fn,
    substitute_y_powers,
)


def rf_int(v):
    return RationalFunctionOfN.from_int(v)


# ---------------------------------------------------------------------------
# rational functions of n


def test_rf_partial_fraction_identity():
    # 1/n + 1/(n(n-1)) collapses to 1/(n-1), stored as n/(n)_2
    total = rational_fn((1,), 1, 1) + rational_fn((1,), 1, 2)
    assert total == rational_fn((0, 1), 1, 2)
    assert total.evaluate(5) == Fraction(1, 4)


def test_rf_cancels_falling_factors():
    # (n^2 - n) / (n)_2 is exactly 1
    assert rational_fn((0, -1, 1), 1, 2).is_one()


def test_rf_add_sub_mul():
    a = rational_fn((1,), 2)  # 1/2
    b = rational_fn((0, 1), 1, 2)  # n/(n(n-1)) = 1/(n-1)
    assert (a + b).evaluate(3) == Fraction(1, 2) + Fraction(1, 2)
    assert (a - a).is_zero()
    assert (a * b).evaluate(3) == Fraction(1, 4)
    assert (-b).evaluate(3) == Fraction(-1, 2)


def test_rf_product_of_two_falling_denominators_rejected():
    a = rational_fn((1,), 1, 1)
    with pytest.raises(ValueError):
        a * a


def test_rf_zero_and_fraction_roundtrip():
    assert rational_fn((0,), 7, 3).is_zero()
    f = RationalFunctionOfN.from_fraction(Fraction(-6, 8))
    assert f.as_fraction() == Fraction(-3, 4)
    assert f.den_scalar == 4


def test_rf_evaluate_refuses_vanishing_denominator():
    with pytest.raises(ZeroDivisionError):
        rational_fn((1,), 1, 3).evaluate(2)


@given(
    st.lists(st.integers(-9, 9), min_size=0, max_size=3),
    st.lists(st.integers(-9, 9), min_size=0, max_size=3),
    st.lists(st.integers(-9, 9), min_size=0, max_size=3),
    st.integers(0, 3),
    st.integers(0, 3),
    st.integers(0, 3),
)
@settings(max_examples=150, deadline=None)
def test_rf_addition_ring_axioms(a, b, c, fa, fb, fc):
    x = rational_fn(tuple(a), 1, fa)
    y = rational_fn(tuple(b), 1, fb)
    z = rational_fn(tuple(c), 1, fc)
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert (x - x).is_zero()
    # distributivity of a scalar multiplier over addition
    s = rf_int(3)
    assert s * (x + y) == s * x + s * y


# ---------------------------------------------------------------------------
# polynomials


def y_poly(*coeffs):
    """Polynomial sum coeffs[k] * y^(k+1)."""
    y = filter_y()
    return Polynomial.from_terms(
        (make_monomial([(y, k + 1)]), rf_int(c)) for k, c in enumerate(coeffs) if c
    )


def test_poly_add_cancels_to_zero():
    p = y_poly(1)
    assert (p + p.scale(-1)).is_zero()


def test_poly_distributes():
    # (y - y^2) * y = y^2 - y^3
    assert y_poly(1, -1) * y_poly(1) == y_poly(0, 1, -1)


def naive_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Quadratic-time reference multiplier over expanded term lists."""
    terms = []
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            exps: dict = {}
            for sym, e in list(m1) + list(m2):
                exps[sym] = exps.get(sym, 0) + e
            mono = tuple(sorted(exps.items(), key=lambda se: se[0].key()))
            terms.append((mono, c1 * c2))
    return Polynomial.from_terms(terms)


def test_product_matches_naive_reference():
    p2 = y_poly(1, -1)
    p1 = y_poly(1)
    lhs = p2 * p1 * p1
    assert lhs == naive_mul(naive_mul(p2, p1), p1)


@st.composite
def small_polys(draw):
    syms = [power_sum((1,)), power_sum((2,)), filter_y()]
    n_terms = draw(st.integers(0, 4))
    terms = []
    for _ in range(n_terms):
        mono = make_monomial(
            (sym, draw(st.integers(1, 2)))
            for sym in draw(st.sets(st.sampled_from(syms), max_size=2))
        )
        coeff = RationalFunctionOfN.from_fraction(
            Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 4)))
        )
        terms.append((mono, coeff))
    return Polynomial.from_terms(terms)


@given(small_polys(), small_polys(), small_polys())
@settings(max_examples=100, deadline=None)
def test_poly_ring_axioms(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


def test_mixed_dimension_operands_rejected():
    p = Polynomial.from_symbol(power_sum((1,)))
    q = Polynomial.from_symbol(power_sum((1, 0)))
    with pytest.raises(UsageError):
        p + q
    with pytest.raises(UsageError):
        p * q


# ---------------------------------------------------------------------------
# y substitution


def test_substitute_single_y():
    rule = {1: rational_fn((1,), 1, 1)}
    out = substitute_y_powers(y_poly(1), rule)
    assert out == Polynomial.from_terms([((), rational_fn((1,), 1, 1))])


def test_substitute_k2_coefficient_path():
    # y - y^2 with the standard constants gives 1/(n-1)
    rule = {1: rational_fn((1,), 1, 1), 2: rational_fn((-1,), 1, 2)}
    out = substitute_y_powers(y_poly(1, -1), rule)
    assert out == Polynomial.from_terms([((), rational_fn((0, 1), 1, 2))])


def test_substitute_leaves_degree_zero_terms():
    p = Polynomial.from_symbol(power_sum((2,)), coeff=5) + y_poly(1)
    out = substitute_y_powers(p, {1: rf_int(7)})
    assert out == Polynomial.from_symbol(power_sum((2,)), coeff=5) + Polynomial.constant(7)


def test_substitute_missing_rule_is_an_error():
    with pytest.raises(ValueError):
        substitute_y_powers(y_poly(0, 1), {1: rf_int(1)})


@given(small_polys(), small_polys())
@settings(max_examples=60, deadline=None)
def test_substitution_is_linear(p, q):
    rule = {m: rational_fn(((-1) ** (m - 1),), 1, m) for m in range(1, 9)}
    lhs = substitute_y_powers(p + q, rule)
    rhs = substitute_y_powers(p, rule) + substitute_y_powers(q, rule)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# emission


def k2_body():
    return Polynomial.from_terms(
        [
            (make_monomial([(power_sum((2,)), 1)]), rational_fn((0, 1), 1, 2)),
            (make_monomial([(power_sum((1,)), 2)]), rational_fn((-1,), 1, 2)),
        ]
    )


def test_emit_text_k2_shape():
    assert emit(k2_body()) == "(n*S[2] - S[1]^2) / (n*(n-1))"


def test_emit_zero():
    assert emit(Polynomial.zero()) == "0"


def test_emit_moment_symbols_use_a_for_univariate():
    p = Polynomial.from_symbol(moment((2,))) - Polynomial.from_symbol(moment((1,)), exp=2)
    assert emit(p) == "a[2] - a[1]^2"
    q = Polynomial.from_symbol(moment((1, 1)))
    assert emit(q) == "m[1,1]"


def test_emit_latex_k2():
    assert emit(k2_body(), "latex") == r"\frac{n S_{2} - S_{1}^{2}}{n (n-1)}"


def test_polynomial_json_roundtrip():
    p = k2_body() + Polynomial.constant(Fraction(3, 7))
    data = json.loads(emit(p, "json"))
    assert data["kind"] == "polynomial"
    assert parse_json(data) == p


def test_unknown_format_rejected():
    with pytest.raises(UsageError):
        emit(k2_body(), "yaml")
