from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from eulertop.polynomial import (
    DegreeOverflowError,
    PolynomialParseError,
    Poly3,
    SqrtPoly,
    as_fraction,
    descartes_bound,
    poly_from_roots,
    positive_roots,
)

coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exponent = st.tuples(*(st.integers(0, 3),) * 3)
polys = st.dictionaries(exponent, coef, max_size=6).map(Poly3)


def to_sympy(p: Poly3):
    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    return sum((sympy.Rational(c.numerator, c.denominator) * x1 ** i * x2 ** j * x3 ** k
                for (i, j, k), c in p.terms.items()), sympy.Integer(0))


def test_as_fraction_uses_shortest_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(2) == 2


@settings(max_examples=80, deadline=None)
@given(polys, polys)
def test_arithmetic_matches_sympy(p, q):
    assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    assert sympy.expand(to_sympy(p - q) - to_sympy(p) + to_sympy(q)) == 0
    x1 = sympy.Symbol("x1")
    assert sympy.expand(to_sympy(p.diff(0)) - sympy.diff(to_sympy(p), x1)) == 0


@settings(max_examples=80, deadline=None)
@given(polys)
def test_text_round_trip(p):
    assert Poly3.parse(p.to_str()) == p
    assert Poly3.parse(p.to_str(("x1", "x2", "z")), ("x1", "x2", "z")) == p


def test_parse_forms():
    p = Poly3.parse("3/2*x1^2*x3 - x2 + 0.25")
    assert p.coeff(2, 0, 1) == Fraction(3, 2) and p.coeff(0, 1, 0) == -1 and p.coeff(0, 0, 0) == Fraction(1, 4)
    assert Poly3.parse("2 x1 x2^2") == Poly3.parse("2*x1*x2^2")
    assert Poly3.parse("0").is_zero()
    with pytest.raises(PolynomialParseError):
        Poly3.parse("x4 + 1")
    with pytest.raises(PolynomialParseError):
        Poly3.parse("x1^^2")


def test_degree_overflow():
    with pytest.raises(DegreeOverflowError):
        Poly3.var(0) ** 70


def test_substitution_and_sphere_reduction():
    x1, x2, x3 = Poly3.variables()
    p = x3 ** 4 + x1 * x3 ** 2
    q = p.reduce_mod_sphere(Fraction(4))
    assert q.degree_in((2,)) == 0
    pt = (Fraction(1, 3), Fraction(1, 2), None)
    z2 = 4 - pt[0] ** 2 - pt[1] ** 2
    assert q.eval((pt[0], pt[1], Fraction(0))) == z2 ** 2 + pt[0] * z2
    assert p.substitute(2, Fraction(2)) == Poly3.constant(16) + x1.scale(4)


def test_exact_and_vector_evaluation_agree():
    p = Poly3.parse("x1^3 - 2/3*x1*x2*x3 + 5")
    pt = (Fraction(1, 2), Fraction(-3, 7), Fraction(2))
    exact = p.eval(pt)
    assert isinstance(exact, Fraction)
    assert float(exact) == pytest.approx(p.eval(tuple(float(v) for v in pt)), rel=1e-15)
    arr = p.eval_array(np.array([0.5, 1.0]), np.array([-3 / 7, 0.0]), 2.0)
    assert arr[0] == pytest.approx(float(exact))


def test_homogeneity():
    assert Poly3.parse("x1^2*x3 + x2^3").is_homogeneous()
    assert not Poly3.parse("x1^2 + x2").is_homogeneous()
    assert Poly3.parse("x1^2 + x3").is_homogeneous((1, 1, 2))


def test_sqrt_poly_parity():
    m = SqrtPoly((1.0, 0.0, -2.0))
    assert m.parity == "even"
    assert m.at_h(0.25) == pytest.approx(m(0.5))
    with pytest.raises(ValueError):
        SqrtPoly((1.0, 1.0), parity="odd")


def test_descartes():
    assert descartes_bound([1, -3, 2]) == 2
    assert descartes_bound([1, 1, 1]) == 0


@pytest.mark.parametrize("roots", [[Fraction(1, 4)], [Fraction(1, 5), Fraction(2, 5), Fraction(3, 5)],
                                   [Fraction(1, 10), Fraction(1, 9), Fraction(7, 2), Fraction(4)]])
def test_positive_roots_recovers_planted(roots):
    coeffs = poly_from_roots(roots)  # polynomial in h
    m = SqrtPoly(tuple(float(c) if k % 2 == 0 else 0.0
                       for k, c in enumerate(x for c in coeffs for x in (c, 0))))
    rep = positive_roots(m)
    assert len(rep) == len(roots)
    np.testing.assert_allclose(sorted(rep.values), [float(r) for r in roots], rtol=1e-10)
    assert all(r.simple for r in rep)


def test_double_root_flagged():
    # (h - 1)^2 in h, embedded in s
    m = SqrtPoly((1.0, 0.0, -2.0, 0.0, 1.0))
    rep = positive_roots(m)
    assert len(rep) >= 1 and not any(r.simple for r in rep)
