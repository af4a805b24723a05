from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Y, sympy_coeffs, tau_sympy, wronskian_hermite
from p4hermite.errors import DomainError, InexactDivision
from p4hermite.exact_algebra import (ExactPoly, ExactRationalFn, check_specializations, check_symmetry,
                                     gen_hermite, hankel_det, hermite, moment_det, moment_poly,
                                     poly_derivative, poly_eval, poly_eval_with_derivative, tau_det)
from p4hermite.painleve4 import tau_hermite_prefactor

y = ExactPoly([0, 1])
small_ints = st.integers(min_value=-50, max_value=50)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=30)
polys = st.lists(fracs, min_size=1, max_size=7).map(ExactPoly)


def as_sympy(p):
    return sum(sp.Rational(c.numerator, c.denominator) * Y ** k for k, c in enumerate(p.coeffs))


# ---------------------------------------------------------------- Hermite

def test_hermite_low_orders():
    assert hermite(0) == ExactPoly([1])
    assert hermite(1) == ExactPoly([0, 2])
    assert hermite(2) == ExactPoly([-2, 0, 4])


@pytest.mark.parametrize("m", range(12))
def test_hermite_matches_sympy(m):
    assert list(hermite(m).coeffs) == sympy_coeffs(sp.hermite(m, Y))
    assert hermite(m).leading() == 2 ** m


# ---------------------------------------------------------------- generalized Hermite

def test_seeds_and_small_cases():
    assert gen_hermite(0, 0) == gen_hermite(1, 0) == gen_hermite(0, 1) == ExactPoly([1])
    assert gen_hermite(1, 1) == ExactPoly([0, 2])
    assert gen_hermite(3, 1) == hermite(3)
    assert gen_hermite(2, 2) == ExactPoly([12, 0, 0, 0, 16])


@pytest.mark.parametrize("m", range(6))
def test_degenerate_rows_are_one(m):
    assert gen_hermite(m, 0) == ExactPoly([1])
    assert gen_hermite(0, m) == ExactPoly([1])


def test_negative_index_rejected():
    with pytest.raises(DomainError):
        gen_hermite(-1, 2)


def test_both_recurrences_hold_up_to_ten():
    for m in range(1, 11):
        for n in range(1, 11):
            H = gen_hermite(m, n)
            d1, d2 = H.derivative(), H.derivative().derivative()
            bracket = H * d2 - d1 * d1
            assert gen_hermite(m + 1, n) * gen_hermite(m - 1, n) * (2 * m) == bracket + H * H * (2 * m)
            assert gen_hermite(m, n + 1) * gen_hermite(m, n - 1) * (2 * n) == H * H * (2 * n) - bracket


def test_integrality_degree_and_parity():
    for m in range(11):
        for n in range(11):
            H = gen_hermite(m, n)
            assert H.is_integral()
            assert H.degree == m * n
            assert H.parity() == (m * n) % 2 or m * n == 0


def test_symmetry_and_specializations():
    assert all(check_symmetry(m, n) for m in range(11) for n in range(11))
    assert all(check_specializations(k) for k in range(16))


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (2, 3), (4, 2), (1, 4)])
def test_hankel_route_against_sympy_determinant(m, n):
    # tau_{m,n} (Berkowitz determinant in sympy) divided by the closed-form prefactor
    tau = sympy_coeffs(tau_sympy(m, n))
    pref = tau_hermite_prefactor(n)
    assert [c / pref for c in tau] == list(gen_hermite(m, n).coeffs)
    assert list(tau_det(m, n).coeffs) == tau


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_wronskian_proportionality(m, n):
    ratio = sp.cancel(wronskian_hermite(m, n) / as_sympy(gen_hermite(m, n)))
    assert ratio.is_number and ratio != 0


# ---------------------------------------------------------------- ExactPoly

def test_derivative_examples():
    assert poly_derivative(ExactPoly([0, 2])) == ExactPoly([2])
    assert poly_derivative(ExactPoly([-2, 0, 4])) == ExactPoly([0, 8])
    assert poly_derivative(ExactPoly([7])).is_zero()


def test_zero_polynomial_and_leading_coefficient():
    z = ExactPoly([0, 0, 0])
    assert z.is_zero() and z.degree == 0
    assert ExactPoly([1, 2, 0, 0]).degree == 1


@settings(max_examples=60, deadline=None)
@given(polys, polys, fracs)
def test_ring_operations_commute_with_evaluation(p, q, t):
    assert (p + q)(t) == p(t) + q(t)
    assert (p - q)(t) == p(t) - q(t)
    assert (p * q)(t) == p(t) * q(t)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_divmod_reconstructs(p, q):
    if q.is_zero():
        return
    quo, rem = divmod(p, q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_gcd_divides_and_contains_common_factor(a, b, c):
    if c.is_zero() or (a.is_zero() and b.is_zero()):
        return
    g = (a * c).gcd(b * c)
    assert divmod(a * c, g)[1].is_zero()
    assert divmod(b * c, g)[1].is_zero()
    assert divmod(g, c)[1].is_zero() or c.degree == 0


def test_exact_div_raises_on_remainder():
    with pytest.raises(InexactDivision):
        ExactPoly([1, 0, 1]).exact_div(ExactPoly([1, 1]))


@settings(max_examples=50, deadline=None)
@given(st.lists(small_ints, min_size=1, max_size=10), fracs, fracs)
def test_poly_eval_matches_exact_rational_value(coeffs, re, im):
    p = ExactPoly(coeffs)
    # exact value at the Gaussian rational re + i im
    acc_re, acc_im = Fraction(0), Fraction(0)
    for c in reversed(p.coeffs):
        acc_re, acc_im = acc_re * re - acc_im * im + c, acc_re * im + acc_im * re
    with mpmath.workprec(192):
        v = poly_eval(p, mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                                    mpmath.mpf(im.numerator) / im.denominator))
        exact = mpmath.mpc(mpmath.mpf(acc_re.numerator) / acc_re.denominator,
                           mpmath.mpf(acc_im.numerator) / acc_im.denominator)
        scale = sum(abs(c) for c in p.coeffs) * max(1, abs(re) + abs(im)) ** p.degree
        assert abs(v - exact) <= 2 * max(1, p.degree) * mpmath.mpf(2) ** -180 * (1 + float(scale))


def test_poly_eval_examples():
    assert poly_eval(ExactPoly([-2, 0, 4]), 1) == 2
    assert poly_eval(gen_hermite(1, 1), 1j) == mpmath.mpc(0, 2)
    H55 = gen_hermite(5, 5)
    assert poly_eval(H55, 0) == H55.coeff(0)
    val, der = poly_eval_with_derivative(ExactPoly([-2, 0, 4]), 2)
    assert (val, der) == (14, 16)


def test_at_iy_splits_real_and_imaginary_parts():
    p = ExactPoly([1, 2, 3, 4])
    re, im = p.at_iy()
    for t in (Fraction(1, 3), Fraction(-2)):
        z = complex(0, t)
        v = sum(float(c) * z ** k for k, c in enumerate(p.coeffs))
        assert abs(v - complex(re(t), im(t))) < 1e-12


# ---------------------------------------------------------------- rational functions

def test_rational_function_is_reduced():
    f = ExactRationalFn((y - 1) * (y + 2), (y - 1) * (y + 3))
    assert f.numerator == y + 2
    assert f.denominator == y + 3
    assert f.denominator.leading() == 1


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys, fracs)
def test_rational_arithmetic_matches_values(a, b, c, t):
    if b.is_zero() or c.is_zero() or b(t) == 0 or c(t) == 0:
        return
    f = ExactRationalFn(a, b)
    g = ExactRationalFn(a + c, c)
    assert (f + g)(t) == f(t) + g(t)
    assert (f * g)(t) == f(t) * g(t)
    assert (f - f).is_zero()


def test_log_derivative():
    assert ExactRationalFn.log_derivative(y * y + 1) == ExactRationalFn(ExactPoly([0, 2]), y * y + 1)
    assert ExactRationalFn.log_derivative(gen_hermite(2, 1)) == ExactRationalFn(ExactPoly([0, 8]),
                                                                                 ExactPoly([-2, 0, 4]))


def test_rational_function_rejects_zero_denominator():
    with pytest.raises((ZeroDivisionError, ValueError, ArithmeticError)):
        ExactRationalFn(y, ExactPoly([0]))


# ---------------------------------------------------------------- determinants and moments

def test_hankel_det_sizes():
    assert hankel_det([]) == ExactPoly([1])
    assert hankel_det([[y]]) == y
    assert hankel_det([[y, ExactPoly([1])], [ExactPoly([1]), y]]) == y * y - ExactPoly([1])


def test_hankel_det_needs_pivoting():
    one = ExactPoly([1])
    zero = ExactPoly([0])
    assert hankel_det([[zero, one], [one, zero]]) == ExactPoly([-1])


def test_moment_poly_definition_and_domain():
    assert moment_poly(1, 0) == ExactPoly([0, 2])
    assert moment_poly(0, 2) == ExactPoly([-1, 0, 2])
    with pytest.raises(DomainError):
        moment_poly(-3, 1)
    with pytest.raises(DomainError):
        moment_poly(1, -1)


def test_moment_det_small():
    assert moment_det(1, 1) == ExactPoly([0, 2])
    assert moment_det(3, 0) == ExactPoly([1])
