from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Y
from p4hermite.errors import DomainError, NearPole
from p4hermite.exact_algebra import ExactPoly, ExactRationalFn, gen_hermite
from p4hermite.painleve4 import (FamilyParams, build_solution, check_lemma_switch,
                                 check_psi_representations, check_sum_rule, eval_solution,
                                 lemma_prefactor, orthogonal_poly_at, p4_residual,
                                 p4_residual_rational_ops, scaled_eval, tau_hermite_prefactor)

y = ExactPoly([0, 1])


def sympy_w(family, m, n):
    """w from sympy polynomials built out of the package's H_{m,n} coefficients."""
    def H(a, b):
        return sum(sp.Integer(int(c)) * Y ** k for k, c in enumerate(gen_hermite(a, b).coeffs))
    if family == "I":
        return sp.diff(sp.log(H(m + 1, n) / H(m, n)), Y)
    if family == "II":
        return -sp.diff(sp.log(H(m, n + 1) / H(m, n)), Y)
    return -2 * Y + sp.diff(sp.log(H(m, n + 1) / H(m + 1, n)), Y)


# ---------------------------------------------------------------- parameters

@pytest.mark.parametrize("family,m,n,alpha,beta", [
    ("I", 0, 1, 2, -2), ("I", 2, 3, 8, -18), ("II", 1, 0, -2, -2), ("II", 3, 2, -8, -18),
    ("III", 0, 0, 0, -2), ("III", 2, 1, -1, -32),
])
def test_family_parameters(family, m, n, alpha, beta):
    p = FamilyParams.of(family, m, n)
    assert (p.alpha, p.beta) == (alpha, beta)


@pytest.mark.parametrize("family,m,n", [("I", 0, 0), ("I", -1, 2), ("II", 0, 3), ("III", -1, 0), ("IV", 1, 1)])
def test_family_ranges_rejected(family, m, n):
    with pytest.raises(DomainError):
        build_solution(family, m, n)


# ---------------------------------------------------------------- construction and evaluation

def test_build_solution_structure():
    w = build_solution("I", 1, 1)
    assert (w.top, w.bottom, w.sign, w.affine_slope) == (ExactPoly([-2, 0, 4]), ExactPoly([0, 2]), 1, 0)
    w3 = build_solution("III", 0, 0)
    assert w3.affine_slope == -2 and w3.top == w3.bottom == ExactPoly([1])
    assert build_solution("II", 1, 0).as_rational() == ExactRationalFn(ExactPoly([-1]), y)


def test_eval_examples():
    assert eval_solution(build_solution("III", 0, 0), 1) == -2
    assert eval_solution(build_solution("II", 1, 0), 2) == mpmath.mpf(-0.5)
    # 8y/(4y^2-2) - 1/y at y = 1
    assert eval_solution(build_solution("I", 1, 1), 1) == 3


def test_near_pole_detected():
    with pytest.raises(NearPole):
        eval_solution(build_solution("I", 1, 1), 0)
    with pytest.raises(NearPole), mpmath.workprec(192):
        eval_solution(build_solution("I", 1, 1), mpmath.sqrt(2) / 2)


def test_scaled_eval_definition_and_domain():
    w = build_solution("I", 1, 1)
    assert scaled_eval(w, 1) == 3
    w = build_solution("I", 4, 2)
    with mpmath.workprec(192):
        x = mpmath.mpf("1.7")
        assert abs(scaled_eval(w, x) - eval_solution(w, 2 * x) / mpmath.sqrt(2)) < mpmath.mpf(10) ** -50
    with pytest.raises(DomainError):
        scaled_eval(build_solution("II", 1, 0), 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["I", "II", "III"]), st.integers(1, 4), st.integers(1, 4),
       st.fractions(min_value=-3, max_value=3, max_denominator=20))
def test_eval_matches_reduced_rational_form(family, m, n, t):
    w = build_solution(family, m, n)
    f = w.as_rational()
    if f.denominator(t) == 0 or w.top(t) == 0 or w.bottom(t) == 0:
        return
    exact = f(t)
    with mpmath.workprec(192):
        val = eval_solution(w, mpmath.mpf(t.numerator) / t.denominator)
        assert abs(val - mpmath.mpf(exact.numerator) / exact.denominator) <= mpmath.mpf(10) ** -45 * (1 + abs(val))


@pytest.mark.parametrize("family,m,n", [("I", 2, 1), ("II", 1, 2), ("III", 1, 1)])
def test_log_derivative_form_matches_sympy(family, m, n):
    w = build_solution(family, m, n)
    ref = sp.cancel(sympy_w(family, m, n))
    num, den = sp.fraction(ref)
    ours = w.as_rational()
    t = Fraction(3, 7)
    assert sp.Rational(ours(t).numerator, ours(t).denominator) == (num / den).subs(Y, sp.Rational(3, 7))


# ---------------------------------------------------------------- exact identities

@pytest.mark.parametrize("family,m,n", [("I", 1, 1), ("II", 1, 0), ("III", 2, 1), ("I", 0, 3), ("II", 3, 3)])
def test_p4_residual_vanishes(family, m, n):
    assert p4_residual(build_solution(family, m, n)).is_zero()


@pytest.mark.parametrize("family,m,n", [("I", 1, 1), ("II", 2, 1), ("III", 1, 2)])
def test_residual_routes_agree(family, m, n):
    w = build_solution(family, m, n)
    assert p4_residual_rational_ops(w).is_zero() and p4_residual(w).is_zero()


def test_residual_detects_wrong_parameters():
    # family I formula paired with family II parameters must leave a nonzero residual
    w = build_solution("I", 2, 1)
    wrong = type(w)("II", 2, 1, w.top, w.bottom, w.affine_slope, w.sign)
    assert not p4_residual(wrong).is_zero()


def test_sum_rule_exact():
    assert all(check_sum_rule(m, n) for m in range(1, 6) for n in range(1, 6))


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (5, 3), (4, 4)])
def test_lemma_switch(m, n):
    chk = check_lemma_switch(m, n)
    assert chk and chk.moment_identity and chk.hermite_identity
    assert chk.difference.is_zero()


def test_lemma_hand_chain_for_one_one():
    # tau_{1,1} = H_1 = 2y, prefactor 1! * 2^0, T_{1,1} = mu_0^{(1)} = 2y
    chk = check_lemma_switch(1, 1)
    assert chk.tau == ExactPoly([0, 2]) == chk.moment_side
    assert lemma_prefactor(1, 1) == 1


def test_prefactor_signs():
    # (-1)^{ceil((n-1)/2)} * prod_{k<n} k! 2^k
    assert [tau_hermite_prefactor(n) for n in range(1, 6)] == [1, -2, -16, 768, 294912]


def test_lemma_domain():
    with pytest.raises(DomainError):
        check_lemma_switch(1, 3)


@pytest.mark.parametrize("m,n", [(1, 1), (3, 2), (4, 1), (4, 4)])
def test_psi_representations(m, n):
    assert check_psi_representations(m, n)


def test_orthogonality_solver_small_case():
    # psi_1^{(1)} is monic of degree 1; its value at 0 is -T_{2,1}/T_{1,1} = -(H_2/2!)/H_1 = -1/2 at y=1
    c, h = orthogonal_poly_at(1, 1, Fraction(1))
    assert c == [Fraction(-1, 2), 1]
    assert h != 0


def test_poles_are_the_hermite_zeros():
    for m in range(0, 4):
        for n in range(1, 4):
            top, bottom = gen_hermite(m + 1, n), gen_hermite(m, n)
            assert top.gcd(bottom).degree == 0
            den = build_solution("I", m, n).as_rational().denominator
            expect = top * bottom
            assert den == expect * (1 / expect.leading())


@pytest.mark.parametrize("m,n", [(1, 1), (2, 3), (4, 2)])
def test_sum_of_three_families(m, n):
    total = (build_solution("I", m, n).as_rational() + build_solution("II", m, n).as_rational()
             + build_solution("III", m, n).as_rational() + ExactRationalFn(ExactPoly([0, 2])))
    assert total.is_zero()
