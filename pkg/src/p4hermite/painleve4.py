"""Rational Painleve-IV solutions built from generalized Hermite polynomials.

Three hierarchies are supported::

    I   : w = d/dy log(H_{m+1,n} / H_{m,n})              alpha = 2m+n+1,    beta = -2n^2
    II  : w = -d/dy log(H_{m,n+1} / H_{m,n})             alpha = -(m+2n+1), beta = -2m^2
    III : w = -2y + d/dy log(H_{m,n+1} / H_{m+1,n})      alpha = n-m,       beta = -2(m+n+1)^2

Solutions are kept in log-derivative form; nothing here multiplies them out into
a single numerator/denominator except the exact identity checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

from .errors import DegenerateDeterminant, DomainError, NearPole
from .exact_algebra import (
    DEFAULT_PREC,
    ExactPoly,
    ExactRationalFn,
    gen_hermite,
    moment_det,
    moment_poly,
    poly_eval_with_derivative,
    tau_det,
)

FAMILIES = ("I", "II", "III")
NEAR_POLE_RTOL = mpmath.mpf("1e-30")


@dataclass(frozen=True)
class FamilyParams:
    family: str
    m: int
    n: int
    alpha: int
    beta: int

    @classmethod
    def of(cls, family: str, m: int, n: int) -> "FamilyParams":
        family = _family(family)
        if family == "I":
            if m < 0 or n < 1:
                raise DomainError(f"family I needs m >= 0, n >= 1 (got m={m}, n={n})")
            return cls(family, m, n, 2 * m + n + 1, -2 * n * n)
        if family == "II":
            if m < 1 or n < 0:
                raise DomainError(f"family II needs m >= 1, n >= 0 (got m={m}, n={n})")
            return cls(family, m, n, -(m + 2 * n + 1), -2 * m * m)
        if m < 0 or n < 0:
            raise DomainError(f"family III needs m, n >= 0 (got m={m}, n={n})")
        return cls(family, m, n, n - m, -2 * (m + n + 1) ** 2)


def _family(family) -> str:
    f = str(family).upper()
    if f not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    return f


@dataclass(frozen=True)
class LogDerivRational:
    """w(y) = affine_slope*y + sign * d/dy log(top/bottom)."""

    family: str
    m: int
    n: int
    top: ExactPoly = field(repr=False)
    bottom: ExactPoly = field(repr=False)
    affine_slope: Fraction
    sign: int

    @property
    def params(self) -> FamilyParams:
        return FamilyParams.of(self.family, self.m, self.n)

    def numerator_denominator(self):
        """(N, D) with w = N/D, D = top*bottom (not reduced)."""
        t, b = self.top, self.bottom
        d = t * b
        n = (t.derivative() * b - t * b.derivative()) * self.sign
        if self.affine_slope:
            n = n + ExactPoly([0, self.affine_slope]) * d
        return n, d

    def as_rational(self) -> ExactRationalFn:
        n, d = self.numerator_denominator()
        return ExactRationalFn(n, d)


def build_solution(family, m: int, n: int) -> LogDerivRational:
    p = FamilyParams.of(family, m, n)
    if p.family == "I":
        return LogDerivRational("I", m, n, gen_hermite(m + 1, n), gen_hermite(m, n), Fraction(0), 1)
    if p.family == "II":
        return LogDerivRational("II", m, n, gen_hermite(m, n + 1), gen_hermite(m, n), Fraction(0), -1)
    return LogDerivRational("III", m, n, gen_hermite(m, n + 1), gen_hermite(m + 1, n), Fraction(-2), 1)


def _coefficient_scale(p: ExactPoly, ay):
    acc = mpmath.mpf(0)
    for v in reversed(p.numerators):
        acc = acc * ay + abs(v)
    return acc / p.denominator


def eval_solution(w: LogDerivRational, y, prec: int | None = None, rtol=None) -> mpmath.mpc:
    """w(y) at ``prec`` bits straight from the log-derivative form."""
    prec = prec or DEFAULT_PREC
    rtol = NEAR_POLE_RTOL if rtol is None else rtol
    with mpmath.workprec(prec):
        y = mpmath.mpc(y)
        ay = abs(y)
        out = w.affine_slope.numerator * y / w.affine_slope.denominator
        for poly, s in ((w.top, 1), (w.bottom, -1)):
            if poly.degree == 0:
                continue
            v, dv = poly_eval_with_derivative(poly, y, prec)
            if abs(v) <= rtol * _coefficient_scale(poly, ay):
                raise NearPole(f"|{'top' if s > 0 else 'bottom'} polynomial| vanishes at y={y}")
            out += s * w.sign * dv / v
        return out


def scaled_eval(w: LogDerivRational, x, prec: int | None = None) -> mpmath.mpc:
    """n^{-1/2} w(m^{1/2} x), the quantity described by the large-(m,n) asymptotics."""
    if w.m < 1 or w.n < 1:
        raise DomainError(f"scaled evaluation needs m, n >= 1 (got m={w.m}, n={w.n})")
    prec = prec or DEFAULT_PREC
    with mpmath.workprec(prec):
        y = mpmath.sqrt(w.m) * mpmath.mpc(x)
        return eval_solution(w, y, prec) / mpmath.sqrt(w.n)


def p4_residual(w: LogDerivRational) -> ExactRationalFn:
    """Exact Painleve-IV residual of ``w`` with the family's (alpha, beta).

    With w = N/D, w' = P/D^2 and P = N'D - ND', the residual
    w'' - w'^2/(2w) - 3w^3/2 - 4yw^2 - 2(y^2-alpha)w - beta/w equals E/(2 N D^3) with

        E = 2N(P'D - 2PD') - P^2 - 3N^4 - 8yN^3 D - 4(y^2-alpha)N^2 D^2 - 2 beta D^4.
    """
    prm = w.params
    N, D = w.numerator_denominator()
    if N.is_zero():
        raise DomainError("w is identically zero; the Painleve-IV residual is undefined")
    y = ExactPoly([0, 1])
    P = N.derivative() * D - N * D.derivative()
    N2 = N * N
    D2 = D * D
    E = (N * (P.derivative() * D - P * D.derivative() * 2) * 2
         - P * P
         - N2 * N2 * 3
         - y * N2 * N * D * 8
         - (y * y - prm.alpha) * N2 * D2 * 4
         - D2 * D2 * (2 * prm.beta))
    return ExactRationalFn(E, N * D2 * D * 2)


def p4_residual_rational_ops(w: LogDerivRational) -> ExactRationalFn:
    """Same residual assembled term by term in ExactRationalFn arithmetic (slow; small m, n)."""
    prm = w.params
    W = w.as_rational()
    W1 = W.derivative()
    W2 = W1.derivative()
    y = ExactRationalFn(ExactPoly([0, 1]))
    return (W2 - W1 * W1 / (W * 2) - W * W * W * Fraction(3, 2) - y * W * W * 4
            - (y * y - prm.alpha) * W * 2 - W.reciprocal() * prm.beta)


def check_sum_rule(m: int, n: int) -> bool:
    """w^(III) + w^(I) + w^(II) + 2y == 0 as rational functions."""
    total = (build_solution("III", m, n).as_rational()
             + build_solution("I", m, n).as_rational()
             + build_solution("II", m, n).as_rational()
             + ExactRationalFn(ExactPoly([0, 2])))
    return total.is_zero()


# ---------------------------------------------------------------------------
# determinant identities
# ---------------------------------------------------------------------------

def tau_hermite_prefactor(n: int) -> int:
    """(-1)^{ceil((n-1)/2)} * prod_{k<n} k! 2^k, relating tau_{m,n} to H_{m,n}."""
    c = 1
    for k in range(n):
        c *= factorial(k) * 2 ** k
    return -c if (n // 2) % 2 else c  # ceil((n-1)/2) == n // 2


def lemma_prefactor(m: int, n: int) -> int:
    c = 1
    for k in range(n):
        c *= factorial(m + k) * 2 ** k
    return c


@dataclass
class LemmaCheck:
    ok: bool
    moment_identity: bool
    hermite_identity: bool
    tau: ExactPoly = field(repr=False)
    moment_side: ExactPoly = field(repr=False)
    hermite_side: ExactPoly = field(repr=False)

    @property
    def difference(self) -> ExactPoly:
        return self.tau - self.moment_side

    def __bool__(self):
        return self.ok


def check_lemma_switch(m: int, n: int) -> LemmaCheck:
    """tau_{m,n} = prod (m+k)! 2^k * T_{m-n+1,n}  and  tau_{m,n} = prefactor * H_{m,n}."""
    if n < 1:
        raise DomainError("check_lemma_switch needs n >= 1")
    if m - n + 1 < 0:
        raise DomainError(f"T_{{{m - n + 1},{n}}} has negative moment index (need m >= n - 1)")
    tau = tau_det(m, n)
    rhs = moment_det(m - n + 1, n) * lemma_prefactor(m, n)
    herm = gen_hermite(m, n) * tau_hermite_prefactor(n)
    a, b = tau == rhs, tau == herm
    return LemmaCheck(a and b, a, b, tau, rhs, herm)


def _same_log_derivative(num_a: ExactPoly, den_a: ExactPoly, num_b: ExactPoly, den_b: ExactPoly, sign=1) -> bool:
    """d/dy log(num_a/den_a) == sign * d/dy log(num_b/den_b), cross-multiplied."""
    la = num_a.derivative() * den_a - num_a * den_a.derivative()
    lb = num_b.derivative() * den_b - num_b * den_b.derivative()
    return la * num_b * den_b == lb * num_a * den_a * sign


def orthogonal_poly_at(m: int, n: int, y: Fraction):
    """Monic psi_n^{(m)}(.; y) and h_n^{(m)}(y) at a rational y, from the moment system.

    Orthogonality against d(nu_m) reads  sum_i c_i mu_{i+j} = 0 (j < n) and
    h = -sum_i c_i mu_{i+n}, since the moments carry a minus sign.
    """
    y = Fraction(y)
    mu = [moment_poly(m, k)(y) for k in range(2 * n + 1)]
    # solve  sum_{i<n} c_i mu_{i+j} = -mu_{n+j},  j = 0..n-1
    A = [[mu[i + j] for i in range(n)] + [-mu[n + j]] for j in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise DegenerateDeterminant(f"moment matrix singular at y={y}")
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    c = [A[i][n] / A[i][i] for i in range(n)] + [Fraction(1)]
    h = -sum(c[i] * mu[i + n] for i in range(n + 1))
    return c, h


@dataclass
class PsiCheck:
    ok: bool
    w1_identity: bool
    w2_identity: bool
    pointwise: bool

    def __bool__(self):
        return self.ok


def check_psi_representations(m: int, n: int, sample_points=(Fraction(1, 3), Fraction(-5, 4), Fraction(2))) -> PsiCheck:
    """Determinant and orthogonal-polynomial forms of w^(I)_{m,n} and w^(II)_{m,n}."""
    if n < 1 or m < n:
        raise DomainError(f"determinant representations need m >= n >= 1 (got m={m}, n={n})")

    def T(a, b):
        p = moment_det(a, b)
        if p.is_zero():
            raise DegenerateDeterminant(f"T_{{{a},{b}}} vanishes identically")
        return p

    w1 = build_solution("I", m, n)
    w2 = build_solution("II", m, n)
    k = m - n
    ok1 = _same_log_derivative(T(k + 2, n), T(k + 1, n), w1.top, w1.bottom)
    ok2 = _same_log_derivative(T(k + 1, n), T(k, n + 1), w2.top, w2.bottom, sign=-1)

    pointwise = True
    for y in sample_points:
        for mm in (k, k + 1):
            t0 = T(mm, n)(y)
            if t0 == 0:
                continue
            c, h = orthogonal_poly_at(mm, n, y)
            pointwise &= c[0] == (-1) ** n * T(mm + 1, n)(y) / t0
            pointwise &= h == -T(mm, n + 1)(y) / t0
    return PsiCheck(ok1 and ok2 and pointwise, ok1, ok2, pointwise)
