"""Exact univariate polynomials over Q and the Hermite-type families built on them.

Polynomials are stored as a tuple of integer numerators (ascending degree) over a
single positive common denominator.  Everything in the recurrences and Hankel
determinants stays in this representation; floating point only appears in
:func:`poly_eval`, which works at an mpmath working precision.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from numbers import Rational
from typing import Sequence

import mpmath

from .errors import DegenerateDeterminant, DomainError, InexactDivision, Overflow

DEFAULT_PREC = 192

__all__ = [
    "DEFAULT_PREC",
    "ExactPoly",
    "ExactRationalFn",
    "hermite",
    "gen_hermite",
    "poly_derivative",
    "poly_eval",
    "poly_eval_with_derivative",
    "hankel_det",
    "moment_poly",
    "tau_det",
    "check_symmetry",
    "check_specializations",
    "moment_det",
    "to_hp",
]


# ---------------------------------------------------------------------------
# integer coefficient kernels
# ---------------------------------------------------------------------------

def _strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _content(c):
    g = 0
    for v in c:
        g = gcd(g, v)
        if g == 1:
            break
    return g


def _kron_mul(a, b):
    """Product of two integer coefficient lists by Kronecker substitution."""
    if not a or not b:
        return []
    if len(a) < 8 or len(b) < 8:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    bound = max(abs(v) for v in a) * max(abs(v) for v in b) * min(len(a), len(b))
    k = bound.bit_length() + 2
    pa = 0
    for v in reversed(a):
        pa = (pa << k) + v
    pb = 0
    for v in reversed(b):
        pb = (pb << k) + v
    prod = pa * pb
    n = len(a) + len(b) - 1
    mask = (1 << k) - 1
    half = 1 << (k - 1)
    out = []
    for _ in range(n):
        d = prod & mask
        if d >= half:
            d -= 1 << k
        out.append(d)
        prod = (prod - d) >> k
    return out


def _int_divmod_exact(a, b):
    """Quotient of integer lists a / b when every quotient coefficient is integral.

    Returns None as soon as a non-integral quotient coefficient appears.
    """
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        top = a[k + db]
        if top == 0:
            continue
        qk, rem = divmod(top, lead)
        if rem:
            return None
        q[k] = qk
        for j in range(db + 1):
            a[k + j] -= qk * b[j]
    return q, _strip(a)


def _pseudo_rem(a, b):
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    while len(a) - 1 >= db and a:
        top = a[-1]
        shift = len(a) - 1 - db
        a = [lead * v for v in a]
        for j in range(db + 1):
            a[shift + j] -= top * b[j]
        a = _strip(a)
    return a


def _int_gcd_poly(a, b):
    """Primitive-PRS gcd of integer polynomials; result primitive with positive lead."""
    a, b = _strip(a), _strip(b)
    if not a:
        a, b = b, a
    if not a:
        return []
    ca = _content(a)
    a = [v // ca for v in a]
    while b:
        cb = _content(b)
        b = [v // cb for v in b]
        r = _pseudo_rem(a, b)
        a, b = b, r
    if a[-1] < 0:
        a = [-v for v in a]
    return a


# ---------------------------------------------------------------------------
# ExactPoly
# ---------------------------------------------------------------------------

class ExactPoly:
    """Dense polynomial in y with exact rational coefficients (ascending order)."""

    __slots__ = ("_num", "_den")

    def __init__(self, coeffs: Sequence = ()):
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        num = [int(f * den) for f in fr]
        self._set(num, den)

    def _set(self, num, den):
        num = _strip(num)
        if den < 0:
            num, den = [-v for v in num], -den
        if not num:
            den = 1
        else:
            g = gcd(_content(num), den)
            if g > 1:
                num = [v // g for v in num]
                den //= g
        self._num = tuple(num)
        self._den = den

    @classmethod
    def _raw(cls, num, den=1) -> "ExactPoly":
        p = cls.__new__(cls)
        p._set(num, den)
        return p

    @classmethod
    def monomial(cls, k: int, c=1) -> "ExactPoly":
        return cls([0] * k + [c])

    # -- views -------------------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(v, self._den) for v in self._num)

    @property
    def numerators(self) -> tuple:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def degree(self) -> int:
        return max(len(self._num) - 1, 0)

    def is_zero(self) -> bool:
        return not self._num

    def is_integral(self) -> bool:
        return self._den == 1

    def leading(self) -> Fraction:
        return Fraction(self._num[-1], self._den) if self._num else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self._num):
            return Fraction(self._num[k], self._den)
        return Fraction(0)

    def parity(self):
        """0 (even), 1 (odd) or None when both parities occur."""
        ks = {k % 2 for k, v in enumerate(self._num) if v}
        if len(ks) == 1:
            return ks.pop()
        return 0 if not ks else None

    def max_abs_coeff(self) -> Fraction:
        if not self._num:
            return Fraction(0)
        return Fraction(max(abs(v) for v in self._num), self._den)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactPoly):
            return other
        if isinstance(other, (int, Rational)):
            return ExactPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self._den * other._den // gcd(self._den, other._den)
        sa, sb = d // self._den, d // other._den
        n = max(len(self._num), len(other._num))
        a = list(self._num) + [0] * (n - len(self._num))
        b = list(other._num) + [0] * (n - len(other._num))
        return ExactPoly._raw([x * sa + y * sb for x, y in zip(a, b)], d)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly._raw([-v for v in self._num], self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            f = Fraction(other)
            return ExactPoly._raw([v * f.numerator for v in self._num], self._den * f.denominator)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ExactPoly._raw(_kron_mul(self._num, other._num), self._den * other._den)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ExactPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((self._num, self._den))

    def __repr__(self):
        if not self._num:
            return "ExactPoly(0)"
        terms = []
        for k, v in enumerate(self._num):
            if v:
                c = Fraction(v, self._den)
                terms.append(f"{c}" + ("" if k == 0 else "*y" if k == 1 else f"*y^{k}"))
        return "ExactPoly(" + " + ".join(terms) + ")"

    def __call__(self, y):
        """Exact Horner evaluation at an int/Fraction (or any ring element)."""
        acc = 0
        for v in reversed(self._num):
            acc = acc * y + v
        return acc / Fraction(self._den) if isinstance(acc, (int, Fraction)) else acc / self._den

    def divmod(self, other: "ExactPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if len(self._num) < len(other._num):
            return ExactPoly(), self
        fast = _int_divmod_exact(self._num, other._num)
        if fast is not None:
            q, r = fast
            # self/other = (qa/da) / (1/db) scaling
            return (ExactPoly._raw(q, self._den) * Fraction(other._den),
                    ExactPoly._raw(r, self._den))
        a = [Fraction(v) for v in self._num]
        b = [Fraction(v) for v in other._num]
        db = len(b) - 1
        q = [Fraction(0)] * (len(a) - db)
        for k in range(len(a) - 1 - db, -1, -1):
            qk = a[k + db] / b[-1]
            q[k] = qk
            if qk:
                for j in range(db + 1):
                    a[k + j] -= qk * b[j]
        return (ExactPoly(q) * Fraction(other._den, self._den),
                ExactPoly(a) * Fraction(1, self._den))

    __divmod__ = divmod

    def exact_div(self, other) -> "ExactPoly":
        """Quotient that must leave no remainder; raises InexactDivision otherwise."""
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        q, r = self.divmod(other)
        if not r.is_zero():
            raise InexactDivision(f"remainder of degree {r.degree} in exact division")
        return q

    def derivative(self) -> "ExactPoly":
        return ExactPoly._raw([k * v for k, v in enumerate(self._num)][1:], self._den)

    def primitive_int(self) -> tuple:
        """Primitive integer coefficient list (positive leading coefficient)."""
        if not self._num:
            return ()
        c = _content(self._num)
        s = 1 if self._num[-1] > 0 else -1
        return tuple(s * v // c for v in self._num)

    def gcd(self, other: "ExactPoly") -> "ExactPoly":
        """Monic gcd over Q (zero polynomial if both are zero)."""
        g = _int_gcd_poly(list(self._num), list(other._num))
        if not g:
            return ExactPoly()
        return ExactPoly._raw(g, g[-1])

    def at_iy(self):
        """Return (re, im) with p(i*y) = re(y) + i*im(y) exactly."""
        re, im = [], []
        for k, v in enumerate(self._num):
            s = (1, 1j, -1, -1j)[k % 4]
            re.append(v if s == 1 else -v if s == -1 else 0)
            im.append(v if s == 1j else -v if s == -1j else 0)
        return ExactPoly._raw(re, self._den), ExactPoly._raw(im, self._den)


def poly_derivative(p: ExactPoly) -> ExactPoly:
    return p.derivative()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class ExactRationalFn:
    """numerator/denominator kept coprime, denominator monic."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: ExactPoly, denominator: ExactPoly | None = None, reduce: bool = True):
        if denominator is None:
            denominator = ExactPoly([1])
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if numerator.is_zero():
            numerator, denominator = ExactPoly(), ExactPoly([1])
        elif reduce and denominator.degree > 0:
            g = numerator.gcd(denominator)
            if g.degree > 0:
                numerator = numerator.exact_div(g)
                denominator = denominator.exact_div(g)
        lead = denominator.leading()
        self.numerator = numerator * (1 / lead)
        self.denominator = denominator * (1 / lead)

    @classmethod
    def log_derivative(cls, p: ExactPoly) -> "ExactRationalFn":
        return cls(p.derivative(), p)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def _wrap(self, other):
        if isinstance(other, ExactRationalFn):
            return other
        if isinstance(other, ExactPoly):
            return ExactRationalFn(other, reduce=False)
        if isinstance(other, (int, Rational)):
            return ExactRationalFn(ExactPoly([other]), reduce=False)
        return NotImplemented

    def __add__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        if self.denominator == o.denominator:
            return ExactRationalFn(self.numerator + o.numerator, self.denominator)
        g = self.denominator.gcd(o.denominator)
        da = self.denominator.exact_div(g)
        db = o.denominator.exact_div(g)
        return ExactRationalFn(self.numerator * db + o.numerator * da, da * o.denominator)

    __radd__ = __add__

    def __neg__(self):
        return ExactRationalFn(-self.numerator, self.denominator, reduce=False)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        g1 = self.numerator.gcd(o.denominator) if o.denominator.degree else ExactPoly([1])
        g2 = o.numerator.gcd(self.denominator) if self.denominator.degree else ExactPoly([1])
        if g1.is_zero():
            g1 = ExactPoly([1])
        if g2.is_zero():
            g2 = ExactPoly([1])
        num = self.numerator.exact_div(g1) * o.numerator.exact_div(g2)
        den = self.denominator.exact_div(g2) * o.denominator.exact_div(g1)
        return ExactRationalFn(num, den, reduce=False)

    __rmul__ = __mul__

    def reciprocal(self) -> "ExactRationalFn":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero rational function")
        return ExactRationalFn(self.denominator, self.numerator, reduce=False)

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        return ExactRationalFn(self.numerator ** k, self.denominator ** k, reduce=False)

    def derivative(self) -> "ExactRationalFn":
        p, q = self.numerator, self.denominator
        return ExactRationalFn(p.derivative() * q - p * q.derivative(), q * q)

    def __eq__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return self.numerator * o.denominator == o.numerator * self.denominator

    __hash__ = None

    def __call__(self, y):
        return self.numerator(y) / self.denominator(y)

    def __repr__(self):
        return f"ExactRationalFn({self.numerator!r} / {self.denominator!r})"


# ---------------------------------------------------------------------------
# high precision evaluation
# ---------------------------------------------------------------------------

def to_hp(z, prec: int | None = None) -> mpmath.mpc:
    """Convert a number (str, complex, Fraction, mpf, ...) to an mpc at ``prec`` bits."""
    with mpmath.workprec(prec or DEFAULT_PREC):
        if isinstance(z, Fraction):
            return mpmath.mpc(mpmath.mpf(z.numerator) / z.denominator)
        if isinstance(z, str):
            return mpmath.mpc(mpmath.mpmathify(z.replace(" ", "")))
        return mpmath.mpc(z)


def _check_finite(v):
    if not (mpmath.isfinite(v.real) and mpmath.isfinite(v.imag)):
        raise Overflow(f"non-finite value {v}")
    return v


def poly_eval(p: ExactPoly, y, prec: int | None = None) -> mpmath.mpc:
    """Horner evaluation of ``p`` at ``y`` in ``prec``-bit complex arithmetic."""
    with mpmath.workprec(prec or DEFAULT_PREC):
        y = mpmath.mpc(y)
        acc = mpmath.mpc(0)
        for v in reversed(p.numerators):
            acc = acc * y + v
        return _check_finite(acc / p.denominator)


def poly_eval_with_derivative(p: ExactPoly, y, prec: int | None = None):
    """(p(y), p'(y)) from a single Horner sweep."""
    with mpmath.workprec(prec or DEFAULT_PREC):
        y = mpmath.mpc(y)
        acc = mpmath.mpc(0)
        dacc = mpmath.mpc(0)
        for v in reversed(p.numerators):
            dacc = dacc * y + acc
            acc = acc * y + v
        return _check_finite(acc / p.denominator), _check_finite(dacc / p.denominator)


# ---------------------------------------------------------------------------
# Hermite families
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def hermite(m: int) -> ExactPoly:
    """Physicists' Hermite polynomial H_m via H_{k+1} = 2y H_k - 2k H_{k-1}."""
    if m < 0:
        raise DomainError("hermite index must be nonnegative")
    prev, cur = [1], [0, 2]
    if m == 0:
        return ExactPoly._raw(prev)
    for k in range(1, m):
        nxt = [0] + [2 * v for v in cur]
        for j, v in enumerate(prev):
            nxt[j] -= 2 * k * v
        prev, cur = cur, nxt
    return ExactPoly._raw(cur)


_GH_TABLE: dict = {}
_GH_LOCK = threading.Lock()


def _gh_step(h, h_prev, k, sign):
    """One bilinear recurrence step on integer coefficient lists.

    sign=+1: 2k H_{k+1} H_{k-1} = H H'' - H'^2 + 2k H^2   (first index)
    sign=-1: 2k H_{k+1} H_{k-1} = -H H'' + H'^2 + 2k H^2  (second index)
    """
    d1 = [j * v for j, v in enumerate(h)][1:]
    d2 = [j * v for j, v in enumerate(d1)][1:]
    n = len(h)
    inner = [sign * (d2[j] if j < len(d2) else 0) + 2 * k * h[j] for j in range(n)]
    rhs = _kron_mul(h, inner)
    sq = _kron_mul(d1, d1)
    for j, v in enumerate(sq):
        rhs[j] -= sign * v
    rhs = _strip(rhs)
    two_k = 2 * k
    if any(v % two_k for v in rhs):
        raise InexactDivision(f"recurrence numerator not divisible by 2*{k}")
    rhs = [v // two_k for v in rhs]
    res = _int_divmod_exact(rhs, list(h_prev))
    if res is None or res[1]:
        raise InexactDivision(f"recurrence numerator not divisible by neighbour (k={k})")
    return tuple(_strip(res[0]))


def _gh_coeffs(m: int, n: int) -> tuple:
    key = (m, n)
    hit = _GH_TABLE.get(key)
    if hit is not None:
        return hit
    with _GH_LOCK:
        if (0, 0) not in _GH_TABLE:
            _GH_TABLE[(0, 0)] = (1,)
            _GH_TABLE[(1, 0)] = (1,)
            _GH_TABLE[(0, 1)] = (1,)
            _GH_TABLE[(1, 1)] = (0, 2)
        # H_{m,0} = H_{0,n} = 1 from the degenerate recurrences
        if m == 0 or n == 0:
            _GH_TABLE[key] = (1,)
            return (1,)
        # row m=1 along n
        k = max(j for j in range(1, n + 1) if (1, j) in _GH_TABLE)
        while k < n:
            _GH_TABLE[(1, k + 1)] = _gh_step(_GH_TABLE[(1, k)], _GH_TABLE[(1, k - 1)], k, -1)
            k += 1
        # column n along m
        _GH_TABLE.setdefault((0, n), (1,))
        k = max(j for j in range(1, m + 1) if (j, n) in _GH_TABLE)
        while k < m:
            _GH_TABLE[(k + 1, n)] = _gh_step(_GH_TABLE[(k, n)], _GH_TABLE[(k - 1, n)], k, +1)
            k += 1
        return _GH_TABLE[key]


def gen_hermite(m: int, n: int) -> ExactPoly:
    """Generalized Hermite polynomial H_{m,n} (integer coefficients, degree m*n)."""
    if m < 0 or n < 0:
        raise DomainError("generalized Hermite indices must be nonnegative")
    p = ExactPoly._raw(list(_gh_coeffs(m, n)))
    if not p.is_integral() or p.degree != m * n:
        raise InexactDivision(f"H_{{{m},{n}}} failed integrality/degree check")
    return p


def _times_i_power(k: int, re: ExactPoly, im: ExactPoly):
    """(re + i im) * i^k, returned as (re', im')."""
    k %= 4
    if k == 0:
        return re, im
    if k == 1:
        return -im, re
    if k == 2:
        return -re, -im
    return im, -re


def check_symmetry(m: int, n: int) -> bool:
    """Exact test of H_{m,n}(iy) = i^{mn} H_{n,m}(y)."""
    re, im = gen_hermite(m, n).at_iy()
    re, im = _times_i_power(-m * n, re, im)
    return im.is_zero() and re == gen_hermite(n, m)


def check_specializations(k: int) -> bool:
    """Exact test of H_{k,1} = H_k and H_{1,k}(y) = i^{-k} H_k(iy)."""
    if gen_hermite(k, 1) != hermite(k):
        return False
    re, im = _times_i_power(-k, *hermite(k).at_iy())
    return im.is_zero() and re == gen_hermite(1, k)


def moment_poly(m: int, j: int) -> ExactPoly:
    """mu_j^{(m)} = H_{m+j} / (m+j)!."""
    if j < 0:
        raise DomainError("moment index j must be nonnegative")
    if m + j < 0:
        raise DomainError(f"moment needs m+j >= 0, got m={m}, j={j}")
    return hermite(m + j) * Fraction(1, factorial(m + j))


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def hankel_det(entries: Sequence[Sequence[ExactPoly]]) -> ExactPoly:
    """Determinant of a square polynomial matrix by fraction-free Bareiss elimination."""
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise ValueError("hankel_det needs a square matrix")
    if n == 0:
        return ExactPoly([1])
    M = [[e if isinstance(e, ExactPoly) else ExactPoly([e]) for e in row] for row in entries]
    if n == 1:
        return M[0][0]
    sign = 1
    prev = ExactPoly([1])
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return ExactPoly()
        piv = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (piv * M[i][j] - M[i][k] * M[k][j]).exact_div(prev)
        prev = piv
    return M[n - 1][n - 1] * sign


def tau_det(m: int, n: int) -> ExactPoly:
    """tau_{m,n}: n x n Hankel determinant of H_m, ..., H_{m+2n-2}; tau_{m,0} = 1."""
    if m < 0 or n < 0:
        raise DomainError("tau indices must be nonnegative")
    return hankel_det([[hermite(m + j + k) for k in range(n)] for j in range(n)])


def moment_det(m: int, n: int) -> ExactPoly:
    """T_{m,n}: n x n Hankel determinant of the moments mu_{j+k}^{(m)}."""
    if n < 0:
        raise DomainError("determinant size must be nonnegative")
    if n and m < 0:
        raise DomainError(f"T_{{{m},{n}}} needs m >= 0")
    return hankel_det([[moment_poly(m, j + k) for k in range(n)] for j in range(n)])


def nonzero_det(p: ExactPoly, label: str) -> ExactPoly:
    if p.is_zero():
        raise DegenerateDeterminant(f"{label} is the zero polynomial")
    return p
