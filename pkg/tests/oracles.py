"""Independent reference computations used only by the tests.

None of these share code with the package: roots come from numpy's companion
eigenvalues, determinants and Wronskians from sympy, and the branch of Q from a
brute-force dense-path continuation with numpy.roots.
"""

import cmath
import math

import numpy as np
import sympy as sp

Y = sp.Symbol("y")


def companion_roots(coeffs_ascending):
    """Roots of sum c_k y^k via numpy's companion-matrix eigenvalues."""
    return np.roots(list(reversed([float(c) for c in coeffs_ascending])))


def match_roots(a, b):
    """Max distance after greedy nearest matching of two equal-size root lists."""
    b = list(b)
    worst = 0.0
    for z in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - z))
        worst = max(worst, abs(b.pop(k) - z))
    return worst


def sympy_coeffs(expr):
    """Ascending integer/rational coefficients of a sympy polynomial in y."""
    return [sp.Rational(c) for c in reversed(sp.Poly(sp.expand(expr), Y).all_coeffs())]


def tau_sympy(m, n):
    """n x n Hankel determinant of physicists' Hermite polynomials H_m..H_{m+2n-2} (Berkowitz)."""
    if n == 0:
        return sp.Integer(1)
    M = sp.Matrix(n, n, lambda j, k: sp.hermite(m + j + k, Y))
    return sp.expand(M.det(method="berkowitz"))


def wronskian_hermite(m, n):
    """Wronskian of H_m, ..., H_{m+n-1}; proportional to H_{m,n}."""
    fns = [sp.hermite(m + k, Y) for k in range(n)]
    return sp.expand(sp.wronskian(fns, Y)) if n else sp.Integer(1)


def q_branch_bruteforce(x, r, steps=20000):
    """Q(x; r) by nearest-root continuation on a fixed dense path (numpy.roots).

    Same path family as the package (arc at a large radius, then radial), but a
    fixed tiny step and an independent quartic solver.
    """
    sr = math.sqrt(r)
    xc = corner_bruteforce(r)
    R0 = max(10.0, 3 * abs(xc))

    def roots(z):
        return np.roots([3 * (1 + r) ** 2, 8 * (1 + r) * sr * z, 4 * (r - 1 + r * z * z), 0, -4])

    q = min(roots(R0), key=lambda w: abs(w + 2 * sr * R0 / (1 + r)))
    th = cmath.phase(x)
    for t in np.linspace(0, th, steps // 4)[1:]:
        q = min(roots(R0 * cmath.exp(1j * t)), key=lambda w: abs(w - q))
    for rho in np.linspace(R0, abs(x), steps)[1:]:
        q = min(roots(rho * cmath.exp(1j * th)), key=lambda w: abs(w - q))
    return complex(q)


def corner_bruteforce(r):
    """Corner point from numpy.roots of the octic in x."""
    c = [r ** 4, 0, 0, 0, -24 * r * r * (r * r + r + 1), 0, 32 * r * (2 * r ** 3 + 3 * r * r - 3 * r - 2),
         0, -48 * (r * r + r + 1) ** 2]
    cands = [z for z in np.roots(c) if z.real > 1e-9 and z.imag > 1e-9]
    assert len(cands) == 1
    return complex(cands[0])
