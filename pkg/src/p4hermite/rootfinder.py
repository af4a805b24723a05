"""All complex roots of exact polynomials by Aberth-Ehrlich iteration at extended precision."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DomainError, NoConvergence
from .exact_algebra import DEFAULT_PREC, ExactPoly, gen_hermite

MAX_ITER = 500


@dataclass
class RootSet:
    roots: list
    residuals: list
    source_degree: int
    precision_bits: int = DEFAULT_PREC
    clusters: list = field(default_factory=list)
    iterations: int = 0

    def __len__(self):
        return len(self.roots)

    @property
    def flagged(self) -> list:
        """Per-root flag: True if the root sits in a suspiciously tight cluster."""
        bad = {i for pair in self.clusters for i in pair}
        return [i in bad for i in range(len(self.roots))]

    def as_complex(self) -> np.ndarray:
        return np.array([complex(z) for z in self.roots])

    def scaled(self, factor) -> "RootSet":
        with mpmath.workprec(self.precision_bits):
            f = mpmath.mpf(factor)
            roots = [z / f for z in self.roots]
        return RootSet(roots, list(self.residuals), self.source_degree, self.precision_bits,
                       list(self.clusters), self.iterations)


def cauchy_bound(coeffs) -> float:
    """Unique positive root of |a_n| x^n - sum_{i<n} |a_i| x^i (all roots lie within it)."""
    with mpmath.workprec(64):
        a = [abs(mpmath.mpf(c)) for c in coeffs]
        n = len(a) - 1
        lead = a[-1]
        ratios = [(i, a[i] / lead) for i in range(n) if a[i]]
        if not ratios:
            return 0.0

        def excess(logx):
            return sum(r * mpmath.exp((i - n) * logx) for i, r in ratios) - 1

        lo, hi = mpmath.mpf(-50), mpmath.mpf(50)
        while excess(hi) > 0:
            hi *= 2
        while excess(lo) < 0:
            lo *= 2
        for _ in range(80):
            mid = (lo + hi) / 2
            if excess(mid) > 0:
                lo = mid
            else:
                hi = mid
        return float(mpmath.exp(hi))


def _noise_floor(abs_coeffs, az):
    acc = mpmath.mpf(0)
    for c in reversed(abs_coeffs):
        acc = acc * az + c
    return acc


def _horner2(coeffs, z):
    p = mpmath.mpc(0)
    dp = mpmath.mpc(0)
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _relative_residual(coeffs, cmax, z):
    p, _ = _horner2(coeffs, z)
    scale = cmax * max(mpmath.mpf(1), abs(z)) ** (len(coeffs) - 1)
    return abs(p) / scale


def _initial_guesses(degree, bound, seed):
    rng = random.Random(seed)
    offsets = [rng.uniform(0, 2 * math.pi) for _ in range(3)]
    radii = (0.5 * bound, 1.0 * bound, 1.5 * bound)
    guesses = []
    for k in range(degree):
        ring = k % 3
        ang = 2 * math.pi * k / degree + offsets[ring]
        guesses.append(mpmath.mpc(radii[ring] * math.cos(ang), radii[ring] * math.sin(ang)))
    return guesses


def _aberth(coeffs, prec, max_iter, seed):
    """Roots of sum coeffs[k] z^k (mpf coefficients, nonzero constant term)."""
    n = len(coeffs) - 1
    if n == 1:
        return [-coeffs[0] / coeffs[1]], 0
    bound = cauchy_bound(coeffs) or 1.0
    # Aberth shrinks a far circle by only ~2/n per sweep: cap the rings at the
    # geometric-mean root modulus, which the Cauchy bound can exceed 40-fold
    with mpmath.workprec(64):
        gmean = float(abs(coeffs[0] / coeffs[-1]) ** (mpmath.mpf(1) / n))
    z = _initial_guesses(n, min(bound, gmean), seed)
    eps = mpmath.mpf(2) ** (-(prec - 10))
    noise = 16 * n * mpmath.mpf(2) ** (-prec)
    abs_coeffs = [abs(c) for c in coeffs]
    active = list(range(n))
    it = 0
    while active and it < max_iter:
        it += 1
        still = []
        for i in active:
            zi = z[i]
            p, dp = _horner2(coeffs, zi)
            if p == 0:
                continue
            s = mpmath.mpc(0)
            for j in range(n):
                if j != i:
                    s += 1 / (zi - z[j])
            if dp == 0:
                step = mpmath.mpc(eps * (1 + abs(zi)), 0)
            else:
                ratio = p / dp
                step = ratio / (1 - ratio * s)
            z[i] = zi - step
            size = max(1, abs(z[i]))
            if abs(step) <= eps * size:
                continue
            # rounding-limited: |p| is at the Horner noise floor, so further
            # steps only chase rounding (ill-conditioned roots move ~1e-11)
            if abs(p) <= noise * _noise_floor(abs_coeffs, abs(zi)):
                continue
            still.append(i)
        active = still
    return z, it


def find_roots(p: ExactPoly, precision_bits: int = DEFAULT_PREC, max_iter: int = MAX_ITER,
               seed: int = 0) -> RootSet:
    """All deg(p) complex roots of ``p``, Newton-polished, with scale-aware residuals.

    Zero roots are split off exactly; an even remaining factor q(y) = g(y^2) is
    solved in u = y^2 and mapped back through +-sqrt(u).
    """
    if p.is_zero() or p.degree < 1:
        raise DomainError("find_roots needs a nonconstant polynomial")
    prec = int(precision_bits)
    num = list(p.numerators)
    nzero = next(k for k, v in enumerate(num) if v)
    rest = num[nzero:]
    even = len(rest) > 2 and all(v == 0 for v in rest[1::2])
    work = rest[0::2] if even else rest

    with mpmath.workprec(prec):
        coeffs = [mpmath.mpf(v) for v in work]
        roots = []
        it = 0
        if len(coeffs) > 1:
            base, it = _aberth(coeffs, prec, max_iter, seed)
            # one Newton polish on the working polynomial
            polished = []
            for zr in base:
                pv, dpv = _horner2(coeffs, zr)
                polished.append(zr - pv / dpv if dpv != 0 else zr)
            base = polished
            if even:
                for u in base:
                    r = mpmath.sqrt(u)
                    roots.extend([r, -r])
            else:
                roots.extend(base)
        roots = [mpmath.mpc(0)] * nzero + roots

        full = [mpmath.mpf(v) for v in num]
        cmax = max(abs(c) for c in full)
        residuals = [float(_relative_residual(full, cmax, zr)) for zr in roots]
        threshold = 2.0 ** (-prec / 2)
        worst = max(residuals)
        if worst > threshold or len(roots) != p.degree:
            raise NoConvergence(
                f"Aberth iteration left residual {worst:.3e} (threshold {threshold:.3e}) after {it} sweeps",
                worst_residual=worst)

        clusters = set(_clusters(roots, prec))
        if nzero > 1:
            clusters.update((i, j) for i in range(nzero) for j in range(i + 1, nzero))
        clusters = sorted(clusters)
    return RootSet(roots, residuals, p.degree, prec, clusters, it)


def _clusters(roots, prec):
    if len(roots) < 2:
        return []
    tol = 2.0 ** (-prec / 4)
    z = np.array([complex(r) for r in roots])
    d = np.abs(z[:, None] - z[None, :])
    iu = np.triu_indices(len(z), 1)
    close = d[iu] < tol
    return [(int(i), int(j)) for i, j in zip(iu[0][close], iu[1][close])
            if abs(roots[i] - roots[j]) < tol]


def scaled_zero_cloud(m: int, n: int, scale_by: str = "m", precision_bits: int = DEFAULT_PREC,
                      seed: int = 0) -> RootSet:
    """Zeros of H_{m,n} expressed in x = y/m^{1/2} (scale_by='m') or chi = y/n^{1/2} ('n')."""
    if m < 1 or n < 1:
        raise DomainError("scaled_zero_cloud needs m, n >= 1")
    if scale_by not in ("m", "n"):
        raise DomainError("scale_by must be 'm' or 'n'")
    rs = find_roots(gen_hermite(m, n), precision_bits, seed=seed)
    k = m if scale_by == "m" else n
    with mpmath.workprec(precision_bits):
        return rs.scaled(mpmath.sqrt(k))
