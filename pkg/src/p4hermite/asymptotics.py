"""Genus-zero spectral data, the phase function Re phi~, and the elliptic region E_r.

Everything here is parametrised by the aspect ratio r = m/n >= 1 and the scaled
variable x (so that y = m^{1/2} x).  The physical branch of Q(x; r) is fixed by
continuation: cheap double-precision tracking decides the branch, and the final
value is re-solved and polished at extended precision.
"""

from __future__ import annotations

import bisect
import cmath
import math
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import mpmath

from .errors import (BranchMismatch, DomainError, MomentViolation, NoCrossing, NoValidRoot,
                     OnBranchCut, SingularPoint, TraceDiverged, TrackingLoss)
from .exact_algebra import DEFAULT_PREC

CUT_MARGIN = 1e-9
RADIUS_WINDOW_MIN = 0.05
BOUNDARY_TOL = 1e-12
ROUTE_TOL = 1e-14
MOMENT_TOL = 1e-20
SAMPLES_PER_QUADRANT = 180
ARC_STEP = 0.03
FAMILIES = ("I", "II", "III")

_D = SimpleNamespace(sqrt=cmath.sqrt, log=cmath.log, cbrt=lambda z: z ** (1 / 3), c=complex,
                     pi=math.pi)
_M = SimpleNamespace(sqrt=mpmath.sqrt, log=mpmath.log, cbrt=mpmath.cbrt, c=mpmath.mpc,
                     pi=mpmath.pi)


def _check_r(r):
    if not r >= 1:
        raise DomainError(f"r must be >= 1 (got {r})")


def _cross(u, v):
    return (u.conjugate() * v).imag


# ---------------------------------------------------------------- quartics

def _cubic_roots(A, B, C, L):
    """Roots of s^3 + A s^2 + B s + C (Cardano)."""
    P = B - A * A / 3
    Qc = 2 * A ** 3 / 27 - A * B / 3 + C
    D = L.sqrt(Qc * Qc / 4 + P ** 3 / 27)
    u3 = -Qc / 2 + D if abs(-Qc / 2 + D) >= abs(-Qc / 2 - D) else -Qc / 2 - D
    shift = A / 3
    if u3 == 0:
        return [-shift] * 3
    u = L.cbrt(u3)
    w = L.c(-0.5, 0.5 * math.sqrt(3)) if L is _D else mpmath.mpc(-0.5, mpmath.sqrt(3) / 2)
    out = []
    for k in range(3):
        uk = u * w ** k
        out.append(uk - P / (3 * uk) - shift)
    return out


def quartic_roots(coeffs, L=_D):
    """All roots of a4 z^4 + a3 z^3 + a2 z^2 + a1 z + a0 (Ferrari), each given one guarded Newton step.

    ``coeffs`` is highest degree first.  ``L`` selects double (cmath) or mpmath arithmetic.
    """
    a4, a3, a2, a1, a0 = coeffs
    b, c, d, e = a3 / a4, a2 / a4, a1 / a4, a0 / a4
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b ** 3 / 8
    r0 = e - b * d / 4 + b * b * c / 16 - 3 * b ** 4 / 256
    ms = _cubic_roots(p, p * p / 4 - r0, -q * q / 8, L)
    m = max(ms, key=abs)
    ts = []
    if m == 0:
        disc = L.sqrt(p * p - 4 * r0)
        for t2 in ((-p + disc) / 2, (-p - disc) / 2):
            t = L.sqrt(t2)
            ts.extend([t, -t])
    else:
        w = L.sqrt(2 * m)
        for s in (1, -1):
            inner = L.sqrt(-(2 * p + 2 * m + s * 2 * q / w))
            ts.extend([(s * w + inner) / 2, (s * w - inner) / 2])
    roots = []
    for t in ts:
        z = t - b / 4
        f = (((a4 * z + a3) * z + a2) * z + a1) * z + a0
        df = ((4 * a4 * z + 3 * a3) * z + 2 * a2) * z + a1
        # at a multiple root f/df is rounding noise, so keep the step only if it helps
        if df != 0:
            zn = z - f / df
            if abs((((a4 * zn + a3) * zn + a2) * zn + a1) * zn + a0) < abs(f):
                z = zn
        roots.append(z)
    return roots


def _q_coeffs(x, r, sr):
    return (3 * (1 + r) ** 2, 8 * (1 + r) * sr * x, 4 * (r - 1 + r * x * x), 0 * x, -4 + 0 * x)


def q_quartic_residual(Q, x, r, prec: int = DEFAULT_PREC) -> float:
    """|3(1+r)^2 Q^4 + 8(1+r) r^{1/2} x Q^3 + 4(r-1+r x^2) Q^2 - 4| over the sum of term sizes."""
    with mpmath.workprec(prec):
        Q, x, r = mpmath.mpc(Q), mpmath.mpc(x), mpmath.mpf(r)
        sr = mpmath.sqrt(r)
        terms = [3 * (1 + r) ** 2 * Q ** 4, 8 * (1 + r) * sr * x * Q ** 3,
                 4 * (r - 1 + r * x * x) * Q ** 2, mpmath.mpf(-4)]
        return float(abs(mpmath.fsum(terms)) / max(1, sum(abs(t) for t in terms)))


# ---------------------------------------------------------------- corner point

def corner_polynomial(r):
    """Coefficients (highest first) of the quartic in u = x^2 whose roots give the corners."""
    return (r ** 4, 0 * r, -24 * r * r * (r * r + r + 1), 32 * r * (2 * r ** 3 + 3 * r * r - 3 * r - 2),
            -48 * (r * r + r + 1) ** 2)


def corner_point(r, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    """The corner x_c of E_r in the open first quadrant."""
    _check_r(r)
    with mpmath.workprec(prec + 20):
        rr = mpmath.mpf(r)
        us = quartic_roots([mpmath.mpc(v) for v in corner_polynomial(rr)], _M)
        tiny = mpmath.mpf(2) ** (-(prec // 2))
        cands = []
        for u in us:
            for x in (mpmath.sqrt(u), -mpmath.sqrt(u)):
                if x.real > tiny and x.imag > tiny:
                    cands.append(x)
        if not cands:
            raise NoValidRoot(f"no corner point in the open first quadrant for r={r}")
        # for r >= 1 exactly one root u = x^2 sits in the upper half-plane
        x = min(cands, key=lambda z: -z.imag * z.real)
    with mpmath.workprec(prec):
        return +x


# ---------------------------------------------------------------- Q tracking

class _QTracker:
    """Double-precision continuation of the physical root Q(x; r).

    The anchor is x0 on the positive real axis; any x is reached by an arc at
    radius x0 followed by a radial segment, which never meets the cut segments
    joining the origin to the four corners.  Arc and ray results are cached, so
    neighbouring queries continue from the closest known point.
    """

    H_MIN = 1e-13

    def __init__(self, r):
        self.r = float(r)
        self.sr = math.sqrt(self.r)
        xc = complex(corner_point(r, 64))
        self.xc = xc
        self.corners = (xc, xc.conjugate(), -xc, -xc.conjugate())
        self.x0 = max(10.0, 3 * abs(xc))
        # the physical root grows like -2 r^{1/2} x / (1+r) at large x
        kappa = -2 * self.sr / (1 + self.r)
        roots = self._roots(self.x0)
        q0 = min(roots, key=lambda z: abs(z - kappa * self.x0))
        self._arc = [(0.0, q0)]
        self._rays = {}
        self._lock = threading.Lock()

    def _roots(self, x):
        return quartic_roots(_q_coeffs(complex(x), self.r, self.sr), _D)

    def check_cut(self, x, margin=CUT_MARGIN):
        if x == 0:
            raise OnBranchCut("x = 0 is where the four cuts meet")
        for corner in self.corners:
            t = max(0.0, min(1.0, (x * corner.conjugate()).real / abs(corner) ** 2))
            if abs(x - t * corner) <= margin * max(1.0, abs(x)):
                raise OnBranchCut(f"x={x} lies within {margin} of the cut through {corner}")

    def _follow(self, point, s0, s1, q):
        """Continue root q along point(s) from s0 to s1 (s is arclength)."""
        span = s1 - s0
        if span == 0:
            return q
        sgn = 1.0 if span > 0 else -1.0
        h = min(abs(span), 0.05)
        s = s0
        while (s1 - s) * sgn > 0:
            h = min(h, (s1 - s) * sgn)
            roots = self._roots(point(s + sgn * h))
            dist = sorted((abs(z - q), i) for i, z in enumerate(roots))
            k = dist[0][1]
            # accept only when the nearest root is clearly nearer than every other one
            if dist[0][0] < 0.25 * dist[1][0]:
                s += sgn * h
                q = roots[k]
                h *= 1.5
            else:
                h *= 0.5
                if h < self.H_MIN:
                    raise TrackingLoss(f"step underflow continuing Q near x={point(s)}")
        return q

    def arc_value(self, theta):
        thetas = [t for t, _ in self._arc]
        i = bisect.bisect_left(thetas, theta)
        j = min((k for k in (i - 1, i) if 0 <= k < len(thetas)), key=lambda k: abs(thetas[k] - theta))
        t0, q0 = self._arc[j]
        if t0 == theta:
            return q0
        x0 = self.x0
        q = self._follow(lambda s: x0 * cmath.exp(1j * s / x0), t0 * x0, theta * x0, q0)
        self._arc.insert(bisect.bisect_left(thetas, theta), (theta, q))
        return q

    def value(self, x):
        """Physical Q at x (double precision)."""
        x = complex(x)
        self.check_cut(x)
        with self._lock:
            theta = cmath.phase(x)
            rho = abs(x)
            ray = self._rays.get(theta)
            if ray is None:
                ray = self._rays[theta] = [(self.x0, self.arc_value(theta))]
                if len(self._rays) > 4096:
                    self._rays.pop(next(iter(self._rays)))
            rhos = [p for p, _ in ray]
            i = bisect.bisect_left(rhos, rho)
            j = min((k for k in (i - 1, i) if 0 <= k < len(rhos)), key=lambda k: abs(rhos[k] - rho))
            r0, q0 = ray[j]
            if r0 == rho:
                return q0
            u = cmath.exp(1j * theta)
            q = self._follow(lambda s: s * u, r0, rho, q0)
            ray.insert(i, (rho, q))
            return q

    def path_description(self, x):
        x = complex(x)
        return (f"anchor x0={self.x0:.6g} (root nearest {-2 * self.sr / (1 + self.r):.6g}*x0); "
                f"arc |x|=x0 from arg 0 to {cmath.phase(x):.12g}; radial to |x|={abs(x):.12g}")


_TRACKERS: dict = {}
_TRACKERS_LOCK = threading.Lock()


def _tracker(r) -> _QTracker:
    _check_r(r)
    key = float(r)
    with _TRACKERS_LOCK:
        tr = _TRACKERS.get(key)
        if tr is None:
            tr = _TRACKERS[key] = _QTracker(key)
        return tr


def _polish_Q(x, r, q_guess, prec):
    """Extended-precision root of the Q quartic nearest the tracked double value."""
    with mpmath.workprec(prec + 10):
        xm = mpmath.mpc(x)
        rr = mpmath.mpf(r)
        roots = quartic_roots([mpmath.mpc(v) for v in _q_coeffs(xm, rr, mpmath.sqrt(rr))], _M)
        dist = sorted((abs(z - q_guess), i) for i, z in enumerate(roots))
        if dist[0][0] >= 0.25 * dist[1][0]:
            raise TrackingLoss(f"extended-precision root at x={x} is ambiguous against the tracked branch")
        q = roots[dist[0][1]]
    with mpmath.workprec(prec):
        return +q


def solve_Q(x, r, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    """The physical root Q(x; r) at extended precision."""
    tr = _tracker(r)
    q = tr.value(complex(x))
    return _polish_Q(x, r, q, prec)


# ---------------------------------------------------------------- spectral data

def _sector(x, theta_c):
    """0: right, 1: upper, 2: left, 3: lower sector bounded by the corner rays."""
    th = cmath.phase(complex(x))
    if abs(th) <= theta_c:
        return 0
    if theta_c < th < math.pi - theta_c:
        return 1
    if -(math.pi - theta_c) < th < -theta_c:
        return 3
    return 2


def _order_ab(z1, z2, sector):
    if sector == 0:
        return (z1, z2) if z1.imag < z2.imag else (z2, z1)
    if sector == 2:
        return (z1, z2) if z1.imag > z2.imag else (z2, z1)
    return (z1, z2) if z1.real > z2.real else (z2, z1)


def _rtilde(z, a, b, L):
    """sqrt((z-a)(z-b)) cut on the straight segment [a, b], ~ z at infinity."""
    if z == a or z == b:
        return 0 * z
    return (z - a) * L.sqrt((z - b) / (z - a))


def _ray_crosses_segment(c, a, b):
    """Does the ray {t c : t >= 1} meet the segment [a, b]?"""
    d = b - a
    den = _cross(d, c)
    if den == 0:
        return False
    t = _cross(d, a) / den
    s = _cross(c, a) / den
    return t >= 1 and 0 <= s <= 1


def _core(x, r, sr, Q, L, sector):
    S = (1 + r) * Q ** 3 + 2 * sr * x * Q ** 2
    disc = L.sqrt(S * S - 4 * Q * Q)
    a, b = _order_ab((S - disc) / 2, (S + disc) / 2, sector)
    c = -2 / ((1 + r) * Q)
    sheet = -1 if _ray_crosses_segment(c, a, b) else 1
    return S, a, b, c, sheet


def _F_expr(x, r, sr, Q, S, Rc, L):
    v = ((1 + r) * sr * x * Rc / 2
         - (1 + r) * L.log(2 * Rc - 4 / ((1 + r) * Q) - S)
         + (r - 1) * L.log((1 + r) * Q ** 3 + (1 + r) * Q ** 2 * Rc + S)
         + L.log(S * S - 4 * Q * Q))
    return v.real


def _phi(z, r, Q, S, R, L):
    """phi~(z) with the caller's choice of R (either sheet)."""
    return (R / (Q * z * z) + (1 + r - S / (2 * Q ** 3)) * R / z
            - (1 + r) * L.log(2 * z + 2 * R - S)
            + (r - 1) * L.log((2 * Q * R - S * z + 2 * Q * Q) / z)
            + L.log(S * S - 4 * Q * Q) - (1 + r) * 1j * L.pi)


def _dphi(z, r, Q, R):
    return -((1 + r) * z + 2 / Q) * R / z ** 3


_CALIBRATION: dict = {}


def _calibration(r) -> int:
    """Sign applied to the ray-continued R_c so that F > 0 at x = 3|x_c| on the real axis.

    Computed once per r, then read-only.
    """
    key = float(r)
    with _TRACKERS_LOCK:
        if key in _CALIBRATION:
            return _CALIBRATION[key]
    tr = _tracker(r)
    x = 3 * abs(tr.xc)
    q = tr.value(x)
    theta_c = cmath.phase(tr.xc)
    S, a, b, c, sheet = _core(x, tr.r, tr.sr, q, _D, _sector(x, theta_c))
    Rc = sheet * _rtilde(c, a, b, _D)
    sign = 1 if _F_expr(x, tr.r, tr.sr, q, S, Rc, _D) > 0 else -1
    with _TRACKERS_LOCK:
        _CALIBRATION.setdefault(key, sign)
        return _CALIBRATION[key]


@dataclass(frozen=True)
class SpectralData:
    x: mpmath.mpc
    r: float
    Q: mpmath.mpc
    S: mpmath.mpc
    a: mpmath.mpc
    b: mpmath.mpc
    c: mpmath.mpc
    Rc: mpmath.mpc
    track_path: str
    rc_sheet: int = 1
    prec: int = DEFAULT_PREC

    def R(self, z, sheet: int = 1):
        with mpmath.workprec(self.prec):
            return sheet * _rtilde(mpmath.mpc(z), self.a, self.b, _M)

    def residuals(self) -> dict:
        """Defining-equation residuals (relative) at working precision."""
        with mpmath.workprec(self.prec):
            r = mpmath.mpf(self.r)
            sr = mpmath.sqrt(r)
            Q, S, a, b, c, Rc = self.Q, self.S, self.a, self.b, self.c, self.Rc
            q2 = Q * Q

            def rel(v, *scale):
                return float(abs(v) / max(1, *(abs(s) for s in scale)))

            return {
                "Q_quartic": q_quartic_residual(Q, self.x, r, self.prec),
                "a_plus_b": rel(a + b - S, S),
                "a_times_b": rel(a * b - q2, q2),
                "Rc_squared": rel(Rc * Rc - (c * c - S * c + q2), c * c, S * c, q2),
                "moment_1": rel(((1 + r) * Q ** 3 - S) / (2 * q2) + sr * self.x, sr * self.x),
                "moment_2": rel((4 * q2 - 2 * (1 + r) * S * Q ** 3 - S * S) / (8 * q2 * q2) - (r - 1) / 2,
                                r, S * S / q2 ** 2, S / Q),
            }


def spectral_data(x, r, prec: int = DEFAULT_PREC, check: bool = True) -> SpectralData:
    """Q, S, a, b, c and R_c at (x, r) on the physical branch."""
    tr = _tracker(r)
    xd = complex(x)
    q_d = tr.value(xd)
    sign = _calibration(r)
    theta_c = cmath.phase(tr.xc)
    with mpmath.workprec(prec):
        xm = mpmath.mpc(x)
        rr = mpmath.mpf(r)
        sr = mpmath.sqrt(rr)
        Q = _polish_Q(xm, rr, q_d, prec)
        S, a, b, c, sheet = _core(xm, rr, sr, Q, _M, _sector(xd, theta_c))
        sheet *= sign
        Rc = sheet * _rtilde(c, a, b, _M)
        sd = SpectralData(xm, float(r), Q, S, a, b, c, Rc, tr.path_description(xd), sheet, prec)
    if check:
        res = sd.residuals()
        # the fixed tolerances assume >= 192 bits; lower precisions get a rounding-scaled bar
        floor = 2.0 ** (-prec + 24)
        tol = {"moment_1": max(MOMENT_TOL, floor), "moment_2": max(MOMENT_TOL, floor)}
        bad = {k: v for k, v in res.items() if v > tol.get(k, max(1e-24, floor))}
        if bad:
            raise MomentViolation(f"spectral data at x={xd}, r={r} fails defining equations: {bad}")
    return sd


# ---------------------------------------------------------------- phase function

def _on_segment(z, a, b, tol):
    d = b - a
    t = ((z - a) * d.conjugate()).real / abs(d) ** 2
    if t <= 0 or t >= 1:
        return False
    return abs(z - (a + t * d)) <= tol * max(1, abs(d))


def re_phi_tilde(z, sd: SpectralData, sheet: int = 1) -> float:
    """Re phi~(z): R~ cut on the straight segment [a, b], logarithms principal.

    ``sheet=-1`` evaluates with -R~ instead, which negates the result.
    """
    with mpmath.workprec(sd.prec):
        z = mpmath.mpc(z)
        if z == 0:
            raise SingularPoint("phi~ is singular at z = 0")
        if z == sd.a or z == sd.b:
            return 0.0 if z == sd.a else float(_phi(z, mpmath.mpf(sd.r), sd.Q, sd.S, 0 * z, _M).real)
        if _on_segment(z, sd.a, sd.b, mpmath.mpf(2) ** (-sd.prec // 2)):
            raise SingularPoint(f"z={complex(z)} lies on the cut [a, b]")
        R = sheet * _rtilde(z, sd.a, sd.b, _M)
        return float(_phi(z, mpmath.mpf(sd.r), sd.Q, sd.S, R, _M).real)


def boundary_function(x, r, prec: int = DEFAULT_PREC, check: bool = True) -> float:
    """F(x; r): zero on the boundary of E_r, positive just outside it.

    With ``check`` the value is compared against Re phi~(c) on the sheet of R_c.
    """
    sd = spectral_data(x, r, prec)
    with mpmath.workprec(prec):
        rr = mpmath.mpf(r)
        val = _F_expr(sd.x, rr, mpmath.sqrt(rr), sd.Q, sd.S, sd.Rc, _M)
    val = float(val)
    if check:
        other = re_phi_tilde(sd.c, sd, sheet=sd.rc_sheet)
        if abs(val - other) > ROUTE_TOL * max(1.0, abs(val)):
            raise BranchMismatch(f"boundary routes disagree at x={complex(x)}: {val} vs {other}")
    return val


def _boundary_function_d(x, tr: _QTracker, sign: int) -> float:
    """Double-precision F for scanning."""
    q = tr.value(x)
    S, a, b, c, sheet = _core(x, tr.r, tr.sr, q, _D, _sector(x, cmath.phase(tr.xc)))
    Rc = sign * sheet * _rtilde(c, a, b, _D)
    return _F_expr(x, tr.r, tr.sr, q, S, Rc, _D)


# ---------------------------------------------------------------- boundary curve

@dataclass
class BoundaryCurve:
    r: float
    points: list
    residuals: list
    corner: mpmath.mpc
    thetas: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def as_complex(self) -> list:
        return [complex(p) for p in self.points]

    @property
    def max_step(self) -> float:
        z = self.as_complex()
        return max(abs(z[i + 1] - z[i]) for i in range(len(z) - 1))

    def crossing(self, theta: float):
        """Traced boundary point on the ray at angle theta (must be a sampled ray)."""
        for t, p in zip(self.thetas, self.points):
            if abs(t - theta) < 1e-12:
                return p
        raise DomainError(f"no traced ray at angle {theta}")

    @property
    def real_crossing(self):
        return self.crossing(0.0).real

    @property
    def imag_crossing(self):
        return self.crossing(math.pi / 2).imag

    def radius_at(self, theta: float) -> float:
        """Boundary radius along arg x = theta, interpolated linearly between rays."""
        # the lower half mirrors the upper half
        th = abs(math.atan2(math.sin(theta), math.cos(theta)))
        ts = self.thetas
        i = bisect.bisect_left(ts, th)
        if i < len(ts) and abs(ts[i] - th) < 1e-15:
            return abs(complex(self.points[i]))
        i = min(max(i, 1), len(ts) - 1)
        t0, t1 = ts[i - 1], ts[i]
        r0, r1 = abs(complex(self.points[i - 1])), abs(complex(self.points[i]))
        return r0 + (r1 - r0) * (th - t0) / (t1 - t0)

    def contains(self, x, scale: float = 1.0) -> bool:
        """Is x inside the region bounded by the curve scaled radially by ``scale``?"""
        x = complex(x)
        return abs(x) < scale * self.radius_at(cmath.phase(x))


def _refine(f_d, f_mp, lo, hi, flo, fhi, tol):
    """Brent in double, then secant steps at extended precision."""
    a, b, fa, fb = lo, hi, flo, fhi
    # Illinois regula falsi in double
    side = 0
    for _ in range(200):
        c = (a * fb - b * fa) / (fb - fa)
        fc = f_d(c)
        if fc == 0 or abs(b - a) < 1e-15 * max(1, abs(c)):
            a = b = c
            break
        if (fc > 0) == (fb > 0):
            b, fb = c, fc
            if side == -1:
                fa /= 2
            side = -1
        else:
            a, fa = c, fc
            if side == 1:
                fb /= 2
            side = 1
    x0 = mpmath.mpf((a + b) / 2)
    x1 = x0 * (1 + mpmath.mpf(2) ** -40)
    f0, f1 = f_mp(x0), f_mp(x1)
    for _ in range(8):
        if abs(f1) <= tol * 1e-6 or f1 == f0:
            break
        x0, x1, f0 = x1, x1 - f1 * (x1 - x0) / (f1 - f0), f1
        f1 = f_mp(x1)
    if abs(f0) < abs(f1):
        x1, f1 = x0, f0
    return x1, abs(f1)


def _ray_crossing(theta, tr, sign, prec, n_scan=96):
    """Innermost genuine zero of F along arg x = theta."""
    u = cmath.exp(1j * theta)
    rmax = 3 * abs(tr.xc)

    def f_d(rho):
        return _boundary_function_d(rho * u, tr, sign)

    def f_mp(rho):
        with mpmath.workprec(prec):
            x = mpmath.mpc(rho * mpmath.cos(theta), rho * mpmath.sin(theta)) if theta else mpmath.mpc(rho)
            return mpmath.mpf(boundary_function(x, tr.r, prec, check=False))

    rhos = [RADIUS_WINDOW_MIN + (rmax - RADIUS_WINDOW_MIN) * k / n_scan for k in range(n_scan + 1)]
    prev_r, prev_f = rhos[0], f_d(rhos[0])
    for rho in rhos[1:]:
        fr = f_d(rho)
        if (fr > 0) != (prev_f > 0):
            root, res = _refine(f_d, f_mp, prev_r, rho, prev_f, fr, BOUNDARY_TOL)
            # a sign change without a small value is a jump in the R_c branch, not a zero
            if res <= BOUNDARY_TOL:
                return root, res
        prev_r, prev_f = rho, fr
    raise NoCrossing(f"no zero of the boundary function on the ray arg x = {theta} for r={tr.r}",
                     theta=theta)


def trace_boundary(r, samples_per_quadrant: int = SAMPLES_PER_QUADRANT,
                   prec: int = DEFAULT_PREC, arc_step: float = ARC_STEP) -> BoundaryCurve:
    """Closed polyline of the boundary of E_r, counterclockwise from the positive real axis.

    Rays at angles k*pi/(2N), k = 0..2N, cover the closed upper half-plane, and
    extra rays are bisected in wherever neighbouring points are more than
    ``arc_step`` apart (the boundary runs almost radially near the corners when
    r > 1).  The corners are inserted exactly; the lower half is the mirror image.
    """
    _check_r(r)
    if samples_per_quadrant < 2:
        raise DomainError("samples_per_quadrant must be >= 2")
    tr = _tracker(r)
    sign = _calibration(r)
    xc = corner_point(r, prec)
    with mpmath.workprec(prec):
        frac_c = float(mpmath.arg(xc) / mpmath.pi)
    corner_fracs = {frac_c: xc, 1 - frac_c: -xc.conjugate()}
    N = samples_per_quadrant

    def ray_point(frac):
        th = float(frac) * math.pi
        rho, res = _ray_crossing(th, tr, sign, prec)
        with mpmath.workprec(prec):
            if frac == 0:
                p = mpmath.mpc(rho)
            elif frac == 1:
                p = mpmath.mpc(-rho)
            elif frac == Fraction(1, 2):
                p = mpmath.mpc(0, rho)
            else:
                p = rho * mpmath.expjpi(mpmath.mpf(frac.numerator) / frac.denominator)
        return p, float(res)

    pts = {}
    for k in range(2 * N + 1):
        frac = Fraction(k, 2 * N)
        if any(abs(float(frac) - fc) < 1e-9 for fc in corner_fracs):
            continue
        pts[frac] = ray_point(frac)
    for fc, pc in corner_fracs.items():
        pts[fc] = (pc, _corner_residual(pc, r, prec))

    min_dfrac = 1e-7
    for _ in range(40):
        keys = sorted(pts, key=float)
        gaps = [(k0, k1) for k0, k1 in zip(keys, keys[1:])
                if abs(complex(pts[k0][0]) - complex(pts[k1][0])) > arc_step
                and float(k1) - float(k0) > min_dfrac]
        if not gaps:
            break
        for k0, k1 in gaps:
            f0 = k0 if isinstance(k0, Fraction) else Fraction(k0).limit_denominator(1 << 40)
            f1 = k1 if isinstance(k1, Fraction) else Fraction(k1).limit_denominator(1 << 40)
            pts[(f0 + f1) / 2] = ray_point((f0 + f1) / 2)

    keys = sorted(pts, key=float)
    thetas = [float(k) * math.pi for k in keys]
    upper = [pts[k][0] for k in keys]
    res = [pts[k][1] for k in keys]
    lower = [p.conjugate() for p in upper[-2:0:-1]]
    return BoundaryCurve(float(r), upper + lower, res + res[-2:0:-1], xc, thetas)


def _corner_residual(xc, r, prec) -> float:
    """|F| at the corner, where Q is the double root of its quartic and R_c vanishes."""
    tr = _tracker(r)
    q_near = tr.value(complex(xc) * (1 + 1e-6))
    with mpmath.workprec(prec):
        rr = mpmath.mpf(r)
        sr = mpmath.sqrt(rr)
        roots = quartic_roots([mpmath.mpc(v) for v in _q_coeffs(xc, rr, sr)], _M)
        roots.sort(key=lambda z: abs(z - q_near))
        Q = (roots[0] + roots[1]) / 2
        S, a, b, c, _ = _core(xc, rr, sr, Q, _M, 0)
        Rc = _rtilde(c, a, b, _M)
        return float(abs(_F_expr(xc, rr, sr, Q, S, Rc, _M)))


# ---------------------------------------------------------------- the band Sigma

def _ends_coefficient(sd: SpectralData):
    """C with phi~ ~ C (z-a)^{3/2} near a (up to the sheet sign)."""
    r = sd.r
    a, b, Q = complex(sd.a), complex(sd.b), complex(sd.Q)
    return cmath.sqrt(4 / 9 * ((1 + r) * a + 2 / Q) ** 2 * (a - b) / a ** 6)


def _trace_from(sd, psi, max_steps, tol):
    r = sd.r
    a, b, Q, S = complex(sd.a), complex(sd.b), complex(sd.Q), complex(sd.S)
    scale = abs(a - b)
    hmax = 0.02 * scale
    h = 1e-4 * scale
    big = 50 * max(1.0, abs(a), abs(b))

    def u_of(z, R):
        return _phi(z, r, Q, S, R, _D).real

    def cont_R(z, R_prev):
        R = _rtilde(z, a, b, _D)
        return R if abs(R - R_prev) <= abs(R + R_prev) else -R

    z = a + h * cmath.exp(1j * psi)
    R = _rtilde(z, a, b, _D)
    t = cmath.exp(1j * psi)
    pts = [sd.a]
    for _ in range(6):
        g = _dphi(z, r, Q, R)
        z = z - u_of(z, R) * g.conjugate() / abs(g) ** 2
        R = cont_R(z, R)
    if abs(u_of(z, R)) > tol:
        return None
    pts.append(z)
    steps = 0
    while steps < max_steps:
        steps += 1
        if abs(z - b) < 1.5 * h:
            pts.append(sd.b)
            return pts
        zp = z + h * t
        Rp = cont_R(zp, R)
        ok = False
        for _ in range(8):
            g = _dphi(zp, r, Q, Rp)
            if g == 0:
                break
            uval = u_of(zp, Rp)
            zp = zp - uval * g.conjugate() / abs(g) ** 2
            Rp = cont_R(zp, Rp)
            if abs(u_of(zp, Rp)) <= tol:
                ok = True
                break
        if not ok or abs(zp - (z + h * t)) > 0.5 * h:
            h *= 0.5
            if h < 1e-12 * scale:
                return None
            continue
        g = _dphi(zp, r, Q, Rp)
        tn = 1j * g.conjugate() / abs(g)
        if (tn * t.conjugate()).real < 0:
            tn = -tn
        z, R, t = zp, Rp, tn
        pts.append(z)
        if abs(z) > big or abs(z) < 1e-6 * scale:
            return None
        h = min(1.3 * h, hmax, 0.5 * abs(z))
    return None


def _winding(pts) -> float:
    z = [complex(p) for p in pts]
    return sum(cmath.phase(z[i + 1] / z[i]) for i in range(len(z) - 1))


def trace_sigma(sd: SpectralData, max_steps: int = 20000, tol: float = 1e-12) -> list:
    """The Re phi~ = 0 level line from a to b that runs clockwise about the origin.

    Returns the polyline starting exactly at a and ending exactly at b.
    """
    C = _ends_coefficient(sd)
    arcs = []
    for k in range(3):
        psi = (2 / 3) * (math.pi / 2 + k * math.pi - cmath.phase(C))
        pts = _trace_from(sd, psi, max_steps, tol)
        if pts is not None:
            arcs.append((_winding(pts), pts))
    clockwise = [arc for arc in arcs if arc[0] < 0]
    if not clockwise:
        raise TraceDiverged(f"no clockwise zero-level arc from a to b within {max_steps} steps "
                            f"(x={complex(sd.x)}, r={sd.r})")
    pts = min(clockwise, key=lambda arc: arc[0])[1]
    with mpmath.workprec(sd.prec):
        return [mpmath.mpc(p) for p in pts]


# ---------------------------------------------------------------- leading-order asymptotics

def in_elliptic_region(x, r) -> bool:
    """Is x strictly inside E_r (judged on the ray through x)?"""
    tr = _tracker(r)
    x = complex(x)
    try:
        rho, _ = _ray_crossing(cmath.phase(x), tr, _calibration(r), 64)
    except NoCrossing:
        return False
    return abs(x) < float(rho)


def asymptotic_w(family: str, x, r, prec: int = DEFAULT_PREC, warn: bool = True,
                 sd: SpectralData | None = None) -> mpmath.mpc:
    """Leading-order value of n^{-1/2} w_{m,n}(m^{1/2} x) for r = m/n."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    if sd is None:
        sd = spectral_data(x, r, prec)
    if warn and in_elliptic_region(x, r):
        warnings.warn(f"x={complex(x)} lies inside E_{r}; the genus-zero formula does not apply there",
                      stacklevel=2)
    with mpmath.workprec(sd.prec):
        Q, S = sd.Q, sd.S
        if family == "I":
            return -1 / Q - S / (2 * Q * Q)
        if family == "II":
            return 1 / Q - S / (2 * Q * Q)
        return -2 * mpmath.sqrt(sd.r) * sd.x + S / (Q * Q)


# ---------------------------------------------------------------- signature chart

@dataclass
class PhaseChart:
    window: tuple
    grid_n: int
    signs: list
    a: mpmath.mpc
    b: mpmath.mpc
    c: mpmath.mpc

    def coordinates(self, i: int, j: int) -> complex:
        x0, x1, y0, y1 = self.window
        n = self.grid_n
        re = x0 + (x1 - x0) * j / (n - 1) if n > 1 else x0
        im = y0 + (y1 - y0) * i / (n - 1) if n > 1 else y0
        return complex(re, im)


def phase_chart(x, r, window, grid_n: int, prec: int = DEFAULT_PREC) -> PhaseChart:
    """Sign of Re phi~ on a grid_n x grid_n mesh; singular cells are 0.

    ``window`` is (re_min, re_max, im_min, im_max); row i is the i-th imaginary level.
    """
    if grid_n < 1:
        raise DomainError("grid_n must be >= 1")
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x1 > x0 and y1 > y0):
        raise DomainError("window must satisfy x0 < x1 and y0 < y1")
    sd = spectral_data(x, r, prec)
    a, b, Q, S = complex(sd.a), complex(sd.b), complex(sd.Q), complex(sd.S)
    chart = PhaseChart((x0, x1, y0, y1), grid_n, [], sd.a, sd.b, sd.c)
    seg_tol = 1e-12
    for i in range(grid_n):
        row = []
        for j in range(grid_n):
            z = chart.coordinates(i, j)
            if z == 0 or z == a or z == b or _on_segment(z, a, b, seg_tol):
                row.append(0)
                continue
            try:
                v = _phi(z, sd.r, Q, S, _rtilde(z, a, b, _D), _D).real
            except (ValueError, ZeroDivisionError):
                row.append(0)
                continue
            row.append(0 if not math.isfinite(v) or v == 0 else (1 if v > 0 else -1))
        chart.signs.append(row)
    return chart
