"""Weierstrass functions for rectangular lattices (real invariants, Delta > 0).

The public invariants (g2, g3) describe the cubic Y^2 = X^3 - g2 X - g3 with
X = wp(u) and 2Y = wp'(u), i.e. the functions below are the standard ones
with invariants (4 g2, 4 g3).  The cubic's roots e1 > e2 > e3 are shared by
both normalizations.

Evaluation goes through Jacobi theta series in a real nome q = exp(i pi tau),
tau = omega'/omega.  When |tau| < 1 the lattice is first rotated by -i so
that the nome stays below exp(-pi).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

import numpy as np
from scipy.special import ellipkm1, elliprf

from .spin import DomainError


class PoleError(ArithmeticError):
    """Evaluation at a lattice point, where the function has a pole."""


class _ThetaSeries:
    """Theta-function evaluator for half-periods (w1 > 0, w3 in i R_+)."""

    def __init__(self, w1: float, w3: complex, e1: float):
        self.w1 = w1
        self.w3 = w3
        self.e1 = e1
        tau = w3 / w1
        self.q = float(np.exp(-np.pi * tau.imag))
        nmax = 1
        while self.q ** (nmax * nmax) > 1e-18 * self.q ** 0.25:
            nmax += 1
        n = np.arange(nmax + 2)
        self.n = n
        self.c1 = 2 * (-1.0) ** n * self.q ** ((n + 0.5) ** 2)
        self.c2 = 2 * self.q ** ((n + 0.5) ** 2)
        self.c3 = 2 * self.q ** (n[1:] ** 2)
        self.c4 = 2 * (-1.0) ** n[1:] * self.q ** (n[1:] ** 2)
        odd = 2 * n + 1
        self.t1p0 = float(np.sum(self.c1 * odd))
        self.t2_0 = float(np.sum(self.c2))
        self.t3_0 = 1 + float(np.sum(self.c3))
        self.t4_0 = 1 + float(np.sum(self.c4))
        self.eta1 = np.pi ** 2 / (12 * w1) * float(np.sum(self.c1 * odd ** 3)) / self.t1p0
        self.k = np.pi / (2 * w1)

    def thetas(self, v: complex):
        odd = 2 * self.n + 1
        even = 2 * self.n[1:]
        t1 = np.sum(self.c1 * np.sin(odd * v))
        t1p = np.sum(self.c1 * odd * np.cos(odd * v))
        t2 = np.sum(self.c2 * np.cos(odd * v))
        t3 = 1 + np.sum(self.c3 * np.cos(even * v))
        t4 = 1 + np.sum(self.c4 * np.cos(even * v))
        return complex(t1), complex(t1p), complex(t2), complex(t3), complex(t4)

    def reduce(self, u: complex):
        """u = u0 + 2 m w1 + 2 n w3 with u0 in the centred period box."""
        m = round(u.real / (2 * self.w1))
        n = round(u.imag / (2 * self.w3.imag))
        return u - 2 * m * self.w1 - 2 * n * self.w3, m, n

    def sigma0(self, u0: complex) -> complex:
        v = self.k * u0
        t1 = self.thetas(v)[0]
        return np.exp(self.eta1 * u0 * u0 / (2 * self.w1)) * t1 / (self.k * self.t1p0)

    def zeta0(self, u0: complex) -> complex:
        v = self.k * u0
        t1, t1p, *_ = self.thetas(v)
        if t1 == 0:
            raise PoleError("zeta at a lattice point")
        return self.eta1 * u0 / self.w1 + self.k * t1p / t1

    def wp_pair0(self, u0: complex):
        """(wp, wp') from the associated-sigma ratios sigma_i/sigma."""
        v = self.k * u0
        t1, _, t2, t3, t4 = self.thetas(v)
        if t1 == 0 or abs(u0) < 1e-300:
            raise PoleError("wp at a lattice point")
        s1 = self.k * self.t3_0 * self.t4_0 * t2 / t1
        s2 = self.k * self.t2_0 * self.t4_0 * t3 / t1
        s3 = self.k * self.t2_0 * self.t3_0 * t4 / t1
        return self.e1 + s1 * s1, -2 * s1 * s2 * s3


@dataclass(frozen=True)
class WeierstrassLattice:
    g2: float
    g3: float
    e1: float
    e2: float
    e3: float
    omega: float
    omega_p: complex
    eta: complex = 0.0
    eta_p: complex = 0.0
    shift: tuple = (0, 0)
    _rep: _ThetaSeries = field(default=None, repr=False, compare=False)
    _rotated: bool = field(default=False, repr=False, compare=False)

    @property
    def delta(self) -> float:
        return 4 * self.g2 ** 3 - 27 * self.g3 ** 2

    @property
    def roots(self):
        return self.e1, self.e2, self.e3

    def half_period(self, i: int) -> complex:
        return {1: self.omega, 2: self.omega + self.omega_p, 3: self.omega_p}[i]

    def eta_value(self, i: int) -> complex:
        return {1: self.eta, 2: self.eta + self.eta_p, 3: self.eta_p}[i]

    def with_shift(self, lam: int, lam_p: int) -> "WeierstrassLattice":
        """Same lattice with the fundamental domain shifted by (lam w, lam' w')."""
        return WeierstrassLattice(self.g2, self.g3, self.e1, self.e2, self.e3, self.omega,
                                  self.omega_p, self.eta, self.eta_p, (int(lam), int(lam_p)),
                                  self._rep, self._rotated)


def cubic_roots(g2: float, g3: float):
    """Ordered real roots of X^3 - g2 X - g3 (requires Delta > 0)."""
    delta = 4 * g2 ** 3 - 27 * g3 ** 2
    if not delta > 0:
        raise DomainError("non-real root configuration: Delta <= 0")
    r = 2 * np.sqrt(g2 / 3)
    arg = np.clip(3 * g3 / (g2 * r), -1.0, 1.0)
    t = np.arccos(arg) / 3
    roots = sorted((r * np.cos(t - 2 * np.pi * k / 3) for k in range(3)), reverse=True)
    polished = []
    for x in roots:
        for _ in range(2):
            f = x ** 3 - g2 * x - g3
            df = 3 * x * x - g2
            if df != 0:
                x -= f / df
        polished.append(float(x))
    return tuple(polished)


def lattice_from_invariants(g2: float, g3: float) -> WeierstrassLattice:
    e1, e2, e3 = cubic_roots(g2, g3)
    return _build(float(g2), float(g3), e1, e2, e3)


def lattice_from_standard_invariants(g2s: float, g3s: float) -> WeierstrassLattice:
    """Lattice for textbook invariants, wp'^2 = 4 wp^3 - g2s wp - g3s.

    This module writes the cubic as X^3 - g2 X - g3, so g2 = g2s/4, g3 = g3s/4.
    """
    return lattice_from_invariants(g2s / 4, g3s / 4)


def lattice_from_roots(e1: float, e2: float, e3: float) -> WeierstrassLattice:
    """Lattice from exactly known ordered roots summing to zero."""
    if not (e1 > e2 > e3):
        raise DomainError("roots must satisfy e1 > e2 > e3")
    if abs(e1 + e2 + e3) > 1e-12 * max(abs(e1), abs(e3)):
        raise DomainError("roots must sum to zero")
    g2 = -(e1 * e2 + e2 * e3 + e3 * e1)
    g3 = e1 * e2 * e3
    return _build(g2, g3, e1, e2, e3)


def _build(g2, g3, e1, e2, e3) -> WeierstrassLattice:
    span = e1 - e3
    omega = float(ellipkm1((e1 - e2) / span)) / np.sqrt(span)
    omega_p = 1j * float(ellipkm1((e2 - e3) / span)) / np.sqrt(span)
    rotated = omega_p.imag < omega
    if rotated:
        rep = _ThetaSeries(omega_p.imag, 1j * omega, -e3)
    else:
        rep = _ThetaSeries(omega, omega_p, e1)
    lat = WeierstrassLattice(g2, g3, e1, e2, e3, omega, omega_p, _rep=rep, _rotated=rotated)
    eta = zeta_w(lat, omega)
    eta_p = zeta_w(lat, omega_p)
    return WeierstrassLattice(g2, g3, e1, e2, e3, omega, omega_p, eta, eta_p, _rep=rep, _rotated=rotated)


# Rotation by -i maps the lattice to one with real half-period |omega'|:
#   wp(u) = -wp~(-i u), wp'(u) = i wp~'(-i u), zeta(u) = -i zeta~(-i u),
#   sigma(u) = i sigma~(-i u).

def _sigma_zeta_reduced(L: WeierstrassLattice, u: complex, want_sigma: bool):
    rep = L._rep
    uu = -1j * u if L._rotated else u
    u0, m, n = rep.reduce(uu)
    eta3 = (rep.w3 / rep.w1) * rep.eta1 - 1j * np.pi / (2 * rep.w1)
    H = m * rep.eta1 + n * eta3
    if want_sigma:
        sign = -1 if (m + n + m * n) % 2 else 1
        val = sign * np.exp(2 * H * (u0 + m * rep.w1 + n * rep.w3)) * rep.sigma0(u0)
        return 1j * val if L._rotated else val
    if abs(u0) < 1e-15 * rep.w1:
        raise PoleError("zeta at a lattice point")
    val = rep.zeta0(u0) + 2 * H
    return -1j * val if L._rotated else val


def sigma_w(L: WeierstrassLattice, u: complex) -> complex:
    return complex(_sigma_zeta_reduced(L, complex(u), True))


def zeta_w(L: WeierstrassLattice, u: complex) -> complex:
    return complex(_sigma_zeta_reduced(L, complex(u), False))


def wp_and_prime(L: WeierstrassLattice, u: complex):
    rep = L._rep
    uu = -1j * complex(u) if L._rotated else complex(u)
    u0, _, _ = rep.reduce(uu)
    if abs(u0) < 1e-15 * rep.w1:
        raise PoleError("wp at a lattice point")
    p, dp = rep.wp_pair0(u0)
    if L._rotated:
        return complex(-p), complex(1j * dp)
    return complex(p), complex(dp)


def wp(L: WeierstrassLattice, u: complex) -> complex:
    return wp_and_prime(L, u)[0]


def wp_prime(L: WeierstrassLattice, u: complex) -> complex:
    return wp_and_prime(L, u)[1]


def sigma_assoc(L: WeierstrassLattice, i: int, u: complex) -> complex:
    """sigma_i(u) = exp(-eta_i u) sigma(u + omega_i) / sigma(omega_i)."""
    wi, ei = L.half_period(i), L.eta_value(i)
    return complex(np.exp(-ei * u) * sigma_w(L, u + wi) / sigma_w(L, wi))


def reduce_to_domain(L: WeierstrassLattice, u: complex, tol: float = 1e-12) -> complex:
    """Representative of u modulo 2 Lambda in the shifted fundamental domain.

    The domain is ((lam-1) w, (lam+1) w] x ((lam'-1) |w'|, (lam'+1) |w'|]
    with closed upper and right edges.
    """
    lam, lam_p = L.shift
    w, wp_ = L.omega, L.omega_p.imag
    a = (u.real / w - (lam - 1)) / 2
    b = (u.imag / wp_ - (lam_p - 1)) / 2
    ka = ceil(a - tol) - 1
    kb = ceil(b - tol) - 1
    return complex(u.real - 2 * ka * w, u.imag - 2 * kb * wp_)


def quadrant_labels(L: WeierstrassLattice, u: complex, tol: float = 1e-12):
    """Odd integers (n, n') attached to a point of the fundamental domain.

    n = 2 ceil(Re u / w) - 1 and n' = 2 ceil(Im u / |w'|) - 1; on the
    default domain this is the quadrant table I (1,1), II (-1,1),
    III (-1,-1), IV (1,-1).
    """
    def label(t):
        c = ceil(t - tol) if abs(t - round(t)) > tol else round(t)
        return 2 * c - 1
    return label(u.real / L.omega), label(u.imag / L.omega_p.imag)


def inverse_wp(L: WeierstrassLattice, X: complex, Y: complex, check_tol: float = 1e-8) -> complex:
    """u in the fundamental domain with wp(u) = X and wp'(u) = 2Y."""
    X, Y = complex(X), complex(Y)
    scale = max(1.0, abs(X)) ** 3
    if abs(Y * Y - (X ** 3 - L.g2 * X - L.g3)) > check_tol * scale:
        raise DomainError("point is not on the Weierstrass curve")
    # branch points map to half-periods; elliprf is ill-defined there
    for i, e in enumerate(L.roots, start=1):
        if abs(X - e) <= 1e-14 * max(1.0, abs(e)) and abs(Y) <= 1e-7 * scale ** (1 / 3):
            return reduce_to_domain(L, L.half_period(i))
    args = [X - e for e in L.roots]
    if any(a.imag == 0 and a.real < 0 for a in args):
        # on the cut: take the limit from above, the sign check below picks the branch
        args = [complex(a.real, 1e-300) for a in args]
    u = complex(elliprf(*args))
    for cand in (u, -u):
        p, dp = wp_and_prime(L, cand)
        if abs(p - X) <= 1e-6 * max(1.0, abs(X)) and abs(dp - 2 * Y) <= 1e-6 * max(1.0, abs(Y)) * 2:
            u = cand
            break
    else:
        p, dp = wp_and_prime(L, u)
        if abs(dp + 2 * Y) < abs(dp - 2 * Y):
            u = -u
    # Newton polish on wp(u) = X away from branch points
    for _ in range(3):
        p, dp = wp_and_prime(L, u)
        if abs(dp) < 1e-6 * max(1.0, abs(X)):
            break
        step = (p - X) / dp
        u -= step
        if abs(step) < 1e-16 * max(1.0, abs(u)):
            break
    return reduce_to_domain(L, u)


def lattice_derivatives(L: WeierstrassLattice, dg2: float, dg3: float):
    """First-order variations (d omega, d omega') of the half-periods."""
    d = L.delta
    a = (2 * L.g2 ** 2 * dg2 - 9 * L.g3 * dg3) / (2 * d)
    b = (9 * L.g3 * dg2 - 6 * L.g2 * dg3) / (2 * d)
    return -a * L.omega + b * L.eta, -a * L.omega_p + b * L.eta_p
