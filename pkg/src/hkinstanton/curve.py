"""The elliptic curve eta^2 = x_N(zeta) of a real quartic Majorana polynomial.

The root a4 of largest modulus is sent to infinity by

    X = x_{-2} (S4 - P4 / (zeta - a4)),   Y = eta x_{-2} P4 / (zeta - a4)^2,

which puts the curve in the form Y^2 = X^3 - g2 X - g3, and the Abel map
zeta -> u_zeta inverts X = wp(u), 2Y = wp'(u).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import elliptic as ell
from .majorana import MajoranaSpinor, evaluate, evaluate_derivative, invariants
from .spin import DomainError

INF = complex("inf")


def is_infinite(z: complex) -> bool:
    return bool(np.isinf(abs(z)))


@dataclass(frozen=True)
class SpectralCurve:
    x: MajoranaSpinor
    lattice: ell.WeierstrassLattice
    roots: tuple
    a4: complex
    s4: complex
    p4: complex

    @property
    def x_m2(self) -> complex:
        return self.x[-2]

    def with_shift(self, lam: int, lam_p: int) -> "SpectralCurve":
        return SpectralCurve(self.x, self.lattice.with_shift(lam, lam_p), self.roots, self.a4, self.s4, self.p4)


def spectral_curve(x: MajoranaSpinor, lattice: ell.WeierstrassLattice | None = None,
                   shift=(0, 0)) -> SpectralCurve:
    if x.j != 2:
        raise DomainError("the spectral curve needs a quartic (j = 2) spinor")
    if lattice is None:
        _, _, g2, g3, delta = invariants(x)
        if not np.isreal(g2) or not np.isreal(g3) or not delta > 0:
            raise DomainError("curve is degenerate or the spinor is not real")
        lattice = ell.lattice_from_invariants(float(np.real(g2)), float(np.real(g3)))
    if abs(x[-2]) == 0:
        raise DomainError("x_{-2} = 0: a root sits at infinity")
    roots = list(np.roots(x.x))
    roots.sort(key=abs)
    a4 = complex(roots[-1])
    others = [complex(r) for r in roots[:-1]]
    d = [a - a4 for a in others]
    s4 = (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]) / 3
    p4 = d[0] * d[1] * d[2]
    lattice = lattice.with_shift(*shift)
    return SpectralCurve(x, lattice, tuple(others + [a4]), a4, s4, p4)


@dataclass(frozen=True)
class CurvePoint:
    """(zeta, eta) with its Weierstrass image; zeta = inf carries eta/zeta^2."""
    zeta: complex
    eta: complex
    X: complex
    Y: complex

    @property
    def at_infinity(self) -> bool:
        return is_infinite(self.zeta)


def sqrt_x(curve: SpectralCurve, zeta: complex, branch: int = 1) -> complex:
    """A square root of x_N(zeta); branch = +1 is the principal root."""
    return branch * complex(np.sqrt(complex(evaluate(curve.x, zeta))))


def to_weierstrass(curve: SpectralCurve, zeta: complex, eta: complex | None = None) -> CurvePoint:
    """Image of (zeta, eta) in Weierstrass coordinates.

    At zeta = inf, eta is read as the leading coefficient eta/zeta^2 (default
    sqrt(x_{-2})).  The point zeta = a4 goes to X = Y = inf.
    """
    xm2 = curve.x_m2
    if is_infinite(zeta):
        if eta is None:
            eta = complex(np.sqrt(xm2))
        return CurvePoint(INF, complex(eta), xm2 * curve.s4, eta * xm2 * curve.p4)
    zeta = complex(zeta)
    if eta is None:
        eta = sqrt_x(curve, zeta)
    if zeta == curve.a4:
        return CurvePoint(zeta, complex(eta), INF, INF)
    d = zeta - curve.a4
    X = xm2 * (curve.s4 - curve.p4 / d)
    Y = eta * xm2 * curve.p4 / (d * d)
    return CurvePoint(zeta, complex(eta), X, Y)


def antipodal_point(zeta: complex, eta: complex):
    """Image of (zeta, eta) under the real structure (-1/conj zeta, -conj eta/conj zeta^2)."""
    if is_infinite(zeta):
        # eta holds eta/zeta^2 here
        return 0j, -np.conj(eta)
    if zeta == 0:
        return INF, -np.conj(eta)
    zc = np.conj(zeta)
    return -1 / zc, -np.conj(eta) / zc ** 2


@dataclass(frozen=True)
class TorusPoint:
    u: complex
    n: int
    n_p: int
    frak_u: complex
    point: CurvePoint


def torus_point(curve: SpectralCurve, zeta: complex, eta: complex | None = None) -> TorusPoint:
    """Abel image u_zeta in the fundamental domain with its odd labels (n, n')."""
    pt = to_weierstrass(curve, zeta, eta)
    L = curve.lattice
    if is_infinite(pt.X):
        raise ell.PoleError("zeta = a4 is the origin of the torus")
    u = ell.inverse_wp(L, pt.X, pt.Y)
    n, n_p = ell.quadrant_labels(L, u)
    frak = u - 0.5 * n * L.omega - 0.5 * n_p * L.omega_p
    return TorusPoint(u, n, n_p, frak, pt)


def antipodal_torus_point(curve: SpectralCurve, tp: TorusPoint) -> TorusPoint:
    zc, ec = antipodal_point(tp.point.zeta, tp.point.eta)
    return torus_point(curve, zc, ec)


def upsilons(curve: SpectralCurve, zeta: complex, eta: complex | None = None, tol: float = 1e-9):
    """(upsilon, upsilon') = (frak_u + conj frak_u, frak_u - conj frak_u)."""
    tp = torus_point(curve, zeta, eta)
    tpc = antipodal_torus_point(curve, tp)
    ups = tp.frak_u - tpc.frak_u
    ups_p = tp.frak_u + tpc.frak_u
    scale = max(1.0, curve.lattice.omega, abs(curve.lattice.omega_p))
    if abs(ups.imag) > 1e-7 * scale or abs(ups_p.real) > 1e-7 * scale:
        raise DomainError("inconsistent branches: upsilon is not real")
    if abs(ups.imag) > tol * scale or abs(ups_p.real) > tol * scale:
        raise DomainError("upsilon reality violated beyond tolerance")
    return ups.real, 1j * ups_p.imag


def _u_phi(curve: SpectralCurve, phi) -> complex:
    if phi is None or is_infinite(phi):
        pt = to_weierstrass(curve, INF)
    else:
        pt = to_weierstrass(curve, phi)
    return ell.inverse_wp(curve.lattice, pt.X, pt.Y)


def z_phi_u(curve: SpectralCurve, phi, u: complex) -> complex:
    """Z_phi(u) = (zeta_W(u - u_phi) + zeta_W(u + u_phi)) / 2."""
    L = curve.lattice
    up = _u_phi(curve, phi)
    return 0.5 * (ell.zeta_w(L, u - up) + ell.zeta_w(L, u + up))


def z_phi(curve: SpectralCurve, phi, zeta: complex, eta: complex | None = None) -> complex:
    return z_phi_u(curve, phi, torus_point(curve, zeta, eta).u)


def enhanced_z(curve: SpectralCurve, tp: TorusPoint) -> complex:
    """Z_inf(u) - (n/2) eta_W - (n'/2) eta'_W at a torus point."""
    L = curve.lattice
    return z_phi_u(curve, INF, tp.u) - 0.5 * tp.n * L.eta - 0.5 * tp.n_p * L.eta_p


def x_pm_y_pm(x: MajoranaSpinor):
    """(x_+, x_-, y_+, y_-) built from complex-conjugate roots of x_{+-2}."""
    if x.j != 2:
        raise DomainError("needs a quartic spinor")
    if abs(x[2]) == 0:
        raise DomainError("x_{+-2} = 0: degenerate configuration")
    sp = complex(np.sqrt(x[2]))
    sm = np.conj(sp)
    x_plus = (x[0] / 3 + 2 * sm * sp).real
    x_minus = (x[0] / 3 - 2 * sm * sp).real
    y_plus = 1j * (x[1] * sm + x[-1] * sp).imag
    y_minus = (x[1] * sm - x[-1] * sp).real
    return x_plus, x_minus, y_plus, y_minus


def cubic_determinant(x: MajoranaSpinor, X: complex) -> complex:
    """The 3x3 determinant that reproduces X^3 - g2 X - g3."""
    xp, xm, yp, ym = x_pm_y_pm(x)
    s = np.sqrt(xp - xm)
    M = np.array([
        [X - xp, -1j * yp / s, 0],
        [-1j * yp / s, X + xp + xm, ym / s],
        [0, ym / s, X - xm],
    ], dtype=complex)
    return complex(np.linalg.det(M))


def _continued_sqrt(curve: SpectralCurve, path, eta0: complex, npts: int = 2001):
    """Values of sqrt(x_N) along a sampled path, continuous from eta0."""
    ts = np.linspace(0.0, 1.0, npts)
    vals = np.sqrt(np.polyval(curve.x.x, path(ts)).astype(complex))
    if abs(vals[0] + eta0) < abs(vals[0] - eta0):
        vals[0] = -vals[0]
    for i in range(1, npts):
        if abs(vals[i] + vals[i - 1]) < abs(vals[i] - vals[i - 1]):
            vals[i] = -vals[i]
    return ts, vals


def _complex_quad(f, a, b, tol):
    # tight epsrel near machine precision trips roundoff warnings; the
    # returned error estimate is reported to the caller instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        re = quad(lambda t: f(t).real, a, b, epsabs=0, epsrel=tol, limit=400)
        im = quad(lambda t: f(t).imag, a, b, epsabs=0, epsrel=tol, limit=400)
    return complex(re[0], im[0]), max(re[1], im[1])


def abel_integral(curve: SpectralCurve, z0: complex, eta0: complex, z1: complex, tol: float = 1e-12):
    """Integral of dzeta / (2 eta) along the segment z0 -> z1, continuing eta from eta0.

    Returns the integral and the branch of eta reached at z1.
    """
    def path(t):
        return z0 + (z1 - z0) * t

    ts, vals = _continued_sqrt(curve, path, eta0)

    def branch_at(t):
        i = min(int(round(t * (len(ts) - 1))), len(ts) - 1)
        v = complex(np.sqrt(complex(np.polyval(curve.x.x, path(t)))))
        return v if abs(v - vals[i]) <= abs(v + vals[i]) else -v

    val, err = _complex_quad(lambda t: (z1 - z0) / (2 * branch_at(t)), 0.0, 1.0, tol)
    if err > 1e-8 * max(1.0, abs(val)):
        raise DomainError(f"quadrature did not converge (error estimate {err:.2e})")
    return val, complex(vals[-1])


def _root_for(curve: SpectralCurve, e: float) -> complex:
    """The finite Majorana root sent to the Weierstrass root e."""
    best, dist = None, np.inf
    for a in curve.roots[:3]:
        X = to_weierstrass(curve, a, 0j).X
        if abs(X - e) < dist:
            best, dist = a, abs(X - e)
    return best


def period_cycle_integral(curve: SpectralCurve, cycle: str, tol: float = 1e-12) -> complex:
    """Loop integral of dzeta / (2 eta) around the cut joining two branch points.

    The loop around a4 and the root over e1 gives the real period 2 omega,
    the loop around a4 and the root over e3 the imaginary period 2 omega',
    both up to orientation.  The loop is collapsed onto the segment between
    the branch points, where the substitution
    zeta = a + (b - a)(1 - cos t)/2 removes the endpoint singularities.
    """
    L = curve.lattice
    e = {"real": L.e1, "imaginary": L.e3}[cycle]
    a, b = curve.a4, _root_for(curve, e)
    rest = [r for r in curve.roots if r not in (a, b)]
    xm2 = curve.x_m2

    def g(t):
        z = a + (b - a) * (1 - np.cos(t)) / 2
        return xm2 * (z - rest[0]) * (z - rest[1])

    ts = np.linspace(0, np.pi, 4001)
    vals = np.sqrt(g(ts).astype(complex))
    for i in range(1, len(ts)):
        if abs(vals[i] + vals[i - 1]) < abs(vals[i] - vals[i - 1]):
            vals[i] = -vals[i]

    def integrand(t):
        i = min(int(round(t / np.pi * (len(ts) - 1))), len(ts) - 1)
        v = complex(np.sqrt(complex(g(t))))
        if abs(v + vals[i]) < abs(v - vals[i]):
            v = -v
        return 1.0 / (2j * v)

    val, err = _complex_quad(integrand, 0.0, np.pi, tol)
    if err > 1e-8 * max(1.0, abs(val)):
        raise DomainError(f"cycle quadrature did not converge (error estimate {err:.2e})")
    # twice the path integral between the branch points
    return 2 * val


def du_dzeta(curve: SpectralCurve, zeta: complex, eta: complex) -> complex:
    return 1 / (2 * eta)


def dz_inf_dzeta(curve: SpectralCurve, zeta: complex, eta: complex) -> complex:
    return -evaluate_derivative(curve.x, zeta, 2) / (12 * eta)
