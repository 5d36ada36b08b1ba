"""Generalized Legendre transform machinery in quaternionic dimension one.

Geometry is returned in a fixed real coframe e^a as a metric matrix G and
three antisymmetric matrices W_i with omega_i = W_i,ab e^a (x) e^b, so that a
wedge product a ^ b is stored as (a b^T - b a^T) / 2.  With this storage the
complex structures I_i = -G^-1 W_i square to -1.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .majorana import MajoranaSpinor, chi_frame_j1, chi_frame_matrix, evaluate
from .spin import DomainError, Quaternion, rotate_components, rotate_dual_components

# I1 I2 = ORIENTATION * I3 for the geometries built here (I_i = -G^-1 W_i);
# fixed on the Atiyah-Hitchin closed form and guarded by a regression test.
ORIENTATION = -1


class DegeneracyError(ArithmeticError):
    """A frame or ratio became singular at the requested point."""


class SignatureError(ValueError):
    """Input would produce an indefinite or negative metric."""


@dataclass(frozen=True)
class HSpinor:
    j: int
    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.shape != (2 * self.j + 1,):
            raise DomainError(f"spin {self.j} needs {2 * self.j + 1} components")
        object.__setattr__(self, "h", h)

    def __getitem__(self, m: int) -> complex:
        return self.h[m + self.j]

    def reality_defect(self) -> float:
        signs = np.array([(-1) ** abs(m) for m in range(-self.j, self.j + 1)])
        return float(np.abs(np.conj(self.h) - signs * self.h[::-1]).max())


def wedge(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    return 0.5 * (np.outer(a, b) - np.outer(b, a))


def sym(a, b) -> np.ndarray:
    """Real symmetrized product (a (x) conj b + conj b (x) a)/2 for complex rows."""
    a, b = np.asarray(a), np.asarray(b)
    return 0.5 * (np.outer(a, np.conj(b)) + np.outer(np.conj(b), a)).real


@dataclass(frozen=True)
class FramedGeometry:
    G: np.ndarray
    W: np.ndarray
    coframe: tuple = ("drho", "sigma1", "sigma2", "sigma3")
    lam: float = float("nan")
    extras: dict = field(default_factory=dict, compare=False)

    def complex_structures(self) -> np.ndarray:
        Ginv = np.linalg.inv(self.G)
        return np.array([-Ginv @ Wi for Wi in self.W])

    def hyperkahler_defects(self):
        """(max |I_i^2 + 1|, max |I1 I2 - ORIENTATION I3|) over the entries."""
        I = self.complex_structures()
        eye = np.eye(len(self.G))
        sq = max(np.abs(Ii @ Ii + eye).max() for Ii in I)
        alg = np.abs(I[0] @ I[1] - ORIENTATION * I[2]).max()
        return float(sq), float(alg)

    def signature(self):
        ev = np.linalg.eigvalsh(self.G)
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    def transformed(self, E: np.ndarray, coframe: tuple) -> "FramedGeometry":
        """Pull back along old_coframe = E @ new_coframe."""
        return FramedGeometry(E.T @ self.G @ E, np.array([E.T @ Wi @ E for Wi in self.W]),
                              coframe, self.lam, self.extras)

    def scaled(self, factor: float) -> "FramedGeometry":
        return FramedGeometry(factor * self.G, factor * self.W, self.coframe, self.lam, self.extras)


# ----------------------------------------------------------------- contours

@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    orientation: int = 1


def figure_eight(a: complex, ac: complex, radius: float | None = None, outer: float | None = None):
    """Counterclockwise loop about a and clockwise loop about its partner ac.

    A partner at infinity is encircled by the counterclockwise circle
    |zeta| = outer, which is the same loop seen from the other chart.
    """
    if np.isinf(abs(ac)):
        r = radius if radius is not None else 0.5
        return (Circle(a, r, 1), Circle(0j, outer if outer is not None else 2.0, 1))
    if np.isinf(abs(a)):
        r = radius if radius is not None else 0.5
        return (Circle(0j, outer if outer is not None else 2.0, -1), Circle(ac, r, -1))
    if radius is None:
        radius = 0.5 * abs(a - ac)
    return (Circle(a, radius, 1), Circle(ac, radius, -1))


ContourSpec = Sequence[Circle]


def _circle_integral(f: Callable, c: Circle, tol: float) -> complex:
    n = 64
    prev = None
    while n <= 2 ** 16:
        t = 2 * np.pi * np.arange(n) / n
        z = c.center + c.radius * np.exp(1j * t)
        vals = np.array([f(zz) for zz in z]) * (z - c.center)
        val = c.orientation * np.mean(vals)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return complex(val)
        prev, n = val, 2 * n
    raise DomainError("contour quadrature did not converge")


def contour_h(H2: Callable, x: MajoranaSpinor, contour: ContourSpec, n: int, tol: float = 1e-12) -> complex:
    """Loop integral of zeta^(n-1) H''(x_NS(zeta), zeta) dzeta / (2 pi i).

    H2 receives (x_NS, zeta) with x_NS = zeta^-j x_N(zeta).
    """
    def integrand(z):
        xns = evaluate(x, z) / z ** x.j
        return z ** (n - 1) * H2(xns, z)

    return sum(_circle_integral(integrand, c, tol) for c in contour)


# ------------------------------------------------------------ Gibbons-Hawking

def gibbons_hawking(U: float, A=None) -> FramedGeometry:
    """g = U dr^2 / 2 + (dpsi + A)^2 / (2U) and omega = -U dr^dr / 2 - dr ^ (dpsi + A).

    Returned in the coframe (dx, dy, dz, dpsi + A); A only enters through
    that coframe.
    """
    if not U > 0:
        raise SignatureError("Gibbons-Hawking potential must be positive")
    G = np.diag([U / 2, U / 2, U / 2, 1 / (2 * U)])
    e = np.eye(4)
    W = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        W.append(-U * wedge(e[j], e[k]) - wedge(e[i], e[3]))
    return FramedGeometry(G, np.array(W), ("dx", "dy", "dz", "dpsi+A"))


def gibbons_hawking_coordinate_frame(U: float, A) -> np.ndarray:
    """E with (dx, dy, dz, dpsi + A) = E (dx, dy, dz, dpsi)."""
    E = np.eye(4)
    E[3, :3] = A
    return E


def spherical_to_cartesian(w_minus, w_zero, w_plus):
    """(v1, v2, v3) from spherical components v_{+-} = +-(v1 +- i v2)/2, v_0 = v3."""
    return w_plus - w_minus, -1j * (w_plus + w_minus), w_zero


def _rotate_triplet(q: Quaternion, forms) -> np.ndarray:
    """Apply the spin-1 rotation to a triplet of matrices (m = -1, 0, +1)."""
    stack = np.array(forms)
    flat = stack.reshape(3, -1)
    rotated = np.array([rotate_components(1, q, flat[:, i]) for i in range(flat.shape[1])]).T
    return rotated.reshape(stack.shape)


def _real_part(M: np.ndarray, what: str, tol: float = 1e-8) -> np.ndarray:
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M.imag).max() > tol * scale:
        raise DegeneracyError(f"{what} has an imaginary part {np.abs(M.imag).max():.2e}")
    return M.real


def unrotated_forms(W: np.ndarray, q: Quaternion) -> np.ndarray:
    """Undo the spin-1 rotation by q of a Cartesian triplet of real 2-form matrices."""
    w_p = 0.5 * (W[0] + 1j * W[1])
    w_m = -0.5 * (W[0] - 1j * W[1])
    wm, w0, wp = _rotate_triplet(q.inverse(), [w_m, W[2].astype(complex), w_p])
    return np.array([_real_part(w, "omega") for w in spherical_to_cartesian(wm, w0, wp)])


def j1_canonical_form(h0: float, q: Quaternion, rho: float) -> FramedGeometry:
    """Spin-1 canonical form with theta_{+1} = h0 chi_{+1}, theta_0 = h0 chi_0/2 + i Theta.

    Coframe (drho, sigma1, sigma2, Theta), lambda = -1/h0.
    """
    chi = chi_frame_j1(rho)
    chi_p = np.append(chi[0], 0)
    chi_0 = np.append(chi[1], 0)
    theta1 = h0 * chi_p
    theta0 = 0.5 * h0 * chi_0 + 1j * np.array([0, 0, 0, 1.0])
    lam = -1.0 / h0
    G = lam * (sym(theta0, theta0) + sym(theta1, theta1))
    w_p = lam * 1j * wedge(theta1, np.conj(theta0))
    w_0 = lam * 1j * (wedge(theta0, np.conj(theta0)) - wedge(theta1, np.conj(theta1)))
    w_m = -np.conj(w_p)
    wm, w0, wp = _rotate_triplet(q, [w_m, w_0, w_p])
    W = np.array([_real_part(w, "omega") for w in spherical_to_cartesian(wm, w0, wp)])
    return FramedGeometry(G, W, ("drho", "sigma1", "sigma2", "Theta"), lam)


# -------------------------------------------------------------- O(4) Ansatz

def r2_dual(h) -> complex:
    hm2, hm1, h0, hp1, hp2 = h
    return hp2 * hm2 - 4 * hp1 * hm1 + 3 * h0 * h0


def r3_dual(h) -> complex:
    hm2, hm1, h0, hp1, hp2 = h
    return np.linalg.det(np.array([[hp2, hp1, h0], [hp1, h0, hm1], [h0, hm1, hm2]], dtype=complex))


def composite(h) -> np.ndarray:
    """Quadratic composite H_m (m = -2..2) of a dual-normalized spin-2 object."""
    hm2, hm1, h0, hp1, hp2 = h
    return np.array([
        hm2 * h0 - hm1 * hm1,
        0.5 * hm2 * hp1 - 0.5 * hm1 * h0,
        hp2 * hm2 / 6 + hp1 * hm1 / 3 - h0 * h0 / 2,
        0.5 * hp2 * hm1 - 0.5 * hp1 * h0,
        hp2 * h0 - hp1 * hp1,
    ], dtype=complex)


def theta_frame_matrix(H: np.ndarray, r2: float) -> np.ndarray:
    """T2 with chi = T2 theta, rows/columns ordered (+2, +1, -1, -2)."""
    Hm2, Hm1, H0, Hp1, Hp2 = H
    Hp = H0 - r2 / 6
    return np.array([
        [Hp, 0, 0, 0],
        [2 * Hm1, Hp, Hp2, 0],
        [0, Hm2, Hp, 2 * Hp1],
        [0, 0, 0, Hp],
    ], dtype=complex)


def ringed(h: HSpinor, q: Quaternion) -> np.ndarray:
    """Spin-2 components h viewed from the rotated frame: dual-normalized D(q^-1) h.

    Rotation leaves rounding-level violations of alternating reality, and near a
    singular Hankel matrix those turn into visible imaginary parts of r3 and
    det T2.  Defects that small are projected out.
    """
    hr = rotate_dual_components(2, q.inverse(), h.h)
    signs = np.array([1, -1, 1, -1, 1])
    mirror = signs * np.conj(hr[::-1])
    if np.abs(hr - mirror).max() <= 1e-10 * max(np.abs(hr).max(), 1e-300):
        hr = 0.5 * (hr + mirror)
    return hr


def o4_ansatz(h: HSpinor, q: Quaternion, rho: float, e2: float, cond_warn: float = 1e10) -> FramedGeometry:
    """Metric and symplectic forms determined by five alternating-real h_m."""
    if h.j != 2:
        raise DomainError("the O(4) Ansatz takes spin-2 data")
    hr = ringed(h, q)
    r2 = r2_dual(hr).real
    r3 = r3_dual(hr).real
    H = composite(hr)
    Hp0 = (H[2] - r2 / 6).real
    lam = r3 * Hp0
    T1 = chi_frame_matrix(rho, e2)
    T2 = theta_frame_matrix(H, r2)
    det2 = -r3 * hr[2].real * Hp0 ** 2
    scale = max(abs(r3 * hr[2]) * Hp0 ** 2, np.abs(T2).max() ** 4, 1e-300)
    if abs(det2) < 1e-12 * scale or Hp0 >= 0:
        raise DegeneracyError("theta frame is singular (r3, h0 or H'0 vanishes)")
    cond = np.linalg.cond(T2)
    if cond > cond_warn:
        warnings.warn(f"ill-conditioned theta frame (cond {cond:.1e})", RuntimeWarning, stacklevel=2)
    theta = np.linalg.solve(T2, T1)
    th2, th1 = theta[0], theta[1]
    G = lam * (sym(th1, th1) + sym(th2, th2))
    w_p = lam * 1j * wedge(th2, np.conj(th1))
    w_0 = lam * 1j * (wedge(th1, np.conj(th1)) - wedge(th2, np.conj(th2)))
    w_m = lam * 1j * wedge(np.conj(th2), th1)
    wm, w0, wp = _rotate_triplet(q, [w_m, w_0, w_p])
    W = np.array([_real_part(w, "omega") for w in spherical_to_cartesian(wm, w0, wp)])
    extras = {"h_ringed": hr, "r2": r2, "r3": r3, "H": H, "Hp0": Hp0, "T1": T1, "T2": T2,
              "theta": theta, "det_T1": np.linalg.det(T1), "det_T2": np.linalg.det(T2)}
    return FramedGeometry(G, W, ("drho", "sigma1", "sigma2", "sigma3"), lam, extras)


# ------------------------------------------------------------------ Hankel

def _hankel(h: dict, lo2: int, size: int) -> complex:
    """det of (h_{s})_{row, col} with s = lo2 + row + col."""
    M = np.array([[h[lo2 + r + c] for c in range(size)] for r in range(size)], dtype=complex)
    return complex(np.linalg.det(M))


def hankel_phi(h) -> float:
    """Phi = det(h_{m+m'})_{-1<=m,m'<=1} / det(h_{m+m'})_{-1/2<=m,m'<=1/2}, spin 2."""
    hd = dict(zip(range(-2, 3), np.asarray(h, dtype=complex)))
    den = _hankel(hd, -1, 2)
    if abs(den) < 1e-300:
        raise DegeneracyError("vanishing Hankel denominator")
    val = _hankel(hd, -2, 3) / den
    return val.real if abs(val.imag) <= 1e-10 * max(1.0, abs(val)) else val


def hankel_a(h) -> complex:
    """A = i det(h_{m+m'})_{-3/2<=m,m'<=1/2} / det(h_{m+m'})_{-1/2<=m,m'<=1/2}; h given for -3..1."""
    hd = dict(zip(range(-3, 2), np.asarray(h, dtype=complex)))
    den = _hankel(hd, -1, 2)
    if abs(den) < 1e-300:
        raise DegeneracyError("vanishing Hankel denominator")
    return 1j * _hankel(hd, -3, 3) / den


# -------------------------------------------------------- finite differences

def exterior_derivative_defect(forms: Callable, xi, step: float = 1e-3):
    """Scale-relative size of d(omega) for coordinate-basis 2-form matrices.

    forms(xi) returns an array (k, n, n) of antisymmetric matrices.  For each
    form the cyclic sums d_a W_bc + d_b W_ca + d_c W_ab are computed by
    second-order central differences and divided by the largest
    |d_a W_bc| + |d_b W_ca| + |d_c W_ab|.
    """
    xi = np.asarray(xi, dtype=float)
    dim = len(xi)
    derivs = []
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = step
        derivs.append((np.asarray(forms(xi + e)) - np.asarray(forms(xi - e))) / (2 * step))
    D = np.array(derivs)  # (a, k, b, c)
    out = []
    for k in range(D.shape[1]):
        num, den = 0.0, 0.0
        for a in range(dim):
            for b in range(a + 1, dim):
                for c in range(b + 1, dim):
                    t = (D[a, k, b, c], D[b, k, c, a], D[c, k, a, b])
                    num = max(num, abs(sum(t)))
                    den = max(den, sum(abs(x) for x in t))
        out.append(num / den if den > 0 else 0.0)
    return out
