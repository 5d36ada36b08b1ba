"""Quaternions, integer-spin Wigner matrices and angular-momentum coupling.

Conventions
-----------
A quaternion ``q = q0 + q1 i + q2 j + q3 k`` multiplies by the Hamilton rules.
The Wigner matrix is the factorial sum

    D^j_{mm'}(q) = sqrt((j+m)!(j-m)!(j+m')!(j-m')!) / |q|^{2j} * i^{-2j}
                   * sum_s w^s wbar^{m-m'+s} v^{j+m'-s} (-vbar)^{j-m-s}
                     / (s! (m-m'+s)! (j+m'-s)! (j-m-s)!)

with ``w = q1 + i q2`` and ``v = q3 + i q0``.  With this assignment
``D(q) D(q') = D(q q')`` and ``D(1) = 1``.  Spinor components are indexed
``m = -j..j`` along both axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt, sqrt

import numpy as np

MAX_SPIN = 8


class DomainError(ValueError):
    """Input outside the domain of a mathematical operation."""


@dataclass(frozen=True)
class Quaternion:
    q0: float
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        return cls(*map(float, a))

    def as_array(self) -> np.ndarray:
        return np.array([self.q0, self.q1, self.q2, self.q3])

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a0, a1, a2, a3 = self.q0, self.q1, self.q2, self.q3
            b0, b1, b2, b3 = other.q0, other.q1, other.q2, other.q3
            return Quaternion(
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            )
        return Quaternion(*(c * other for c in self.as_array()))

    __rmul__ = __mul__

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(self.as_array() + other.as_array()))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(self.as_array() - other.as_array()))

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-self.as_array()))

    def conj(self) -> "Quaternion":
        return Quaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def inverse(self) -> "Quaternion":
        n2 = self.norm() ** 2
        if n2 == 0.0:
            raise DomainError("zero quaternion has no inverse")
        return self.conj() * (1.0 / n2)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero quaternion")
        return self * (1.0 / n)

    @property
    def w(self) -> complex:
        return complex(self.q1, self.q2)

    @property
    def v(self) -> complex:
        return complex(self.q3, self.q0)

    @classmethod
    def from_wv(cls, w: complex, v: complex) -> "Quaternion":
        return cls(v.imag, w.real, w.imag, v.real)


ONE = Quaternion(1.0)
UNIT_I = Quaternion(0.0, 1.0)
UNIT_J = Quaternion(0.0, 0.0, 1.0)
UNIT_K = Quaternion(0.0, 0.0, 0.0, 1.0)


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    return Quaternion.from_array(rng.normal(size=4)).normalized()


@dataclass(frozen=True)
class SpinIndex:
    j: int
    m: int

    def __post_init__(self):
        if self.j < 0 or abs(self.m) > self.j:
            raise DomainError(f"invalid spin index j={self.j}, m={self.m}")


def _check_spin(j: int) -> None:
    if int(j) != j or j < 0 or j > MAX_SPIN:
        raise DomainError(f"spin must be an integer in [0, {MAX_SPIN}], got {j}")


@lru_cache(maxsize=None)
def _factorials(n: int) -> tuple:
    return tuple(factorial(i) for i in range(n + 1))


def wigner_d(j: int, q: Quaternion) -> np.ndarray:
    """Spin-j Wigner matrix of a nonzero quaternion, rows/columns m = -j..j."""
    _check_spin(j)
    n2 = q.norm() ** 2
    if n2 == 0.0:
        raise DomainError("Wigner matrix of the zero quaternion")
    f = _factorials(4 * j)
    w, v = q.w, q.v
    wb, mvb = w.conjugate(), -v.conjugate()
    dim = 2 * j + 1
    out = np.zeros((dim, dim), dtype=complex)
    phase = (1j) ** (-2 * j)
    for a, m in enumerate(range(-j, j + 1)):
        for b, mp in enumerate(range(-j, j + 1)):
            total = 0j
            for s in range(max(0, mp - m), min(j + mp, j - m) + 1):
                total += (w ** s * wb ** (m - mp + s) * v ** (j + mp - s) * mvb ** (j - m - s)
                          / (f[s] * f[m - mp + s] * f[j + mp - s] * f[j - m - s]))
            norm = sqrt(f[j + m] * f[j - m] * f[j + mp] * f[j - mp])
            out[a, b] = norm * phase * total
    return out / n2 ** j


def spherical_norm(j: int, m: int) -> float:
    """c^j_m = sqrt((j+m)!(j-m)!/(2j)!)."""
    if abs(m) > j:
        raise DomainError(f"|m| > j for j={j}, m={m}")
    return sqrt(factorial(j + m) * factorial(j - m) / factorial(2 * j))


def spherical_norms(j: int) -> np.ndarray:
    return np.array([spherical_norm(j, m) for m in range(-j, j + 1)])


def _exact_sqrt_sign(x: Fraction) -> float:
    """Float value of sign(x) * sqrt(|x|) for a rational x."""
    sgn = -1.0 if x < 0 else 1.0
    x = abs(x)
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return sgn * rn / rd
    return sgn * sqrt(num / den)


def _is_half_integer(x) -> bool:
    return (2 * Fraction(x)).denominator == 1


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol by the Racah single-sum formula (exact internally)."""
    j1, j2, j3, m1, m2, m3 = (Fraction(x) for x in (j1, j2, j3, m1, m2, m3))
    if not all(_is_half_integer(x) for x in (j1, j2, j3, m1, m2, m3)):
        return 0.0
    if m1 + m2 + m3 != 0:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if (j - m).denominator != 1:
            return 0.0
    if (j1 + j2 + j3).denominator != 1:
        return 0.0

    def fi(x):
        return factorial(int(x))

    tri = Fraction(fi(j1 + j2 - j3) * fi(j1 - j2 + j3) * fi(-j1 + j2 + j3), fi(j1 + j2 + j3 + 1))
    pre = tri * fi(j1 + m1) * fi(j1 - m1) * fi(j2 + m2) * fi(j2 - m2) * fi(j3 + m3) * fi(j3 - m3)
    kmin = int(max(0, j2 - j3 - m1, j1 - j3 + m2))
    kmax = int(min(j1 + j2 - j3, j1 - m1, j2 + m2))
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (fi(k) * fi(j1 + j2 - j3 - k) * fi(j1 - m1 - k) * fi(j2 + m2 - k)
               * fi(j3 - j2 + m1 + k) * fi(j3 - j1 - m2 + k))
        total += Fraction((-1) ** k, den)
    phase = -1 if int(j1 - j2 - m3) % 2 else 1
    # sqrt(pre) * total, with the sign carried by total
    return phase * _exact_sqrt_sign(pre * total * total) * (1 if total >= 0 else -1)


def clebsch_gordan(j1, m1, j2, m2, j3, m3) -> float:
    """<j1 m1 j2 m2 | j3 m3> = (-1)^(j1-j2+m3) sqrt(2 j3 + 1) (j1 j2 j3; m1 m2 -m3)."""
    three_j = wigner_3j(j1, j2, j3, m1, m2, -m3)
    if three_j == 0.0:
        return 0.0
    phase = -1 if int(Fraction(j1) - Fraction(j2) + Fraction(m3)) % 2 else 1
    return phase * sqrt(2 * float(j3) + 1) * three_j


def rotate_components(j: int, q: Quaternion, x) -> np.ndarray:
    """Rotate unnormalized spin-j components: x -> c^{-1} D(q) c x.

    Composition: rotating by q then by q' equals rotating once by q' q.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (2 * j + 1,):
        raise DomainError(f"expected {2 * j + 1} components for spin {j}, got {x.shape}")
    c = spherical_norms(j)
    return (wigner_d(j, q) @ (c * x)) / c


def rotate_dual_components(j: int, q: Quaternion, h) -> np.ndarray:
    """Rotate components in the dual normalization: h -> c D(q) c^{-1} h."""
    h = np.asarray(h, dtype=complex)
    c = spherical_norms(j)
    return c * (wigner_d(j, q) @ (h / c))


def quaternion_from_euler(phi: float, theta: float, psi: float) -> Quaternion:
    """Unit quaternion of the Euler angles (phi, theta, psi).

    Its Wigner matrix is D^j_{mm'} = e^{i m psi} d^j_{mm'}(theta) e^{i m' phi}
    with the standard small-d matrix, and (0, 0, 0) maps to the identity.
    """
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    sp, dm = (phi + psi) / 2, (phi - psi) / 2
    return Quaternion(ct * np.cos(sp), -st * np.sin(dm), st * np.cos(dm), -ct * np.sin(sp))


def _euler_quaternion_derivatives(phi, theta, psi):
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    sp, dm = (phi + psi) / 2, (phi - psi) / 2
    cs, ss, cd, sd = np.cos(sp), np.sin(sp), np.cos(dm), np.sin(dm)
    d_phi = np.array([-ct * ss, -st * cd, -st * sd, -ct * cs]) / 2
    d_theta = np.array([-st * cs, -ct * sd, ct * cd, st * ss]) / 2
    d_psi = np.array([-ct * ss, st * cd, st * sd, -ct * cs]) / 2
    return d_phi, d_theta, d_psi


def left_invariant_coframe(phi: float, theta: float, psi: float) -> np.ndarray:
    """Components of (sigma1, sigma2, sigma3) along (dphi, dtheta, dpsi).

    The sigmas are the imaginary parts of q^{-1} dq for the Euler-angle
    quaternion, so d sigma1 = -2 sigma2 ^ sigma3 and cyclically.  Row i holds
    sigma_{i+1}; the matrix is singular at theta in {0, pi}.
    """
    q = quaternion_from_euler(phi, theta, psi)
    qinv = q.conj()
    out = np.empty((3, 3))
    for col, dq in enumerate(_euler_quaternion_derivatives(phi, theta, psi)):
        out[:, col] = (qinv * Quaternion.from_array(dq)).as_array()[1:]
    return out
