"""Majorana polynomials of integer spin j and their rotation invariants.

A spinor is stored as unnormalized coefficients x_m, m = -j..j, of

    x_N(zeta) = sum_m x_m zeta^(j - m),

so the coefficient array is already ordered from the highest power down.
Reality is the alternating condition conj(x_m) = (-1)^m x_{-m}; roots then
come in antipodal pairs {a, -1/conj(a)}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin import DomainError, Quaternion, rotate_components, spherical_norms

INFINITY = complex("inf")


def antipode(a: complex) -> complex:
    """Antipodal point -1/conj(a) on the Riemann sphere."""
    if a == 0:
        return INFINITY
    if np.isinf(abs(a)):
        return 0j
    return -1.0 / np.conj(a)


@dataclass(frozen=True)
class MajoranaSpinor:
    j: int
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        if x.shape != (2 * self.j + 1,):
            raise DomainError(f"spin {self.j} needs {2 * self.j + 1} coefficients, got {x.shape}")
        object.__setattr__(self, "x", x)

    def __getitem__(self, m: int) -> complex:
        if abs(m) > self.j:
            raise IndexError(m)
        return self.x[m + self.j]

    @property
    def ms(self) -> range:
        return range(-self.j, self.j + 1)

    def reality_defect(self) -> float:
        signs = np.array([(-1) ** abs(m) for m in self.ms])
        return float(np.abs(np.conj(self.x) - signs * self.x[::-1]).max())

    def scale(self) -> float:
        return float(np.abs(self.x).max())


def spinor(x) -> MajoranaSpinor:
    x = np.asarray(x, dtype=complex)
    return MajoranaSpinor((len(x) - 1) // 2, x)


def random_real_spinor(j: int, rng: np.random.Generator) -> MajoranaSpinor:
    """Random coefficients obeying the alternating reality condition."""
    x = np.zeros(2 * j + 1, dtype=complex)
    x[j] = rng.normal()
    for m in range(1, j + 1):
        z = complex(rng.normal(), rng.normal())
        x[j + m] = z
        x[j - m] = (-1) ** m * np.conj(z)
    return MajoranaSpinor(j, x)


def evaluate(x: MajoranaSpinor, zeta: complex) -> complex:
    return complex(np.polyval(x.x, zeta))


def evaluate_derivative(x: MajoranaSpinor, zeta: complex, order: int = 1) -> complex:
    return complex(np.polyval(np.polyder(x.x, order), zeta))


@dataclass(frozen=True)
class RootFactorization:
    """x_N(zeta) = rho * prod_i (zeta - a_i)(1 + conj(a_i) zeta) / (1 + |a_i|^2).

    A root equal to infinity stands for the degenerate pair {inf, 0}; its
    factor is -zeta.
    """
    roots: tuple
    rho: float

    @property
    def partners(self) -> tuple:
        return tuple(antipode(a) for a in self.roots)


def _pair_factor(a: complex, zeta):
    if np.isinf(abs(a)):
        return -zeta
    return (zeta - a) * (1 + np.conj(a) * zeta) / (1 + abs(a) ** 2)


def _factor_coeffs(a: complex) -> np.ndarray:
    if np.isinf(abs(a)):
        return np.array([-1.0, 0.0], dtype=complex)
    return np.array([np.conj(a), 1 - abs(a) ** 2, -a], dtype=complex) / (1 + abs(a) ** 2)


def from_roots(roots, rho: float) -> MajoranaSpinor:
    coeffs = np.array([complex(rho)])
    n_inf = 0
    for a in roots:
        c = _factor_coeffs(a)
        if len(c) == 2:
            n_inf += 1
        coeffs = np.convolve(coeffs, c)
    # each degenerate pair is -zeta: pad so that the degree is 2j
    j = len(roots)
    full = np.zeros(2 * j + 1, dtype=complex)
    full[n_inf: n_inf + len(coeffs)] = coeffs
    return MajoranaSpinor(j, full)


def from_wv(pairs) -> MajoranaSpinor:
    """x_N(zeta) = prod_i (w_i + zeta conj(v_i)) (v_i - zeta conj(w_i))."""
    coeffs = np.array([1.0 + 0j])
    for w, v in pairs:
        coeffs = np.convolve(coeffs, np.array([np.conj(v), w]))
        coeffs = np.convolve(coeffs, np.array([-np.conj(w), v]))
    return MajoranaSpinor(len(pairs), coeffs)


def _pair_roots(roots, tol: float):
    """Group finite nonzero roots into antipodal pairs (a, a^c)."""
    remaining = list(roots)
    pairs = []
    while remaining:
        a = remaining.pop(0)
        ac = antipode(a)
        dists = [abs(r - ac) / max(1.0, abs(ac)) for r in remaining]
        if not dists:
            raise DomainError("odd number of roots; cannot pair antipodally")
        i = int(np.argmin(dists))
        if dists[i] > tol:
            raise DomainError(f"roots do not pair antipodally (mismatch {dists[i]:.2e})")
        pairs.append((a, remaining.pop(i)))
    return pairs


def _representative(a: complex, ac: complex) -> complex:
    if a.imag > ac.imag or (a.imag == ac.imag and a.real >= ac.real):
        return a
    return ac


def factorize(x: MajoranaSpinor, pair_tol: float = 1e-6) -> RootFactorization:
    """Antipodal root pairs and positive scale of a real Majorana spinor.

    Labels are canonical: every representative but the last is the member of
    its pair with the larger imaginary part, and the last one is fixed by
    rho > 0.
    """
    c = x.x
    if not np.any(c != 0):
        raise DomainError("identically zero polynomial")
    scale = np.abs(c).max()
    nz = np.flatnonzero(np.abs(c) > 1e-14 * scale)
    lead, tail = nz[0], nz[-1]
    n_zero = len(c) - 1 - tail
    finite = np.roots(c[lead: tail + 1]) if tail > lead else np.array([])
    degenerate = [0j] * n_zero
    pairs = [_representative(complex(a), complex(b)) for a, b in _pair_roots([complex(r) for r in finite], pair_tol)]
    roots = degenerate + pairs
    if len(roots) != x.j:
        raise DomainError("root count does not match the spin; polynomial is not real")
    ref = from_roots(roots, 1.0)
    k = int(np.argmax(np.abs(ref.x)))
    rho = c[k] / ref.x[k]
    if rho.real < 0:
        roots[-1] = antipode(roots[-1])
        rho = -rho
    if abs(rho.imag) > 1e-8 * abs(rho):
        raise DomainError("scale is not real; polynomial violates the reality condition")
    return RootFactorization(tuple(roots), float(rho.real))


def invariants(x: MajoranaSpinor):
    """(r2, r3, g2, g3, Delta) written holomorphically in the coefficients.

    On real spinors these equal the quadratic and cubic rotation invariants,
    and g2 = 4 r2, g3 = 16 r3, Delta = 4 g2^3 - 27 g3^2.
    """
    if x.j == 1:
        xm, x0, xp = x.x
        r2 = 0.25 * x0 ** 2 - xp * xm
        return r2, 0.0, 4 * r2, 0.0, 4 * (4 * r2) ** 3
    if x.j != 2:
        raise DomainError("invariants are implemented for j = 1, 2")
    xm2, xm1, x0, xp1, xp2 = x.x
    g2 = 4 * xp2 * xm2 - xp1 * xm1 + x0 ** 2 / 3
    g3 = (8 / 3) * xp2 * x0 * xm2 - xp2 * xm1 ** 2 - xp1 ** 2 * xm2 + x0 * xp1 * xm1 / 3 - 2 * x0 ** 3 / 27
    g2, g3 = _real_if_close(g2), _real_if_close(g3)
    return g2 / 4, g3 / 16, g2, g3, 4 * g2 ** 3 - 27 * g3 ** 2


def _real_if_close(z, tol: float = 1e-12):
    z = complex(z)
    return z.real if abs(z.imag) <= tol * max(1.0, abs(z)) else z


def weierstrass_invariants(x: MajoranaSpinor):
    _, _, g2, g3, _ = invariants(x)
    return g2, g3


def gradient_tensors(x: MajoranaSpinor):
    """(d2, d3) with d_{i,m} = (-1)^m dg_i/dx_{-m}, arrays indexed m = -2..2."""
    if x.j != 2:
        raise DomainError("gradient tensors are defined for j = 2")
    xm2, xm1, x0, xp1, xp2 = x.x
    # partial derivatives with respect to x_{-2}, ..., x_{+2}
    dg2 = np.array([4 * xp2, -xp1, 2 * x0 / 3, -xm1, 4 * xm2])
    dg3 = np.array([
        (8 / 3) * xp2 * x0 - xp1 ** 2,
        -2 * xp2 * xm1 + x0 * xp1 / 3,
        (8 / 3) * xp2 * xm2 + xp1 * xm1 / 3 - 2 * x0 ** 2 / 9,
        -2 * xp1 * xm2 + x0 * xm1 / 3,
        (8 / 3) * x0 * xm2 - xm1 ** 2,
    ])
    signs = np.array([1, -1, 1, -1, 1])
    # entry for m reads the derivative along x_{-m}
    return signs * dg2[::-1], signs * dg3[::-1]


def reference_spinor(e1: float, e3: float) -> MajoranaSpinor:
    if not e1 > e3:
        raise DomainError("reference spinor needs e1 > e3")
    d, s = (e1 - e3) / 4, 1.5 * (e1 + e3)
    return MajoranaSpinor(2, np.array([d, 0, s, 0, d], dtype=complex))


@dataclass(frozen=True)
class QuaternionicParams:
    q: Quaternion
    rho: float
    e2: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError("rho must be positive")
        if not abs(self.e2) < self.rho / 3:
            raise DomainError("need |e2| < rho/3 for ordered roots")

    @property
    def e1(self) -> float:
        return (self.rho - self.e2) / 2

    @property
    def e3(self) -> float:
        return -(self.rho + self.e2) / 2

    @property
    def roots(self):
        return self.e1, self.e2, self.e3


def e_from_rho(rho: float, e2: float):
    return (rho - e2) / 2, e2, -(rho + e2) / 2


def rotate_spinor(q: Quaternion, x: MajoranaSpinor) -> MajoranaSpinor:
    """Act with D^j(q) on the normalized components of x."""
    return MajoranaSpinor(x.j, rotate_components(x.j, q, x.x))


def parametrize_forward(p: QuaternionicParams) -> MajoranaSpinor:
    return rotate_spinor(p.q, reference_spinor(p.e1, p.e3))


def section_from_vector(r) -> MajoranaSpinor:
    """Spin-1 section with x_{+-1} = +-(r1 +- i r2)/2 and x_0 = r3."""
    r1, r2, r3 = map(float, r)
    return MajoranaSpinor(1, np.array([-0.5 * complex(r1, -r2), r3, 0.5 * complex(r1, r2)]))


def vector_from_section(x: MajoranaSpinor) -> np.ndarray:
    xm, x0, xp = x.x
    return np.array([(xp - xm).real, (-1j * (xp + xm)).real, x0.real])


def chi_frame_matrix(rho: float, e2: float) -> np.ndarray:
    """Rows chi_{+2}, chi_{+1}, chi_{-1}, chi_{-2} over (drho, s1, s2, s3).

    These are the unnormalized differentials of the spin-2 spinor at q = 1;
    chi_0 = -(3/2) de2 is not part of the frame.
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    return np.array([
        [0.25, 0, 0, -1j * rho],
        [0, 3j * e2 - 1j * rho, 3 * e2 + rho, 0],
        [0, 3j * e2 - 1j * rho, -3 * e2 - rho, 0],
        [0.25, 0, 0, 1j * rho],
    ], dtype=complex)


def chi_frame_j1(rho: float) -> np.ndarray:
    """Rows chi_{+1}, chi_0, chi_{-1} over (drho, s1, s2) for spin 1."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    return np.array([
        [0, -1j * rho, -rho],
        [1, 0, 0],
        [0, -1j * rho, rho],
    ], dtype=complex)


def differential_map(j: int, q: Quaternion, chi: np.ndarray) -> np.ndarray:
    """dx_m from the frame rows chi_m (ordered m = -j..j): x = c^-1 D(q) c chi."""
    c = spherical_norms(j)
    from .spin import wigner_d
    return (wigner_d(j, q) @ (c[:, None] * chi)) / c[:, None]
