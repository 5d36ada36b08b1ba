"""Cyclic (A_k) gravitational instantons: multi-center Gibbons-Hawking data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import PoleError
from .glt import Circle, FramedGeometry, contour_h, figure_eight, gibbons_hawking
from .majorana import antipode, evaluate, factorize, section_from_vector
from .spin import DomainError


@dataclass(frozen=True)
class AkConfiguration:
    centers: tuple
    alpha: float = 0.0

    def __post_init__(self):
        centers = tuple(tuple(float(c) for c in r) for r in self.centers)
        if not centers:
            raise DomainError("at least one center is needed")
        for i, r in enumerate(centers):
            if len(r) != 3:
                raise DomainError("centers are 3-vectors")
            for s in centers[:i]:
                if np.linalg.norm(np.subtract(r, s)) < 1e-10:
                    raise DomainError("centers must be distinct")
        if self.alpha < 0:
            raise DomainError("alpha must be nonnegative")
        object.__setattr__(self, "centers", centers)

    @property
    def k(self) -> int:
        return len(self.centers) - 1


def _offsets(r, cfg: AkConfiguration):
    r = np.asarray(r, dtype=float)
    out = []
    for c in cfg.centers:
        d = r - np.asarray(c)
        n = np.linalg.norm(d)
        if n < 1e-14:
            raise PoleError("evaluation at a center")
        out.append((d, n))
    return out


def multi_center_potential(r, cfg: AkConfiguration) -> float:
    return cfg.alpha + sum(1.0 / n for _, n in _offsets(r, cfg))


def gh_connection(r, cfg: AkConfiguration) -> np.ndarray:
    """Sum of monopole potentials (y, -x, 0) / (|d| (|d| + z)), strings along -z.

    Satisfies curl A = grad V away from the centers and strings.
    """
    A = np.zeros(3)
    for d, n in _offsets(r, cfg):
        den = n * (n + d[2])
        if den <= 1e-14 * n * n:
            raise PoleError("point lies on a Dirac string")
        A += np.array([d[1], -d[0], 0.0]) / den
    return A


def multi_center_gh(r, cfg: AkConfiguration) -> FramedGeometry:
    return gibbons_hawking(multi_center_potential(r, cfg))


@dataclass(frozen=True)
class AkHFunction:
    """H(x) = -sum (x - x_l) ln(x - x_l) + (x - x_l) - alpha x^2 through its second derivative."""
    cfg: AkConfiguration

    def sections(self):
        return [section_from_vector(c) for c in self.cfg.centers]

    def second_derivative(self, xns: complex, zeta: complex) -> complex:
        total = -2 * self.cfg.alpha
        for xl in self.sections():
            total -= 1.0 / (xns - evaluate(xl, zeta) / zeta)
        return total

    def center_term(self, l: int):
        xl = self.sections()[l]
        return lambda xns, zeta: -1.0 / (xns - evaluate(xl, zeta) / zeta)

    def center_contour(self, r, l: int):
        """Figure eight about the roots of x - x_l, counterclockwise about the
        root whose pair factor has positive weight."""
        d = np.asarray(r, dtype=float) - np.asarray(self.cfg.centers[l])
        fac = factorize(section_from_vector(d))
        a = fac.roots[0]
        if fac.rho < 0:
            a = antipode(a)
        ac = antipode(a)
        if np.isinf(abs(a)) or np.isinf(abs(ac)):
            return figure_eight(a, ac, radius=0.5, outer=2.0)
        return figure_eight(a, ac)


def ak_h_function(cfg: AkConfiguration) -> AkHFunction:
    return AkHFunction(cfg)


def h_bar(r, cfg: AkConfiguration, n: int, tol: float = 1e-12) -> complex:
    """Contour value of h-bar_n at the point r, for n >= 0."""
    if n < 0:
        raise DomainError("contours are set up for n >= 0")
    H = ak_h_function(cfg)
    x = section_from_vector(r)
    total = 0j
    for l in range(len(cfg.centers)):
        total += contour_h(H.center_term(l), x, H.center_contour(r, l), n, tol)
    if cfg.alpha:
        total += contour_h(lambda xns, z: -2 * cfg.alpha, x, (Circle(0j, 1.0, 1),), n, tol)
    return total


def contour_potential(r, cfg: AkConfiguration) -> float:
    """V = -h_0/2 from the contour representation."""
    return float(-0.5 * h_bar(r, cfg, 0).real)


def contour_connection(r, cfg: AkConfiguration) -> np.ndarray:
    """A = Im(h_bar_1 (dx - i dy) / 2); no dz component.

    The figure-eight prescription lands in the gauge with Dirac strings
    along both vertical half-lines through each center.
    """
    h1 = h_bar(r, cfg, 1)
    return np.array([0.5 * h1.imag, -0.5 * h1.real, 0.0])


def xi_pair(zeta: complex, r, cfg: AkConfiguration):
    """(xi_N, xi_S) at zeta for the point r, including the ALF exponentials."""
    x = section_from_vector(r)
    xi_n, xi_s = 1.0 + 0j, 1.0 + 0j
    for c in cfg.centers:
        fac = factorize(section_from_vector(np.asarray(c, dtype=float) - np.asarray(r, dtype=float)))
        a, rho = fac.roots[0], fac.rho
        if rho < 0:
            a, rho = antipode(a), -rho
        if np.isinf(abs(a)):
            # limit of the pair factors as a -> inf, up to a constant phase
            xi_n *= np.sqrt(rho)
            xi_s *= np.sqrt(rho)
            continue
        s = np.sqrt(rho / (1 + abs(a) ** 2))
        xi_n *= s * (a - zeta)
        xi_s *= s * (np.conj(a) + 1 / zeta)
    xm, x0, xp = x.x
    if cfg.alpha:
        xi_n *= np.exp(2 * cfg.alpha * (x0 / 2 + xm * zeta))
        xi_s *= np.exp(2 * cfg.alpha * (xp / zeta + x0 / 2))
    return complex(xi_n), complex(xi_s)


@dataclass(frozen=True)
class XiReport:
    product_defect: float
    antipodal_defect: float

    @property
    def ok(self) -> bool:
        return self.product_defect < 1e-9 and self.antipodal_defect < 1e-9


def xi_factorization_check(cfg: AkConfiguration, r, zetas) -> XiReport:
    """Relative defects of xi_N xi_S = e^{2 alpha x} prod (x - x_l) and of
    conj(xi_N(zeta^c)) = xi_S(zeta)."""
    x = section_from_vector(r)
    prod_err, anti_err = 0.0, 0.0
    for z in zetas:
        z = complex(z)
        xv = evaluate(x, z) / z
        target = np.exp(2 * cfg.alpha * xv)
        for c in cfg.centers:
            target *= xv - evaluate(section_from_vector(c), z) / z
        n, s = xi_pair(z, r, cfg)
        prod_err = max(prod_err, abs(n * s - target) / max(abs(target), 1e-300))
        nc, _ = xi_pair(-1 / np.conj(z), r, cfg)
        anti_err = max(anti_err, abs(np.conj(nc) - s) / max(abs(s), 1e-300))
    return XiReport(prod_err, anti_err)


def ak_period_matrix(cfg: AkConfiguration):
    r = [np.array(c) for c in cfg.centers]
    return [2 * np.pi * (r[i - 1] - r[i]) for i in range(1, len(r))]


def gh_coordinate_forms(cfg: AkConfiguration, connection=gh_connection):
    """(x, y, z, psi) -> the three Gibbons-Hawking 2-forms in coordinate components."""
    def forms(p):
        r = p[:3]
        geo = gibbons_hawking(multi_center_potential(r, cfg))
        E = np.eye(4)
        E[3, :3] = connection(r, cfg)
        return np.array([E.T @ w @ E for w in geo.W])

    return forms
