"""Seeded invariant suites run by ``hkinstanton verify``.

Each suite returns a list of Check records holding the worst residual seen
and the tolerance it is held to.  Sample counts are kept small enough that
every suite finishes in seconds; the test-suite runs the larger versions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curve as cv
from . import elliptic as ell
from .ak import (AkConfiguration, ak_period_matrix, contour_connection, contour_potential,
                 gh_coordinate_forms, multi_center_potential, xi_factorization_check)
from .dk import (DkConfiguration, E2Solver, NoSolutionError, ab_coefficients,
                 atiyah_hitchin_closed_form, atiyah_hitchin_pipeline, constraint_residual, dk_h,
                 dk_metric, key_integral_rhs, lagrange_l_poly, l_value, root_derivative)
from .glt import composite, exterior_derivative_defect, r2_dual, r3_dual, unrotated_forms
from .majorana import (QuaternionicParams, differential_map, chi_frame_matrix, e_from_rho, evaluate,
                       factorize, from_roots, invariants, parametrize_forward, random_real_spinor,
                       rotate_spinor)
from .spin import (Quaternion, left_invariant_coframe, quaternion_from_euler,
                   random_unit_quaternion, wigner_3j, wigner_d)

SUITES = ("elliptic", "spin", "majorana", "curve", "ak", "dk")


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tol)

    def as_dict(self):
        return {"name": self.name, "max_residual": float(self.residual), "tol": self.tol,
                "passed": self.passed}


class _Worst:
    """Running maxima keyed by check name."""

    def __init__(self):
        self.vals, self.tols = {}, {}

    def add(self, name, value, tol):
        self.vals[name] = max(self.vals.get(name, 0.0), float(value))
        self.tols[name] = tol

    def checks(self):
        return [Check(k, v, self.tols[k]) for k, v in self.vals.items()]


def agm_quarter_period(a: float, b: float) -> float:
    """pi / (2 AGM(a, b)); independent of the library's elliptic integrals."""
    for _ in range(40):
        a, b = (a + b) / 2, np.sqrt(a * b)
    return np.pi / (2 * a)


def random_lattice(rng):
    e = np.sort(rng.uniform(-1, 1, 3))[::-1]
    e = e - e.mean()
    while min(e[0] - e[1], e[1] - e[2]) < 0.05:
        e = np.sort(rng.uniform(-1, 1, 3))[::-1]
        e = e - e.mean()
    return ell.lattice_from_roots(*e)


def random_params(rng, rho_range=(0.5, 3.0), margin=0.9):
    q = random_unit_quaternion(rng)
    rho = rng.uniform(*rho_range)
    e2 = rng.uniform(-1, 1) * margin * rho / 3
    return QuaternionicParams(q, rho, e2)


def elliptic_suite(rng, n: int = 50):
    w = _Worst()
    Ls = ell.lattice_from_standard_invariants(1.0, 0.0)
    w.add("lemniscatic omega = 1.8540746773", abs(Ls.omega - 1.8540746773013719), 1e-9)
    L = ell.lattice_from_invariants(1.0, 0.0)
    w.add("(1,0): roots (1,0,-1)", np.abs(np.subtract(L.roots, (1.0, 0.0, -1.0))).max(), 1e-12)
    w.add("(1,0): omega vs AGM oracle", abs(L.omega - agm_quarter_period(np.sqrt(2), 1.0)), 1e-9)
    w.add("(1,0): square lattice", abs(L.omega_p - 1j * L.omega), 1e-9)
    lattices = [L] + [random_lattice(rng) for _ in range(n - 1)]
    for L in lattices:
        w.add("legendre", abs(L.eta * L.omega_p - L.eta_p * L.omega - 0.5j * np.pi), 1e-10)
        for i, e in enumerate(L.roots, start=1):
            w.add("wp half periods", abs(ell.wp(L, L.half_period(i)) - e), 1e-10)
        wp_ = abs(L.omega_p)
        u = complex(rng.uniform(-1, 1) * L.omega, rng.uniform(-1, 1) * wp_)
        v = complex(rng.uniform(-1, 1) * L.omega, rng.uniform(-1, 1) * wp_)
        s = ell.sigma_w
        lhs = s(L, u - v) * s(L, u + v) / (s(L, u) ** 2 * s(L, v) ** 2)
        rhs = ell.wp(L, v) - ell.wp(L, u)
        w.add("sigma addition", abs(lhs - rhs) / abs(rhs), 1e-9)
        p, dp = ell.wp_and_prime(L, u)
        zl = ell.zeta_w(L, u - v) + ell.zeta_w(L, u + v)
        zr = 2 * ell.zeta_w(L, u) + dp / (p - ell.wp(L, v))
        w.add("zeta addition", abs(zl - zr) / max(1.0, abs(zr)), 1e-9)
        for i in (1, 3):
            wi, ei = L.half_period(i), L.eta_value(i)
            mono = s(L, u + 2 * wi) / (-np.exp(2 * ei * (u + wi)) * s(L, u))
            w.add("sigma monodromy", abs(mono - 1), 1e-9)
            zm = ell.zeta_w(L, u + 2 * wi) - ell.zeta_w(L, u) - 2 * ei
            w.add("zeta monodromy", abs(zm) / max(1.0, abs(ell.zeta_w(L, u))), 1e-9)
        for i, e in enumerate(L.roots, start=1):
            r = (ell.sigma_assoc(L, i, u) / s(L, u)) ** 2
            w.add("associated sigma", abs(p - e - r) / max(1.0, abs(p - e)), 1e-9)
        ode = dp ** 2 - 4 * (p ** 3 - L.g2 * p - L.g3)
        w.add("wp differential equation", abs(ode) / max(1.0, abs(p)) ** 3, 1e-9)
        uu = ell.inverse_wp(L, p, dp / 2)
        p2, dp2 = ell.wp_and_prime(L, uu)
        w.add("inverse_wp round trip", max(abs(p2 - p) / max(1, abs(p)), abs(dp2 - dp) / max(1, abs(dp))), 1e-9)
    return w.checks()


def spin_suite(rng, n: int = 100):
    w = _Worst()
    for _ in range(n):
        a = Quaternion.from_array(rng.normal(size=4))
        b = Quaternion.from_array(rng.normal(size=4))
        lam = rng.uniform(0.1, 10)
        for j in (1, 2, 3):
            Da, Db = wigner_d(j, a), wigner_d(j, b)
            w.add("representation", np.abs(Da @ Db - wigner_d(j, a * b)).max(), 1e-10)
            w.add("scale invariance", np.abs(wigner_d(j, Quaternion.from_array(lam * a.as_array())) - Da).max(), 1e-10)
            U = wigner_d(j, a.normalized())
            w.add("unitarity", np.abs(U.conj().T @ U - np.eye(2 * j + 1)).max(), 1e-10)
            ms = np.arange(-j, j + 1)
            signs = (-1.0) ** (ms[:, None] - ms[None, :])
            w.add("time reversal", np.abs(np.conj(Da) - signs * Da[::-1, ::-1]).max(), 1e-10)
            w.add("reflection", np.abs(wigner_d(j, -a) - (-1) ** (2 * j) * Da).max(), 1e-10)
    for _ in range(n):
        x = random_real_spinor(2, rng)
        q = random_unit_quaternion(rng)
        r2, r3 = invariants(x)[:2]
        s2, s3 = invariants(rotate_spinor(q, x))[:2]
        w.add("r2 rotation invariance", abs(s2 - r2) / max(abs(r2), 1e-300), 1e-10)
        w.add("r3 rotation invariance", abs(s3 - r3) / max(abs(r2) ** 1.5, 1e-300), 1e-10)
    for args in [(1, 1, 2, 0, 0, 0), (2, 1, 1, 1, -1, 0), (3, 2, 2, -1, 2, -1), (2, 2, 3, 1, 1, -2)]:
        j1, j2, j3, m1, m2, m3 = args
        base = wigner_3j(*args)
        w.add("3j cyclic symmetry", abs(wigner_3j(j2, j3, j1, m2, m3, m1) - base), 1e-14)
        w.add("3j swap sign", abs(wigner_3j(j2, j1, j3, m2, m1, m3) - (-1) ** (j1 + j2 + j3) * base), 1e-14)
    w.add("3j (1,1,2;0,0,0)", abs(wigner_3j(1, 1, 2, 0, 0, 0) - np.sqrt(2 / 15)), 1e-14)
    ph, th, ps = rng.uniform(0.2, 2.8, 3)
    M = left_invariant_coframe(ph, th, ps)
    q0 = quaternion_from_euler(ph, th, ps)
    h = 1e-6
    for c in range(3):
        d = np.zeros(3)
        d[c] = h
        dq = (quaternion_from_euler(*(np.array([ph, th, ps]) + d)).as_array()
              - quaternion_from_euler(*(np.array([ph, th, ps]) - d)).as_array()) / (2 * h)
        col = (q0.conj() * Quaternion.from_array(dq)).as_array()[1:]
        w.add("coframe finite differences", np.abs(col - M[:, c]).max(), 1e-6)
    return w.checks()


def majorana_suite(rng, n: int = 100):
    w = _Worst()
    for _ in range(n):
        for j in (1, 2):
            x = random_real_spinor(j, rng)
            f = factorize(x)
            y = from_roots(f.roots, f.rho)
            w.add("factorize round trip", np.abs(y.x - x.x).max() / x.scale(), 1e-9)
        p = random_params(rng)
        x = parametrize_forward(p)
        _, _, g2, g3, delta = invariants(x)
        w.add("discriminant positive", 0.0 if delta.real > 0 else 1.0, 0.5)
        L = ell.lattice_from_invariants(g2.real, g3.real)
        w.add("rho = e1 - e3", abs(L.e1 - L.e3 - p.rho) / p.rho, 1e-9)
        w.add("rho = factorization scale", abs(factorize(x).rho - p.rho) / p.rho, 1e-9)
    # differential map against finite differences of the forward map
    ph, th, ps = rng.uniform(0.3, 2.5, 3)
    rho, e2 = 1.7, 0.2
    q = quaternion_from_euler(ph, th, ps)

    def X(v):
        return parametrize_forward(QuaternionicParams(quaternion_from_euler(*v[2:]), v[0], v[1])).x

    v0 = np.array([rho, e2, ph, th, ps])
    h = 1e-6
    J = np.array([(X(v0 + h * np.eye(5)[i]) - X(v0 - h * np.eye(5)[i])) / (2 * h) for i in range(5)]).T
    T1 = chi_frame_matrix(rho, e2)
    chi = np.zeros((5, 5), dtype=complex)
    for row, m in zip(T1, (2, 1, -1, -2)):
        chi[m + 2, [0, 2, 3, 4]] = row
    chi[2, 1] = -1.5
    E = np.eye(5)
    E[2:, 2:] = left_invariant_coframe(ph, th, ps)
    dx = differential_map(2, q, chi) @ E
    w.add("differential map vs finite differences", np.abs(dx - J).max() / max(1, np.abs(J).max()), 1e-6)
    return w.checks()


def curve_suite(rng, n: int = 20, per: int = 5):
    w = _Worst()
    for _ in range(n):
        p = random_params(rng)
        x = parametrize_forward(p)
        C = cv.spectral_curve(x)
        L = C.lattice
        for _ in range(per):
            z = complex(*rng.normal(size=2))
            tp = cv.torus_point(C, z)
            tpc = cv.antipodal_torus_point(C, tp)
            P, dP = ell.wp_and_prime(L, tp.u)
            w.add("wp(u) = X round trip", max(abs(P - tp.point.X), abs(dP - 2 * tp.point.Y)) / max(1, abs(P)), 1e-9)
            w.add("antipodal frak_u", abs(np.conj(tpc.frak_u) + tp.frak_u), 1e-9)
            s = tp.u + np.conj(tpc.u)
            a, b = s.real / L.omega, s.imag / L.omega_p.imag
            odd = min(abs(a - k) for k in range(-9, 10, 2)) + min(abs(b - k) for k in range(-9, 10, 2))
            w.add("odd lattice relation", odd, 1e-9)
            split = cv.z_phi_u(C, 0j, tp.u) - cv.z_phi_u(C, cv.INF, tp.u) - tp.point.eta / z
            w.add("sqrt(x) = Z_0 - Z_inf split", abs(split) / max(1, abs(tp.point.eta / z)), 1e-9)
            enh = np.conj(cv.enhanced_z(C, tpc)) + cv.enhanced_z(C, tp) + tp.point.eta / z
            w.add("enhanced Z reality", abs(enh) / max(1, abs(tp.point.eta / z)), 1e-9)
            ups, ups_p = cv.upsilons(C, z)
            w.add("wp(upsilon) >= e1", max(0.0, L.e1 - ell.wp(L, ups).real), 1e-9)
            w.add("wp(upsilon') <= e3", max(0.0, ell.wp(L, ups_p).real - L.e3), 1e-9)
        xp, xm, yp, ym = cv.x_pm_y_pm(x)
        ok = L.e3 < xm < L.e2 < xp < L.e1 and L.e3 < -xp - xm < L.e1
        w.add("x_+- inequalities", 0.0 if ok else 1.0, 0.5)
        for X in rng.normal(size=3):
            d = cv.cubic_determinant(x, X) - (X ** 3 - L.g2 * X - L.g3)
            w.add("determinantal identity", abs(d) / max(1, abs(X)) ** 3, 1e-9)
        w.add("real cycle = 2 omega", abs(abs(cv.period_cycle_integral(C, "real")) - 2 * L.omega) / (2 * L.omega), 1e-8)
        w.add("imaginary cycle = 2 omega'", abs(abs(cv.period_cycle_integral(C, "imaginary")) - 2 * abs(L.omega_p))
              / (2 * abs(L.omega_p)), 1e-8)
    return w.checks()


def _random_ak(rng, k, alpha=None):
    centers = tuple(tuple(rng.normal(size=3)) for _ in range(k + 1))
    return AkConfiguration(centers, float(rng.uniform(0, 1)) if alpha is None else alpha)


def _off_axis_point(rng, cfg, spread=2.0, min_dist=0.3):
    while True:
        r = rng.normal(size=3) * spread
        ok = True
        for c in cfg.centers:
            d = r - np.asarray(c)
            if np.linalg.norm(d) < min_dist or np.hypot(d[0], d[1]) < 0.1 * np.linalg.norm(d):
                ok = False
        if ok:
            return r


def _five_point(f, x, d):
    return (-f(x + 2 * d) + 8 * f(x + d) - 8 * f(x - d) + f(x - 2 * d)) / 12


def curl_and_gradient(A, V, r, h=1e-3):
    """(curl A, grad V) by fourth-order central differences."""
    J = np.zeros((3, 3))
    grad = np.zeros(3)
    for i in range(3):
        d = np.zeros(3)
        d[i] = h
        J[:, i] = _five_point(A, r, d) / h
        grad[i] = _five_point(V, r, d) / h
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]]), grad


def ak_suite(rng, n: int = 20, n_closed: int = 2):
    w = _Worst()
    for k in (0, 1, 2):
        cfg = _random_ak(rng, k)
        for _ in range(n):
            r = _off_axis_point(rng, cfg)
            V = multi_center_potential(r, cfg)
            w.add("h_bar_0 = -2V", abs(contour_potential(r, cfg) - V) / V, 1e-8)
        for _ in range(n_closed):
            r = _off_axis_point(rng, cfg)
            xi = np.append(r, rng.uniform(0, 2 * np.pi))
            w.add("Gibbons-Hawking forms closed", max(exterior_derivative_defect(gh_coordinate_forms(cfg), xi)), 1e-5)
            curl, grad = curl_and_gradient(lambda p: contour_connection(p, cfg),
                                           lambda p: multi_center_potential(p, cfg), r)
            w.add("contour connection: curl A = grad V", np.abs(curl - grad).max() / np.abs(grad).max(), 1e-6)
        rep = xi_factorization_check(cfg, _off_axis_point(rng, cfg), [complex(*rng.normal(size=2)) for _ in range(5)])
        w.add("xi factorization", max(rep.product_defect, rep.antipodal_defect), 1e-9)
        per = ak_period_matrix(cfg)
        exact = [2 * np.pi * (np.subtract(cfg.centers[i - 1], cfg.centers[i])) for i in range(1, k + 1)]
        w.add("period vectors", max([np.abs(a - b).max() for a, b in zip(per, exact)] + [0.0])
              + abs(len(per) - k), 1e-15)
    return w.checks()


def dk_suite(rng, n: int = 10, structural: bool = True):
    w = _Worst()
    # Atiyah-Hitchin oracle: k = 0 pipeline against the closed form
    for _ in range(n):
        p = random_params(rng)
        alpha, geo = atiyah_hitchin_pipeline(p.q, p.rho, p.e2)
        ref = atiyah_hitchin_closed_form(p.rho, p.e2)
        f = -2 * alpha
        w.add("Atiyah-Hitchin metric", np.abs(geo.G - f * ref.G).max() / np.abs(f * ref.G).max(), 1e-9)
        W = unrotated_forms(geo.W, p.q)
        w.add("Atiyah-Hitchin forms", np.abs(W - f * ref.W).max() / np.abs(f * ref.W).max(), 1e-9)
        cfg0 = DkConfiguration(0, (), alpha=alpha)
        w.add("k = 0 constraint at alpha = -2 omega", abs(constraint_residual(p.q, p.rho, p.e2, cfg0)), 1e-10)
    # composite invariants on random alternating-real h
    for _ in range(n):
        h = random_real_spinor(2, rng).x
        r2, r3 = r2_dual(h).real, r3_dual(h).real
        H = composite(h)
        R2, R3 = r2_dual(H).real, r3_dual(H).real
        w.add("r2(H) = r2^2/12", abs(R2 - r2 ** 2 / 12) / max(r2 ** 2, 1e-300), 1e-10)
        w.add("r3(H) = r3^2/4 - r2^3/216", abs(R3 - r3 ** 2 / 4 + r2 ** 3 / 216) / max(abs(r2) ** 3, 1e-300), 1e-10)
        w.add("H'_0 <= 0", max(0.0, (H[2] - r2 / 6).real), 1e-12)
    # Lagrange polynomials and the key integral
    for _ in range(n):
        x = random_real_spinor(2, rng)
        A, B = ab_coefficients(x)
        roots = np.roots(x.x)
        z = complex(*rng.normal(size=2))
        zc = -1 / np.conj(z)
        for m in range(-2, 3):
            Lm = lagrange_l_poly(x, 1 - m)
            d = max(abs(l_value(Lm, roots[i]) - root_derivative(x, roots, i, m)) for i in range(4))
            w.add("L polynomial at roots", d / max(1, np.abs([root_derivative(x, roots, i, m) for i in range(4)]).max()), 1e-9)
        for m in range(0, 5):
            lhs = l_value(lagrange_l_poly(x, m), z)
            rhs = z * l_value(lagrange_l_poly(x, m - 1), z) + (-1) ** abs(m - 2) * B[m] * evaluate(x, z)
            w.add("L recurrence", abs(lhs - rhs) / max(1, abs(lhs)), 1e-9)
        for m in range(-1, 5):
            lhs = np.conj(l_value(lagrange_l_poly(x, m), zc))
            rhs = (-1) ** abs(3 - m) / z ** 3 * l_value(lagrange_l_poly(x, 3 - m), z)
            w.add("L reality", abs(lhs - rhs) / max(1, abs(rhs)), 1e-9)
        C = cv.spectral_curve(x)
        m = int(rng.integers(-2, 3))
        w.add("key integral derivative", key_integral_defect(C, z, m, (A, B)), 1e-6)
    if structural:
        w_struct = dk_structural_checks(rng, n_points=2, closedness=False)
        for c in w_struct:
            w.add(c.name, c.residual, c.tol)
    return w.checks()


def _unwrap(L, u, ref):
    d = u - ref
    M = np.array([[2 * L.omega, 0.0], [0.0, 2 * L.omega_p.imag]])
    k = np.round(np.linalg.solve(M, [d.real, d.imag]))
    return u - 2 * k[0] * L.omega - 2 * k[1] * L.omega_p


def key_integral_defect(C, z, m, AB=None, h=1e-3):
    """Relative mismatch between a 5-point derivative of the antiderivative and its integrand."""
    eta0 = cv.sqrt_x(C, z)
    u0 = cv.torus_point(C, z, eta0).u
    h = h * max(1.0, abs(z))

    def F(zz):
        e = cv.sqrt_x(C, zz)
        if abs(e + eta0) < abs(e - eta0):
            e = -e
        u = _unwrap(C.lattice, cv.torus_point(C, zz, e).u, u0)
        return key_integral_rhs(C, u, zz, e, m, AB)

    fd = (-F(z + 2 * h) + 8 * F(z + h) - 8 * F(z - h) + F(z - 2 * h)) / (12 * h)
    target = z ** (2 - m) / (2 * eta0 * evaluate(C.x, z))
    return abs(fd - target) / abs(target)


DK_REFERENCE = {
    2: DkConfiguration(2, ((0.3, 0.1, 0.4), (-0.2, 0.5, 0.1)), alpha=-1.0),
    3: DkConfiguration(3, ((0.3, 0.1, 0.4), (-0.2, 0.5, 0.1), (0.1, -0.3, -0.2)), alpha=-1.0),
}


def dk_structural_checks(rng, n_points: int = 20, closedness: bool = True, k_values=(2, 3),
                         rho_range=(40.0, 120.0), n_closed: int = 1):
    """Solve the constraint at random (q, rho) and check the D_k output."""
    import dataclasses

    w = _Worst()
    for k in k_values:
        cfg = DK_REFERENCE[k]
        done = 0
        closed = 0
        attempts = 0
        while done < n_points and attempts < 20 * n_points:
            attempts += 1
            ph, ps = rng.uniform(0, 2 * np.pi, 2)
            th = rng.uniform(0.3, np.pi - 0.3)
            q = quaternion_from_euler(ph, th, ps)
            rho = rng.uniform(*rho_range)
            solver = E2Solver()
            try:
                found, _ = solver.roots(q, rho, cfg)
            except NoSolutionError:
                continue
            if not found:
                continue
            e2 = found[0]
            solver._last[cfg] = e2
            try:
                pt = dk_metric(q, rho, cfg, solver, e2=e2)
            except ArithmeticError:
                continue
            done += 1
            geo = pt.geometry
            w.add(f"D_{k} constraint residual", abs(pt.residual), 1e-10)
            w.add(f"D_{k} h alternating reality", pt.h.reality_defect() / max(1, np.abs(pt.h.h).max()), 1e-10)
            sq, prod = geo.hyperkahler_defects()
            w.add(f"D_{k} I_i^2 = -1", sq, 1e-8)
            w.add(f"D_{k} I_1 I_2 = -I_3", prod, 1e-8)
            ex = geo.extras
            e1, _, e3 = e_from_rho(rho, e2)
            sqrt_delta = (e1 - e2) * (e1 - e3) * (e2 - e3)
            w.add(f"D_{k} det T1 = -4 sqrt(Delta)", abs(ex["det_T1"] + 4 * sqrt_delta) / (4 * sqrt_delta), 1e-9)
            t2 = -ex["r3"] * ex["h_ringed"][2].real * ex["Hp0"] ** 2
            w.add(f"D_{k} det T2", abs(ex["det_T2"] - t2) / abs(t2), 1e-9)
            shifted = dataclasses.replace(cfg, shift=(1, 0))
            h2 = dk_h(q, rho, e2, shifted, check=False).h
            w.add(f"D_{k} domain-shift invariance", np.abs(h2 - pt.h.h).max() / max(1, np.abs(pt.h.h).max()), 1e-9)
            if closedness and closed < n_closed:
                closed += 1
                from .dk import dk_coordinate_forms
                defect = exterior_derivative_defect(dk_coordinate_forms(cfg, solver), [rho, ph, th, ps])
                w.add(f"D_{k} forms closed", max(defect), 1e-5)
        w.add(f"D_{k} solved points", 0.0 if done == n_points else 1.0, 0.5)
    return w.checks()


SUITE_FUNCS = {
    "elliptic": elliptic_suite,
    "spin": spin_suite,
    "majorana": majorana_suite,
    "curve": curve_suite,
    "ak": ak_suite,
    "dk": dk_suite,
}


def run_suite(name: str, seed: int):
    rng = np.random.default_rng(seed)
    return SUITE_FUNCS[name](rng)
