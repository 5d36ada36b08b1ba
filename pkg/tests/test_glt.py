import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hkinstanton.glt import (ORIENTATION, DegeneracyError, HSpinor, SignatureError, composite,
                             exterior_derivative_defect, gibbons_hawking,
                             gibbons_hawking_coordinate_frame, hankel_a, hankel_phi,
                             j1_canonical_form, o4_ansatz, r2_dual, r3_dual, unrotated_forms)
from hkinstanton.majorana import random_real_spinor
from hkinstanton.spin import quaternion_from_euler, random_unit_quaternion

seeds = st.integers(0, 2 ** 32 - 1)


def hk_ok(geo, tol=1e-8):
    sq, prod = geo.hyperkahler_defects()
    return sq < tol and prod < tol


class TestHankel:
    def test_unit_middle_component(self):
        # direct 3x3 / 2x2 determinants of the anti-diagonal Hankel matrices: (-1) / (-1)
        assert hankel_phi([0, 0, 1, 0, 0]) == pytest.approx(1.0)

    def test_against_explicit_determinants(self, rng):
        h = rng.normal(size=5)
        num = np.linalg.det(np.array([[h[0], h[1], h[2]], [h[1], h[2], h[3]], [h[2], h[3], h[4]]]))
        den = np.linalg.det(np.array([[h[1], h[2]], [h[2], h[3]]]))
        assert hankel_phi(h) == pytest.approx(num / den, rel=1e-12)
        g = rng.normal(size=5)
        num = np.linalg.det(np.array([[g[0], g[1], g[2]], [g[1], g[2], g[3]], [g[2], g[3], g[4]]]))
        den = np.linalg.det(np.array([[g[2], g[3]], [g[3], g[4]]]))
        assert hankel_a(g) == pytest.approx(1j * num / den, rel=1e-12)

    def test_singular_denominator(self):
        with pytest.raises(DegeneracyError):
            hankel_phi([1, 0, 0, 0, 1])


@given(seeds)
def test_composite_identities(seed):
    h = random_real_spinor(2, np.random.default_rng(seed)).x
    r2, r3 = r2_dual(h).real, r3_dual(h).real
    H = composite(h)
    s = max(np.abs(h).max(), 1e-3)
    assert abs(r2_dual(H) - r2 ** 2 / 12) < 1e-10 * s ** 4
    assert abs(r3_dual(H) - (r3 ** 2 / 4 - r2 ** 3 / 216)) < 1e-10 * s ** 6
    assert (H[2] - r2 / 6).real <= 1e-12 * s ** 2


@given(st.floats(0.05, 20))
def test_gibbons_hawking_algebra(U):
    geo = gibbons_hawking(U)
    assert hk_ok(geo, 1e-12)
    assert geo.signature() == (4, 0)
    I = geo.complex_structures()
    assert np.abs(I[0] @ I[1] - ORIENTATION * I[2]).max() < 1e-12


def test_gibbons_hawking_rejects_nonpositive_potential():
    with pytest.raises(SignatureError):
        gibbons_hawking(0.0)
    with pytest.raises(SignatureError):
        gibbons_hawking(-1.0)


def test_flat_space_forms_are_closed():
    """U = 1, A = 0: constant coordinate forms, flat metric."""
    def forms(p):
        geo = gibbons_hawking(1.0)
        E = gibbons_hawking_coordinate_frame(1.0, np.zeros(3))
        return geo.transformed(E, ("dx", "dy", "dz", "dpsi")).W

    assert max(exterior_derivative_defect(forms, [0.3, -0.2, 0.5, 1.0])) < 1e-12
    G = gibbons_hawking(1.0).G
    assert np.allclose(G, 0.5 * np.eye(4))


def test_exterior_derivative_detects_non_closed_form():
    def forms(p):
        W = np.zeros((1, 3, 3))
        W[0, 1, 2], W[0, 2, 1] = p[0], -p[0]  # x dy^dz
        return W

    assert exterior_derivative_defect(forms, [0.4, 0.1, 0.2])[0] > 0.5


@given(st.floats(-10, -0.1), st.floats(0.1, 10), seeds)
def test_spin_one_canonical_form(h0, rho, seed):
    q = random_unit_quaternion(np.random.default_rng(seed))
    geo = j1_canonical_form(h0, q, rho)
    assert hk_ok(geo)
    assert geo.signature() == (4, 0)


@given(seeds)
def test_o4_ansatz_is_hyperkahler(seed):
    rng = np.random.default_rng(seed)
    h = HSpinor(2, random_real_spinor(2, rng).x)
    q = random_unit_quaternion(rng)
    rho = rng.uniform(0.5, 3)
    e2 = rng.uniform(-0.9, 0.9) * rho / 3
    try:
        geo = o4_ansatz(h, q, rho, e2)
    except DegeneracyError:
        assume(False)
    assert hk_ok(geo, 1e-7 * max(1, np.abs(geo.G).max()))
    assert np.allclose(geo.G, geo.G.T)
    # determinant relations of the two frame matrices
    ex = geo.extras
    e1, e3 = (rho - e2) / 2, -(rho + e2) / 2
    sqrt_delta = (e1 - e2) * (e1 - e3) * (e2 - e3)
    assert abs(ex["det_T1"] + 4 * sqrt_delta) < 1e-9 * sqrt_delta
    t2 = -ex["r3"] * ex["h_ringed"][2].real * ex["Hp0"] ** 2
    assert abs(ex["det_T2"] - t2) < 1e-8 * abs(t2)


@given(seeds)
def test_unrotated_forms_inverts_rotation(seed):
    """Evaluating at q and undoing q gives the q = 1 forms when h co-rotates."""
    from hkinstanton.spin import rotate_dual_components

    rng = np.random.default_rng(seed)
    h = random_real_spinor(2, rng).x
    q = random_unit_quaternion(rng)
    rho, e2 = 2.0, 0.1
    try:
        ref = o4_ansatz(HSpinor(2, h), quaternion_from_euler(0, 0, 0), rho, e2)
        geo = o4_ansatz(HSpinor(2, rotate_dual_components(2, q, h)), q, rho, e2)
    except DegeneracyError:
        assume(False)
    assert np.abs(geo.G - ref.G).max() < 1e-8 * np.abs(ref.G).max()
    assert np.abs(unrotated_forms(geo.W, q) - ref.W).max() < 1e-8 * np.abs(ref.W).max()


@given(st.floats(-10, -0.1), st.floats(0.1, 10))
def test_spin_one_form_is_flat_gibbons_hawking(h0, rho):
    """With U = -2 h0 and |r| = rho/2 the GH metric reads
    -h0/4 drho^2 - h0 rho^2 (s1^2 + s2^2) - Theta^2 / h0."""
    geo = j1_canonical_form(h0, quaternion_from_euler(0, 0, 0), rho)
    expected = np.diag([-h0 / 4, -h0 * rho ** 2, -h0 * rho ** 2, -1 / h0])
    assert np.abs(geo.G - expected).max() < 1e-12 * np.abs(expected).max()


@given(seeds, st.floats(0.1, 10))
def test_hankel_ratio_real_and_homogeneous(seed, t):
    h = random_real_spinor(2, np.random.default_rng(seed)).x
    try:
        phi = hankel_phi(h)
    except DegeneracyError:
        assume(False)
    assert np.isrealobj(phi) or abs(np.imag(phi)) < 1e-10 * abs(phi)
    assert hankel_phi(t * h) == pytest.approx(t * np.real(phi), rel=1e-9)
