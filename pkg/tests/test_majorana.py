import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hkinstanton.majorana import (MajoranaSpinor, QuaternionicParams, antipode, chi_frame_j1,
                                  chi_frame_matrix, evaluate, factorize, gradient_tensors,
                                  from_roots, from_wv, invariants, parametrize_forward,
                                  random_real_spinor, reference_spinor, rotate_spinor,
                                  section_from_vector, vector_from_section, weierstrass_invariants)
from hkinstanton.spin import DomainError, quaternion_from_euler, random_unit_quaternion

seeds = st.integers(0, 2 ** 32 - 1)
cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def cubic_roots_desc(g2, g3):
    return np.sort(np.roots([1, 0, -g2, -g3]).real)[::-1]


@given(seeds, st.sampled_from([1, 2, 3]))
def test_factorize_round_trip(seed, j):
    x = random_real_spinor(j, np.random.default_rng(seed))
    f = factorize(x)
    assert np.abs(from_roots(f.roots, f.rho).x - x.x).max() < 1e-8 * x.scale()
    for a in f.roots:
        assert abs(evaluate(x, a)) < 1e-7 * x.scale() * max(1, abs(a)) ** (2 * j)


@given(seeds)
def test_roots_come_in_antipodal_pairs(seed):
    x = random_real_spinor(2, np.random.default_rng(seed))
    roots = np.roots(x.x)
    for a in roots:
        assert np.min(np.abs(roots - antipode(a))) < 1e-6 * max(1, abs(antipode(a)))


@given(st.lists(st.tuples(cplx, cplx), min_size=1, max_size=3))
def test_wv_product_is_real(pairs):
    x = from_wv(pairs)
    assert x.reality_defect() <= 1e-10 * max(1.0, x.scale())


def test_degenerate_root_at_infinity():
    x = from_roots([np.inf, 0.5 + 0.5j], 2.0)
    assert x.x[0] == 0
    assert x.reality_defect() < 1e-12


@given(seeds)
def test_invariants_are_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    x = random_real_spinor(2, rng)
    y = rotate_spinor(random_unit_quaternion(rng), x)
    a, b = invariants(x), invariants(y)
    s = x.scale()
    assert abs(a[0] - b[0]) < 1e-10 * s ** 2
    assert abs(a[1] - b[1]) < 1e-10 * s ** 3


@given(st.floats(0.1, 10), st.floats(-0.99, 0.99))
def test_reference_spinor_roots(rho, frac):
    e2 = frac * rho / 3
    p = QuaternionicParams(quaternion_from_euler(0.3, 1.0, 2.0), rho, e2)
    g2, g3 = weierstrass_invariants(parametrize_forward(p))
    assert np.allclose(cubic_roots_desc(g2.real, g3.real), p.roots, atol=1e-9 * rho)
    assert p.e1 - p.e3 == pytest.approx(rho)


def test_invariant_relations():
    x = reference_spinor(1.0, -1.0)
    r2, r3, g2, g3, delta = invariants(x)
    assert (g2, g3) == (pytest.approx(4 * r2), pytest.approx(16 * r3))
    assert delta == pytest.approx(4 * g2 ** 3 - 27 * g3 ** 2)
    assert g2 == pytest.approx(1.0) and g3 == pytest.approx(0.0, abs=1e-15)


def test_parameter_domain():
    with pytest.raises(DomainError):
        QuaternionicParams(quaternion_from_euler(0, 1, 0), 1.0, 0.5)
    with pytest.raises(DomainError):
        QuaternionicParams(quaternion_from_euler(0, 1, 0), -1.0, 0.0)
    with pytest.raises(DomainError):
        reference_spinor(-1.0, 1.0)
    with pytest.raises(DomainError):
        MajoranaSpinor(2, [1, 2, 3])


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_section_vector_round_trip(r):
    x = section_from_vector(r)
    assert x.reality_defect() < 1e-12
    assert np.allclose(vector_from_section(x), r)
    # the spin-1 quadratic invariant is |r|^2 / 4
    assert invariants(x)[0] == pytest.approx(np.dot(r, r) / 4, abs=1e-12)


def test_point_evaluations():
    assert evaluate(MajoranaSpinor(2, [0, 0, 1, 0, 0]), 3.0) == pytest.approx(9.0)
    assert evaluate(reference_spinor(1.0, -1.0), 1j) == pytest.approx(1.0)


def test_reference_spinor_values():
    assert np.allclose(reference_spinor(1.0, -1.0).x, [0.5, 0, 0, 0, 0.5])
    x = reference_spinor(2.0, -3.0)
    assert np.allclose(x.x, [1.25, 0, -1.5, 0, 1.25])
    r2, r3, g2, g3, delta = invariants(x)
    assert (g2, g3, delta) == (pytest.approx(7.0), pytest.approx(-6.0), pytest.approx(400.0))


@given(seeds)
def test_evaluation_reality(seed):
    rng = np.random.default_rng(seed)
    x = random_real_spinor(2, rng)
    z = complex(*rng.normal(size=2))
    zc = -1 / np.conj(z)
    assert abs(np.conj(evaluate(x, zc)) - evaluate(x, z) / z ** 4) < 1e-9 * x.scale() * max(1, abs(z) ** -4)


def test_gradient_tensor_value_and_reality(rng):
    d2, d3 = gradient_tensors(MajoranaSpinor(2, [0, 0, 1, 0, 0]))
    assert d2[2] == pytest.approx(2 / 3)
    x = random_real_spinor(2, rng)
    for d in gradient_tensors(x):
        assert MajoranaSpinor(2, d).reality_defect() < 1e-12 * max(1, np.abs(d).max())


def test_gradient_tensor_finite_differences(rng):
    x = random_real_spinor(2, rng)
    d2, d3 = gradient_tensors(x)
    h = 1e-6
    for k, m in enumerate(range(-2, 3)):
        e = np.zeros(5, dtype=complex)
        e[2 - m] = h  # derivative along x_{-m}
        gp = invariants(MajoranaSpinor(2, x.x + e))
        gm = invariants(MajoranaSpinor(2, x.x - e))
        sign = (-1) ** m
        assert abs(sign * (gp[2] - gm[2]) / (2 * h) - d2[k]) < 1e-6 * max(1, abs(d2[k]))
        assert abs(sign * (gp[3] - gm[3]) / (2 * h) - d3[k]) < 1e-6 * max(1, abs(d3[k]))


def test_frame_matrices():
    T = chi_frame_matrix(1.0, 0.0)
    assert np.linalg.det(T) == pytest.approx(-1.0)
    # the m = -2 row is the conjugate of the m = +2 row
    assert np.allclose(T[3], np.conj(T[0]))
    assert np.allclose(T[1], -1j * 1.0 * np.array([0, 1, 1j, 0]))
    with pytest.raises(DomainError):
        chi_frame_matrix(0.0, 0.0)
    J = chi_frame_j1(1.0)
    assert np.allclose(J, [[0, -1j, -1], [1, 0, 0], [0, -1j, 1]])


def test_from_wv_roots(rng):
    pairs = [tuple(complex(*rng.normal(size=2)) for _ in range(2)) for _ in range(2)]
    roots = np.roots(from_wv(pairs).x)
    expected = []
    for w, v in pairs:
        expected += [v / np.conj(w), -w / np.conj(v)]
    for e in expected:
        assert np.min(np.abs(roots - e)) < 1e-8 * max(1, abs(e))


def test_vector_section_degenerate_pair():
    f = factorize(section_from_vector([0, 0, 1]))
    assert f.rho == pytest.approx(1.0)
    assert any(np.isinf(abs(a)) or a == 0 for a in f.roots)
