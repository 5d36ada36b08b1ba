import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hkinstanton.ak import (AkConfiguration, ak_h_function, ak_period_matrix, contour_connection,
                            contour_potential, gh_connection, gh_coordinate_forms, h_bar,
                            multi_center_gh, multi_center_potential, xi_factorization_check)
from hkinstanton.checks import ak_suite, curl_and_gradient
from hkinstanton.elliptic import PoleError
from hkinstanton.glt import exterior_derivative_defect
from hkinstanton.spin import DomainError

seeds = st.integers(0, 2 ** 32 - 1)


def random_setup(seed, k):
    rng = np.random.default_rng(seed)
    cfg = AkConfiguration(tuple(tuple(rng.normal(size=3)) for _ in range(k + 1)), float(rng.uniform(0, 1)))
    while True:
        r = rng.normal(size=3) * 2
        ds = [r - np.asarray(c) for c in cfg.centers]
        if all(np.linalg.norm(d) > 0.3 and np.hypot(d[0], d[1]) > 0.1 * np.linalg.norm(d) for d in ds):
            return cfg, r, rng


def test_single_center_potential():
    cfg = AkConfiguration(((0.0, 0.0, 0.0),))
    assert multi_center_potential((0, 0, 2), cfg) == pytest.approx(0.5)
    # the contour version: h_bar_0 = -2 at unit distance, V = 1
    assert h_bar((0, 0, 1), cfg, 0).real == pytest.approx(-2.0, abs=1e-10)
    assert contour_potential((0, 0, 1), cfg) == pytest.approx(1.0, abs=1e-10)


def test_errors():
    cfg = AkConfiguration(((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)))
    with pytest.raises(PoleError):
        multi_center_potential((0, 0, 1), cfg)
    with pytest.raises(DomainError):
        AkConfiguration(((0, 0, 0), (0, 0, 0)))
    with pytest.raises(DomainError):
        AkConfiguration(((0, 0, 0),), alpha=-1.0)
    with pytest.raises(DomainError):
        h_bar((1, 0, 0), cfg, -1)


@given(seeds, st.integers(0, 2))
@settings(max_examples=15)
def test_contour_potential_matches_closed_form(seed, k):
    cfg, r, _ = random_setup(seed, k)
    V = multi_center_potential(r, cfg)
    assert abs(contour_potential(r, cfg) - V) < 1e-8 * V


def test_h_function_second_derivative():
    x, z = 0.7 + 0.2j, 1.3 - 0.4j
    H = ak_h_function(AkConfiguration(((0.0, 0.0, 0.0),), alpha=0.0))
    assert H.second_derivative(x, z) == pytest.approx(-1 / x)
    H = ak_h_function(AkConfiguration(((0.0, 0.0, 0.0),), alpha=0.25))
    assert H.second_derivative(x, z) == pytest.approx(-1 / x - 0.5)


@given(seeds, st.integers(0, 2))
@settings(max_examples=8)
def test_contour_connection_satisfies_monopole_equation(seed, k):
    cfg, r, _ = random_setup(seed, k)
    curl, grad = curl_and_gradient(lambda p: contour_connection(p, cfg),
                                   lambda p: multi_center_potential(p, cfg), r)
    assert np.abs(curl - grad).max() < 1e-8 * max(1, np.abs(grad).max())


@given(seeds, st.integers(0, 3))
@settings(max_examples=20)
def test_string_gauge_connection(seed, k):
    cfg, r, _ = random_setup(seed, k)
    curl, grad = curl_and_gradient(lambda p: gh_connection(p, cfg),
                                   lambda p: multi_center_potential(p, cfg), r)
    assert np.abs(curl - grad).max() < 1e-8 * max(1, np.abs(grad).max())


@given(seeds, st.integers(0, 2))
@settings(max_examples=5)
def test_gibbons_hawking_forms_closed(seed, k):
    cfg, r, rng = random_setup(seed, k)
    geo = multi_center_gh(r, cfg)
    assert min(np.linalg.eigvalsh(geo.G)) > 0
    xi = np.append(r, rng.uniform(0, 2 * np.pi))
    assert max(exterior_derivative_defect(gh_coordinate_forms(cfg), xi)) < 1e-5


def test_xi_factorization():
    cfg = AkConfiguration(((0.0, 0.0, 1.0),))
    rep = xi_factorization_check(cfg, (0.3, -0.2, 0.4), [1.0, 1j, 0.5 - 2j])
    assert rep.ok


@given(seeds, st.integers(0, 2))
@settings(max_examples=10)
def test_xi_factorization_random(seed, k):
    cfg, r, rng = random_setup(seed, k)
    rep = xi_factorization_check(cfg, r, [complex(*rng.normal(size=2)) for _ in range(3)])
    assert rep.product_defect < 1e-9 and rep.antipodal_defect < 1e-9


class TestPeriods:
    def test_single_center_has_none(self):
        assert ak_period_matrix(AkConfiguration(((0, 0, 0),))) == []

    def test_two_centers(self):
        per = ak_period_matrix(AkConfiguration(((0, 0, 0), (0, 0, 1))))
        assert len(per) == 1
        assert np.allclose(per[0], 2 * np.pi * np.array([0, 0, -1]))

    @given(seeds)
    def test_translation_and_telescoping(self, seed):
        rng = np.random.default_rng(seed)
        cs = rng.normal(size=(3, 3))
        c = rng.normal(size=3)
        per = ak_period_matrix(AkConfiguration(tuple(map(tuple, cs))))
        moved = ak_period_matrix(AkConfiguration(tuple(map(tuple, cs + c))))
        assert np.allclose(per, moved)
        assert np.allclose(sum(per), 2 * np.pi * (cs[0] - cs[2]))


def test_verify_suite_passes():
    checks = ak_suite(np.random.default_rng(5), n=5, n_closed=1)
    assert all(c.passed for c in checks), [c.as_dict() for c in checks if not c.passed]
