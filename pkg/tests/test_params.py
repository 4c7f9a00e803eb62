from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from becqnd.errors import DispersiveRegimeWarning, NonPositiveOmegaMinus
from becqnd.params import (PhysicalParams, bogoliubov_frequencies,
                           bogoliubov_matrix, derive_params,
                           validate_lattice_depth)
from conftest import U_KG, TWO_PI, params_with_omega_sw


def test_reference_chain_frozen_values(reference_params, reference_derived):
    # hand-evaluated independently: U0 = g0^2/Delta_a, g = U0 sqrt(2N)/4
    d = reference_derived
    assert d.Delta_a == pytest.approx(7.5e11, rel=1e-12)
    assert d.U0 == pytest.approx(1.0464939e4, rel=1e-6)
    assert d.g == pytest.approx(8.2732607e5, rel=1e-6)
    assert d.omega_R == pytest.approx(2.3708425e4, rel=1e-6)
    assert d.k_wavenumber == pytest.approx(8.0553728e6, rel=1e-6)


def test_omega_sw_zero_degenerate(reference_params, reference_derived):
    d = reference_derived
    assert d.chi == pytest.approx(1.0, abs=1e-14)
    assert d.omega_m == pytest.approx(4.0 * d.omega_R, rel=1e-14)
    assert d.G == pytest.approx(d.g, rel=1e-14)


def test_omega_sw_ten_recoil_exact_rationals(reference_params, reference_derived):
    # with omega_sw = 10 omega_R the frequencies are exact rationals in omega_R:
    # Omega_+ = 19, Omega_- = 9, omega_m^2 = 171, chi^4 = 19/9
    d = derive_params(params_with_omega_sw(reference_params,
                                           10 * reference_derived.omega_R))
    wr = d.omega_R
    assert Fraction(19, 1) == pytest.approx(d.Omega_plus / wr, rel=1e-12)
    assert Fraction(9, 1) == pytest.approx(d.Omega_minus / wr, rel=1e-12)
    assert (d.omega_m / wr) ** 2 == pytest.approx(171.0, rel=1e-12)
    assert d.chi**4 == pytest.approx(19.0 / 9.0, rel=1e-12)
    assert d.chi == pytest.approx(1.2053907, rel=1e-6)


def test_omega_m_strictly_increasing_in_omega_sw(reference_params, reference_derived):
    wr = reference_derived.omega_R
    omegas = [derive_params(params_with_omega_sw(reference_params, s * wr)).omega_m
              for s in np.linspace(0.0, 25.0, 40)]
    assert np.all(np.diff(omegas) > 0)


def test_scale_consistency():
    s = 10.0
    base = PhysicalParams(N=5e4, m_a=86.909180 * U_KG, omega_a=2.41419e15,
                          omega_c=2.41494e15, g0=TWO_PI * 14.1e6, L=178e-6,
                          kappa=TWO_PI * 13e6, gamma=TWO_PI * 13e3,
                          omega_sw=5e4)
    scaled = PhysicalParams(N=base.N, m_a=base.m_a * s, omega_a=base.omega_a * s,
                            omega_c=base.omega_c * s, g0=base.g0 * s, L=base.L,
                            kappa=base.kappa * s, gamma=base.gamma * s,
                            omega_sw=base.omega_sw * s)
    d0, d1 = derive_params(base), derive_params(scaled)
    for field in ("omega_R", "Delta_a", "U0", "g", "Omega_c", "Omega_plus",
                  "Omega_minus", "omega_m", "G"):
        assert getattr(d1, field) == pytest.approx(s * getattr(d0, field), rel=1e-12), field
    assert d1.k_wavenumber == pytest.approx(s * d0.k_wavenumber, rel=1e-12)
    assert d1.chi == pytest.approx(d0.chi, rel=1e-12)


def test_omega_sw_from_scattering_geometry():
    hbar = 1.054571817e-34
    a_s, w, N, m_a, L = 5.3e-9, 25e-6, 5e4, 86.909180 * U_KG, 178e-6
    p = PhysicalParams(N=N, m_a=m_a, omega_a=2.41419e15, omega_c=2.41494e15,
                       g0=TWO_PI * 14.1e6, L=L, kappa=TWO_PI * 13e6,
                       gamma=TWO_PI * 13e3, a_s=a_s, w=w)
    expected = 8 * np.pi * hbar * a_s * N / (m_a * L * w**2)
    assert p.omega_sw == pytest.approx(expected, rel=1e-12)


def test_nonpositive_omega_minus_raises():
    with pytest.raises(NonPositiveOmegaMinus):
        bogoliubov_frequencies(omega_R=1.0, omega_sw=-9.0)
    # boundary: exactly zero is also undefined
    with pytest.raises(NonPositiveOmegaMinus):
        bogoliubov_frequencies(omega_R=1.0, omega_sw=-8.0)


def test_dispersive_regime_warning():
    with pytest.warns(DispersiveRegimeWarning):
        PhysicalParams(N=1e4, m_a=86.909180 * U_KG, omega_a=2.41494e15 - 1e9,
                       omega_c=2.41494e15, g0=TWO_PI * 14.1e6, L=178e-6,
                       kappa=TWO_PI * 13e6, gamma=TWO_PI * 13e3, omega_sw=0.0)


@pytest.mark.parametrize("key,value", [
    ("N", 0), ("m_a", -1.0), ("g0", 0.0), ("kappa", 0.0), ("gamma", -2.0),
    ("omega_sw", -1.0), ("alpha_max", -0.1), ("n_th_b", -0.5),
])
def test_invalid_inputs_rejected(key, value):
    kwargs = dict(N=5e4, m_a=86.909180 * U_KG, omega_a=2.41419e15,
                  omega_c=2.41494e15, g0=TWO_PI * 14.1e6, L=178e-6,
                  kappa=TWO_PI * 13e6, gamma=TWO_PI * 13e3, omega_sw=0.0)
    kwargs[key] = value
    with pytest.raises(ValueError):
        PhysicalParams(**kwargs)


def test_missing_omega_sw_and_geometry_rejected():
    with pytest.raises(ValueError, match="omega_sw"):
        PhysicalParams(N=5e4, m_a=86.909180 * U_KG, omega_a=2.41419e15,
                       omega_c=2.41494e15, g0=TWO_PI * 14.1e6, L=178e-6,
                       kappa=TWO_PI * 13e6, gamma=TWO_PI * 13e3)


# --- quadrature mixing matrix ---

def test_mixing_identity_at_chi_one():
    assert np.allclose(bogoliubov_matrix(1.0), np.eye(2), atol=1e-15)


def test_mixing_frozen_values():
    M = bogoliubov_matrix(1.2050)
    assert M[0, 0] == pytest.approx(1.0174378, rel=1e-6)
    assert M[0, 1] == pytest.approx(0.1875622, rel=1e-6)
    assert M[0, 1] == M[1, 0] and M[0, 0] == M[1, 1]


@pytest.mark.parametrize("chi", [0.5, 1.2050, 3.0])
def test_mixing_determinant_one(chi):
    assert np.linalg.det(bogoliubov_matrix(chi)) == pytest.approx(1.0, abs=1e-12)


def test_mixing_determinant_log_grid():
    for chi in np.geomspace(1e-2, 1e2, 41):
        assert abs(np.linalg.det(bogoliubov_matrix(chi)) - 1.0) < 1e-12


def test_mixing_round_trip_log_grid():
    for chi in np.geomspace(1e-2, 1e2, 17):
        M = bogoliubov_matrix(chi)
        assert np.allclose(M @ np.linalg.inv(M), np.eye(2), atol=1e-12)
        # the inverse mixing is the matrix at 1/chi
        assert np.allclose(np.linalg.inv(M), bogoliubov_matrix(1.0 / chi),
                           atol=1e-10 * max(1.0, chi**2, chi**-2))


@given(st.floats(min_value=1e-2, max_value=1e2))
def test_mixing_symplectic_property(chi):
    M = bogoliubov_matrix(chi)
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-10)


def test_chi_must_be_positive():
    with pytest.raises(ValueError):
        bogoliubov_matrix(0.0)


# --- lattice depth diagnostic ---

def test_lattice_depth_zero_passes():
    check = validate_lattice_depth(0.0, 0.0, 1.0)
    assert check.ok and check.ratio == 0.0


def test_lattice_depth_boundary_inclusive():
    # U0 <n> = 10 omega_R exactly still passes
    check = validate_lattice_depth(10.0, 1.0, 1.0)
    assert check.ok and check.ratio == pytest.approx(1.0, rel=1e-15)


def test_lattice_depth_fails_at_twice_limit(reference_params, reference_derived):
    d = reference_derived
    alpha_max = np.sqrt(2 * 20.0 * d.omega_R / d.U0)
    check = validate_lattice_depth(d.U0, alpha_max**2 / 2.0, d.omega_R)
    assert not check.ok
    assert check.ratio == pytest.approx(2.0, rel=1e-12)
