import numpy as np
import pytest

from becqnd.params import PhysicalParams, derive_params

TWO_PI = 2.0 * np.pi
U_KG = 1.66053906892e-27


@pytest.fixture(scope="session")
def reference_params():
    """Rb-87 cavity parameter set used throughout: N = 5e4, 780 nm,
    kappa = 2pi x 13 MHz, gamma = 1e-3 kappa."""
    return PhysicalParams(
        N=5e4, m_a=86.909180 * U_KG, omega_a=2.41419e15, omega_c=2.41494e15,
        g0=TWO_PI * 14.1e6, L=178e-6, kappa=TWO_PI * 13e6,
        gamma=1e-3 * TWO_PI * 13e6, omega_sw=0.0)


@pytest.fixture(scope="session")
def reference_derived(reference_params):
    return derive_params(reference_params)


def params_with_omega_sw(base, omega_sw):
    return PhysicalParams(
        N=base.N, m_a=base.m_a, omega_a=base.omega_a, omega_c=base.omega_c,
        g0=base.g0, L=base.L, kappa=base.kappa, gamma=base.gamma,
        omega_p=base.omega_p, omega_sw=omega_sw, alpha_max=base.alpha_max,
        n_th_b=base.n_th_b, Delta_c=base.Delta_c)
