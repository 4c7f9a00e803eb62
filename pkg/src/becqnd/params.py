"""Physical inputs and the derived effective-optomechanics parameters.

The cavity field couples dispersively to the condensate; after expanding the
matter field onto the single momentum side mode, the excitation behaves as an
effective mechanical oscillator.  The derivation chain implemented here:

    k        = omega_p / c                      pump wavenumber
    omega_R  = hbar k^2 / (2 m_a)               recoil frequency
    Delta_a  = omega_p - omega_a                atom-pump detuning
    U0       = g0^2 / Delta_a                   lattice depth per photon
    g        = U0 sqrt(2 N) / 4                 bare optomechanical coupling
    Omega_c  = 4 omega_R + omega_sw             bare side-mode frequency
    Omega_+- = Omega_c +- omega_sw / 2
    omega_m  = sqrt(Omega_+ Omega_-)            effective mode frequency
    chi      = (Omega_+ / Omega_-)^(1/4)        quadrature mixing parameter
    G        = g / chi                          effective coupling

The collision-induced shift omega_sw may be supplied directly (default) or
computed from the scattering length and mode waist as
8 pi hbar a_s N / (m_a L w^2).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .constants import CODATA, Constants
from .errors import DispersiveRegimeWarning, NonPositiveOmegaMinus


@dataclass(frozen=True)
class PhysicalParams:
    """Raw experimental inputs. All frequencies are angular (rad/s).

    Attributes:
        N: atom number (>= 1).
        m_a: atomic mass (kg).
        omega_a: atomic transition frequency (rad/s).
        omega_c: bare cavity frequency (rad/s).
        omega_p: pump carrier frequency (rad/s); defaults to omega_c, the
            working point where the pump sits at the (shifted) cavity line.
        g0: vacuum Rabi frequency (rad/s).
        L: cavity length (m).
        kappa: cavity amplitude decay rate (rad/s); defined so the optical
            susceptibility is (kappa/2 - i omega)^(-1).
        gamma: collective-mode damping rate (rad/s).
        omega_sw: s-wave collision frequency (rad/s, >= 0); if None it is
            computed from (a_s, w).
        a_s, w: scattering length (m) and mode waist (m), only used when
            omega_sw is None.
        alpha_max: peak intracavity mean-field amplitude (dimensionless >= 0).
        n_th_b: thermal occupation of the collective mode (>= 0).
        Delta_c: effective cavity detuning (rad/s); 0 is the back-action
            evading working point and the default.
    """

    N: float
    m_a: float
    omega_a: float
    omega_c: float
    g0: float
    L: float
    kappa: float
    gamma: float
    omega_p: float | None = None
    omega_sw: float | None = None
    a_s: float | None = None
    w: float | None = None
    alpha_max: float = 0.0
    n_th_b: float = 0.0
    Delta_c: float = 0.0
    constants: Constants = field(default=CODATA, repr=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        for key in ("m_a", "omega_a", "omega_c", "g0", "L", "kappa", "gamma"):
            v = getattr(self, key)
            if not v > 0:
                raise ValueError(f"{key} must be > 0, got {v}")
        if self.omega_p is None:
            object.__setattr__(self, "omega_p", self.omega_c)
        if not self.omega_p > 0:
            raise ValueError(f"omega_p must be > 0, got {self.omega_p}")
        if self.omega_sw is None:
            if self.a_s is None or self.w is None:
                raise ValueError("omega_sw missing: give omega_sw or both a_s and w")
            osw = 8 * np.pi * self.constants.hbar * self.a_s * self.N / (self.m_a * self.L * self.w**2)
            object.__setattr__(self, "omega_sw", osw)
        if self.omega_sw < 0:
            raise ValueError(f"omega_sw must be >= 0, got {self.omega_sw}")
        if self.alpha_max < 0:
            raise ValueError(f"alpha_max must be >= 0, got {self.alpha_max}")
        if self.n_th_b < 0:
            raise ValueError(f"n_th_b must be >= 0, got {self.n_th_b}")
        delta_a = self.omega_p - self.omega_a
        if abs(delta_a) < 100 * self.g0:
            warnings.warn(
                f"|Delta_a| = {abs(delta_a):.3e} rad/s is below 100*g0 = "
                f"{100 * self.g0:.3e} rad/s; the dispersive single-mode model "
                "is marginal here", DispersiveRegimeWarning, stacklevel=2)


@dataclass(frozen=True)
class DerivedParams:
    """Every derived quantity of the effective model (all rad/s except noted).

    Field names are the export contract for the derived-parameter JSON.
    """

    omega_R: float
    Delta_a: float
    U0: float
    g: float
    Omega_c: float
    Omega_plus: float
    Omega_minus: float
    chi: float          # dimensionless
    omega_m: float
    G: float
    k_wavenumber: float  # 1/m

    def to_dict(self) -> dict:
        return asdict(self)


def bogoliubov_frequencies(omega_R: float, omega_sw: float):
    """Return (Omega_c, Omega_plus, Omega_minus, omega_m, chi).

    Raises NonPositiveOmegaMinus when Omega_- <= 0, where the mixing
    transformation (and hence omega_m, chi) is undefined.
    """
    Omega_c = 4.0 * omega_R + omega_sw
    Omega_plus = Omega_c + omega_sw / 2.0
    Omega_minus = Omega_c - omega_sw / 2.0
    if not Omega_minus > 0:
        raise NonPositiveOmegaMinus(
            f"Omega_- = {Omega_minus:.6e} rad/s <= 0: quadrature mixing undefined")
    omega_m = np.sqrt(Omega_plus * Omega_minus)
    chi = (Omega_plus / Omega_minus) ** 0.25
    return Omega_c, Omega_plus, Omega_minus, omega_m, chi


def derive_params(p: PhysicalParams) -> DerivedParams:
    """Compute all derived quantities from validated physical inputs. Pure."""
    c = p.constants
    k = p.omega_p / c.c_light
    omega_R = c.hbar * k**2 / (2.0 * p.m_a)
    Delta_a = p.omega_p - p.omega_a
    U0 = p.g0**2 / Delta_a
    g = U0 * np.sqrt(2.0 * p.N) / 4.0
    Omega_c, Omega_plus, Omega_minus, omega_m, chi = bogoliubov_frequencies(omega_R, p.omega_sw)
    return DerivedParams(
        omega_R=omega_R, Delta_a=Delta_a, U0=U0, g=g,
        Omega_c=Omega_c, Omega_plus=Omega_plus, Omega_minus=Omega_minus,
        chi=chi, omega_m=omega_m, G=g / chi, k_wavenumber=k)


def bogoliubov_matrix(chi: float) -> np.ndarray:
    """Symmetric symplectic 2x2 matrix mapping (c, c+) to (b, b+).

    M[0,0] = M[1,1] = (chi^2+1)/(2 chi), M[0,1] = M[1,0] = (chi^2-1)/(2 chi);
    det M = 1 identically.  The inverse mixing is bogoliubov_matrix(1/chi).
    """
    if not chi > 0:
        raise ValueError(f"chi must be > 0, got {chi}")
    a = (chi**2 + 1.0) / (2.0 * chi)
    b = (chi**2 - 1.0) / (2.0 * chi)
    return np.array([[a, b], [b, a]])


@dataclass(frozen=True)
class LatticeDepthCheck:
    ok: bool
    ratio: float  # U0 <n> / (10 omega_R); pass while <= 1 (boundary inclusive)


def validate_lattice_depth(U0: float, mean_photon_number: float,
                           omega_R: float) -> LatticeDepthCheck:
    """Check the shallow-lattice condition U0 <a+a> <= 10 omega_R.

    The caller supplies the mean photon number; for the modulated drive the
    documented choice is the time average alpha_max^2 / 2.
    """
    if U0 < 0 or mean_photon_number < 0 or omega_R < 0:
        raise ValueError("inputs must be nonnegative")
    limit = 10.0 * omega_R
    depth = U0 * mean_photon_number
    if limit == 0.0:
        ratio = 0.0 if depth == 0.0 else np.inf
    else:
        ratio = depth / limit
    return LatticeDepthCheck(ok=ratio <= 1.0, ratio=ratio)
