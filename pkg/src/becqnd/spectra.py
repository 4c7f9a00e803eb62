"""Closed-form noise spectra, added-noise budget, and optimum drive.

Conventions: two-sided symmetrized spectra of dimensionless quadratures,
normalized so Var = integral S(omega) d omega / (2 pi); susceptibilities

    chi_c(omega) = (kappa/2 - i omega)^(-1)
    chi_m(omega) = (gamma/2 - i omega)^(-1)

Measured-quadrature and conjugate-quadrature spectra:

    S_Q = (gamma/2)|chi_m|^2 {1 + 2 n_th + 2 n_bad}
    S_P = (gamma/2)|chi_m|^2 {1 + 2 n_th + 2 n_bad + 2 n_BA}
    n_bad(w) = (kappa/8 gamma)(G a)^2 [|chi_c(w+2wm)|^2 + |chi_c(w-2wm)|^2]
    n_BA(w)  = (kappa/2 gamma)(G a)^2 |chi_c(w)|^2

Homodyne output spectrum and added noise:

    S_Yout = |Gcal|^2 A(w) [1/2 + n_th + n_add],  Gcal = sqrt(kappa) G a chi_c
    A(w) = gamma|chi_m(w)|^2 + (gamma/2)[|chi_m(w+2wm)|^2 + |chi_m(w-2wm)|^2]

n_add(w) carries four terms: imprecision 1/(2|Gcal|^2 A), n_bad, the
chi_m-sideband-weighted back-action, and the classical-drive term built from
the beta_bar_n combinations.  The n_add(0) minimization over the pump gives

    eta_opt      = [gamma (wm^2 + k^2/4) sqrt(4 wm^2 + k^2/4) / (2 sqrt(2) G^2)]^(1/2)
    n_add_min(0) = (sqrt(2)/4) kappa / sqrt(kappa^2 + 16 wm^2)

which are exact minimizers of the two-term approximation n_add0_approx and
hold for the full n_add only when gamma << omega_m, kappa.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .drive import alpha_from_eta, beta_fourier
from .errors import RegimeWarning, ZeroGain
from .params import DerivedParams, PhysicalParams

SQL = 0.5  # standard quantum limit on the added noise


@dataclass(frozen=True)
class SpectralParams:
    """Everything the frequency-domain formulas need."""

    kappa: float      # rad/s
    gamma: float      # rad/s
    omega_m: float    # rad/s
    G: float          # rad/s
    alpha_max: float  # dimensionless
    n_th_b: float = 0.0

    @property
    def g_alpha(self) -> float:
        return self.G * self.alpha_max

    @classmethod
    def from_params(cls, p: PhysicalParams, d: DerivedParams,
                    alpha_max: float | None = None,
                    eta_max: float | None = None) -> "SpectralParams":
        if eta_max is not None:
            if alpha_max is not None:
                raise ValueError("give alpha_max or eta_max, not both")
            alpha_max = alpha_from_eta(eta_max, p.kappa, d.omega_m)
        elif alpha_max is None:
            alpha_max = p.alpha_max
        return cls(kappa=p.kappa, gamma=p.gamma, omega_m=d.omega_m,
                   G=d.G, alpha_max=alpha_max, n_th_b=p.n_th_b)

    def with_eta(self, eta_max: float) -> "SpectralParams":
        """Same model at a different pump amplitude."""
        return SpectralParams(
            kappa=self.kappa, gamma=self.gamma, omega_m=self.omega_m, G=self.G,
            alpha_max=alpha_from_eta(eta_max, self.kappa, self.omega_m),
            n_th_b=self.n_th_b)

    def params_hash(self) -> str:
        blob = json.dumps({k: getattr(self, k) for k in
                           ("kappa", "gamma", "omega_m", "G", "alpha_max", "n_th_b")},
                          sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def chi_c(omega, kappa):
    return 1.0 / (kappa / 2.0 - 1j * np.asarray(omega, dtype=float))


def chi_m(omega, gamma):
    return 1.0 / (gamma / 2.0 - 1j * np.asarray(omega, dtype=float))


def _abs2_chi_c(omega, kappa):
    o = np.asarray(omega, dtype=float)
    return 1.0 / (kappa**2 / 4.0 + o**2)


def _abs2_chi_m(omega, gamma):
    o = np.asarray(omega, dtype=float)
    return 1.0 / (gamma**2 / 4.0 + o**2)


def n_bad(omega, sp: SpectralParams):
    """Residual back-action quanta entering the measured quadrature."""
    o = np.asarray(omega, dtype=float)
    return (sp.kappa / (8.0 * sp.gamma)) * sp.g_alpha**2 * (
        _abs2_chi_c(o + 2.0 * sp.omega_m, sp.kappa)
        + _abs2_chi_c(o - 2.0 * sp.omega_m, sp.kappa))


def n_bad0_good_cavity(sp: SpectralParams) -> float:
    """kappa << omega_m resonance approximation of n_bad(0)."""
    return sp.kappa * sp.g_alpha**2 / (16.0 * sp.gamma * sp.omega_m**2)


def n_ba(omega, sp: SpectralParams):
    """Back-action quanta entering the conjugate quadrature."""
    return (sp.kappa / (2.0 * sp.gamma)) * sp.g_alpha**2 * _abs2_chi_c(omega, sp.kappa)


def n_ba0(sp: SpectralParams) -> float:
    """n_BA(0) = 2 (G a)^2 / (kappa gamma); exact, chi_c(0) = 2/kappa."""
    return 2.0 * sp.g_alpha**2 / (sp.kappa * sp.gamma)


def s_q(omega, sp: SpectralParams):
    return (sp.gamma / 2.0) * _abs2_chi_m(omega, sp.gamma) * (
        1.0 + 2.0 * sp.n_th_b + 2.0 * n_bad(omega, sp))


def s_p(omega, sp: SpectralParams):
    return (sp.gamma / 2.0) * _abs2_chi_m(omega, sp.gamma) * (
        1.0 + 2.0 * sp.n_th_b + 2.0 * n_bad(omega, sp) + 2.0 * n_ba(omega, sp))


def a_response(omega, sp: SpectralParams):
    """Mode response weight A(w); central peak twice the +-2wm side peaks."""
    o = np.asarray(omega, dtype=float)
    return (sp.gamma * _abs2_chi_m(o, sp.gamma)
            + (sp.gamma / 2.0) * (_abs2_chi_m(o + 2.0 * sp.omega_m, sp.gamma)
                                  + _abs2_chi_m(o - 2.0 * sp.omega_m, sp.gamma)))


def gain(omega, sp: SpectralParams):
    """Complex gain Gcal(w) = sqrt(kappa) G alpha_max chi_c(w)."""
    return np.sqrt(sp.kappa) * sp.g_alpha * chi_c(omega, sp.kappa)


def n_add(omega, sp: SpectralParams):
    """Measurement-added quanta referred to the measured quadrature (exact)."""
    if sp.alpha_max <= 0.0 or sp.alpha_max**2 == 0.0:
        raise ZeroGain("n_add undefined at alpha_max = 0 (zero gain)")
    o = np.asarray(omega, dtype=float)
    A = a_response(o, sp)
    g2 = sp.kappa * sp.g_alpha**2 * _abs2_chi_c(o, sp.kappa)
    cm_side = (_abs2_chi_m(o + 2.0 * sp.omega_m, sp.gamma)
               + _abs2_chi_m(o - 2.0 * sp.omega_m, sp.gamma))
    cc_side = (_abs2_chi_c(o + 2.0 * sp.omega_m, sp.kappa)
               + _abs2_chi_c(o - 2.0 * sp.omega_m, sp.kappa))
    bc = beta_fourier(sp.G, sp.alpha_max, sp.omega_m, sp.gamma)
    # beta_bar_0 is real and beta_bar_2 beta_bar_-2 = |beta_bar_2|^2; take the
    # real part to shed rounding residue only
    bb0_sq = float(np.real(bc.beta_bar_0**2))
    bb2_prod = float(np.real(bc.beta_bar_2 * bc.beta_bar_m2))
    # |Gcal|^2 A has no real zeros for alpha_max, gamma > 0
    assert np.all(g2 * A > 0.0)
    term_impr = 1.0 / (2.0 * g2 * A)
    term_ba = sp.gamma * n_ba(o, sp) / (4.0 * A) * cm_side
    term_beta = (sp.kappa / (2.0 * sp.alpha_max**2 * A)) * (
        bb0_sq * _abs2_chi_c(o, sp.kappa) + bb2_prod * cc_side)
    return term_impr + n_bad(o, sp) + term_ba + term_beta


def s_yout(omega, sp: SpectralParams):
    """Homodyne output spectrum of the phase quadrature."""
    if sp.alpha_max <= 0.0:
        raise ZeroGain("S_Yout undefined at alpha_max = 0 (zero gain)")
    o = np.asarray(omega, dtype=float)
    return np.abs(gain(o, sp))**2 * a_response(o, sp) * (
        0.5 + sp.n_th_b + n_add(o, sp))


def _check_narrow_mode(sp: SpectralParams):
    r1 = sp.gamma / sp.omega_m
    r2 = sp.gamma / sp.kappa
    if max(r1, r2) > 0.05:
        warnings.warn(
            f"gamma/omega_m = {r1:.3g}, gamma/kappa = {r2:.3g}: the narrow-mode "
            "approximation behind this formula assumes both << 1",
            RegimeWarning, stacklevel=3)


def n_add0_approx(sp: SpectralParams) -> float:
    """Two-term on-resonance added noise, valid for gamma << omega_m, kappa."""
    if sp.alpha_max <= 0.0:
        raise ZeroGain("n_add undefined at alpha_max = 0 (zero gain)")
    _check_narrow_mode(sp)
    nba = n_ba0(sp)
    return 1.0 / (16.0 * nba) + (sp.kappa**2 / (4.0 * sp.omega_m**2 + sp.kappa**2 / 4.0)) * nba / 8.0


def eta_opt(sp: SpectralParams) -> float:
    """Closed-form pump amplitude minimizing n_add0_approx."""
    _check_narrow_mode(sp)
    return float(np.sqrt(
        sp.gamma * (sp.omega_m**2 + sp.kappa**2 / 4.0)
        * np.sqrt(4.0 * sp.omega_m**2 + sp.kappa**2 / 4.0)
        / (2.0 * np.sqrt(2.0) * sp.G**2)))


def n_add_min0(sp: SpectralParams) -> float:
    """Minimum on-resonance added noise at the optimum pump; always < 1/2."""
    return float(np.sqrt(2.0) / 4.0 * sp.kappa / np.sqrt(sp.kappa**2 + 16.0 * sp.omega_m**2))


@dataclass(frozen=True)
class NoiseBudget:
    n_bad_0: float
    n_BA_0: float
    n_add_0_exact: float
    n_add_0_approx: float
    n_add_min_0: float
    eta_opt: float
    sql_beaten: bool

    def __post_init__(self):
        if self.n_BA_0 < self.n_bad_0:
            raise ValueError("n_BA(0) >= n_bad(0) violated")
        if self.n_add_min_0 > SQL:
            raise ValueError("n_add_min(0) <= 1/2 violated")

    def to_dict(self) -> dict:
        return {
            "n_bad_0": self.n_bad_0, "n_BA_0": self.n_BA_0,
            "n_add_0_exact": self.n_add_0_exact,
            "n_add_0_approx": self.n_add_0_approx,
            "n_add_min_0": self.n_add_min_0, "eta_opt": self.eta_opt,
            "sql_beaten": self.sql_beaten,
        }


def noise_budget(sp: SpectralParams) -> NoiseBudget:
    """On-resonance scalar summary; sql_beaten refers to the exact n_add(0)."""
    nadd0 = float(n_add(0.0, sp))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        approx = n_add0_approx(sp)
        eopt = eta_opt(sp)
    return NoiseBudget(
        n_bad_0=float(n_bad(0.0, sp)), n_BA_0=n_ba0(sp),
        n_add_0_exact=nadd0, n_add_0_approx=approx,
        n_add_min_0=n_add_min0(sp), eta_opt=eopt,
        sql_beaten=bool(nadd0 < SQL))


def default_omega_grid(omega_m: float, kappa: float, gamma: float,
                       n_points: int = 4001) -> np.ndarray:
    """Symmetric grid covering the kappa envelope with the analytic features
    at {0, +-2 omega_m} sampled exactly plus gamma-scale refinement around them
    (the dips are only gamma wide, far below the base grid spacing)."""
    half = 3.0 * omega_m * max(1.0, kappa / omega_m)
    base = np.linspace(-half, half, n_points)
    local = np.linspace(-6.0, 6.0, 25) * gamma
    extras = [np.array([0.0]), local, 2.0 * omega_m + local, -2.0 * omega_m + local]
    grid = np.unique(np.concatenate([base] + extras))
    return grid[(grid >= -half) & (grid <= half)]


@dataclass(frozen=True)
class SpectrumSeries:
    """A spectrum sampled on a frequency grid, with optional error bars."""

    omega: np.ndarray
    values: np.ndarray
    label: str
    errors: np.ndarray | None = None
    meta: dict | None = None

    def __post_init__(self):
        if self.omega.shape != self.values.shape:
            raise ValueError("omega and values must have the same shape")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.label}: spectral values must be finite and >= 0")
