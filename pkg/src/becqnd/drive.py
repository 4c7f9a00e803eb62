"""Two-tone pump design and the classical mean-field oracle.

The intracavity mean field alpha(t) = alpha_max cos(omega_m t) is produced by
the modulated pump amplitude

    eta(t) = eta_max cos(omega_m t + phi),
    eta_max = alpha_max sqrt(kappa^2/4 + omega_m^2),  phi = arctan(2 omega_m / kappa),

i.e. two tones at omega_p +- omega_m with amplitude eta_max/2 each.  The
collective mean field beta(t) then settles onto the three Fourier components

    beta_0   = -i G a^2 / (2 (i omega_m + gamma/2))
    beta_2   = -i G a^2 / (4 (3 i omega_m + gamma/2))
    beta_-2  = -i G a^2 / (4 (-i omega_m + gamma/2))      (a = alpha_max)

with the gamma << omega_m limits -G a^2/(2 omega_m), -G a^2/(12 omega_m),
+G a^2/(4 omega_m).  integrate_meanfield() integrates the coupled mean-field
ODEs (including the self-consistent detuning shift) and extracts the same
components by exact-period DFT, providing an independent check of the design.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import StiffnessError
from .params import DerivedParams, PhysicalParams


@dataclass(frozen=True)
class DriveSpec:
    """Modulated pump: eta(t) = eta_max cos(omega_mod t + phi)."""

    eta_max: float    # rad/s
    phi: float        # rad, in [0, pi/2)
    omega_mod: float  # rad/s, equal to the effective mode frequency
    alpha_max: float  # dimensionless target mean-field amplitude

    @property
    def tones(self) -> dict:
        """Two-tone description for documentation output."""
        return {
            "omega_offsets": (+self.omega_mod, -self.omega_mod),
            "amplitude_each": self.eta_max / 2.0,
            "relative_phase": self.phi,
        }

    def eta(self, t):
        return self.eta_max * np.cos(self.omega_mod * t + self.phi)

    def to_dict(self) -> dict:
        tones = self.tones
        return {
            "eta_max": self.eta_max,
            "phi": self.phi,
            "omega_mod": self.omega_mod,
            "alpha_max": self.alpha_max,
            "tone_offsets": list(tones["omega_offsets"]),
            "tone_amplitude_each": tones["amplitude_each"],
            "tone_relative_phase": tones["relative_phase"],
        }


def design_drive(alpha_max: float, kappa: float, omega_m: float) -> DriveSpec:
    """Pump modulation that drives the cavity mean field to alpha_max cos(omega_m t)."""
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    if omega_m < 0:
        raise ValueError(f"omega_m must be >= 0, got {omega_m}")
    if alpha_max < 0:
        raise ValueError(f"alpha_max must be >= 0, got {alpha_max}")
    eta_max = alpha_max * math.sqrt(kappa**2 / 4.0 + omega_m**2)
    phi = math.atan2(2.0 * omega_m, kappa)
    return DriveSpec(eta_max=eta_max, phi=phi, omega_mod=omega_m, alpha_max=alpha_max)


def alpha_from_eta(eta_max: float, kappa: float, omega_m: float) -> float:
    """Invert the drive design: mean-field amplitude reached by a given eta_max."""
    return eta_max / math.sqrt(kappa**2 / 4.0 + omega_m**2)


@dataclass(frozen=True)
class BetaComponents:
    """Mean-field Fourier components and the combinations beta_bar_n = beta_n + beta_-n^*."""

    beta_0: complex
    beta_2: complex
    beta_m2: complex
    beta_bar_0: complex = field(init=False)
    beta_bar_2: complex = field(init=False)
    beta_bar_m2: complex = field(init=False)
    # gamma << omega_m approximations, for comparison
    beta_0_approx: float = 0.0
    beta_2_approx: float = 0.0
    beta_m2_approx: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "beta_bar_0", self.beta_0 + np.conj(self.beta_0))
        object.__setattr__(self, "beta_bar_2", self.beta_2 + np.conj(self.beta_m2))
        object.__setattr__(self, "beta_bar_m2", self.beta_m2 + np.conj(self.beta_2))


def beta_fourier(G: float, alpha_max: float, omega_m: float, gamma: float) -> BetaComponents:
    """Exact Fourier components of the collective mean field under the designed drive."""
    if omega_m <= 0 or gamma <= 0 or G <= 0:
        raise ValueError("G, omega_m, gamma must be > 0")
    if alpha_max < 0:
        raise ValueError(f"alpha_max must be >= 0, got {alpha_max}")
    ga2 = G * alpha_max**2
    return BetaComponents(
        beta_0=-1j * ga2 / (2.0 * (1j * omega_m + gamma / 2.0)),
        beta_2=-1j * ga2 / (4.0 * (3j * omega_m + gamma / 2.0)),
        beta_m2=-1j * ga2 / (4.0 * (-1j * omega_m + gamma / 2.0)),
        beta_0_approx=-ga2 / (2.0 * omega_m),
        beta_2_approx=-ga2 / (12.0 * omega_m),
        beta_m2_approx=+ga2 / (4.0 * omega_m),
    )


# ---------------------------------------------------------------------------
# mean-field ODE oracle
# ---------------------------------------------------------------------------

@njit(cache=True)
def _meanfield_rhs(t, ar, ai, br, bi, Delta_c, kappa, gamma, omega_m, G,
                   eta_max, phi, omega_mod):
    eta = eta_max * math.cos(omega_mod * t + phi)
    dprime = Delta_c - 2.0 * G * br
    dar = -dprime * ai - 0.5 * kappa * ar + eta
    dai = dprime * ar - 0.5 * kappa * ai
    a2 = ar * ar + ai * ai
    dbr = omega_m * bi - 0.5 * gamma * br
    dbi = -omega_m * br - 0.5 * gamma * bi - G * a2
    return dar, dai, dbr, dbi


@njit(cache=True)
def _rk4_step(t, y, h, Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod):
    k1 = _meanfield_rhs(t, y[0], y[1], y[2], y[3], Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
    k2 = _meanfield_rhs(t + 0.5 * h, y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1],
                        y[2] + 0.5 * h * k1[2], y[3] + 0.5 * h * k1[3],
                        Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
    k3 = _meanfield_rhs(t + 0.5 * h, y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1],
                        y[2] + 0.5 * h * k2[2], y[3] + 0.5 * h * k2[3],
                        Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
    k4 = _meanfield_rhs(t + h, y[0] + h * k3[0], y[1] + h * k3[1],
                        y[2] + h * k3[2], y[3] + h * k3[3],
                        Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
    out = np.empty(4)
    for i in range(4):
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return out


@njit(cache=True)
def _integrate(n_steps, dt, y0, Delta_c, kappa, gamma, omega_m, G, eta_max, phi,
               omega_mod, rec_every, n_rec, check_every, tol):
    """Fixed-step RK4 with a step-doubling error monitor.

    Returns (records, t_rec, max_rel_err); records[k] = state at step (k+1)*rec_every.
    """
    y = y0.copy()
    rec = np.empty((n_rec, 4))
    t_rec = np.empty(n_rec)
    t = 0.0
    k = 0
    max_err = 0.0
    for i in range(n_steps):
        y1 = _rk4_step(t, y, dt, Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
        if check_every > 0 and i % check_every == 0:
            yh = _rk4_step(t, y, 0.5 * dt, Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
            yh = _rk4_step(t + 0.5 * dt, yh, 0.5 * dt, Delta_c, kappa, gamma, omega_m, G, eta_max, phi, omega_mod)
            num = 0.0
            den = 1e-300
            for j in range(4):
                num += (y1[j] - yh[j]) ** 2
                den += yh[j] ** 2
            err = math.sqrt(num / den)
            if err > max_err:
                max_err = err
            if err > tol:
                return rec, t_rec, max_err
        y = y1
        t = (i + 1) * dt
        if (i + 1) % rec_every == 0 and k < n_rec:
            rec[k, 0] = y[0]
            rec[k, 1] = y[1]
            rec[k, 2] = y[2]
            rec[k, 3] = y[3]
            t_rec[k] = t
            k += 1
    return rec, t_rec, max_err


@dataclass(frozen=True)
class MeanFieldResult:
    """Sampled mean-field trajectories plus DFT components of the final periods."""

    t: np.ndarray
    alpha: np.ndarray          # complex
    beta: np.ndarray           # complex
    beta_n: dict               # {0: c0, 2: c2, -2: cm2, 1: c1, 3: c3} DFT components
    alpha_amplitude: float     # from the +omega_m DFT bin of alpha(t)
    alpha_phase: float         # rad, 0 for a pure cosine
    delta_c_prime_mean: float  # time-averaged effective detuning over the window
    max_step_error: float


def integrate_meanfield(p: PhysicalParams, d: DerivedParams, drive: DriveSpec,
                        t_span: float | None = None, dt: float | None = None,
                        settle_periods_dft: int = 8,
                        error_tol: float = 1e-6) -> MeanFieldResult:
    """Integrate the coupled mean-field ODEs and extract Fourier components.

    The cavity equation includes the self-consistent detuning
    Delta'_c = Delta_c - G (beta + beta*).  Sampling is commensurate with the
    modulation period so the DFT bins land exactly on {0, +-1, +-2, +-3} omega_m;
    the last ``settle_periods_dft`` full periods after the transient are used.

    Raises StiffnessError when the step-doubling error estimate exceeds
    ``error_tol`` (dt too large for the fastest scale).
    """
    # the drive is taken literally (omega_mod = 0 means a constant pump);
    # the analysis window is always commensurate with the mode period
    omega_win = drive.omega_mod if drive.omega_mod > 0 else d.omega_m
    period = 2.0 * np.pi / omega_win
    if dt is None:
        dt = 0.005 / p.kappa
    if t_span is None:
        t_span = 20.0 / p.gamma
    # commensurate step: integer substeps per period, record 128 samples/period
    steps_per_period = max(128, int(math.ceil(period / dt / 128.0)) * 128)
    dt = period / steps_per_period
    rec_every = steps_per_period // 128
    n_settle_periods = int(math.ceil(t_span / period))
    n_periods = n_settle_periods + settle_periods_dft
    n_steps = n_periods * steps_per_period
    n_rec = n_steps // rec_every
    y0 = np.zeros(4)
    rec, t_rec, max_err = _integrate(
        n_steps, dt, y0, p.Delta_c, p.kappa, p.gamma, d.omega_m, d.G,
        drive.eta_max, drive.phi, drive.omega_mod, rec_every, n_rec,
        check_every=max(1, n_steps // 256), tol=error_tol)
    if max_err > error_tol:
        raise StiffnessError(
            f"step-doubling error {max_err:.2e} exceeds {error_tol:.1e}; reduce dt")
    alpha = rec[:, 0] + 1j * rec[:, 1]
    beta = rec[:, 2] + 1j * rec[:, 3]
    # DFT over the trailing exact periods
    n_win = settle_periods_dft * 128
    tw = t_rec[-n_win:]
    bw = beta[-n_win:]
    aw = alpha[-n_win:]
    beta_n = {}
    for n in (0, 1, 2, 3, -1, -2, -3):
        beta_n[n] = np.mean(bw * np.exp(-1j * n * omega_win * tw))
    a1 = np.mean(aw * np.exp(-1j * omega_win * tw))
    dprime = p.Delta_c - 2.0 * d.G * np.real(bw)
    return MeanFieldResult(
        t=t_rec, alpha=alpha, beta=beta, beta_n=beta_n,
        alpha_amplitude=2.0 * abs(a1), alpha_phase=float(np.angle(a1)),
        delta_c_prime_mean=float(np.mean(dprime)), max_step_error=max_err)
