"""Parameter sweeps, pump optimization, and figure-data generation.

Observables are closed-form scalars, so grids evaluate vectorized; an
optional process pool (BECQND_WORKERS) splits the first axis, writing results
into pre-sized slots by index so the output is identical for any worker count.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NoMinimumInBracket
from .params import PhysicalParams, derive_params
from .spectra import (SQL, SpectralParams, SpectrumSeries, default_omega_grid,
                      eta_opt, n_add, n_add_min0)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a: float, b: float, rel_tol: float = 1e-6,
                   max_iter: int = 400):
    """Minimize a unimodal f on [a, b]; returns (x_min, f(x_min)).

    Raises NoMinimumInBracket when the minimum sits at a bracket endpoint
    (the function keeps descending into the boundary)."""
    if not b > a:
        raise ValueError("need b > a")
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    lo, hi = a, b
    for _ in range(max_iter):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        if (hi - lo) <= rel_tol * (abs(x1) + abs(x2)) / 2.0:
            break
    x = x1 if f1 < f2 else x2
    fx = min(f1, f2)
    span = b - a
    if x - a < 2.0 * rel_tol * span or b - x < 2.0 * rel_tol * span:
        raise NoMinimumInBracket(
            f"minimum pinned to bracket edge at {x:.6g} in [{a:.6g}, {b:.6g}]")
    return x, fx


@dataclass(frozen=True)
class SweepAxis:
    """One sweep dimension; unit names how start/stop are scaled downstream."""

    name: str                  # omega_sw | eta_max | kappa | omega
    unit: str                  # omega_R | kappa | rad/s
    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"axis {self.name}: count must be >= 2")
        if not self.stop > self.start:
            raise ValueError(f"axis {self.name}: need start < stop")

    def values(self, scale: float = 1.0) -> np.ndarray:
        if self.log:
            if self.start <= 0:
                raise ValueError(f"axis {self.name}: log axis needs start > 0")
            return np.geomspace(self.start, self.stop, self.count) * scale
        return np.linspace(self.start, self.stop, self.count) * scale


@dataclass(frozen=True)
class ListAxis:
    """An enumerated (non-gridded) sweep dimension, e.g. a few kappa values."""

    name: str
    unit: str
    points: tuple

    @property
    def count(self) -> int:
        return len(self.points)

    def values(self, scale: float = 1.0) -> np.ndarray:
        return np.asarray(self.points, dtype=float) * scale


@dataclass(frozen=True)
class SweepResult:
    axes: tuple                 # SweepAxis/ListAxis metadata, slow axis first
    values: np.ndarray          # row-major over axes
    observable: str
    params_hash: str
    timestamp: float = field(default_factory=time.time)
    extras: dict | None = None

    def __post_init__(self):
        expected = tuple(ax.count for ax in self.axes)
        if self.values.shape != expected:
            raise ValueError(f"grid shape {self.values.shape} != axes {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sweep produced non-finite values")


def _sp_for_omega_sw(base: PhysicalParams, omega_sw: float) -> SpectralParams:
    p = PhysicalParams(
        N=base.N, m_a=base.m_a, omega_a=base.omega_a, omega_c=base.omega_c,
        g0=base.g0, L=base.L, kappa=base.kappa, gamma=base.gamma,
        omega_p=base.omega_p, omega_sw=omega_sw, alpha_max=base.alpha_max,
        n_th_b=base.n_th_b, Delta_c=base.Delta_c, constants=base.constants)
    return SpectralParams.from_params(p, derive_params(p))


def _nadd0_column(args):
    base, osw, etas = args
    sp0 = _sp_for_omega_sw(base, osw)
    out = np.empty(len(etas))
    for i, eta in enumerate(etas):
        sp = sp0.with_eta(eta)
        out[i] = n_add(0.0, sp)
    return out


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("BECQND_WORKERS", "1")))
    except ValueError:
        return 1


def sweep_nadd0(omega_sw_axis: SweepAxis, eta_axis: SweepAxis,
                base: PhysicalParams) -> SweepResult:
    """Grid of the exact n_add(0) over (omega_sw, eta_max), plus the
    SQL-beaten mask n_add(0) < 1/2 in extras."""
    d = derive_params(base)
    sw_vals = omega_sw_axis.values(d.omega_R if omega_sw_axis.unit == "omega_R" else 1.0)
    eta_scale = base.kappa if eta_axis.unit == "kappa" else 1.0
    eta_vals = eta_axis.values(eta_scale)
    jobs = [(base, osw, eta_vals) for osw in sw_vals]
    grid = np.empty((len(sw_vals), len(eta_vals)))
    n_workers = _workers()
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for i, col in enumerate(pool.map(_nadd0_column, jobs)):
                grid[i] = col
    else:
        for i, job in enumerate(jobs):
            grid[i] = _nadd0_column(job)
    return SweepResult(
        axes=(omega_sw_axis, eta_axis), values=grid, observable="n_add_0",
        params_hash=_sp_for_omega_sw(base, float(sw_vals[0])).params_hash(),
        extras={"sql_mask": grid < SQL, "omega_sw_values": sw_vals,
                "eta_max_values": eta_vals})


@dataclass(frozen=True)
class EtaOptimum:
    omega_sw: float
    eta_numeric: float        # argmin of the exact n_add(0)
    n_add_numeric: float
    eta_closed: float         # closed-form optimum of the two-term form
    n_add_min_closed: float


def optimize_eta(omega_sw: float, base: PhysicalParams,
                 rel_tol: float = 1e-6) -> EtaOptimum:
    """Golden-section minimization of the exact n_add(0) over
    eta_max in [1e-3 kappa, 10 kappa], with the closed form for comparison."""
    sp0 = _sp_for_omega_sw(base, omega_sw)

    def objective(eta):
        return float(n_add(0.0, sp0.with_eta(eta)))

    eta_num, nadd_num = golden_section(
        objective, 1e-3 * base.kappa, 10.0 * base.kappa, rel_tol=rel_tol)
    return EtaOptimum(
        omega_sw=omega_sw, eta_numeric=eta_num, n_add_numeric=nadd_num,
        eta_closed=eta_opt(sp0), n_add_min_closed=n_add_min0(sp0))


def nadd_min_curves(omega_sw_axis: SweepAxis, kappa_list,
                    base: PhysicalParams) -> SweepResult:
    """n_add_min(0) closed form per (kappa, omega_sw); decreasing in omega_sw."""
    d = derive_params(base)
    sw_vals = omega_sw_axis.values(d.omega_R if omega_sw_axis.unit == "omega_R" else 1.0)
    kappas = np.asarray(kappa_list, dtype=float)
    grid = np.empty((len(kappas), len(sw_vals)))
    for i, kap in enumerate(kappas):
        for j, osw in enumerate(sw_vals):
            sp = _sp_for_omega_sw(base, osw)
            grid[i, j] = n_add_min0(SpectralParams(
                kappa=kap, gamma=base.gamma, omega_m=sp.omega_m, G=sp.G,
                alpha_max=sp.alpha_max, n_th_b=sp.n_th_b))
    kap_axis = ListAxis(name="kappa", unit="rad/s", points=tuple(kappas))
    return SweepResult(
        axes=(kap_axis, omega_sw_axis), values=grid, observable="n_add_min_0",
        params_hash=_sp_for_omega_sw(base, float(sw_vals[0])).params_hash(),
        extras={"kappa_values": kappas, "omega_sw_values": sw_vals})


def nadd_frequency_curves(omega_sw_list, base: PhysicalParams,
                          n_points: int = 4001):
    """n_add(omega) at the closed-form optimum pump for each omega_sw.

    Returns (list of SpectrumSeries, list of minima reports)."""
    d = derive_params(base)
    curves = []
    minima = []
    for osw_R in omega_sw_list:
        osw = osw_R * d.omega_R
        sp0 = _sp_for_omega_sw(base, osw)
        sp = sp0.with_eta(eta_opt(sp0))
        grid = default_omega_grid(sp.omega_m, sp.kappa, sp.gamma, n_points)
        vals = n_add(grid, sp)
        curves.append(SpectrumSeries(
            omega=grid, values=vals, label="n_add",
            meta={"omega_sw_over_omega_R": osw_R, "eta_max": eta_opt(sp0),
                  "omega_m": sp.omega_m, "params_hash": sp.params_hash()}))
        interior = (np.r_[True, vals[1:] < vals[:-1]] &
                    np.r_[vals[:-1] < vals[1:], True])
        locs = grid[interior]
        minima.append({
            "omega_sw_over_omega_R": osw_R,
            "global_min_omega": float(grid[np.argmin(vals)]),
            "global_min_value": float(np.min(vals)),
            "local_min_omegas": locs.tolist(),
        })
    return curves, minima
