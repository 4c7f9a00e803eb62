#!/usr/bin/env python3
"""Back-action evasion demonstration at desk scale.

Runs the stochastic verification twice -- modulated (evading) and constant
(non-evading) drive -- at kappa/omega_m = 10, gamma/omega_m = 1e-3 with the
coupling tuned to n_BA(0) = 5, then prints the measured quadrature spectra
against the closed forms.  Takes a few minutes on two cores; scale n-traj
and t-record down for a quick look.
"""
import argparse
import sys
import time

import numpy as np

from becqnd.langevin import (NoiseConfig, SimConfig, estimate_spectrum,
                             simulate, verification_report, welch_expectation,
                             s_q_constant_drive)
from becqnd.spectra import SpectralParams, n_ba0, n_bad, s_q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-traj", type=int, default=64)
    ap.add_argument("--t-record", type=float, default=1.28e5)
    ap.add_argument("--seed", type=int, default=20260811)
    ap.add_argument("--n-ba", type=float, default=5.0)
    args = ap.parse_args()

    kappa, gamma, omega_m = 10.0, 1e-3, 1.0
    sp = SpectralParams(kappa=kappa, gamma=gamma, omega_m=omega_m, G=1.0,
                        alpha_max=float(np.sqrt(args.n_ba * kappa * gamma / 2)))
    print(f"desk model: kappa/omega_m = {kappa:g}, gamma/omega_m = {gamma:g}, "
          f"G alpha = {sp.g_alpha:.4f}")
    print(f"analytic: n_BA(0) = {n_ba0(sp):.3f}, n_bad(0) = {float(n_bad(0, sp)):.3f}, "
          f"S_Q(0) = {float(s_q(0, sp)):.0f}, "
          f"S_Q_const(0) = {float(s_q_constant_drive(0, sp)):.0f}")

    results = {}
    for mode in ("modulated", "constant"):
        sim = SimConfig(n_traj=args.n_traj, t_settle=10 / gamma,
                        t_record=args.t_record, dt=0.02 / kappa, drive_mode=mode)
        t0 = time.time()
        ens = simulate(sp, NoiseConfig(seed=args.seed), sim)
        series = estimate_spectrum(ens, "Q")
        pk = series.omega <= 0.5 * gamma
        model = (lambda w: s_q_constant_drive(w, sp)) if mode == "constant" \
            else (lambda w: s_q(w, sp))
        expect = welch_expectation(model, series.meta["d_sample"],
                                   series.meta["nperseg"], series.omega[pk]).mean()
        est = series.values[pk].mean()
        results[mode] = est
        print(f"{mode:>10}: S_Q peak {est:10.1f}  (expectation {expect:10.1f}, "
              f"dev {est / expect - 1:+.2%})  Var(Q) = {ens.q.var():.3f}  "
              f"Var(P) = {ens.p.var():.3f}   [{time.time() - t0:.0f}s]")
        if mode == "modulated":
            rep = verification_report(ens)
            print(f"{'':>10}  band chi2/bin: S_Q {rep['S_Q']['band_chi2_per_bin']:.2f}, "
                  f"S_P {rep['S_P']['band_chi2_per_bin']:.2f}")

    contrast = results["constant"] / results["modulated"]
    ceiling = float(s_q_constant_drive(0, sp) / s_q(0, sp))
    print(f"\nevasion contrast (constant/modulated S_Q peak): {contrast:.2f}x "
          f"(model {ceiling:.2f}x)")
    print("the modulated drive routes the measurement back-action into P, "
          "leaving Q near its bare-linewidth spectrum")
    return 0


if __name__ == "__main__":
    sys.exit(main())
