"""Command-line entry point.

Subcommands: derive, drive, spectra, noise-budget, simulate, sweep, optimize,
figure.  Flags mirror config keys 1:1 (dashes for underscores) and override
the config file.  Exit codes: 0 success, 1 numerical failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .drive import alpha_from_eta, design_drive, integrate_meanfield
from .errors import (ConfigError, DivergenceError, InsufficientData,
                     NoMinimumInBracket, StiffnessError, ZeroGain)
from .langevin import (NoiseConfig, SimConfig, estimate_spectrum, simulate,
                       verification_report)
from .manifest import RunManifest
from .params import PhysicalParams, derive_params, validate_lattice_depth
from .spectra import (SpectralParams, default_omega_grid, n_add, n_ba,
                      n_bad, noise_budget, s_p, s_q, s_yout)
from .sweep import (SweepAxis, nadd_frequency_curves, nadd_min_curves,
                    optimize_eta, sweep_nadd0)
from .units import load_config, parse_quantity

log = logging.getLogger("becqnd")

# unit-suffixed keys making up PhysicalParams (plus the eta_max alternative)
_PARAM_KEYS = ("N", "m_a", "omega_a", "omega_c", "omega_p", "g0", "L",
               "kappa", "gamma", "omega_sw", "a_s", "w", "alpha_max",
               "eta_max", "n_th_b", "Delta_c")
_REQUIRED = ("N", "m_a", "omega_a", "omega_c", "g0", "L", "kappa", "gamma")


def _build_params(cfg: dict):
    """Resolve unit-suffixed raw config into PhysicalParams (+ eta_max).

    Two passes: absolute quantities first, then omega_R / kappa relative
    suffixes once those scales exist."""
    for key in _REQUIRED:
        if key not in cfg:
            raise ConfigError(f"missing required key: {key}")
    quantities = {key: parse_quantity(cfg[key], key=key)
                  for key in _PARAM_KEYS if key in cfg}
    if quantities["kappa"].is_relative:
        raise ConfigError("kappa: cannot be given in relative units")
    kappa = quantities["kappa"].resolve()

    # recoil frequency needs m_a and the pump wavenumber, both absolute
    for key in ("m_a", "omega_c", "omega_a"):
        if quantities[key].is_relative:
            raise ConfigError(f"{key}: cannot be given in relative units")
    m_a = quantities["m_a"].resolve()
    omega_c = quantities["omega_c"].resolve()
    omega_p = quantities["omega_p"].resolve() if "omega_p" in quantities else omega_c
    from .constants import CODATA
    omega_R = CODATA.hbar * (omega_p / CODATA.c_light) ** 2 / (2.0 * m_a)

    def res(key, default=None):
        if key not in quantities:
            return default
        return quantities[key].resolve(omega_R=omega_R, kappa=kappa)

    kwargs = dict(
        N=res("N"), m_a=m_a, omega_a=res("omega_a"), omega_c=omega_c,
        omega_p=omega_p, g0=res("g0"), L=res("L"), kappa=kappa,
        gamma=res("gamma"), omega_sw=res("omega_sw"), a_s=res("a_s"),
        w=res("w"), n_th_b=res("n_th_b", 0.0), Delta_c=res("Delta_c", 0.0))
    eta_max = res("eta_max")
    alpha_max = res("alpha_max")
    if eta_max is not None:
        if alpha_max is not None:
            raise ConfigError("give alpha_max or eta_max, not both")
        d_tmp = derive_params(PhysicalParams(alpha_max=0.0, **kwargs))
        alpha_max = alpha_from_eta(eta_max, kappa, d_tmp.omega_m)
    try:
        p = PhysicalParams(alpha_max=alpha_max or 0.0, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return p, eta_max


def _merge_cli_overrides(cfg: dict, args, keys) -> dict:
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    # the amplitude pair is either/or: a CLI choice supersedes the config's
    if getattr(args, "alpha_max", None) is not None and getattr(args, "eta_max", None) is None:
        out.pop("eta_max", None)
    if getattr(args, "eta_max", None) is not None and getattr(args, "alpha_max", None) is None:
        out.pop("alpha_max", None)
    return out


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _freq_axis(omega, normalize, sp):
    if normalize == "rad":
        return omega, "omega_rad_per_s"
    if normalize == "kappa":
        return omega / sp.kappa, "omega_over_kappa"
    return omega / sp.omega_m, "omega_over_omega_m"


def _add_param_flags(sub):
    for key in _PARAM_KEYS:
        sub.add_argument(f"--{key.replace('_', '-').lower()}", dest=key,
                         default=None, metavar="VAL")


def _summary(p, d, sp=None):
    lines = [
        f"omega_R  = {d.omega_R:.6e} rad/s",
        f"omega_m  = {d.omega_m:.6e} rad/s  (omega_m/omega_R = {d.omega_m / d.omega_R:.4f})",
        f"G        = {d.G:.6e} rad/s  (chi = {d.chi:.6f})",
    ]
    if sp is not None and sp.alpha_max > 0:
        from .spectra import eta_opt as _eo, n_add_min0 as _nm
        import warnings as _w
        from .errors import RegimeWarning
        with _w.catch_warnings():
            _w.simplefilter("ignore", RegimeWarning)
            lines.append(f"eta_opt  = {_eo(sp):.6e} rad/s  ({_eo(sp) / p.kappa:.4f} kappa)")
        lines.append(f"n_add_min(0) = {_nm(sp):.6f}")
    return "\n".join(lines)


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="becqnd",
        description="Back-action evading measurement toolkit for a cavity-trapped "
                    "condensate: derived parameters, two-tone drive design, noise "
                    "spectra, stochastic verification, sweeps and figure data.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp_):
        sp_.add_argument("--config", type=Path, default=None)
        sp_.add_argument("--out", type=Path, default=Path("out"))
        sp_.add_argument("--seed", type=int, default=None)
        sp_.add_argument("-v", "--verbose", action="store_true")
        _add_param_flags(sp_)

    p_derive = sub.add_parser("derive", help="derived parameters as JSON")
    common(p_derive)

    p_drive = sub.add_parser("drive", help="two-tone drive spec + mean-field check")
    common(p_drive)
    p_drive.add_argument("--t-span", type=float, default=None)
    p_drive.add_argument("--dt", type=float, default=None)
    p_drive.add_argument("--skip-meanfield", action="store_true")

    p_spec = sub.add_parser("spectra", help="closed-form spectra as CSV")
    common(p_spec)
    p_spec.add_argument("--which", default="SQ,SP,SYout,nadd,nbad,nBA")
    p_spec.add_argument("--normalize", choices=("rad", "omega_m", "kappa"),
                        default="omega_m")
    p_spec.add_argument("--n-points", type=int, default=4001)

    p_budget = sub.add_parser("noise-budget", help="on-resonance noise scalars as JSON")
    common(p_budget)

    p_sim = sub.add_parser("simulate", help="stochastic verification run")
    common(p_sim)
    p_sim.add_argument("--n-traj", type=int, default=64)
    p_sim.add_argument("--dt", type=float, default=None)
    p_sim.add_argument("--t-settle", type=float, default=None)
    p_sim.add_argument("--t-record", type=float, default=None)
    p_sim.add_argument("--drive-mode", choices=("modulated", "constant"),
                       default="modulated")
    p_sim.add_argument("--record-interval", type=float, default=None)
    p_sim.add_argument("--record-output", action="store_true")
    p_sim.add_argument("--save-trajectories", choices=("none", "npz", "csv"),
                       default="none")

    p_sweep = sub.add_parser("sweep", help="observable over a 2-D grid")
    common(p_sweep)
    p_sweep.add_argument("--axis", action="append", required=True,
                         metavar="NAME:START:STOP:COUNT:UNIT",
                         help="repeat twice, e.g. omega_sw:0:15:151:omega_R")
    p_sweep.add_argument("--observable", default="nadd0", choices=("nadd0",))

    p_opt = sub.add_parser("optimize", help="pump amplitude minimizing n_add(0)")
    common(p_opt)
    p_opt.add_argument("--omega-sw-opt", dest="omega_sw_opt", default=None,
                       metavar="VAL", help="overrides omega_sw for the search")

    p_fig = sub.add_parser("figure", help="figure datasets as CSV + manifest")
    common(p_fig)
    p_fig.add_argument("name", choices=("fig2", "fig3", "fig4", "fig5"))
    p_fig.add_argument("--plot-script", action="store_true",
                       help="also emit a ready-to-run gnuplot script")

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")

    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceError, NoMinimumInBracket, StiffnessError,
            InsufficientData, ZeroGain) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1


def _load_inputs(args):
    cfg = load_config(args.config) if args.config else {}
    cfg = _merge_cli_overrides(cfg, args, _PARAM_KEYS)
    p, eta_max = _build_params(cfg)
    d = derive_params(p)
    seed = args.seed
    if seed is None:
        seed = int(cfg.get("seed", 0))
    return cfg, p, d, seed


def _dispatch(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg, p, d, seed = _load_inputs(args)
    sp = SpectralParams.from_params(p, d)
    manifest = RunManifest(tool_version=__version__, subcommand=args.command,
                           config={k: str(v) for k, v in cfg.items()},
                           derived_params=d.to_dict(), seed=seed)
    cmd = args.command

    if cmd == "derive":
        path = out_dir / "derived_params.json"
        _write_json(path, d.to_dict())
        manifest.add_output(path)
        check = validate_lattice_depth(d.U0, p.alpha_max**2 / 2.0, d.omega_R)
        print(_summary(p, d, sp))
        print(f"lattice depth check: {'pass' if check.ok else 'FAIL'} "
              f"(ratio {check.ratio:.3g})")

    elif cmd == "drive":
        drv = design_drive(p.alpha_max, p.kappa, d.omega_m)
        path = out_dir / "drive_spec.json"
        _write_json(path, drv.to_dict())
        manifest.add_output(path)
        print(_summary(p, d, sp))
        print(f"eta_max  = {drv.eta_max:.6e} rad/s, phi = {drv.phi:.6e} rad")
        if not args.skip_meanfield and p.alpha_max > 0:
            mf = integrate_meanfield(p, d, drv, t_span=args.t_span, dt=args.dt)
            rows = zip(mf.t, mf.alpha.real, mf.alpha.imag, mf.beta.real, mf.beta.imag)
            path = out_dir / "meanfield_trajectory.csv"
            _write_csv(path, ["t_s", "re_alpha", "im_alpha", "re_beta", "im_beta"], rows)
            manifest.add_output(path)
            print(f"mean-field amplitude: {mf.alpha_amplitude:.6f} "
                  f"(target {p.alpha_max}), phase {mf.alpha_phase:+.4e} rad")

    elif cmd == "spectra":
        if sp.alpha_max <= 0:
            raise ConfigError("alpha_max (or eta_max) must be positive for spectra")
        grid = default_omega_grid(sp.omega_m, sp.kappa, sp.gamma, args.n_points)
        axis, axis_name = _freq_axis(grid, args.normalize, sp)
        table = {"SQ": s_q, "SP": s_p, "SYout": s_yout, "nadd": n_add,
                 "nbad": n_bad, "nBA": n_ba}
        for name in args.which.split(","):
            name = name.strip()
            if name not in table:
                raise ConfigError(f"unknown spectrum {name!r}; choose from {sorted(table)}")
            vals = table[name](grid, sp)
            path = out_dir / f"spectrum_{name}.csv"
            _write_csv(path, [axis_name, f"{name}_quanta"], zip(axis, vals))
            manifest.add_output(path)
        print(_summary(p, d, sp))

    elif cmd == "noise-budget":
        if sp.alpha_max <= 0:
            raise ConfigError("alpha_max (or eta_max) must be positive for noise-budget")
        nb = noise_budget(sp)
        path = out_dir / "noise_budget.json"
        _write_json(path, nb.to_dict())
        manifest.add_output(path)
        print(_summary(p, d, sp))
        print(f"n_add(0) exact = {nb.n_add_0_exact:.6f}, approx = {nb.n_add_0_approx:.6f}")
        print(f"sql_beaten = {str(nb.sql_beaten).lower()}")

    elif cmd == "simulate":
        sim = SimConfig(t_settle=args.t_settle, t_record=args.t_record,
                        n_traj=args.n_traj, dt=args.dt, drive_mode=args.drive_mode,
                        record_interval=args.record_interval,
                        record_output=args.record_output)
        ens = simulate(sp, NoiseConfig(n_th_b=p.n_th_b, seed=seed), sim)
        for which in ("Q", "P"):
            series = estimate_spectrum(ens, which)
            path = out_dir / f"spectrum_sim_{which}.csv"
            _write_csv(path, ["omega_rad_per_s", f"S_{which}_quanta", "stderr"],
                       zip(series.omega, series.values, series.errors))
            manifest.add_output(path)
        if args.record_output:
            series = estimate_spectrum(ens, "Y_out")
            path = out_dir / "spectrum_sim_Yout.csv"
            _write_csv(path, ["omega_rad_per_s", "S_Yout_quanta", "stderr"],
                       zip(series.omega, series.values, series.errors))
            manifest.add_output(path)
        report = verification_report(ens)
        path = out_dir / "verification_report.json"
        _write_json(path, report)
        manifest.add_output(path)
        if args.save_trajectories == "npz":
            path = out_dir / "trajectories.npz"
            np.savez_compressed(path, t=ens.t, x=ens.x, y=ens.y, q=ens.q, p=ens.p)
            manifest.add_output(path)
        elif args.save_trajectories == "csv":
            path = out_dir / "trajectories.csv"
            header = ["t_s"] + [f"{v}{i}" for i in range(ens.n_traj) for v in ("q", "p")]
            cols = [ens.t] + [ens.q[i] if v == "q" else ens.p[i]
                              for i in range(ens.n_traj) for v in ("q", "p")]
            _write_csv(path, header, zip(*cols))
            manifest.add_output(path)
        print(f"S_Q peak dev vs expectation: {report['S_Q']['peak_rel_dev']:+.2%}")

    elif cmd == "sweep":
        if len(args.axis) != 2:
            raise ConfigError("sweep needs exactly two --axis specs")
        axes = []
        for spec_str in args.axis:
            parts = spec_str.split(":")
            if len(parts) != 5:
                raise ConfigError(f"--axis must be NAME:START:STOP:COUNT:UNIT, got {spec_str!r}")
            axes.append(SweepAxis(name=parts[0], unit=parts[4], start=float(parts[1]),
                                  stop=float(parts[2]), count=int(parts[3])))
        res = sweep_nadd0(axes[0], axes[1], p)
        path = out_dir / "sweep_nadd0.csv"
        _write_sweep_csv(path, res)
        manifest.add_output(path)
        print(f"grid {res.values.shape}, min n_add(0) = {res.values.min():.4f}")

    elif cmd == "optimize":
        osw = p.omega_sw
        if args.omega_sw_opt is not None:
            osw = parse_quantity(args.omega_sw_opt, "omega-sw-opt").resolve(
                omega_R=d.omega_R, kappa=p.kappa)
        res = optimize_eta(osw, p)
        path = out_dir / "optimize_eta.json"
        _write_json(path, {
            "omega_sw": res.omega_sw,
            "eta_numeric": res.eta_numeric,
            "eta_numeric_over_kappa": res.eta_numeric / p.kappa,
            "n_add_numeric": res.n_add_numeric,
            "eta_closed": res.eta_closed,
            "eta_closed_over_kappa": res.eta_closed / p.kappa,
            "n_add_min_closed": res.n_add_min_closed})
        manifest.add_output(path)
        print(_summary(p, d, sp))
        print(f"eta_opt closed  = {res.eta_closed / p.kappa:.4f} kappa")
        print(f"eta_opt numeric = {res.eta_numeric / p.kappa:.4f} kappa "
              f"(exact n_add(0) = {res.n_add_numeric:.4f})")

    elif cmd == "figure":
        _figure(args.name, p, d, out_dir, manifest,
                plot_script=getattr(args, "plot_script", False))

    manifest.write(out_dir)
    return 0


def _write_sweep_csv(path, res):
    ax0, ax1 = res.axes
    v0 = res.extras.get(f"{ax0.name}_values") if res.extras else None
    v1 = res.extras.get(f"{ax1.name}_values") if res.extras else None
    if v0 is None:
        v0 = ax0.values()
    if v1 is None:
        v1 = ax1.values()
    rows = []
    for i, a in enumerate(v0):
        for j, b in enumerate(v1):
            rows.append((float(a), float(b), float(res.values[i, j])))
    _write_csv(path, [f"{ax0.name}_rad_per_s", f"{ax1.name}_rad_per_s",
                      res.observable], rows)


_GNUPLOT = {
    "fig2": """set datafile separator ','
set xlabel 'omega_sw / omega_R'
set ylabel 'eta_max / kappa'
set cblabel 'n_add(0)'
set view map
set cbrange [0:1]
splot 'fig2_nadd0_grid.csv' skip 1 using 1:2:3 with points pt 5 ps 0.6 palette notitle
pause -1
""",
    "fig3": """set datafile separator ','
set xlabel 'eta_max / kappa'
set ylabel 'n_add(0)'
set yrange [0:1.2]
plot for [sw in "0 3 6 10"] 'fig3_nadd0_vs_eta.csv' skip 1 \\
     using ($1==real(sw)?$2:1/0):3 with lines title 'omega_sw = '.sw.' omega_R', \\
     0.5 with lines dt 2 lc 'black' title 'SQL'
pause -1
""",
    "fig4": """set datafile separator ','
set xlabel 'omega_sw / omega_R'
set ylabel 'n_add_min(0)'
set logscale y
plot for [i=0:2] 'fig4_nadd_min.csv' skip 1 every :::i::i using 2:3 \\
     with lines title columnheader(1)
pause -1
""",
    "fig5": """set datafile separator ','
set xlabel 'omega / omega_m'
set ylabel 'n_add'
set logscale y
plot 'fig5_nadd_omega_sw0.csv' skip 1 using 1:2 with lines title 'omega_sw = 0', \\
     'fig5_nadd_omega_sw3.csv' skip 1 using 1:2 with lines title '3 omega_R', \\
     'fig5_nadd_omega_sw10.csv' skip 1 using 1:2 with lines title '10 omega_R', \\
     0.5 with lines dt 2 lc 'black' title 'SQL'
pause -1
""",
}


def _figure(name, p, d, out_dir, manifest, plot_script=False):
    from .spectra import SQL
    if name == "fig2":
        ax_sw = SweepAxis(name="omega_sw", unit="omega_R", start=0.0, stop=15.0, count=151)
        ax_eta = SweepAxis(name="eta_max", unit="kappa", start=0.01, stop=2.0, count=151)
        res = sweep_nadd0(ax_sw, ax_eta, p)
        path = out_dir / "fig2_nadd0_grid.csv"
        rows = []
        sw = res.extras["omega_sw_values"]
        et = res.extras["eta_max_values"]
        for i, a in enumerate(sw):
            for j, b in enumerate(et):
                rows.append((a / d.omega_R, b / p.kappa, res.values[i, j],
                             int(res.values[i, j] < SQL)))
        _write_csv(path, ["omega_sw_over_omega_R", "eta_max_over_kappa",
                          "n_add_0", "sql_beaten"], rows)
        manifest.add_output(path)
        meta = {"axes": ["omega_sw_over_omega_R", "eta_max_over_kappa"],
                "grid": list(res.values.shape), "observable": res.observable,
                "params_hash": res.params_hash,
                "note": "axis ranges are package defaults"}
    elif name == "fig3":
        sw_list = (0.0, 3.0, 6.0, 10.0)
        etas = np.linspace(0.05, 2.0, 400) * p.kappa
        rows = []
        from .sweep import _sp_for_omega_sw
        for swR in sw_list:
            sp0 = _sp_for_omega_sw(p, swR * d.omega_R)
            for eta in etas:
                rows.append((swR, eta / p.kappa, float(n_add(0.0, sp0.with_eta(eta)))))
        path = out_dir / "fig3_nadd0_vs_eta.csv"
        _write_csv(path, ["omega_sw_over_omega_R", "eta_max_over_kappa", "n_add_0"], rows)
        manifest.add_output(path)
        meta = {"omega_sw_over_omega_R": list(sw_list), "observable": "n_add_0"}
    elif name == "fig4":
        two_pi = 2.0 * np.pi
        kappas = [two_pi * 13e6, two_pi * 1e6, two_pi * 0.1e6]
        ax_sw = SweepAxis(name="omega_sw", unit="omega_R", start=0.0, stop=20.0, count=201)
        res = nadd_min_curves(ax_sw, kappas, p)
        rows = []
        for i, kap in enumerate(res.extras["kappa_values"]):
            for j, osw in enumerate(res.extras["omega_sw_values"]):
                rows.append((kap, osw / d.omega_R, res.values[i, j]))
        path = out_dir / "fig4_nadd_min.csv"
        _write_csv(path, ["kappa_rad_per_s", "omega_sw_over_omega_R", "n_add_min_0"], rows)
        manifest.add_output(path)
        meta = {"kappas_rad_per_s": kappas, "observable": "n_add_min_0"}
    else:  # fig5
        curves, minima = nadd_frequency_curves([0.0, 3.0, 10.0], p)
        for series in curves:
            swR = series.meta["omega_sw_over_omega_R"]
            path = out_dir / f"fig5_nadd_omega_sw{swR:g}.csv"
            _write_csv(path, ["omega_over_omega_m", "n_add"],
                       zip(series.omega / series.meta["omega_m"], series.values))
            manifest.add_output(path)
        meta = {"minima": minima, "observable": "n_add(omega)"}
    path = out_dir / f"{name}_manifest.json"
    _write_json(path, meta)
    manifest.add_output(path)
    if plot_script:
        path = out_dir / f"{name}.gnuplot"
        path.write_text(_GNUPLOT[name], encoding="utf-8", newline="\n")
        manifest.add_output(path)
    print(f"{name}: wrote {len(manifest.outputs)} files to {out_dir}")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
