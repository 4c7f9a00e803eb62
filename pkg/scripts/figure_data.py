#!/usr/bin/env python3
"""Generate all figure datasets (added-noise landscape, optimum-drive curves,
bad-cavity floor, frequency-resolved added noise) from one config.

Usage:
    python scripts/figure_data.py --config configs/rb87_cavity.cfg --out out/figures
"""
import argparse
import sys
from pathlib import Path

from becqnd.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/rb87_cavity.cfg")
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--only", nargs="*", default=["fig2", "fig3", "fig4", "fig5"],
                    choices=["fig2", "fig3", "fig4", "fig5"])
    args = ap.parse_args()
    out = Path(args.out)
    rc = 0
    for name in args.only:
        rc |= run(["figure", name, "--config", args.config,
                   "--out", str(out / name)])
    return rc


if __name__ == "__main__":
    sys.exit(main())
