"""Entry points: one script per figure plus a make-all driver.

Each script reads the named CSV artifact(s) and writes one PNG; the
make-all driver expects the conventional artifact names inside
--data-dir (fuel_temp.csv, sweep.csv, sweep.fits.csv, micromaser.csv)
and writes fig1.png..fig4.png into --out-dir. Exit codes: 0 success,
1 data error (missing column / no usable rows), 2 bad arguments.
"""

from __future__ import annotations

import argparse
import os
import sys

from .figures import FigureError, FigureSpec, render


def _run(spec: FigureSpec) -> int:
    try:
        series = render(spec)
    except FigureError as exc:
        print(f"spinmaser-figures: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.out} ({series} series)")
    return 0


def _parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", required=True, metavar="PATH", help="output PNG")
    return p


def main_fig1(argv=None) -> int:
    p = _parser("Fuel temperature against S for both initialization schemes.")
    p.add_argument("--fuel-temp", required=True, metavar="CSV")
    p.add_argument("--lam", type=float, default=0.75,
                   help="anisotropy slice to plot (default 0.75)")
    a = p.parse_args(argv)
    return _run(FigureSpec(1, (a.fuel_temp,), a.out, "S", "T_q / T_b", a.lam))


def main_fig2(argv=None) -> int:
    p = _parser("Steady field temperature against S per anisotropy, with fits.")
    p.add_argument("--sweep", required=True, metavar="CSV")
    p.add_argument("--fits", required=True, metavar="CSV")
    a = p.parse_args(argv)
    return _run(FigureSpec(2, (a.sweep, a.fits), a.out, "S", "T_f / T_b"))


def main_fig3(argv=None) -> int:
    p = _parser("Cavity temperature traces, one per injection count.")
    p.add_argument("--micromaser", required=True, metavar="CSV")
    a = p.parse_args(argv)
    return _run(FigureSpec(3, (a.micromaser,), a.out,
                           "time (units of 1/Omega)", "T_f / T_b"))


def main_fig4(argv=None) -> int:
    p = _parser("Steady field temperature against N per sweep column.")
    p.add_argument("--sweep", required=True, metavar="CSV")
    p.add_argument("--lam", type=float, default=1.0,
                   help="anisotropy slice to plot (default 1.0)")
    a = p.parse_args(argv)
    return _run(FigureSpec(4, (a.sweep,), a.out, "N = 2S", "T_f / T_b", a.lam))


def main_all(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Render all four figures from a directory of artifacts.")
    p.add_argument("--data-dir", required=True, metavar="DIR")
    p.add_argument("--out-dir", required=True, metavar="DIR")
    p.add_argument("--lam1", type=float, default=0.75,
                   help="anisotropy slice for figure 1")
    p.add_argument("--lam4", type=float, default=1.0,
                   help="anisotropy slice for figure 4")
    a = p.parse_args(argv)
    data, out = a.data_dir, a.out_dir
    os.makedirs(out, exist_ok=True)
    jobs = (
        FigureSpec(1, (os.path.join(data, "fuel_temp.csv"),),
                   os.path.join(out, "fig1.png"), "S", "T_q / T_b", a.lam1),
        FigureSpec(2, (os.path.join(data, "sweep.csv"),
                       os.path.join(data, "sweep.fits.csv")),
                   os.path.join(out, "fig2.png"), "S", "T_f / T_b"),
        FigureSpec(3, (os.path.join(data, "micromaser.csv"),),
                   os.path.join(out, "fig3.png"),
                   "time (units of 1/Omega)", "T_f / T_b"),
        FigureSpec(4, (os.path.join(data, "sweep.csv"),),
                   os.path.join(out, "fig4.png"), "N = 2S", "T_f / T_b",
                   a.lam4),
    )
    status = 0
    for spec in jobs:
        status = max(status, _run(spec))
    return status


if __name__ == "__main__":
    sys.exit(main_all())
