"""Render the four summary figures from spinmaser CSV files.

This package talks to the simulator only through its CSV artifacts; it
never imports the simulation code. Each figure is a pure file-to-file
batch render: read one or two CSVs, draw, write a PNG atomically.
Given identical inputs the output bytes are identical (fixed size, dpi,
and metadata; the default Agg backend embeds no timestamps).

Figure 1: fuel temperature T_q/T_b against S, one series per
initialization scheme at a fixed anisotropy.
Figure 2: steady coarse-grained T_f/T_b against S, one series per
anisotropy, each with its polynomial fit overlaid as a solid curve.
Figure 3: cavity temperature traces T_f/T_b against dimensionless time,
one series per injection count N_ex.
Figure 4: steady T_f/T_b against N = 2S at fixed anisotropy, one series
per sweep column (the lossless "cg" reference plus each (Q, gamma)
column).
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

PNG_METADATA = {"Software": "spinmaser-figures"}
DPI = 150


class FigureError(Exception):
    """Base class for rendering failures."""


class MissingColumnError(FigureError):
    def __init__(self, path: str, column: str):
        self.column = column
        super().__init__(f"{path}: required column {column!r} is missing")


class NoDataError(FigureError):
    def __init__(self, path: str, detail: str = "no data rows"):
        super().__init__(f"{path}: {detail}")


@dataclasses.dataclass(frozen=True)
class FigureSpec:
    """One render job: which figure, from which CSVs, to which image."""

    figure_id: int
    inputs: tuple
    out: str
    xlabel: str
    ylabel: str
    lam: float = None

    def __post_init__(self):
        if self.figure_id not in (1, 2, 3, 4):
            raise ValueError(f"figure id must be 1..4, got {self.figure_id}")
        if not self.inputs or not self.out:
            raise ValueError("inputs and out are required")


def load_rows(path: str):
    """Parse one artifact: skip # metadata, return list-of-dict rows."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [l for l in fh.read().splitlines() if not l.startswith("#")]
    except OSError as exc:
        raise NoDataError(path, f"cannot read: {exc}") from None
    rows = list(csv.DictReader(lines))
    if not rows:
        raise NoDataError(path)
    return rows


def column(path: str, rows, name: str):
    """Numeric values of one column; empty cells become NaN."""
    if name not in rows[0]:
        raise MissingColumnError(path, name)
    values = []
    for row in rows:
        cell = row[name]
        try:
            values.append(float(cell) if cell not in ("", None) else math.nan)
        except ValueError:
            raise NoDataError(path, f"column {name!r} is not numeric: {cell!r}")
    return np.asarray(values)


def _same(values, target):
    return np.abs(values - target) < 1e-9


def _save(fig, out: str) -> None:
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fig-", suffix=".png")
    os.close(fd)
    try:
        fig.savefig(tmp, format="png", dpi=DPI, metadata=PNG_METADATA)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def _axes(spec):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    return fig, ax


def render_fig1(spec: FigureSpec) -> int:
    path = spec.inputs[0]
    rows = load_rows(path)
    if "scheme" not in rows[0]:
        raise MissingColumnError(path, "scheme")
    s = column(path, rows, "s")
    lam = column(path, rows, "lambda")
    tq = column(path, rows, "tq_over_tb")
    schemes = [r["scheme"] for r in rows]
    target = 0.75 if spec.lam is None else spec.lam
    fig, ax = _axes(spec)
    series = 0
    for scheme, marker in (("collective", "o"), ("star", "s")):
        keep = [i for i in range(len(rows))
                if schemes[i] == scheme and _same(lam[i], target)
                and not math.isnan(tq[i])]
        if not keep:
            continue
        order = sorted(keep, key=lambda i: s[i])
        ax.plot([s[i] for i in order], [tq[i] for i in order],
                marker=marker, label=scheme)
        series += 1
    if series == 0:
        plt.close(fig)
        raise NoDataError(path, f"no rows at lambda={target:g}")
    ax.legend()
    _save(fig, spec.out)
    return series


def render_fig2(spec: FigureSpec) -> int:
    data_path, fits_path = spec.inputs[0], spec.inputs[1]
    rows = load_rows(data_path)
    s = column(data_path, rows, "s")
    lam = column(data_path, rows, "lambda")
    cg = column(data_path, rows, "cg")
    fit_rows = load_rows(fits_path)
    for name in ("column", "lambda", "a", "b", "c", "d", "e"):
        if name not in fit_rows[0]:
            raise MissingColumnError(fits_path, name)
    fig, ax = _axes(spec)
    series = 0
    grid = np.linspace(np.nanmin(s), np.nanmax(s), 200)
    for value in sorted(set(np.round(lam, 9))):
        keep = ~np.isnan(cg) & _same(lam, value)
        if not keep.any():
            continue
        order = np.argsort(s[keep])
        pts = ax.plot(s[keep][order], cg[keep][order], "o",
                      label=f"lambda={value:g}")
        for fr in fit_rows:
            if fr["column"] == "cg" and abs(float(fr["lambda"]) - value) < 1e-9:
                coeffs = [float(fr[k] or 0.0) for k in ("a", "b", "c", "d", "e")]
                ax.plot(grid, np.polynomial.polynomial.polyval(grid, coeffs),
                        "-", color=pts[0].get_color())
                break
        series += 1
    if series == 0:
        plt.close(fig)
        raise NoDataError(data_path, "no plottable cg values")
    ax.legend(fontsize=8)
    _save(fig, spec.out)
    return series


def render_fig3(spec: FigureSpec) -> int:
    path = spec.inputs[0]
    rows = [r for r in load_rows(path) if r.get("row") == "trace"]
    if not rows:
        raise NoDataError(path, "no trace rows")
    t = column(path, rows, "time")
    tf = column(path, rows, "tf_over_tb")
    nex = column(path, rows, "nex")
    fig, ax = _axes(spec)
    series = 0
    for value in sorted(set(nex)):
        keep = _same(nex, value) & ~np.isnan(tf)
        if not keep.any():
            continue
        order = np.argsort(t[keep])
        ax.plot(t[keep][order], tf[keep][order], label=f"N_ex={value:g}")
        series += 1
    if series == 0:
        plt.close(fig)
        raise NoDataError(path, "no plottable trace samples")
    ax.legend(fontsize=8)
    _save(fig, spec.out)
    return series


def render_fig4(spec: FigureSpec) -> int:
    path = spec.inputs[0]
    rows = load_rows(path)
    s = column(path, rows, "s")
    lam = column(path, rows, "lambda")
    target = 1.0 if spec.lam is None else spec.lam
    keep_lam = _same(lam, target)
    if not keep_lam.any():
        raise NoDataError(path, f"no rows at lambda={target:g}")
    labels = ["cg"] + [name for name in rows[0]
                       if name.startswith("q") and "_g" in name]
    if "cg" not in rows[0]:
        raise MissingColumnError(path, "cg")
    fig, ax = _axes(spec)
    series = 0
    for name in labels:
        values = column(path, rows, name)
        keep = keep_lam & ~np.isnan(values)
        if not keep.any():
            continue
        order = np.argsort(s[keep])
        ax.plot(2 * s[keep][order], values[keep][order], marker="o",
                label=name)
        series += 1
    if series == 0:
        plt.close(fig)
        raise NoDataError(path, "no plottable columns")
    ax.legend(fontsize=8)
    _save(fig, spec.out)
    return series


_RENDERERS = {1: render_fig1, 2: render_fig2, 3: render_fig3, 4: render_fig4}


def render(spec: FigureSpec) -> int:
    """Render one figure; returns the number of data series drawn."""
    return _RENDERERS[spec.figure_id](spec)
