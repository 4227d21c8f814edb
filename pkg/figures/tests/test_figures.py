import subprocess
import sys

import pytest

from spinmaser_figures import cli
from spinmaser_figures.figures import (
    FigureSpec,
    MissingColumnError,
    NoDataError,
    render,
)

# artifacts are produced through the simulator's public CLI only;
# reduced grids keep the fixture under ~30 s
FUEL_ARGS = ["fuel-temp", "--s-grid", "0.5,1,1.5,2,2.5,3",
             "--lambda-grid", "0.75"]
SWEEP_ARGS = ["sweep-fit", "--s-grid", "0.5,1,1.5,2,2.5,3",
              "--lambda-grid", "0,0.25,0.5,0.75,0.9,1",
              "--q", "2e10,2e9", "--nex", "100", "--n-max", "12"]
MASER_ARGS = ["micromaser", "--nex", "30,40,50,60,70", "--s", "1", "--lam", "1",
              "--n-max", "12"]


def run_simulator(args, out):
    cmd = [sys.executable, "-m", "spinmaser.cli"] + args + ["--out", str(out)]
    subprocess.run(cmd, check=True, capture_output=True)


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    data = tmp_path_factory.mktemp("artifacts")
    run_simulator(FUEL_ARGS, data / "fuel_temp.csv")
    run_simulator(SWEEP_ARGS, data / "sweep.csv")
    run_simulator(MASER_ARGS, data / "micromaser.csv")
    return data


def test_fig1_one_series_per_scheme(artifacts, tmp_path):
    out = tmp_path / "fig1.png"
    spec = FigureSpec(1, (str(artifacts / "fuel_temp.csv"),), str(out),
                      "S", "T_q / T_b", 0.75)
    assert render(spec) == 2
    assert out.stat().st_size > 1000


def test_fig2_six_lambda_series_with_fit_overlays(artifacts, tmp_path):
    out = tmp_path / "fig2.png"
    spec = FigureSpec(2, (str(artifacts / "sweep.csv"),
                          str(artifacts / "sweep.fits.csv")), str(out),
                      "S", "T_f / T_b")
    assert render(spec) == 6
    assert out.stat().st_size > 1000


def test_fig3_five_trace_series(artifacts, tmp_path):
    out = tmp_path / "fig3.png"
    spec = FigureSpec(3, (str(artifacts / "micromaser.csv"),), str(out),
                      "time", "T_f / T_b")
    assert render(spec) == 5
    assert out.stat().st_size > 1000


def test_fig4_one_series_per_sweep_column(artifacts, tmp_path):
    out = tmp_path / "fig4.png"
    spec = FigureSpec(4, (str(artifacts / "sweep.csv"),), str(out),
                      "N = 2S", "T_f / T_b", 1.0)
    # the cg reference plus the two (Q, gamma) columns
    assert render(spec) == 3
    assert out.stat().st_size > 1000


def test_rerender_is_deterministic_and_overwrites(artifacts, tmp_path):
    out = tmp_path / "fig3.png"
    out.write_bytes(b"stale bytes")
    spec = FigureSpec(3, (str(artifacts / "micromaser.csv"),), str(out),
                      "time", "T_f / T_b")
    render(spec)
    first = out.read_bytes()
    assert first[:8] == b"\x89PNG\r\n\x1a\n"
    render(spec)
    assert out.read_bytes() == first


def test_missing_column_is_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("s,lambda\n1,1\n", encoding="utf-8")
    out = tmp_path / "never.png"
    spec = FigureSpec(4, (str(bad),), str(out), "N", "T")
    with pytest.raises(MissingColumnError) as err:
        render(spec)
    assert "cg" in str(err.value)
    assert not out.exists()


def test_empty_csv_is_a_clean_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("# schema: spinmaser/micromaser v1\n"
                     "row,nex,cycle,time,nbar_c,tf_over_tb\n", encoding="utf-8")
    out = tmp_path / "never.png"
    with pytest.raises(NoDataError):
        render(FigureSpec(3, (str(empty),), str(out), "t", "T"))
    assert not out.exists()


def test_lambda_slice_without_rows_errors(artifacts, tmp_path):
    out = tmp_path / "never.png"
    spec = FigureSpec(1, (str(artifacts / "fuel_temp.csv"),), str(out),
                      "S", "T_q / T_b", 0.33)
    with pytest.raises(NoDataError):
        render(spec)
    assert not out.exists()


def test_make_all_entry_point(artifacts, tmp_path):
    out_dir = tmp_path / "images"
    assert cli.main_all(["--data-dir", str(artifacts),
                         "--out-dir", str(out_dir)]) == 0
    for name in ("fig1.png", "fig2.png", "fig3.png", "fig4.png"):
        assert (out_dir / name).stat().st_size > 1000


def test_single_figure_entry_point(artifacts, tmp_path):
    out = tmp_path / "one.png"
    assert cli.main_fig3(["--micromaser", str(artifacts / "micromaser.csv"),
                          "--out", str(out)]) == 0
    assert out.exists()
    missing = tmp_path / "missing.csv"
    assert cli.main_fig3(["--micromaser", str(missing),
                          "--out", str(tmp_path / "no.png")]) == 1
