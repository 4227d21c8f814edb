"""Command-line driver producing deterministic CSV artifacts.

Four subcommands cover the pipeline end to end:

``fuel-temp``
    Effective fuel temperature T_q/T_b and Carnot bound over a grid of
    network sizes and anisotropies, for the pair-correlated (star) and
    collective initialization schemes.
``coarse``
    Closed-form steady field of the coarse-grained pump model for the
    same fuel grid: mean photon number and T_f/T_b per (lambda, S).
``micromaser``
    Full two-stage cavity simulation: one temperature trace per
    requested injection count N_ex, plus a summary row per trace.
``sweep-fit``
    Steady-state T_f/T_b over the (lambda, S) grid for the lossless
    coarse-grained reference and one column per (Q, gamma) pair, plus a
    companion CSV of polynomial fits in S for every column.

Configuration is resolved in three layers: built-in defaults, then a
flat ``key=value`` config file (``--config``), then command-line flags.
Keys in the file use the flag spelling with dashes replaced by
underscores.  All validation happens before any computation; a failed
run never leaves a partial output file (writes go through a temp file
and an atomic rename).

Exit codes: 0 success, 2 configuration error, 3 physics error
(population inversion, above-threshold pump, infeasible sweep column),
4 at least one trace failed to converge (the CSV is still written).

CSV format: UTF-8, ``#``-prefixed metadata comments carrying the schema
version and the fully resolved configuration (sorted by key), then a
header row naming the columns, then data rows.  Floats are rendered
with 10 significant digits, so identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import os
import sys
import tempfile

from .analysis import DEFAULT_GAIN_THRESHOLD, select_model
from .errors import (
    ConfigError,
    ConvergenceError,
    InsufficientDataError,
    PhysicsError,
)
from .fuel import (
    STAR_MAX_N,
    CentralSpinState,
    CollectiveModelParams,
    StarModelParams,
    carnot_efficiency,
    central_spin_state,
    effective_temperature,
)
from .lindblad import CoarseGrainedParams, coarse_grained_steady_field
from .micromaser import (
    InfeasibleScheduleError,
    MicromaserParams,
    run_cycles,
    steady_sweep,
)

SCHEMA_VERSION = 1

_DEFAULT_S_GRID = tuple(0.5 * k for k in range(1, 11))
_DEFAULT_LAMBDA_GRID = (0.0, 0.25, 0.5, 0.75, 0.9, 1.0)
_DEFAULT_NEX = (500.0, 1500.0, 2500.0, 4500.0, 6500.0)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration shared by all subcommands."""

    omega: float = 6.0
    j: float = 0.8
    tb: float = 1.0
    lam: float = 1.0
    s: float = 5.0
    scheme: str = "both"
    s_grid: tuple = _DEFAULT_S_GRID
    lambda_grid: tuple = _DEFAULT_LAMBDA_GRID
    nex: tuple = _DEFAULT_NEX
    omega_2pi: float = 50e9
    q: tuple = (2e10,)
    gamma_2pi: tuple = (33.3,)
    g_pi: float = 50e3
    tau: float = 9.5e-6
    n_max: int = 30
    fit_threshold: float = DEFAULT_GAIN_THRESHOLD
    out: str = ""
    fits_out: str = ""


_LIST_KEYS = frozenset({"s_grid", "lambda_grid", "nex", "q", "gamma_2pi"})
_FLOAT_KEYS = frozenset(
    {"omega", "j", "tb", "lam", "s", "omega_2pi", "g_pi", "tau", "fit_threshold"}
)
_INT_KEYS = frozenset({"n_max"})
_STR_KEYS = frozenset({"scheme", "out", "fits_out"})
_ALL_KEYS = _LIST_KEYS | _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not (value == value) or value in (float("inf"), float("-inf")):
        raise ConfigError(f"{key}: must be finite, got {text!r}")
    return value


def _coerce(key: str, text: str):
    if key in _LIST_KEYS:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ConfigError(f"{key}: expected a comma-separated list")
        return tuple(_parse_float(key, p) for p in parts)
    if key in _FLOAT_KEYS:
        return _parse_float(key, text)
    if key in _INT_KEYS:
        value = _parse_float(key, text)
        if value != int(value):
            raise ConfigError(f"{key}: expected an integer, got {text!r}")
        return int(value)
    return text.strip()


def _read_config_file(path: str) -> dict:
    """Parse a flat key=value file; blank lines and # comments ignored."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    pairs = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        pairs[key] = value.strip()
    return pairs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmaser",
        description="Spin-network fuelled micromaser engine: CSV generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fuel-temp": "effective fuel temperature over the (scheme, S, lambda) grid",
        "coarse": "coarse-grained steady field over the (lambda, S) grid",
        "micromaser": "two-stage cavity traces, one per N_ex",
        "sweep-fit": "steady T_f/T_b sweep plus polynomial fits in S",
    }
    for name in ("fuel-temp", "coarse", "micromaser", "sweep-fit"):
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", metavar="PATH", help="flat key=value config file")
        sp.add_argument("--out", metavar="PATH", help="output CSV path (required)")
        sp.add_argument("--s-grid", metavar="LIST", help="comma list of spin sizes S")
        sp.add_argument(
            "--lambda-grid", metavar="LIST", help="comma list of anisotropies"
        )
        sp.add_argument(
            "--nex", metavar="LIST", help="comma list of injection counts N_ex"
        )
        sp.add_argument(
            "--q", metavar="LIST", help="cavity quality factors (comma list)"
        )
        sp.add_argument(
            "--gamma-2pi", metavar="LIST", help="atomic decay gamma/2pi in Hz"
        )
        sp.add_argument(
            "--fit-threshold",
            metavar="X",
            help="minimum R^2 gain that justifies a higher fit degree",
        )
        sp.add_argument("--omega", metavar="X", help="level splitting omega")
        sp.add_argument("--j", metavar="X", help="fuel coupling J")
        sp.add_argument("--tb", metavar="X", help="bath temperature T_b")
        sp.add_argument("--lam", metavar="X", help="anisotropy for single-point runs")
        sp.add_argument("--s", metavar="X", help="spin size S for single-point runs")
        sp.add_argument(
            "--scheme",
            choices=("collective", "star", "both"),
            help="initialization scheme(s) for fuel-temp",
        )
        sp.add_argument("--omega-2pi", metavar="HZ", help="cavity frequency/2pi in Hz")
        sp.add_argument("--g-pi", metavar="HZ", help="atom-field coupling g/pi in Hz")
        sp.add_argument("--tau", metavar="S", help="transit time in seconds")
        sp.add_argument("--n-max", metavar="N", help="Fock-space cutoff")
        sp.add_argument(
            "--fits-out",
            metavar="PATH",
            help="fit CSV path for sweep-fit (default: derived from --out)",
        )
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Layer defaults, config file, and flags into a validated RunConfig."""
    values = {}
    if args.config:
        for key, text in _read_config_file(args.config).items():
            values[key] = _coerce(key, text)
    for key in sorted(_ALL_KEYS):
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = _coerce(key, flag_value)
    cfg = RunConfig(**values)
    _validate(cfg, args.command)
    return cfg


def _validate(cfg: RunConfig, command: str) -> None:
    if not cfg.out:
        raise ConfigError("missing output path: pass --out or set out= in the config")
    if cfg.scheme not in ("collective", "star", "both"):
        raise ConfigError(f"scheme: must be collective, star, or both, got {cfg.scheme!r}")
    if cfg.tb <= 0:
        raise ConfigError("tb: bath temperature must be positive")
    if cfg.fit_threshold <= 0:
        raise ConfigError("fit_threshold: must be positive")
    if not cfg.s_grid or not cfg.lambda_grid:
        raise ConfigError("s_grid and lambda_grid must be non-empty")
    # Grid points must form valid fuel models; star-side feasibility of
    # individual sizes is reported per row, not rejected here.
    try:
        for lam in set(cfg.lambda_grid) | {cfg.lam}:
            for s in set(cfg.s_grid) | {cfg.s}:
                CollectiveModelParams(cfg.omega, cfg.j, lam, s)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if command in ("micromaser", "sweep-fit"):
        if not cfg.nex:
            raise ConfigError("nex: must list at least one injection count")
        for n_ex in cfg.nex:
            if n_ex != int(n_ex) or n_ex < 1:
                raise ConfigError(f"nex: entries must be positive integers, got {n_ex}")
        if command == "micromaser" and (len(cfg.q) != 1 or len(cfg.gamma_2pi) != 1):
            raise ConfigError("micromaser uses exactly one q and one gamma_2pi value")
        # Rate validation via the parameter class, with a trivially
        # feasible schedule; per-N_ex feasibility is a runtime concern.
        try:
            for qv in cfg.q:
                for gv in cfg.gamma_2pi:
                    MicromaserParams.from_paper_units(
                        omega_2pi_hz=cfg.omega_2pi,
                        q=qv,
                        gamma_2pi_hz=gv,
                        g_pi_hz=cfg.g_pi,
                        tau_s=cfg.tau,
                        n_ex=1,
                        n_max=cfg.n_max,
                        omega_over_tb=cfg.omega / cfg.tb,
                    )
        except (ValueError, InfeasibleScheduleError) as exc:
            raise ConfigError(str(exc)) from None


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _fmt_config_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return _fmt(value)


def write_csv(path: str, schema: str, cfg: RunConfig, header, rows) -> None:
    """Write one CSV atomically: temp file in the target dir, then rename."""
    buf = io.StringIO()
    buf.write(f"# schema: spinmaser/{schema} v{SCHEMA_VERSION}\n")
    for key in sorted(_ALL_KEYS):
        buf.write(f"# config: {key}={_fmt_config_value(getattr(cfg, key))}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row.get(col)) for col in header) + "\n")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".spinmaser-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _schemes(choice: str):
    if choice == "both":
        return ("collective", "star")
    return (choice,)


_FUEL_TEMP_HEADER = ("scheme", "s", "lambda", "p_e", "tq_over_tb", "eta", "error")


def cmd_fuel_temp(cfg: RunConfig):
    rows = []
    for scheme in _schemes(cfg.scheme):
        for s in cfg.s_grid:
            for lam in cfg.lambda_grid:
                row = {"scheme": scheme, "s": s, "lambda": lam}
                n = 2.0 * s
                if scheme == "star" and (n != int(n) or int(n) > STAR_MAX_N):
                    row["error"] = (
                        f"star scheme infeasible for S={_fmt(s)}: "
                        f"needs integer N=2S <= {STAR_MAX_N}"
                    )
                    rows.append(row)
                    continue
                if scheme == "star":
                    model = StarModelParams(cfg.omega, cfg.j, lam, int(n))
                else:
                    model = CollectiveModelParams(cfg.omega, cfg.j, lam, s)
                fuel = central_spin_state(model, cfg.tb)
                row["p_e"] = fuel.p_e
                try:
                    t_q = effective_temperature(fuel).T_q
                    row["tq_over_tb"] = t_q / cfg.tb
                    row["eta"] = carnot_efficiency(t_q, cfg.tb)
                except PhysicsError as exc:
                    row["error"] = str(exc)
                rows.append(row)
    return _FUEL_TEMP_HEADER, rows


_COARSE_HEADER = ("lambda", "s", "p_e", "nbar", "tf_over_tb", "error")


def cmd_coarse(cfg: RunConfig):
    rows = []
    for lam in cfg.lambda_grid:
        for s in cfg.s_grid:
            fuel = central_spin_state(
                CollectiveModelParams(cfg.omega, cfg.j, lam, s), cfg.tb
            )
            row = {"lambda": lam, "s": s, "p_e": fuel.p_e}
            try:
                nbar, t_f = coarse_grained_steady_field(
                    CoarseGrainedParams(alpha=1.0, p_e=fuel.p_e),
                    cfg.omega / cfg.tb,
                )
                row["nbar"] = nbar
                row["tf_over_tb"] = t_f
            except PhysicsError as exc:
                row["error"] = str(exc)
            rows.append(row)
    return _COARSE_HEADER, rows


_MICROMASER_HEADER = (
    "row",
    "nex",
    "cycle",
    "time",
    "nbar_c",
    "tf_over_tb",
    "converged",
    "tq_over_tb",
    "error",
)


def cmd_micromaser(cfg: RunConfig):
    fuel = central_spin_state(
        CollectiveModelParams(cfg.omega, cfg.j, cfg.lam, cfg.s), cfg.tb
    )
    # the cavity stage works in units of T_b throughout
    pump = CentralSpinState(p_e=fuel.p_e, omega=cfg.omega / cfg.tb)
    tq_ratio = effective_temperature(pump).T_q
    rows = []
    all_converged = True
    for n_ex in cfg.nex:
        try:
            params = MicromaserParams.from_paper_units(
                omega_2pi_hz=cfg.omega_2pi,
                q=cfg.q[0],
                gamma_2pi_hz=cfg.gamma_2pi[0],
                g_pi_hz=cfg.g_pi,
                tau_s=cfg.tau,
                n_ex=int(n_ex),
                n_max=cfg.n_max,
                omega_over_tb=cfg.omega / cfg.tb,
            )
        except InfeasibleScheduleError as exc:
            rows.append(
                {"row": "summary", "nex": int(n_ex), "error": str(exc)}
            )
            continue
        trace = run_cycles(params, pump)
        for cycle, (elapsed, nbar, tf_ratio) in enumerate(trace.samples):
            rows.append(
                {
                    "row": "trace",
                    "nex": int(n_ex),
                    "cycle": cycle,
                    "time": elapsed * params.Omega,
                    "nbar_c": nbar,
                    "tf_over_tb": tf_ratio,
                }
            )
        rows.append(
            {
                "row": "summary",
                "nex": int(n_ex),
                "cycle": len(trace.samples) - 1,
                "nbar_c": trace.steady_nbar,
                "tf_over_tb": trace.steady_T_f,
                "converged": trace.converged,
                "tq_over_tb": tq_ratio,
            }
        )
        all_converged = all_converged and trace.converged
    return _MICROMASER_HEADER, rows, all_converged


def _column_label(qv: float, gv: float) -> str:
    return f"q{qv:g}_g{gv:g}"


def _default_fits_path(out: str) -> str:
    if out.endswith(".csv"):
        return out[: -len(".csv")] + ".fits.csv"
    return out + ".fits.csv"


_FITS_HEADER = (
    "column",
    "lambda",
    "degree",
    "a",
    "b",
    "c",
    "d",
    "e",
    "r_squared",
    "error",
)


def cmd_sweep_fit(cfg: RunConfig):
    columns = {"cg": None}
    n_ex = int(cfg.nex[-1])
    for qv in cfg.q:
        for gv in cfg.gamma_2pi:
            columns[_column_label(qv, gv)] = MicromaserParams.from_paper_units(
                omega_2pi_hz=cfg.omega_2pi,
                q=qv,
                gamma_2pi_hz=gv,
                g_pi_hz=cfg.g_pi,
                tau_s=cfg.tau,
                n_ex=n_ex,
                n_max=cfg.n_max,
                omega_over_tb=cfg.omega / cfg.tb,
            )
    sweep_rows = steady_sweep(
        cfg.omega, cfg.j, cfg.lambda_grid, cfg.s_grid, columns, cfg.tb
    )
    header = ("lambda", "s", "p_e", "tq_over_tb", "eta") + tuple(columns) + ("error",)
    data_rows = []
    for row in sweep_rows:
        out_row = {
            "lambda": row["lambda"],
            "s": row["S"],
            "p_e": row["p_e"],
            "tq_over_tb": row["tq_over_tb"],
            "eta": row["eta"],
        }
        for label in columns:
            out_row[label] = row[label]
        if row["errors"]:
            out_row["error"] = "; ".join(row["errors"])
        data_rows.append(out_row)

    fit_rows = []
    for label in columns:
        for lam in cfg.lambda_grid:
            points = [
                (r["s"], r[label])
                for r in data_rows
                if r["lambda"] == lam and r.get(label) is not None
            ]
            fit_row = {"column": label, "lambda": lam}
            try:
                fit = select_model(
                    [p[0] for p in points],
                    [p[1] for p in points],
                    threshold=cfg.fit_threshold,
                )
                fit_row.update(
                    degree=fit.degree,
                    a=fit.a,
                    b=fit.b,
                    c=fit.c,
                    d=fit.d,
                    e=fit.e,
                    r_squared=fit.r_squared,
                )
            except (InsufficientDataError, ValueError) as exc:
                fit_row["error"] = str(exc)
            fit_rows.append(fit_row)
    return header, data_rows, fit_rows


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"spinmaser: config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "fuel-temp":
            header, rows = cmd_fuel_temp(cfg)
            write_csv(cfg.out, "fuel-temp", cfg, header, rows)
        elif args.command == "coarse":
            header, rows = cmd_coarse(cfg)
            write_csv(cfg.out, "coarse", cfg, header, rows)
        elif args.command == "micromaser":
            header, rows, all_converged = cmd_micromaser(cfg)
            write_csv(cfg.out, "micromaser", cfg, header, rows)
            if not all_converged:
                print("spinmaser: at least one trace did not converge", file=sys.stderr)
                return 4
        else:
            header, data_rows, fit_rows = cmd_sweep_fit(cfg)
            fits_path = cfg.fits_out or _default_fits_path(cfg.out)
            write_csv(cfg.out, "sweep", cfg, header, data_rows)
            write_csv(fits_path, "fits", cfg, _FITS_HEADER, fit_rows)
    except PhysicsError as exc:
        print(f"spinmaser: physics error: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"spinmaser: convergence error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
