"""Command line runner for the extension experiments.

    fracext truncation-study --beta 0.5 --s 1 --y-list 1,2,4,8,16,32,64 --out results

Exit status: 0 when every verdict passes, 1 when any fails, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import lab, report
from .core import FracParams
from .bessel import dtn_symbol
from .modes import mode_dtn
from .synthesis import RadialProfile, bump_profile, gaussian_profile, radial_functional

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = ("solve", "truncation-study", "regularity-probe", "cauchy-study", "inequality-suite")


class ConfigError(Exception):
    pass


def parse_y_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad Y list {text!r}") from exc
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("Y values must be positive")
    return vals


# option name -> (converter, default)
OPTIONS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "beta": (float, 0.5),
    "s": (float, 1.0),
    "dim": (int, 3),
    "y_list": (parse_y_list, lab.DEFAULT_YS),
    "f": (str, "gaussian"),
    "eps": (float, None),
    "seed": (int, 42),
    "out": (str, "results"),
    "format": (str, "both"),
    "lam": (float, None),
    "trials": (int, 1000),
    "n_max": (int, 6),
    "ell_max": (int, 8),
}
CHOICES = {"f": ("gaussian", "bump"), "format": ("csv", "svg", "both"), "dim": (2, 3)}


def read_config(path: str) -> dict[str, Any]:
    """``key = value`` lines; ``#`` starts a comment; keys use ``-`` or ``_``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        conv = OPTIONS[key][0]
        try:
            out[key] = conv(value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # every option defaults to None so that file values can fill the gaps
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--beta", type=float, help="fractional order in (0, 1)")
    common.add_argument("--s", type=float, help="reaction coefficient s >= 0")
    common.add_argument("--dim", type=int, choices=CHOICES["dim"])
    common.add_argument("--y-list", dest="y_list", type=parse_y_list, help="comma separated cutoffs")
    common.add_argument("--f", choices=CHOICES["f"], help="radial datum")
    common.add_argument("--eps", type=float, help="weight shift of the regularity probe")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=CHOICES["format"])

    parser = argparse.ArgumentParser(prog="fracext", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="extension norms, or one mode with --lam")
    p.add_argument("--lam", type=float, help="solve a single Fourier mode by finite elements")
    sub.add_parser("truncation-study", parents=[common], help="decay rate of the truncation error")
    p = sub.add_parser("regularity-probe", parents=[common], help="weighted y-derivative growth")
    p.add_argument("--ell-max", dest="ell_max", type=int)
    p = sub.add_parser("cauchy-study", parents=[common], help="geometric sequence of cutoffs")
    p.add_argument("--n-max", dest="n_max", type=int)
    p = sub.add_parser("inequality-suite", parents=[common], help="randomised inequality checks")
    p.add_argument("--trials", type=int)
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    opts = {k: default for k, (_, default) in OPTIONS.items()}
    if args.config:
        opts.update(read_config(args.config))
    for key in OPTIONS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    for key, allowed in CHOICES.items():
        if opts[key] not in allowed:
            raise ConfigError(f"{key} must be one of {allowed}")
    return opts


def make_datum(name: str, dim: int) -> RadialProfile:
    return gaussian_profile(dim) if name == "gaussian" else bump_profile(dim)


def _say(ok: bool, what: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {what}")
    return ok


def run_solve(params: FracParams, opts: dict[str, Any], out: Path) -> bool:
    if opts["lam"] is not None:
        lam = opts["lam"]
        rows, ok = [], True
        for Y in (*opts["y_list"], math.inf):
            got, ref = mode_dtn(lam, Y, params), dtn_symbol(lam, Y, params)
            err = abs(got - ref) / abs(ref) if ref else abs(got)
            ok &= _say(err <= 1e-4, f"mode lam={lam:g} Y={Y:g} symbol={got:.12g} oracle={ref:.12g} rel_err={err:.2e}")
            rows.append((lam, Y, got, ref, err))
        if opts["format"] in ("csv", "both"):
            report._write_rows(out / "mode.csv", ("lam", "Y", "symbol", "oracle", "rel_err"), rows)
        return ok
    f = make_datum(opts["f"], params.dim)
    rows = []
    for Y in (*opts["y_list"], math.inf):
        n = radial_functional(f, params, Y)
        rows.append((Y, n.energy_sq, n.trace_sq, n.combined))
        print(f"Y={Y:g} energy_sq={n.energy_sq:.10g} trace_sq={n.trace_sq:.10g}")
    ok = True
    if params.s > 0:
        # every cutoff obeys the certified stability bound
        bound = (lab.stability_constant(params) * min(1.0, 1.0 / params.s)) ** 2 * f.l2_norm_sq()
        worst = max(r[3] for r in rows)
        ok = _say(worst <= bound, f"stability max_combined={worst:.6g} bound={bound:.6g}")
    if opts["format"] in ("csv", "both"):
        report._write_rows(out / "solve.csv", report.SOLVE_COLUMNS, rows)
    return ok


def run_truncation(params: FracParams, opts: dict[str, Any], out: Path) -> bool:
    study = lab.truncation_study(params, make_datum(opts["f"], params.dim), opts["y_list"])
    report.write_report(study.records, [study.fit], [], out, opts["format"])
    fit = study.fit
    return _say(
        study.passed,
        f"truncation-study slope={fit.slope:.4f} mu={params.mu.mu:g} tol={fit.tol:g} residual={fit.residual:.3g}",
    )


def run_regularity(params: FracParams, opts: dict[str, Any], out: Path) -> bool:
    probe = lab.regularity_probe(params, make_datum(opts["f"], params.dim), opts["ell_max"], opts["eps"])
    if opts["format"] in ("csv", "both"):
        report.write_regularity_csv(out / "regularity.csv", probe)
    if opts["format"] in ("svg", "both"):
        pts = [(row.ell + 1.0, row.growth) for row in probe.rows if row.growth is not None]
        svg = report.loglog_svg(pts, None, "regularity-probe", "l+1", "growth")
        report.write_svg(out / "regularity.svg", svg)
    for row in probe.rows:
        g = "" if row.growth is None else f" growth={row.growth:.4f}"
        print(f"l={row.ell} r={row.r:.6g}{g}")
    return _say(
        probe.passed,
        f"regularity-probe eps={probe.eps:g} max_growth={probe.max_growth:.4f} K_cap={probe.K_cap:g} "
        f"blowup={probe.blowup}",
    )


def run_cauchy(params: FracParams, opts: dict[str, Any], out: Path) -> bool:
    Y0 = opts["y_list"][0]
    study = lab.cauchy_study(params, make_datum(opts["f"], params.dim), Y0, opts["n_max"])
    if opts["format"] in ("csv", "both"):
        report.write_cauchy_csv(out / "cauchy.csv", study)
    if opts["format"] in ("svg", "both"):
        pts = list(zip(study.cutoffs, study.differences))
        svg = report.loglog_svg(pts, params.mu.mu / 2.0, "cauchy-study", "Y_n", "D_n")
        report.write_svg(out / "cauchy.svg", svg)
    for n, D in enumerate(study.differences):
        print(f"n={n} Y={study.cutoffs[n]:g} D={D:.6g}")
    worst = max((r for r in study.ratios if r is not None), default=0.0)
    return _say(study.passed, f"cauchy-study Y0={Y0:g} max_ratio={worst:.4f} bound={study.bound:.4f}")


def run_inequalities(params: FracParams, opts: dict[str, Any], out: Path) -> bool:
    reports = lab.inequality_suite(opts["seed"], opts["trials"])
    # the table is the only product of this command
    report.write_inequality_csv(out / "inequalities.csv", reports)
    ok = True
    for r in reports:
        ok &= _say(not r.violated, f"{r.name} trials={r.trials} max_ratio={r.max_ratio:.4f}")
    return ok


RUNNERS = {
    "solve": run_solve,
    "truncation-study": run_truncation,
    "regularity-probe": run_regularity,
    "cauchy-study": run_cauchy,
    "inequality-suite": run_inequalities,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        opts = resolve(args)
        params = FracParams.create(opts["beta"], opts["s"], opts["dim"])
        if opts["trials"] < 100 or opts["n_max"] < 3 or opts["ell_max"] < 0:
            raise ConfigError("trials >= 100, n-max >= 3 and ell-max >= 0 required")
    except (ConfigError, ValueError) as exc:
        print(f"fracext: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(opts["out"])
    try:
        ok = RUNNERS[args.command](params, opts, out)
    except OSError as exc:
        print(f"fracext: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # parameter combinations the solvers reject, e.g. s = 0 in d = 2
        print(f"fracext: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
