"""CSV tables and single-panel SVG plots, plus offline re-evaluation of verdicts."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

from .core import DecayRate
from .lab import (
    CauchyStudy,
    ExperimentRecord,
    InequalityReport,
    RateFit,
    RegularityProbe,
    StabilityScan,
    rate_fit,
)

TRUNCATION_COLUMNS = ("Y", "error_sq", "energy_sq", "trace_sq", "wall_time_s")
FIT_COLUMNS = ("slope", "intercept", "residual", "mu_expected", "pass")
CAUCHY_COLUMNS = ("n", "Y_n", "Y_next", "D", "ratio", "bound", "pass")
REGULARITY_COLUMNS = ("ell", "r", "growth", "K_cap", "pass")
INEQUALITY_COLUMNS = ("name", "trials", "max_ratio", "violated")
STABILITY_COLUMNS = ("beta", "s", "Y", "ratio", "bound", "pass")
SOLVE_COLUMNS = ("Y", "energy_sq", "trace_sq", "combined")

# columns that legitimately differ between identical runs
VOLATILE_COLUMNS = frozenset({"wall_time_s"})


def fmt(x) -> str:
    """Shortest round-trip text for numbers; ``.`` decimal point, no grouping."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, str)):
        return str(x)
    return repr(float(x))


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_truncation_csv(path: Path, records: Sequence[ExperimentRecord]) -> Path:
    rows = [(r.Y, r.error_sq, r.norms.energy_sq, r.norms.trace_sq, r.wall_time) for r in records]
    return _write_rows(Path(path), TRUNCATION_COLUMNS, rows)


def write_fit_csv(path: Path, fits: Sequence[RateFit]) -> Path:
    rows = [
        (f.slope, f.intercept, f.residual, f.mu_expected.mu if f.mu_expected else None, f.passed) for f in fits
    ]
    return _write_rows(Path(path), FIT_COLUMNS, rows)


def write_cauchy_csv(path: Path, study: CauchyStudy) -> Path:
    rows = []
    ratios = study.ratios
    for n, D in enumerate(study.differences):
        ratio = ratios[n] if n < len(ratios) else None
        ok = None if ratio is None else ratio <= study.bound
        rows.append((n, study.cutoffs[n], study.cutoffs[n + 1], D, ratio, study.bound, ok))
    return _write_rows(Path(path), CAUCHY_COLUMNS, rows)


def write_regularity_csv(path: Path, probe: RegularityProbe) -> Path:
    rows = [
        (row.ell, row.r, row.growth, probe.K_cap, None if row.growth is None else row.growth <= probe.K_cap)
        for row in probe.rows
    ]
    return _write_rows(Path(path), REGULARITY_COLUMNS, rows)


def write_inequality_csv(path: Path, reports: Sequence[InequalityReport]) -> Path:
    rows = [(r.name, r.trials, r.max_ratio, r.violated) for r in reports]
    return _write_rows(Path(path), INEQUALITY_COLUMNS, rows)


def write_stability_csv(path: Path, scan: StabilityScan) -> Path:
    C = scan.constant
    rows = [(r.beta, r.s, r.Y, r.ratio, C, r.ratio <= C) for r in scan.rows]
    return _write_rows(Path(path), STABILITY_COLUMNS, rows)


# ---------------------------------------------------------------------------
# SVG


def loglog_svg(
    points: Sequence[tuple[float, float]],
    guide_rate: float | None = None,
    title: str = "",
    xlabel: str = "Y",
    ylabel: str = "error_sq",
    width: int = 480,
    height: int = 360,
) -> str:
    """One data polyline and, for two or more points, a ``Y^-rate`` guide
    through the first point."""
    margin = 56
    pts = [(x, y) for x, y in points if x > 0 and y > 0]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">log {xlabel}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.1f})">log {ylabel}</text>',
        f'<rect class="frame" x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
    ]
    if pts:
        lx = [math.log10(x) for x, _ in pts]
        ly = [math.log10(y) for _, y in pts]
        guide = None
        if guide_rate is not None and len(pts) >= 2:
            x0, y0 = lx[0], ly[0]
            guide = [(x0, y0), (lx[-1], y0 - guide_rate * (lx[-1] - x0))]
            ly_all = ly + [g[1] for g in guide]
        else:
            ly_all = ly
        xmin, xmax = min(lx), max(lx)
        ymin, ymax = min(ly_all), max(ly_all)
        xspan = xmax - xmin or 1.0
        yspan = ymax - ymin or 1.0

        def sx(v: float) -> float:
            return margin + (v - xmin) / xspan * (width - 2 * margin)

        def sy(v: float) -> float:
            return height - margin - (v - ymin) / yspan * (height - 2 * margin)

        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(lx, ly))
        lines.append(f'<polyline class="data" points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>')
        for a, b in zip(lx, ly):
            lines.append(f'<circle class="marker" cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="steelblue"/>')
        if guide is not None:
            (a0, b0), (a1, b1) = guide
            lines.append(
                f'<line class="guide" x1="{sx(a0):.2f}" y1="{sy(b0):.2f}" x2="{sx(a1):.2f}" y2="{sy(b1):.2f}" '
                f'stroke="firebrick" stroke-dasharray="6 4"/>'
            )
            lines.append(
                f'<text x="{width - margin:.1f}" y="{margin - 8}" text-anchor="end" font-size="11" '
                f'fill="firebrick">guide Y^-{guide_rate:g}</text>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_report(
    records: Sequence[ExperimentRecord],
    fits: Sequence[RateFit],
    reports: Sequence[InequalityReport],
    out_dir: Path,
    format: str = "both",
    stem: str = "truncation",
) -> list[Path]:
    """Truncation table, fit summary, inequality table and the log-log plot."""
    if format not in ("csv", "svg", "both"):
        raise ValueError("format must be csv, svg or both")
    out = Path(out_dir)
    written = []
    if format in ("csv", "both"):
        written.append(write_truncation_csv(out / f"{stem}.csv", records))
        if fits:
            written.append(write_fit_csv(out / "fit.csv", fits))
        if reports:
            written.append(write_inequality_csv(out / "inequalities.csv", reports))
    if format in ("svg", "both"):
        mu = fits[0].mu_expected.mu if fits and fits[0].mu_expected else None
        svg = loglog_svg([(r.Y, r.error_sq) for r in records], mu, title=stem)
        written.append(write_svg(out / f"{stem}.svg", svg))
    return written


# ---------------------------------------------------------------------------
# offline re-evaluation


def read_csv(path: Path) -> list[dict[str, str]]:
    try:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _num(text: str) -> float | None:
    return None if text == "" else float(text)


def reevaluate_truncation(csv_path: Path, mu: float, tol: float = 0.15) -> bool:
    """Refit the stored ``(Y, error_sq)`` pairs and apply the rate verdict."""
    rows = read_csv(csv_path)
    fit = rate_fit([(float(r["Y"]), float(r["error_sq"])) for r in rows], DecayRate(mu), tol)
    return fit.passed


def reevaluate_fit(csv_path: Path, tol: float = 0.15) -> bool:
    rows = read_csv(csv_path)
    return all(-float(r["slope"]) >= float(r["mu_expected"]) - tol for r in rows)


def reevaluate_cauchy(csv_path: Path, floor: float = 1e-8) -> bool:
    rows = read_csv(csv_path)
    D = [float(r["D"]) for r in rows]
    bound = float(rows[0]["bound"]) if rows else 0.0
    return all(D[n] <= floor or D[n + 1] / D[n] <= bound for n in range(len(D) - 1))


def reevaluate_regularity(csv_path: Path) -> bool:
    rows = read_csv(csv_path)
    g = [_num(r["growth"]) for r in rows]
    g = [x for x in g if x is not None]
    cap = float(rows[0]["K_cap"]) if rows else math.inf
    if not g or all(float(r["r"]) == 0 for r in rows):
        return True
    inc = [b - a for a, b in zip(g, g[1:])]
    blowup = len(g) >= 3 and all(d > 0 for d in inc) and all(b >= a for a, b in zip(inc, inc[1:]))
    return max(g) <= cap and not blowup


def reevaluate_inequalities(csv_path: Path) -> bool:
    rows = read_csv(csv_path)
    return all(math.isfinite(float(r["max_ratio"])) and float(r["max_ratio"]) <= 1.0 + 1e-9 for r in rows)


def stable_rows(csv_path: Path) -> list[dict[str, str]]:
    """Rows with volatile columns removed, for reproducibility comparisons."""
    return [{k: v for k, v in row.items() if k not in VOLATILE_COLUMNS} for row in read_csv(csv_path)]
