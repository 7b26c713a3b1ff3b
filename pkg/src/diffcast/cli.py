"""Command-line front end.

Exit codes: 0 success, 1 data or runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algebra import recursion_to_generating_function, wronskian_certificate
from .backtest import BacktestConfig, sweep_report
from .core import ConfigurationError, DiffcastError, DomainError, TimeSeries
from .estimate import IdentificationConfig, SmootherConfig, rolling_identify, smooth_values
from .fetch import fetch
from .forecast import ForecastConfig, required_history, rolling_forecast
from .ingest import IngestSpec, ingest_with_diagnostics, series_digest
from .svg import Band, Chart, Line, Markers, render

log = logging.getLogger("diffcast")

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _clean(obj):
    """Replace non-finite floats (not valid JSON) with strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf" if obj < 0 else "nan"
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def manifest(command: str, config: dict, series: Optional[TimeSeries], seed: int) -> dict:
    return {
        "tool": "diffcast",
        "tool_version": __version__,
        "command": command,
        "config": config,
        "input_digest": series_digest(series) if series is not None else None,
        "seed": seed,
    }


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _csv_text(header: Sequence[str], rows, man: dict) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(_clean(man), separators=(",", ":"), ensure_ascii=False) + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _rational_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated rationals (e.g. 1/2,3), got {text!r}")


def _column(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


# ---------------------------------------------------------------------------
# argument parsing

def _add_input(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--input", required=True, help="CSV path or http(s) URL")
    g.add_argument("--date-column", default="0", help="index or header name (default 0)")
    g.add_argument("--value-column", default="1", help="index or header name (default 1)")
    g.add_argument("--skip-rows", type=int, default=0)
    g.add_argument("--reverse", action="store_true", help="input is newest-first")
    g.add_argument("--decimal", choices=[".", ","], default=".")
    g.add_argument("--delimiter", default=None, help="field delimiter (default: autodetect)")
    g.add_argument("--drop-invalid", action="store_true",
                   help="skip rows with missing or non-numeric values (listed on stderr)")
    g.add_argument("--cache-dir", default=None)


def _add_model(p: argparse.ArgumentParser, *, order_default: int = 3) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--order", type=int, default=order_default, help="recursion order n")
    g.add_argument("--L", dest="L", type=int, default=45, help="identification window")
    g.add_argument("--W", dest="W", type=int, default=20, help="smoother window")
    g.add_argument("--d", dest="d", type=int, default=2, help="smoother polynomial degree")
    g.add_argument("--rank-tolerance", type=float, default=1e-10)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=".", help="directory for reports and plots")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffcast",
        description="Short-horizon forecasts from sliding-window difference equations.",
    )
    parser.add_argument("--version", action="version", version=f"diffcast {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forecast", help="rolling h-step forecasts (JSON + SVG)")
    _add_input(p)
    _add_model(p)
    p.add_argument("--horizon", type=int, default=5)
    p.add_argument("--ma-window", type=int, default=100)
    p.add_argument("--multipliers", default="1,2,3", help="interval multipliers k")
    p.add_argument("--origin", type=int, action="append", default=None,
                   help="forecast origin (time index); repeatable; default every feasible origin")
    p.add_argument("--last", type=int, default=None, help="only the last N feasible origins")
    _add_output(p)

    p = sub.add_parser("coeffs", help="rolling coefficient estimates (CSV + SVG)")
    _add_input(p)
    _add_model(p)
    _add_output(p)

    p = sub.add_parser("backtest", help="hit-rate and coverage tables (CSV, JSON, SVG)")
    _add_input(p)
    _add_model(p)
    p.add_argument("--horizons", default="5,10")
    p.add_argument("--ma-windows", default="50,100,200,300")
    p.add_argument("--ma-window", type=int, default=100, help="window used for the intervals")
    p.add_argument("--multipliers", default="1,2,3")
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--stride", type=int, default=1)
    _add_output(p)

    p = sub.add_parser("certify", help="Wronskian identifiability certificate (JSON)")
    p.add_argument("--coeffs", required=True, help="a_1,...,a_n as rationals")
    p.add_argument("--initials", required=True, help="x(0),...,x(n-1) as rationals")
    p.add_argument("--claimed-order", type=int, default=None)
    p.add_argument("--which", choices=["full", "dynamics"], default="full")
    p.add_argument("--seed", type=int, default=0, help="seed for the evaluation points")
    p.add_argument("--out", default=None, help="write the JSON here instead of stdout")

    p = sub.add_parser("fetch", help="download into the local cache and print the path")
    p.add_argument("--url", required=True)
    p.add_argument("--cache-dir", default=None)
    return parser


# ---------------------------------------------------------------------------
# commands

def _load(args) -> TimeSeries:
    is_url = args.input.startswith(("http://", "https://"))
    spec = IngestSpec(
        path=None if is_url else args.input,
        url=args.input if is_url else None,
        date_column=_column(args.date_column),
        value_column=_column(args.value_column),
        skip_rows=args.skip_rows,
        reverse=args.reverse,
        decimal_separator=args.decimal,
        delimiter=args.delimiter,
        drop_invalid=args.drop_invalid,
    )
    series, diagnostics = ingest_with_diagnostics(spec, args.cache_dir)
    for d in diagnostics:
        print(f"dropped {d}", file=sys.stderr)
    return series


def _configs(args):
    ident = IdentificationConfig(args.order, args.L, args.rank_tolerance)
    smoother = SmootherConfig(args.W, args.d)
    return ident, smoother


def _model_config(ident, smoother) -> dict:
    return {"order": ident.order, "L": ident.window, "rank_tolerance": ident.rank_tolerance,
            "W": smoother.window, "d": smoother.degree}


def _xaxis(series: TimeSeries) -> str:
    if series.labels:
        return f"t (0 = {series.labels[0]}, last = {series.labels[-1]})"
    return "t"


def cmd_forecast(args) -> int:
    ident, smoother = _configs(args)
    ks = [float(k) for k in _rational_list(args.multipliers)]
    fc = ForecastConfig(args.horizon, args.ma_window, tuple(ks))
    series = _load(args)
    out_dir = Path(args.out_dir)
    origins = args.origin
    if origins is None:
        first = series.start_index + max(required_history(ident, smoother, fc.ma_window).values()) - 1
        origins = list(range(first, series.end_index + 1))
        if not origins:
            raise DomainError(f"series of length {len(series)} is too short for a single forecast")
        if args.last is not None:
            origins = origins[-args.last:]
    records = rolling_forecast(series, ident, smoother, fc, origins=origins)[fc.ma_window]

    config = dict(_model_config(ident, smoother), horizon=fc.horizon, ma_window=fc.ma_window,
                  interval_multipliers=list(fc.interval_multipliers), origins=[min(origins), max(origins)]
                  if origins else None)
    man = manifest("forecast", config, series, args.seed)
    payload = {"schema_version": SCHEMA_VERSION, "manifest": man,
               "records": [dict(r.to_dict(), origin_label=series.label_at(r.origin)) for r in records]}
    json_path = _write(out_dir / "forecast.json", dump_json(payload))

    trend = smooth_values(series.values, smoother)
    t = [float(v) for v in series.times]
    chart = Chart(
        title=f"Series, causal trendline and {fc.horizon}-step forecast",
        x_label=_xaxis(series), y_label="value",
        lines=[
            Line("rates", t, series.values.tolist(), color="#1f4fd8"),
            Line("filtered", t, trend.tolist(), color="#000000", dash="dashed"),
            Line(f"forecast ({fc.horizon} ahead)", [float(r.target) for r in records],
                 [r.trendline_forecast for r in records], color="#d62728"),
        ],
        metadata=json.dumps(_clean(man), sort_keys=True),
    )
    svg_path = _write(out_dir / "forecast.svg", render(chart))
    print(json_path)
    print(svg_path)
    return 0


def cmd_coeffs(args) -> int:
    ident, smoother = _configs(args)
    series = _load(args)
    models = rolling_identify(series, ident, smoother)
    man = manifest("coeffs", _model_config(ident, smoother), series, args.seed)
    n = ident.order
    header = (["window_origin", "window_end", "end_label"] + [f"a{i}" for i in range(1, n + 1)]
              + ["condition_number", "rank"])
    rows = []
    for m in models:
        end = m.window_origin + ident.window - 1
        rows.append([m.window_origin, end, series.label_at(end) or ""]
                    + [repr(a) for a in m.coefficients] + [repr(m.condition_number), m.rank])
    out_dir = Path(args.out_dir)
    csv_path = _write(out_dir / "coeffs.csv", _csv_text(header, rows, man))

    ends = [float(m.window_origin + ident.window - 1) for m in models]
    styles = [("#d62728", "dashdot"), ("#1f4fd8", "dashed"), ("#000000", "solid")]
    lines = []
    for i in range(n):
        color, dash = styles[i % len(styles)]
        lines.append(Line(f"a{i + 1}", ends, [m.coefficients[i] for m in models], color=color, dash=dash))
    chart = Chart(title="Rolling coefficient estimates", x_label=_xaxis(series), y_label="coefficient",
                  lines=lines, metadata=json.dumps(_clean(man), sort_keys=True))
    svg_path = _write(out_dir / "coeffs.svg", render(chart))
    print(csv_path)
    print(svg_path)
    return 0


def cmd_backtest(args) -> int:
    ident, smoother = _configs(args)
    horizons = _int_list(args.horizons)
    windows = _int_list(args.ma_windows)
    ks = [float(k) for k in _rational_list(args.multipliers)]
    if not horizons or min(horizons) < 1:
        raise ConfigurationError(f"horizons must be positive, got {horizons}")
    config = BacktestConfig(ident=ident, smoother=smoother,
                            fc=ForecastConfig(horizons[0], args.ma_window, tuple(ks)),
                            ma_windows=tuple(windows), start=args.start, stride=args.stride)
    series = _load(args)
    reports = sweep_report(series, config, horizons)
    cfg = dict(config.to_dict(), horizons=horizons)
    del cfg["horizon"]
    man = manifest("backtest", cfg, series, args.seed)
    out_dir = Path(args.out_dir)

    payload = {"schema_version": SCHEMA_VERSION, "manifest": man,
               "reports": [r.to_dict() for r in reports]}
    paths = [_write(out_dir / "backtest.json", dump_json(payload))]
    t1 = [[r.horizon, row["window"], f"{row['hit_rate']:.1f}", row["hits"], r.n_forecasts]
          for r in reports for row in r.table1_rows()]
    paths.append(_write(out_dir / "table1.csv",
                        _csv_text(["horizon", "window", "hit_rate_percent", "hits", "n_forecasts"], t1, man)))
    t2 = [[r.horizon, f"{row['k']:g}", f"{row['nominal']:.1f}", f"{row['empirical']:.1f}",
           row["ma_window"]] for r in reports for row in r.table2_rows()]
    paths.append(_write(out_dir / "table2.csv",
                        _csv_text(["horizon", "k", "nominal_percent", "empirical_percent", "ma_window"],
                                  t2, man)))

    meta = json.dumps(_clean(man), sort_keys=True)
    for r in reports:
        recs = r.records[r.coverage_window]
        targets = [float(rec.target) for rec in recs]
        ma = [rec.ma_forecast for rec in recs]
        above = [(x, y) for x, y, rec in zip(targets, ma, recs) if rec.indicator.value == "above"]
        under = [(x, y) for x, y, rec in zip(targets, ma, recs) if rec.indicator.value == "under"]
        chart = Chart(
            title=f"Forecast side of the trendline, h={r.horizon}, N={r.coverage_window}",
            x_label=_xaxis(series), y_label="forecast MA of residual",
            lines=[Line("forecast MA", targets, ma, color="#1f4fd8")],
            markers=[Markers("above", [p[0] for p in above], [p[1] for p in above], "down", "#d62728"),
                     Markers("under", [p[0] for p in under], [p[1] for p in under], "up", "#2ca02c")],
            hlines=[0.0], metadata=meta)
        paths.append(_write(out_dir / f"indicators_h{r.horizon}.svg", render(chart)))

        k = 2.0 if 2.0 in config.fc.interval_multipliers else config.fc.interval_multipliers[-1]
        lo = [rec.interval(k)[0] for rec in recs]
        hi = [rec.interval(k)[1] for rec in recs]
        chart = Chart(
            title=f"Realized values and the ±{k:g} MSTD band, h={r.horizon}",
            x_label=_xaxis(series), y_label="value",
            lines=[Line("realized", targets, list(r.realized), color="#1f4fd8"),
                   Line("interval center", targets, [rec.center for rec in recs],
                        color="#d62728", dash="dashed")],
            bands=[Band(f"±{k:g} MSTD", targets, lo, hi)], metadata=meta)
        paths.append(_write(out_dir / f"bands_h{r.horizon}.svg", render(chart)))

    for r in reports:
        rates = ", ".join(f"N={N}: {v:.1f}%" for N, v in r.per_window_hit_rate.items())
        cov = ", ".join(f"k={k:g}: {emp:.1f}% (nominal {nom:.0f}%)" for k, (nom, emp) in r.per_k_coverage.items())
        print(f"h={r.horizon} n={r.n_forecasts} hit rate [{rates}] coverage [{cov}] "
              f"rmse={r.rmse_trendline:.6g}", file=sys.stderr)
    for p in paths:
        print(p)
    return 0


def cmd_certify(args) -> int:
    coeffs = _rational_list(args.coeffs)
    initials = _rational_list(args.initials)
    if len(coeffs) != len(initials):
        raise UsageError(f"{len(coeffs)} coefficients but {len(initials)} initial values")
    X = recursion_to_generating_function(coeffs, initials)
    claimed = args.claimed_order if args.claimed_order is not None else len(coeffs)
    if claimed < 1:
        raise UsageError("--claimed-order must be at least 1")
    cert = wronskian_certificate(X, claimed, args.which, rng=args.seed)
    man = manifest("certify", {"coeffs": [str(c) for c in coeffs], "initials": [str(x) for x in initials],
                               "claimed_order": claimed, "which": args.which}, None, args.seed)
    payload = {"schema_version": SCHEMA_VERSION, "manifest": man,
               "generating_function": {"numerator": str(X.numerator), "denominator": str(X.denominator)},
               "certificate": cert.to_dict()}
    text = dump_json(payload)
    if args.out:
        print(_write(Path(args.out), text))
    else:
        sys.stdout.write(text)
    return 0


def cmd_fetch(args) -> int:
    print(fetch(args.url, args.cache_dir))
    return 0


COMMANDS = {"forecast": cmd_forecast, "coeffs": cmd_coeffs, "backtest": cmd_backtest,
            "certify": cmd_certify, "fetch": cmd_fetch}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        print(f"diffcast {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except DiffcastError as exc:
        print(f"diffcast {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
