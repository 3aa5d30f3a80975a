"""Command-line front end.

Every command writes its outputs atomically and, next to each data file,
a JSON block recording the fully resolved configuration.  Exit status is
0 on success, 1 for domain/resource errors and 2 for I/O or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from fracq import __version__
from fracq.analytics import correlation_report, periodogram, uniformity_test
from fracq.cf import (
    DEFAULT_NMAX,
    DEFAULT_THRESHOLD,
    cf_magnitude_profile,
    verify_limit_dichotomy,
)
from fracq.eigen import PIPELINE_FIT_MIN, crossover_detect, eigen_spectrum, hurst_from_slope
from fracq.errors import FormatError, FracqError, OutOfRegimeError
from fracq.experiments import provenance, reproduce_fig1, reproduce_fig2
from fracq.io import (
    atomic_write,
    columns_to_csv,
    read_series,
    sidecar_path,
    write_json,
    write_series,
)
from fracq.quantization import (
    QuantizerSpec,
    high_resolution_spec,
    quantize,
    sigma_delta_error,
)
from fracq.synthesis import SignalPath, synthesize
from fracq.weights import weights

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


def _config(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v)
            for k, v in sorted(vars(args).items()) if k not in ("func", "command")}


def _emit(out, text: str) -> None:
    if out in (None, "-", "csv"):
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def cmd_weights(args) -> int:
    w = weights(args.d, args.n)
    _emit(args.out, columns_to_csv(["index", "weight"], np.arange(len(w)), w.values))
    return EXIT_OK


def _series_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "binary" if path.suffix in (".bin", ".fracq") else "csv"


def cmd_synth(args) -> int:
    if args.kind != "white" and args.hurst is None:
        raise FracqError("--hurst is required for fgn and fbm")
    H = None if args.kind == "white" else args.hurst
    path = synthesize(args.kind, H, args.n, args.seed, args.method)
    fmt = _series_format(args.out, args.format)
    write_series(args.out, path.values, fmt, path.kind, H)
    meta = {"kind": path.kind, "H": H, "seed": args.seed, "length": path.length,
            "format": fmt}
    write_json(sidecar_path(args.out), {**provenance("synth", _config(args)), "series": meta})
    return EXIT_OK


def _load_path(path, kind_override=None) -> SignalPath:
    values, meta = read_series(path)
    kind = kind_override or meta.get("kind")
    if kind not in ("white", "fgn", "fbm"):
        kind = "white"
    return SignalPath(values, kind, meta.get("H"), meta.get("seed"))


def _with_suffix(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix or '.csv'}")


def cmd_quantize(args) -> int:
    signal = _load_path(args.input, args.kind)
    if args.auto_hires is not None:
        spec = high_resolution_spec(signal, args.auto_hires)
    elif args.levels is None or args.half_range is None:
        raise FracqError("give --levels and --half-range, or --auto-hires RATIO")
    else:
        spec = QuantizerSpec(args.half_range, args.levels)

    q, raw = quantize(signal, spec)
    errors = raw if args.error_kind == "raw" else sigma_delta_error(signal, spec.delta)
    out = args.out or _with_suffix(args.input, "quantized")
    error_out = args.error_out or _with_suffix(out, "error")
    fmt = _series_format(out, args.format)
    write_series(out, q.values, fmt, signal.kind, signal.H)
    write_series(error_out, errors.values, _series_format(error_out, args.format), "error")

    config = _config(args)
    config.update(out=str(out), error_out=str(error_out), levels=spec.M,
                  half_range=spec.b)
    write_json(sidecar_path(out), {
        **provenance("quantize", config),
        "series": {"kind": signal.kind, "H": signal.H, "seed": signal.seed,
                   "length": signal.length},
        "delta": spec.delta,
        "levels": spec.M,
        "half_range": spec.b,
        "saturation_count": raw.saturation_count,
        "error_kind": args.error_kind,
        "error_file": str(error_out),
    })
    return EXIT_OK


def cmd_analyze(args) -> int:
    e, _ = read_series(args.error)
    signal = None
    if args.signal is not None:
        signal, _ = read_series(args.signal)
    unif = uniformity_test(e)
    corr = correlation_report(e, signal, args.max_lag)
    spec = periodogram(e, args.k_lo, args.k_hi, args.segments)
    config = _config(args)
    config["k_hi"] = spec.k_hi
    report = {
        **provenance("analyze", config),
        "uniformity": unif.to_dict(),
        "correlation": corr.to_dict(),
        "spectrum": spec.to_dict(),
        "white_band": 5.0 / math.sqrt(e.size),
        "max_abs_autocorr": corr.max_abs_autocorr() if args.max_lag > 0 else None,
    }
    if args.psd is not None:
        atomic_write(args.psd, columns_to_csv(["frequency", "power"],
                                              spec.frequencies, spec.power))
    _write_report(args.out, report)
    return EXIT_OK


def _write_report(out, report: dict) -> None:
    if out in (None, "-"):
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        write_json(out, report)


def cmd_eigen(args) -> int:
    x, _ = read_series(args.input)
    fit_max = args.fit_max if args.fit_max is not None else args.window // 2
    spec = eigen_spectrum(x, args.window, args.fit_min, fit_max)
    cross = crossover_detect(spec)
    try:
        hurst = hurst_from_slope(spec.slope)
        regime = None
    except OutOfRegimeError as exc:
        hurst, regime = None, str(exc)
    config = _config(args)
    config["fit_max"] = fit_max
    summary = {
        **provenance("eigen", config),
        "K": spec.K,
        "L": spec.L,
        "fit_range": list(spec.fit_range),
        "slope": spec.slope,
        "hurst_estimate": hurst,
        "out_of_regime": regime,
        "trace": spec.trace,
        **cross.to_dict(),
    }
    atomic_write(args.out, columns_to_csv(["k", "lambda"], spec.k, spec.eigenvalues))
    write_json(sidecar_path(args.out), summary)
    return EXIT_OK


def cmd_cf(args) -> int:
    prof = cf_magnitude_profile(args.hurst, args.delta, 1, args.n, args.kind, args.threshold)
    report = verify_limit_dichotomy(args.hurst, args.delta, range(args.l_max + 1), args.n,
                                    args.kind, args.threshold)
    atomic_write(args.out, columns_to_csv(["n", "log_magnitude"],
                                          np.arange(prof.nmax + 1), prof.log_magnitudes))
    write_json(sidecar_path(args.out), {
        **provenance("cf", _config(args)),
        "profile_harmonic": 1,
        "harmonic_scaling": "log_magnitude(l) = l**2 * log_magnitude(1)",
        "dichotomy": [entry.to_dict() for entry in report],
        "pass": all(entry.passed for entry in report),
    })
    return EXIT_OK


def cmd_fig1(args) -> int:
    result = reproduce_fig1(args.seed, args.n, args.trials, error=args.error,
                            method=args.method, jobs=args.jobs)
    out = Path(args.out)
    spec = result.spectrum
    atomic_write(out / "psd.csv", columns_to_csv(["frequency", "power"],
                                                 spec.frequencies, spec.power))
    report = result.report()
    report["config"].update(out=str(out), jobs=args.jobs)
    write_json(out / "report.json", report)
    print(f"[{'PASS' if result.passed else 'FAIL'}] error periodogram slope "
          f"{result.median_slope:+.4f} (target 0 +/- 0.15)")
    return EXIT_OK


def cmd_fig2(args) -> int:
    result = reproduce_fig2(args.seed, args.n, args.window, args.trials,
                            method=args.method, jobs=args.jobs)
    out = Path(args.out)
    first = result.trials[0]
    for name, spec in (("path", first.path), ("quantized", first.quantized),
                       ("error", first.error)):
        atomic_write(out / f"eigen_{name}.csv",
                     columns_to_csv(["k", "lambda"], spec.k, spec.eigenvalues))
    report = result.report()
    report["config"].update(out=str(out), jobs=args.jobs)
    write_json(out / "report.json", report)
    checks = report["checks"]
    print(f"[{'PASS' if checks['path_slope_ok'] else 'FAIL'}] fBm eigen slope "
          f"{result.median_path_slope:+.4f} (target {report['target_slope_path']:+.2f} +/- 0.3)")
    print(f"[{'PASS' if checks['error_slope_ok'] else 'FAIL'}] error eigen slope "
          f"{result.median_error_slope:+.4f} (target 0 +/- 0.2)")
    print(f"[{'PASS' if checks['crossover_ok'] else 'FAIL'}] crossover sse_ratio >= 2 in "
          f"{result.crossover_count}/{len(result.trials)} trials")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from fracq.selftest import run_selftest

    return EXIT_OK if run_selftest(quick=args.quick) else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="fractional-difference weights as CSV")
    p.add_argument("--d", type=float, required=True, help="fractional order in (-1/2, 5/2)")
    p.add_argument("--n", type=int, required=True, help="largest index")
    p.add_argument("--out", default="-", help="output path; '-' or 'csv' for stdout")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("synth", help="synthesize white noise, fGn or fBm")
    p.add_argument("--kind", choices=("white", "fgn", "fbm"), required=True)
    p.add_argument("--hurst", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("direct", "fft"), default="direct")
    p.add_argument("--format", choices=("csv", "binary"))
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("quantize", help="uniform quantizer and normalized error")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--levels", type=int)
    p.add_argument("--half-range", type=float)
    p.add_argument("--auto-hires", type=float, metavar="RATIO")
    p.add_argument("--kind", choices=("white", "fgn", "fbm"),
                   help="override the signal kind recorded with the input")
    p.add_argument("--error-kind", choices=("raw", "sigma-delta"), default="raw")
    p.add_argument("--format", choices=("csv", "binary"))
    p.add_argument("--out", type=Path)
    p.add_argument("--error-out", type=Path)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("analyze", help="uniformity, whiteness and periodogram of an error series")
    p.add_argument("--error", type=Path, required=True)
    p.add_argument("--signal", type=Path)
    p.add_argument("--max-lag", type=int, default=50)
    p.add_argument("--segments", type=int, default=1)
    p.add_argument("--k-lo", type=int, default=2)
    p.add_argument("--k-hi", type=int)
    p.add_argument("--psd", type=Path)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eigen", help="PCA eigen-spectrum, power-law fit and crossover")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--window", type=int, default=64)
    p.add_argument("--fit-min", type=int, default=PIPELINE_FIT_MIN)
    p.add_argument("--fit-max", type=int)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("cf", help="characteristic-function magnitude profile")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--l-max", type=int, default=3)
    p.add_argument("--n", type=int, default=DEFAULT_NMAX)
    p.add_argument("--kind", choices=("fgn", "fbm"), default="fgn")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("reproduce-fig1", help="error periodogram of quantized fBm, H=0.2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2**14)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--error", choices=("raw", "sigma-delta"), default="raw")
    p.add_argument("--method", choices=("direct", "fft"), default="direct")
    p.add_argument("--out", default="fig1")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("reproduce-fig2", help="eigen-spectra of fBm, quantized fBm and error, H=0.8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2**16)
    p.add_argument("--window", type=int, default=64)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--method", choices=("direct", "fft"), default="direct")
    p.add_argument("--out", default="fig2")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("selftest", help="fast end-to-end sanity checks")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "error", None) == "sigma-delta" and args.command.startswith("reproduce"):
        args.error = "sigma_delta"
    if getattr(args, "error_kind", None) == "sigma-delta":
        args.error_kind = "sigma_delta"
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"fracq: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FracqError, ValueError) as exc:
        print(f"fracq: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
