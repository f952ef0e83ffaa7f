"""Command-line surface: test a CSV of curves, run simulation tables, export
density samples, and suggest block counts. Every file output gets a JSON
manifest alongside it; `rerun` re-executes a manifest and reproduces the
output byte-for-byte.
"""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .core import FunctionalTimeSeries
from .spectral import BlockDesignError, make_design
from .stationarity import DegenerateSeriesError, run_test, suggest_blocks
from .simulate import McConfig, PRESET_NAMES, density_samples, load_spec, monte_carlo

REPORT_SCHEMA = "ftstest-report/1"
MANIFEST_SCHEMA = "ftstest-manifest/1"


class CliError(RuntimeError):
    pass


def read_curves_csv(path: str) -> FunctionalTimeSeries:
    """One row per time point, G comma-separated reals; optional header row.

    Ragged rows are rejected.
    """
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for line_no, row in enumerate(reader, start=1):
            if not row:
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                if line_no == 1:
                    continue  # header naming grid points
                raise CliError(f"{path}:{line_no}: non-numeric value") from None
            if rows and len(values) != len(rows[-1]):
                raise CliError(
                    f"{path}:{line_no}: ragged row ({len(values)} values, "
                    f"expected {len(rows[-1])})"
                )
            rows.append(values)
    if len(rows) < 2:
        raise CliError(f"{path}: need at least 2 data rows")
    return FunctionalTimeSeries(np.array(rows))


def _resolve_design(n_total: int, blocks: str):
    """Pick (M, N, truncated_rows) for a possibly non-divisible series length.

    Truncation drops the earliest observations.
    """
    if n_total < 8:
        raise CliError(f"need at least 8 curves, got {n_total}")
    if blocks == "auto":
        try:
            m, n = suggest_blocks(n_total, mode="divisor")
            return m, n, 0
        except BlockDesignError:
            m, n = suggest_blocks(n_total, mode="ceil")
            return m, n, n_total - m * n
    try:
        m = int(blocks)
    except ValueError:
        raise CliError(f"--blocks must be an integer or 'auto', got {blocks!r}") from None
    if m < 1:
        raise CliError(f"--blocks must be >= 1, got {m}")
    n = (n_total // m) // 2 * 2
    if n < 2:
        raise CliError(f"{m} blocks leave fewer than 2 curves per block")
    return m, n, n_total - m * n


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_manifest(out_path: str, argv: list[str], info: dict, started: float) -> None:
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "command": argv,
        "tool_version": __version__,
        "wall_clock_sec": round(time.monotonic() - started, 3),
        "outputs": [out_path],
    }
    manifest.update(info)
    _write_json(out_path + ".manifest.json", manifest)


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    return int(os.environ.get("FTSTEST_WORKERS", "1"))


def cmd_test(args, argv) -> int:
    started = time.monotonic()
    series = read_curves_csv(args.input)
    m, n, truncated = _resolve_design(series.n_times, args.blocks)
    if truncated:
        series = series.head_truncated(m * n)
    design = make_design(series.n_times, m)
    report = run_test(series, design, alpha=args.alpha, bias_mode=args.bias_mode)
    payload = {
        "schema": REPORT_SCHEMA,
        "T": design.n_total,
        "M": design.n_blocks,
        "N": design.block_length,
        "f1": report.parts.local_term,
        "f2": report.parts.averaged_term,
        "bias": report.parts.bias_term,
        "bias_mode": report.parts.bias_mode,
        "m_hat": report.parts.distance,
        "var_h0": report.null_variance,
        "statistic": report.statistic,
        "p_value": report.p_value,
        "alpha": report.alpha,
        "reject": report.reject,
        "truncated_rows": truncated,
    }
    if args.out:
        _write_json(args.out, payload)
        _write_manifest(
            args.out,
            argv,
            {
                "input": args.input,
                "T": design.n_total,
                "M": design.n_blocks,
                "N": design.block_length,
                "alphas": [args.alpha],
                "truncated_rows": truncated,
            },
            started,
        )
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _resolve_model(name: str):
    if name in PRESET_NAMES:
        return name
    if os.path.exists(name):
        return load_spec(name)
    raise CliError(f"--model must be one of {PRESET_NAMES} or a TOML config path")


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        alphas = tuple(float(a) for a in text.split(","))
    except ValueError:
        raise CliError(f"bad --alphas value {text!r}") from None
    if not all(0 < a < 1 for a in alphas):
        raise CliError("every alpha must lie in (0, 1)")
    return alphas


def cmd_simulate(args, argv) -> int:
    started = time.monotonic()
    alphas = _parse_alphas(args.alphas)
    config = McConfig(
        model=_resolve_model(args.model),
        n_total=args.T,
        n_blocks=args.M,
        replications=args.reps,
        alphas=alphas,
        seed=args.seed,
        workers=_workers(args),
        bias_mode=args.bias_mode,
    )
    result = monte_carlo(config)
    design = make_design(args.T, args.M)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["model", "T", "N", "M", "alpha", "rejection_pct", "mc_std_err_pct"]
        )
        for alpha in alphas:
            writer.writerow(
                [
                    args.model,
                    args.T,
                    design.block_length,
                    args.M,
                    repr(alpha),
                    repr(100.0 * result.rejection_rates[alpha]),
                    repr(100.0 * result.std_errors[alpha]),
                ]
            )
    _write_manifest(
        args.out,
        argv,
        {
            "input": args.model,
            "T": args.T,
            "M": args.M,
            "N": design.block_length,
            "alphas": list(alphas),
            "seed": args.seed,
            "replications": args.reps,
        },
        started,
    )
    return 0


def cmd_density(args, argv) -> int:
    started = time.monotonic()
    try:
        block_counts = [int(m) for m in args.M.split(",")]
    except ValueError:
        raise CliError(f"bad --M value {args.M!r}") from None
    model = _resolve_model(args.model)
    columns = {}
    for m in block_counts:
        config = McConfig(
            model=model,
            n_total=args.T,
            n_blocks=m,
            replications=args.reps,
            seed=args.seed,
            workers=_workers(args),
            bias_mode=args.bias_mode,
        )
        columns[m] = density_samples(config)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"M={m}" for m in block_counts])
        for row in zip(*(columns[m] for m in block_counts)):
            writer.writerow([repr(float(v)) for v in row])
    _write_manifest(
        args.out,
        argv,
        {
            "input": args.model,
            "T": args.T,
            "M": block_counts,
            "alphas": [],
            "seed": args.seed,
            "replications": args.reps,
        },
        started,
    )
    return 0


def cmd_suggest(args, _argv) -> int:
    pieces = []
    try:
        m, n = suggest_blocks(args.T, mode="divisor")
        pieces.append(f"divisor: M={m} N={n}")
    except BlockDesignError:
        pieces.append("divisor: none (no admissible divisor; truncate the series)")
    m, n = suggest_blocks(args.T, mode="ceil")
    kept = m * n
    note = "" if kept == args.T else f" (truncate to T={kept})"
    pieces.append(f"ceil: M={m} N={n}{note}")
    print("; ".join(pieces))
    return 0


def cmd_rerun(args, _argv) -> int:
    with open(args.manifest) as handle:
        manifest = json.load(handle)
    if manifest.get("schema") != MANIFEST_SCHEMA:
        raise CliError(f"{args.manifest}: not a ftstest manifest")
    return main(manifest["command"])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftstest",
        description="Frequency-domain stationarity test for functional time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the stationarity test on a CSV of curves")
    p_test.add_argument("input", help="CSV: one row per time point, G values per row")
    p_test.add_argument("--blocks", default="auto", help="block count M or 'auto'")
    p_test.add_argument("--alpha", type=float, default=0.05)
    p_test.add_argument("--bias-mode", choices=("scaled", "literal"), default="scaled")
    p_test.add_argument("--out", help="write the JSON report here (with a manifest)")
    p_test.set_defaults(func=cmd_test)

    p_sim = sub.add_parser("simulate", help="Monte Carlo rejection-rate table")
    p_sim.add_argument("--model", required=True, help="preset I..VI or TOML config path")
    p_sim.add_argument("--T", type=int, required=True)
    p_sim.add_argument("--M", type=int, required=True)
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--alphas", default="0.1,0.05,0.01")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--workers", type=int, default=None,
                       help="overrides FTSTEST_WORKERS (default 1)")
    p_sim.add_argument("--bias-mode", choices=("scaled", "literal"), default="scaled")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_den = sub.add_parser("density", help="per-M standardized statistic samples")
    p_den.add_argument("--model", required=True)
    p_den.add_argument("--T", type=int, default=4096)
    p_den.add_argument("--M", required=True, help="comma-separated block counts")
    p_den.add_argument("--reps", type=int, default=500)
    p_den.add_argument("--seed", type=int, default=0)
    p_den.add_argument("--workers", type=int, default=None)
    p_den.add_argument("--bias-mode", choices=("scaled", "literal"), default="scaled")
    p_den.add_argument("--out", required=True)
    p_den.set_defaults(func=cmd_density)

    p_sug = sub.add_parser("suggest", help="suggest block counts for a series length")
    p_sug.add_argument("--T", type=int, required=True)
    p_sug.set_defaults(func=cmd_suggest)

    p_rer = sub.add_parser("rerun", help="re-execute a run from its manifest")
    p_rer.add_argument("manifest")
    p_rer.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except (CliError, BlockDesignError, DegenerateSeriesError, ValueError, OSError) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
