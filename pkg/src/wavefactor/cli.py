"""Command-line surface: generate, factorize, evaluate, filter-response, benchmark.

Every command writes its fully-resolved configuration next to its outputs
so a run can be reproduced from the config file alone.  Exit codes:
0 success, 1 usage error, 2 data/IO error, 3 numerical failure.
"""

import argparse
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from wavefactor import datagen, matio, metrics
from wavefactor.errors import NumericalError
from wavefactor.polar import LineSearchConfig
from wavefactor.solver import SolverConfig, factorize
from wavefactor.spectral import FilterSpec, build_laplacian, eigendecompose, filter_coefficients

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

REPORT_COLUMNS = [
    "dataset",
    "snr_db",
    "trials",
    "mse_e3_mean",
    "mse_e3_std",
    "fmse_e3_mean",
    "fmse_e3_std",
]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors instead of argparse's 2
        self.print_usage(sys.stderr)
        raise CliError(message, EXIT_USAGE)


def _parse_snr(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _fmt_snr(snr: float) -> str:
    return "inf" if math.isinf(snr) else f"{snr:g}"


def _outdir(path: str) -> Path:
    out = Path(os.environ.get("WAVEFACTOR_OUT_ROOT", "")) / path
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", EXIT_DATA)
    return out


def _write_config(out: Path, name: str, resolved: dict) -> None:
    matio.save_meta(out / name, resolved)


def cmd_generate(args) -> int:
    try:
        kind = datagen.Kind(args.kind)
    except ValueError:
        raise CliError(f"invalid kind {args.kind!r}", EXIT_USAGE)
    out = _outdir(args.out)
    dataset = datagen.generate(kind, seed=args.seed, randomize_ab=args.random_ab)
    snr = _parse_snr(args.snr)
    dataset = datagen.add_noise(dataset, snr, seed=args.seed)
    matio.save_matrix(out / "Y.csv", dataset.Y)
    matio.save_matrix(out / "truth.csv", dataset.ground_truth_modes)
    grid, params = dataset.grid, dataset.params
    _write_config(
        out,
        "meta.cfg",
        {
            "kind": kind.value,
            "seed": args.seed,
            "snr_db": _fmt_snr(snr),
            "random_ab": args.random_ab,
            "delta_l": grid.delta_l,
            "length_l": grid.length_l,
            "delta_t": grid.delta_t,
            "length_t": grid.length_t,
            "n_d": grid.n_d,
            "n_t": grid.n_t,
            "n_modes": params.n_modes,
            "delta": params.delta,
            "k": params.k,
            "omega": params.omega,
            "alpha": params.alpha,
            "beta": params.beta,
            "a": params.a,
            "b": params.b,
            "truth_columns": dataset.ground_truth_modes.shape[1],
        },
    )
    print(
        f"wrote {dataset.Y.shape[0]}x{dataset.Y.shape[1]} matrix, "
        f"{dataset.ground_truth_modes.shape[1]} ground-truth modes -> {out}"
    )
    return 0


def cmd_factorize(args) -> int:
    indir = Path(args.input)
    y_path = indir / "Y.csv"
    if not y_path.exists():
        raise CliError(f"dataset file {y_path} not found", EXIT_DATA)
    Y = matio.load_matrix(y_path)
    meta = matio.load_meta(indir / "meta.cfg") if (indir / "meta.cfg").exists() else {}
    out = _outdir(args.out)

    n_modes = args.max_modes
    if n_modes is None and "truth_columns" in meta:
        n_modes = int(meta["truth_columns"])
    delta = args.delta if args.delta is not None else float(meta.get("delta", 1.0))
    if args.lambda_reg is not None:
        lam = args.lambda_reg
        lam_flagged = False
    else:
        lam, lam_flagged = datagen.lambda_rule(Y, n_modes or min(Y.shape))
    gamma = args.gamma if args.gamma is not None else datagen.gamma_rule(Y.shape[0], delta)

    cfg = SolverConfig(
        epsilon=args.epsilon,
        max_modes=n_modes,
        seed=args.seed,
        line_search=LineSearchConfig(),
    )
    _write_config(
        out,
        "config.cfg",
        {
            "input": str(indir),
            "lambda": lam,
            "lambda_rank_flagged": lam_flagged,
            "gamma": gamma,
            "delta": delta,
            "epsilon": cfg.epsilon,
            "max_modes": n_modes if n_modes is not None else "none",
            "max_outer_iters": cfg.max_outer_iters,
            "max_inner_iters": cfg.max_inner_iters,
            "seed": args.seed,
        },
    )
    try:
        model, trace = factorize(Y, cfg, lambda_reg=lam, gamma_reg=gamma)
    except NumericalError as exc:
        _write_trace(out / "trace.csv", [])
        raise CliError(f"solver failed: {exc}", EXIT_NUMERICAL)
    matio.save_matrix(out / "D.csv", model.D)
    matio.save_matrix(out / "X.csv", model.X)
    matio.save_matrix(out / "k.csv", model.k_bar)
    _write_trace(out / "trace.csv", trace.records)
    print(
        f"factorized into {model.n_modes} modes "
        f"(stop: {trace.stop_reason}, final polar {trace.records[-1].polar_value:.6g})"
    )
    return 0


def _write_trace(path: Path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["outer", "objective", "polar_value", "n_modes", "inner_iters"])
        for r in records:
            writer.writerow([r.outer, f"{r.objective:.17g}", f"{r.polar_value:.17g}", r.n_modes, r.inner_iters])


def cmd_evaluate(args) -> int:
    rec_path, truth_path = Path(args.recovered), Path(args.truth)
    for p in (rec_path, truth_path):
        if not p.exists():
            raise CliError(f"input file {p} not found", EXIT_DATA)
    recovered = matio.load_matrix(rec_path)
    truth = matio.load_matrix(truth_path)
    if recovered.shape[0] != truth.shape[0]:
        raise CliError(
            f"shape mismatch: recovered has {recovered.shape[0]} rows, truth {truth.shape[0]}",
            EXIT_DATA,
        )
    match = metrics.match_modes(recovered, truth)
    mse = metrics.mode_mse(recovered, truth, match)
    fmse = metrics.fourier_mse(recovered, truth, match)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        writer.writerow(
            [args.dataset, args.snr, 1, f"{mse * 1e3:.6g}", 0, f"{fmse * 1e3:.6g}", 0]
        )
    print(f"mse_e3 = {mse * 1e3:.6g}, fmse_e3 = {fmse * 1e3:.6g}")
    return 0


def cmd_filter_response(args) -> int:
    if not 0.0 <= args.k_bar <= 4.0:
        raise CliError(f"k_bar must lie in [0, 4], got {args.k_bar}", EXIT_USAGE)
    basis = eigendecompose(build_laplacian(args.n))
    coeffs = filter_coefficients(basis, FilterSpec(k_bar=args.k_bar, gamma_reg=args.gamma))
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eigenvalue", "coefficient"])
        for lam, c in zip(basis.lam, coeffs):
            writer.writerow([f"{lam:.17g}", f"{c:.17g}"])
    print(f"wrote {args.n} (eigenvalue, coefficient) pairs -> {out_path}")
    return 0


def cmd_benchmark(args) -> int:
    kinds = args.kind or [k.value for k in datagen.Kind]
    snrs = [_parse_snr(s) for s in args.snr]
    out = _outdir(args.out)
    _write_config(
        out,
        "config.cfg",
        {
            "kinds": " ".join(kinds),
            "snr_db": " ".join(_fmt_snr(s) for s in snrs),
            "trials": args.trials,
            "seed": args.seed,
            "threads": args.threads,
        },
    )
    rows = []
    for kind in kinds:
        for snr in snrs:
            seeds = [args.seed + i for i in range(args.trials)]
            row = {"dataset": kind, "snr_db": _fmt_snr(snr), "trials": args.trials}
            for method in ("wimf", "pca"):
                try:
                    rep = metrics.monte_carlo(kind, snr, args.trials, seeds=seeds, method=method)
                except Exception as exc:  # per-cell failure; run continues
                    print(f"[benchmark] {kind} @ {_fmt_snr(snr)} dB {method} failed: {exc}", file=sys.stderr)
                    row.update({f"{method}_{c}": "nan" for c in REPORT_COLUMNS[3:]})
                    continue
                row.update(
                    {
                        f"{method}_mse_e3_mean": f"{rep.mse_mean * 1e3:.6g}",
                        f"{method}_mse_e3_std": f"{rep.mse_std * 1e3:.6g}",
                        f"{method}_fmse_e3_mean": f"{rep.fourier_mse_mean * 1e3:.6g}",
                        f"{method}_fmse_e3_std": f"{rep.fourier_mse_std * 1e3:.6g}",
                    }
                )
                print(
                    f"[benchmark] {kind} @ {_fmt_snr(snr)} dB {method}: "
                    f"mse_e3 = {rep.mse_mean * 1e3:.4g} +/- {rep.mse_std * 1e3:.4g}"
                )
            rows.append(row)
    columns = ["dataset", "snr_db", "trials"] + [
        f"{m}_{c}" for m in ("wimf", "pca") for c in REPORT_COLUMNS[3:]
    ]
    with open(out / "benchmark.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows -> {out / 'benchmark.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavefactor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic dataset")
    p.add_argument("--kind", required=True)
    p.add_argument("--snr", default="inf", help="SNR in dB, or 'inf'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-ab", action="store_true", help="randomize temporal mixing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("factorize", help="factorize a generated dataset")
    p.add_argument("--in", dest="input", required=True, help="directory with Y.csv")
    p.add_argument("--out", required=True)
    p.add_argument("--lambda", dest="lambda_reg", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--max-modes", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("evaluate", help="score recovered modes against ground truth")
    p.add_argument("--recovered", required=True, help="D.csv from factorize")
    p.add_argument("--truth", required=True, help="truth.csv from generate")
    p.add_argument("--dataset", default="unknown")
    p.add_argument("--snr", default="unknown")
    p.add_argument("--out", required=True, help="report CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("filter-response", help="emit (eigenvalue, coefficient) pairs")
    p.add_argument("--k-bar", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_response)

    p = sub.add_parser("benchmark", help="Monte-Carlo sweep with the PCA baseline")
    p.add_argument("--kind", action="append", help="repeatable; default: all kinds")
    p.add_argument("--snr", action="append", required=True, help="repeatable; dB or 'inf'")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("WAVEFACTOR_THREADS", "1")),
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
