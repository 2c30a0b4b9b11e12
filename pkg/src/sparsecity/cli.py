"""Benchmark command line.

Subcommands: gen, rip, recover, phase, embed, baseline.  Every run writes a
CSV or JSON artifact stamped with the hash of its experiment manifest;
experiment tables additionally get a companion figure (same stem, .png)
unless --no-plot is given.  Reruns with the same command line, seed, and
library version produce byte-identical CSV/JSON, independent of --threads.

A plain-text config file (``key = value`` lines, '#' comments) can supply
defaults for any long option of the chosen subcommand; explicit flags win.

Exit codes: 0 success, 2 argument error, 3 budget exceeded, 4 solver did not
converge (the result file is still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, baselines, embedding, plotting, recovery, rip
from .ensemble import SparseCityMatrix, distribution_from_name
from .errors import BudgetError
from .manifest import ExperimentManifest, format_cell, parse_config, write_csv, write_json
from .rng import derive_seed, make_rng

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_SOLVER = 4


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _add_matrix_args(sub, require_dims=True):
    sub.add_argument("--m", type=int, required=require_dims, help="rows (a power of two)")
    sub.add_argument("--n", type=int, required=require_dims, help="columns kept per block")
    sub.add_argument("--b", type=int, required=require_dims, help="number of blocks")
    sub.add_argument("--seed", type=int, default=0, help="construction seed")
    sub.add_argument(
        "--dist",
        choices=["fourpoint", "rademacher"],
        default="fourpoint",
        help="diagonal entry distribution",
    )
    sub.add_argument(
        "--unnormalized",
        action="store_true",
        help="use the raw four-value law (second moment 5) instead of the unit-variance scaling",
    )


def _add_common_args(sub):
    sub.add_argument("--out", required=True, help="output file (.json or .csv)")
    sub.add_argument("--threads", type=int, default=1, help="cap on internal parallelism")
    sub.add_argument("--no-plot", action="store_true", help="skip the companion figure")
    sub.add_argument("--config", default=None, help="key = value defaults file")


def _dist_from_args(args):
    return distribution_from_name(args.dist, normalized=not args.unnormalized)


def _matrix_from_args(args) -> SparseCityMatrix:
    matrix = SparseCityMatrix(args.m, args.n, args.b, args.seed, _dist_from_args(args))
    if not matrix.in_theorem_regime:
        print(
            f"warning: m = {matrix.m} exceeds nb = {matrix.N}; "
            "isometry guarantees assume m <= nb",
            file=sys.stderr,
        )
    return matrix


def _matrix_params(args) -> dict:
    return {
        "m": args.m,
        "n": args.n,
        "b": args.b,
        "seed": args.seed,
        "dist_name": args.dist,
        "normalized": not args.unnormalized,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecity",
        description="Benchmarks for block-structured random Walsh measurement ensembles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="construct an ensemble and persist its manifest")
    _add_matrix_args(gen)
    _add_common_args(gen)
    gen.add_argument("--dense", default=None, help="also dump the dense matrix to this CSV")

    rip_cmd = commands.add_parser("rip", help="restricted-isometry diagnostics")
    _add_matrix_args(rip_cmd)
    _add_common_args(rip_cmd)
    rip_cmd.add_argument("--mode", choices=["exact", "mc", "scan", "tail"], required=True)
    rip_cmd.add_argument("--s", type=int, required=True, help="sparsity order")
    rip_cmd.add_argument("--trials", type=int, default=50, help="constructions per grid point")
    rip_cmd.add_argument("--supports", type=int, default=2000, help="sampled supports (mc mode)")
    rip_cmd.add_argument("--delta", type=float, default=0.5, help="threshold (tail mode)")
    rip_cmd.add_argument(
        "--grid-m", type=_int_list, default=None, help="row counts for scan/tail, e.g. 32,64,128"
    )

    recover = commands.add_parser("recover", help="solve one synthetic recovery instance")
    _add_matrix_args(recover)
    _add_common_args(recover)
    recover.add_argument("--s", type=int, required=True, help="signal sparsity")
    recover.add_argument(
        "--solver", choices=["omp", "iht", "basis_pursuit"], default="basis_pursuit"
    )
    recover.add_argument(
        "--signal-seed", type=int, default=None, help="defaults to a seed derived from --seed"
    )

    phase = commands.add_parser("phase", help="recovery success-rate sweep over sparsity")
    _add_matrix_args(phase)
    _add_common_args(phase)
    phase.add_argument("--s-grid", type=_int_list, required=True, help="sparsity grid, e.g. 1,2,4")
    phase.add_argument("--trials", type=int, default=100)
    phase.add_argument(
        "--solver", choices=["omp", "iht", "basis_pursuit"], default="omp"
    )

    embed = commands.add_parser("embed", help="distortion or classification experiment")
    _add_common_args(embed)
    embed.add_argument("--report", choices=["distortion", "src"], required=True)
    embed.add_argument("--m", type=int, default=None, help="projected dimension (distortion)")
    embed.add_argument("--n", type=int, default=None)
    embed.add_argument("--b", type=int, default=None)
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--dist", choices=["fourpoint", "rademacher"], default="fourpoint")
    embed.add_argument("--unnormalized", action="store_true")
    embed.add_argument("--points", type=int, default=20, help="point count (distortion)")
    embed.add_argument("--eps", type=float, default=0.5, help="distortion tolerance")
    embed.add_argument("--classes", type=int, default=5)
    embed.add_argument("--ambient", type=int, default=128)
    embed.add_argument("--subspace", type=int, default=4)
    embed.add_argument("--samples", type=int, default=10, help="training samples per class")
    embed.add_argument("--trials", type=int, default=50)
    embed.add_argument("--noise", type=float, default=0.0)
    embed.add_argument(
        "--ratio", type=float, default=0.0, help="compression ratio; 0 disables projection"
    )
    embed.add_argument("--solver", choices=["omp", "basis_pursuit"], default="omp")

    base = commands.add_parser("baseline", help="construct a baseline ensemble")
    _add_common_args(base)
    base.add_argument("--kind", choices=list(baselines.BASELINE_KINDS), required=True)
    base.add_argument("--m", type=int, default=None)
    base.add_argument("--N", dest="n_cols", type=int, default=None)
    base.add_argument("--W", dest="bandwidth", type=int, default=None)
    base.add_argument("--R", dest="rate", type=int, default=None)
    base.add_argument("--seed", type=int, default=0)
    base.add_argument("--rip-s", type=int, default=None, help="also run the exact constant")

    return parser


def cmd_gen(args) -> int:
    matrix = _matrix_from_args(args)
    manifest = ExperimentManifest("gen", _matrix_params(args))
    payload = {"matrix": matrix.manifest_dict(), "in_theorem_regime": matrix.in_theorem_regime}
    if args.dense:
        dense = matrix.to_dense()
        lines = [f"# manifest_hash={manifest.content_hash}"]
        lines += [",".join(format_cell(v) for v in row) for row in dense]
        Path(args.dense).write_text("\n".join(lines) + "\n", encoding="ascii")
        payload["dense_dump"] = str(args.dense)
    write_json(args.out, manifest, payload)
    return EXIT_OK


def cmd_rip(args) -> int:
    dist = _dist_from_args(args)
    params = _matrix_params(args)
    params.update({"mode": args.mode, "s": args.s})
    if args.mode == "exact":
        matrix = _matrix_from_args(args)
        report = rip.delta_exact(matrix, args.s)
        write_json(args.out, ExperimentManifest("rip", params), {"report": report.to_dict()})
        return EXIT_OK
    if args.mode == "mc":
        matrix = _matrix_from_args(args)
        params["supports"] = args.supports
        report = rip.delta_monte_carlo(
            matrix, args.s, args.supports, derive_seed(args.seed, "mc")
        )
        write_json(args.out, ExperimentManifest("rip", params), {"report": report.to_dict()})
        return EXIT_OK

    grid_m = args.grid_m or [args.m]
    out_of_regime = [m for m in grid_m if m > args.n * args.b]
    if out_of_regime:
        print(
            f"warning: grid points m = {out_of_regime} exceed nb = {args.n * args.b}; "
            "isometry guarantees assume m <= nb",
            file=sys.stderr,
        )
    params.update({"grid_m": grid_m, "trials": args.trials})
    if args.mode == "scan":
        rows = rip.expectation_scan(
            [(m, args.n, args.b) for m in grid_m],
            args.s,
            args.trials,
            args.seed,
            dist=dist,
            threads=args.threads,
        )
        fields = [
            "m", "n", "b", "s", "trials",
            "mean_value", "std_value", "bound_proxy", "method", "degenerate",
        ]
        manifest = ExperimentManifest("rip", params)
        write_csv(args.out, fields, [_row_dict(r) for r in rows], manifest)
        if not args.no_plot:
            plotting.render_scan(rows, args.out)
        return EXIT_OK

    # tail
    params["delta"] = args.delta
    manifest = ExperimentManifest("rip", params)
    points = []
    rows = []
    for m in grid_m:
        estimate = rip.tail_estimate(
            m, args.n, args.b, args.s, args.delta, args.trials, args.seed,
            dist=dist, threads=args.threads,
        )
        points.append((m, estimate.probability))
        rows.append(
            {
                "m": m, "n": args.n, "b": args.b, "s": args.s, "delta": args.delta,
                "trials": estimate.trials, "exceed_count": estimate.exceed_count,
                "probability": estimate.probability, "method": estimate.method,
            }
        )
    fields = ["m", "n", "b", "s", "delta", "trials", "exceed_count", "probability", "method"]
    write_csv(args.out, fields, rows, manifest)
    if not args.no_plot:
        plotting.render_tail(points, args.delta, args.out)
    return EXIT_OK


class _row_dict:
    """Adapter so dataclass rows can be passed to write_csv as mappings."""

    def __init__(self, row):
        self._row = row

    def __getitem__(self, key):
        return getattr(self._row, key)


def cmd_recover(args) -> int:
    matrix = _matrix_from_args(args)
    signal_seed = (
        args.signal_seed if args.signal_seed is not None else derive_seed(args.seed, "signal")
    )
    x_true = recovery.random_sparse_signal(matrix.N, args.s, signal_seed)
    problem = recovery.RecoveryProblem(matrix, matrix.apply(x_true), s=args.s, ground_truth=x_true)
    result = recovery.get_solver(args.solver)(problem)
    params = _matrix_params(args)
    params.update({"s": args.s, "solver": args.solver, "signal_seed": signal_seed})
    payload = {
        "result": {
            "x_hat": result.x_hat.tolist(),
            "support": list(result.support),
            "residual": result.residual,
            "iterations": result.iterations,
            "relative_error": result.relative_error,
            "success": result.success,
            "converged": result.converged,
            "message": result.message,
        }
    }
    write_json(args.out, ExperimentManifest("recover", params), payload)
    return EXIT_OK if result.converged else EXIT_SOLVER


def cmd_phase(args) -> int:
    dist = _dist_from_args(args)

    def factory(seed):
        return SparseCityMatrix(args.m, args.n, args.b, seed, dist)

    rows = recovery.phase_transition(
        factory, args.s_grid, args.trials, args.solver, args.seed, threads=args.threads
    )
    params = _matrix_params(args)
    del params["seed"]
    params.update(
        {"master_seed": args.seed, "s_grid": args.s_grid, "trials": args.trials,
         "solver": args.solver}
    )
    fields = ["s", "trials", "successes", "rate", "mean_iterations", "mean_residual", "solver"]
    write_csv(args.out, fields, [_row_dict(r) for r in rows], ExperimentManifest("phase", params))
    if not args.no_plot:
        plotting.render_phase(rows, args.out)
    return EXIT_OK


def _projector_dims(ambient: int, ratio: float) -> tuple[int, int, int]:
    """Choose (m, n, b) for a projector: m rows from the compression ratio,
    the largest block width n <= m dividing the ambient dimension."""
    m = int(round(ambient / ratio))
    if m < 1 or (m & (m - 1)) != 0:
        raise ValueError(
            f"ambient/ratio must give a power-of-two row count, got {ambient}/{ratio}"
        )
    for n in range(min(m, ambient), 0, -1):
        if ambient % n == 0:
            return m, n, ambient // n
    raise ValueError("unreachable")


def cmd_embed(args) -> int:
    dist = distribution_from_name(args.dist, normalized=not args.unnormalized)
    if args.report == "distortion":
        if args.m is None or args.n is None or args.b is None:
            raise ValueError("distortion report needs --m, --n and --b")
        base = SparseCityMatrix(args.m, args.n, args.b, derive_seed(args.seed, "base"), dist)
        projector = embedding.make_projector(base, derive_seed(args.seed, "signs"))
        rng = make_rng(derive_seed(args.seed, "points"))
        points = [rng.standard_normal(base.N) for _ in range(args.points)]
        report = embedding.distortion_report(projector, points, args.eps)
        params = {
            "report": "distortion", "m": args.m, "n": args.n, "b": args.b,
            "seed": args.seed, "dist_name": args.dist,
            "normalized": not args.unnormalized,
            "points": args.points, "eps": args.eps,
        }
        manifest = ExperimentManifest("embed", params)
        write_json(
            args.out,
            manifest,
            {
                "max_distortion": report.max_distortion,
                "violating_pairs": report.violating_pairs,
                "pairs_evaluated": report.pairs_evaluated,
                "duplicates_skipped": report.duplicates_skipped,
                "eps": report.eps,
            },
        )
        if not args.no_plot:
            distortions, _ = embedding.pair_distortions(projector, points)
            plotting.render_distortion(report, distortions, args.out)
        return EXIT_OK

    projector_factory = None
    if args.ratio > 0:
        m, n, b = _projector_dims(args.ambient, args.ratio)

        def projector_factory(seed, m=m, n=n, b=b):
            base = SparseCityMatrix(m, n, b, derive_seed(seed, "base"), dist)
            return embedding.make_projector(base, derive_seed(seed, "signs"))

    report = embedding.classification_experiment(
        args.classes,
        args.ambient,
        args.subspace,
        args.samples,
        trials=args.trials,
        seed=args.seed,
        projector_factory=projector_factory,
        solver=args.solver,
        noise=args.noise,
        threads=args.threads,
    )
    params = {
        "report": "src", "classes": args.classes, "ambient": args.ambient,
        "subspace": args.subspace, "samples": args.samples, "trials": args.trials,
        "seed": args.seed, "solver": args.solver, "noise": args.noise,
        "ratio": args.ratio, "dist_name": args.dist, "normalized": not args.unnormalized,
    }
    manifest = ExperimentManifest("embed", params)
    write_json(
        args.out,
        manifest,
        {
            "accuracy": report.accuracy,
            "per_class_confusion": report.per_class_confusion,
            "compression_ratio": report.compression_ratio,
            "solver": report.solver,
            "trials": report.trials,
        },
    )
    if not args.no_plot:
        plotting.render_confusion(
            np.asarray(report.per_class_confusion), report.accuracy, args.out
        )
    return EXIT_OK


def cmd_baseline(args) -> int:
    if args.kind == "random_demodulator":
        if args.bandwidth is None or args.rate is None:
            raise ValueError("random_demodulator needs --W and --R")
        matrix = baselines.random_demodulator(args.bandwidth, args.rate, args.seed)
        params = {"kind": args.kind, "W": args.bandwidth, "R": args.rate, "seed": args.seed}
    else:
        if args.m is None or args.n_cols is None:
            raise ValueError(f"{args.kind} needs --m and --N")
        if args.kind in ("subsampled_fourier", "subsampled_hadamard"):
            matrix = baselines.subsampled_orthogonal(args.kind, args.m, args.n_cols, args.seed)
        else:
            matrix = baselines.partial_toeplitz(
                args.m, args.n_cols, args.seed, circulant=(args.kind == "partial_circulant")
            )
        params = {"kind": args.kind, "m": args.m, "N": args.n_cols, "seed": args.seed}
    payload = {
        "matrix": matrix.manifest_dict(),
        "column_norm_stats": matrix.column_norm_stats(),
        "in_theorem_regime": matrix.in_theorem_regime,
    }
    if args.rip_s is not None:
        params["rip_s"] = args.rip_s
        payload["rip"] = rip.delta_exact(matrix, args.rip_s).to_dict()
    write_json(args.out, ExperimentManifest("baseline", params), payload)
    return EXIT_OK


_HANDLERS = {
    "gen": cmd_gen,
    "rip": cmd_rip,
    "recover": cmd_recover,
    "phase": cmd_phase,
    "embed": cmd_embed,
    "baseline": cmd_baseline,
}


def _inject_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Append config-file values as options the user did not set explicitly."""
    if "--config" not in argv:
        return argv
    config_path = argv[argv.index("--config") + 1]
    settings = parse_config(config_path)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    subparsers = next(
        act for act in parser._actions if isinstance(act, argparse._SubParsersAction)
    )
    if command not in subparsers.choices:
        return argv
    # _option_string_actions is argparse's own option registry; stable since 2.7
    options = subparsers.choices[command]._option_string_actions
    extra: list[str] = []
    for key, value in settings.items():
        flag = "--" + key.replace("_", "-")
        if flag not in options:
            raise ValueError(f"config key {key!r} is not an option of '{command}'")
        if any(tok == flag or tok.startswith(flag + "=") for tok in argv):
            continue  # explicit flag wins
        if options[flag].nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                extra.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ValueError(f"config key {key!r} expects a boolean, got {value!r}")
        else:
            extra.extend([flag, value])
    return argv + extra


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def cli_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_entry()
