"""Command-line front end: ``python src/main.py <command> ...``.

Results go to stdout (or ``--out``), diagnostics to stderr. Exit codes: 0 ok,
2 unparsable or unsupported input, 3 validation failure, 4 non-convergence.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from math import ceil

from ensembles import MC_CHUNK, RngSeed, mc_entangling_power
from entanglement import bipartitions
from epower import bound_gap_terms, epower_one_tangle, upper_bound
from errors import ArgumentError, EPowerError, NonConvergenceError
from gate_files import resolve_gate, write_atomic
from settings import SETTINGS, load_settings
from sweeps import (
    FIGURE_DIMS,
    means_report,
    ensemble_histogram,
    maximize_diagonal,
    permutation_census,
    scaling_qudit_d,
    scaling_qudit_n,
    three_qubit_summary,
)

logger = logging.getLogger(__name__)

DIAGONAL_TOL = 1e-8


def _num(value) -> str:
    return repr(float(value))


def _exact(value: Fraction) -> str:
    return f"{value} ({float(value):.12g})"


def _csv(header: list[str], rows: list[list], comments: list[str] = ()) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(cell) for cell in row) for row in rows]
    lines += [f"# {comment}" for comment in comments]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    # the whole document is built before anything is written
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)
        logger.info("wrote %s", out)


def _seed(args) -> RngSeed:
    return RngSeed(args.seed, 0)


def _mc(gate, n_samples: int, seed: RngSeed, workers: int):
    shards = max(1, ceil(n_samples / MC_CHUNK))
    return mc_entangling_power(gate, n_samples, seed, shards=shards, workers=workers)


# ====== Commands ======

def cmd_gate(args) -> int:
    gate = resolve_gate(args.gate, default_dims=args.dims)
    report = epower_one_tangle(gate)
    bound = upper_bound(gate.dims)
    payload = report.as_dict()
    payload["gate"] = args.gate
    payload["upper_bound"] = float(bound)

    estimate = None
    if args.mc_samples > 0:
        estimate = _mc(gate, args.mc_samples, _seed(args), args.workers)
        payload["mc"] = {"estimate": estimate.estimate, "std_error": estimate.std_error, "n_samples": estimate.n_samples}

    if args.json:
        print(json.dumps(payload, indent=2))
        return 0

    print(f"gate: {args.gate}")
    print(f"dims: {' '.join(str(d) for d in gate.dims)}")
    for split, value in report.per_bipartition.items():
        print(f"  eps[{split.label()}] = {value:.12f}")
    print(f"eps_1 = {report.total:.12f}")
    print(f"upper bound = {_exact(bound)}")
    if estimate is not None:
        deviation = abs(estimate.estimate - report.total) / estimate.std_error if estimate.std_error > 0 else 0.0
        print(f"MC ({estimate.n_samples} samples, seed {args.seed}) = "
              f"{estimate.estimate:.6f} +- {estimate.std_error:.6f} ({deviation:.2f} sigma)")
    return 0


def cmd_permutations(args) -> int:
    table = permutation_census(args.qubits, workers=args.workers)
    comments = [
        f"classes {len(table.rows)}",
        f"total {table.total}",
        f"mean {table.mean()}",
        f"max {table.maximum()}",
        f"max_residual {table.max_residual:.3e}",
    ]
    _emit(_csv(["epsilon_times_162", "count"], [list(row) for row in table.rows], comments), args.out)
    return 0


def cmd_histogram(args) -> int:
    data = ensemble_histogram(args.ensemble, args.samples, args.bins, _seed(args), args.workers)
    rows = [
        [_num(left), _num(right), _num(p)]
        for left, right, p in zip(data.edges[:-1], data.edges[1:], data.probabilities)
    ]
    comments = [
        f"ensemble {data.ensemble}",
        f"n_samples {data.sample.n_samples}",
        f"mean {_num(data.sample.estimate)}",
        f"std_error {_num(data.sample.std_error)}",
        f"min {_num(data.minimum)}",
        f"max {_num(data.maximum)}",
    ]
    _emit(_csv(["bin_left", "bin_right", "probability"], rows, comments), args.out)
    return 0


def cmd_scaling(args) -> int:
    match args.mode:
        case "qudit-d":
            if args.d_min > args.d_max:
                raise ArgumentError(f"empty d range {args.d_min}..{args.d_max}")
            rows = scaling_qudit_d(range(args.d_min, args.d_max + 1), n=args.n)
            text = _csv(
                ["d", "mean_unitary", "upper_bound", "max_tau_one"],
                [[r.d, _num(r.mean_unitary), _num(r.upper_bound), _num(r.max_tau_one)] for r in rows],
                [f"n {args.n}"],
            )
        case "qudit-n":
            if args.n_min > args.n_max:
                raise ArgumentError(f"empty n range {args.n_min}..{args.n_max}")
            rows = scaling_qudit_n(range(args.n_min, args.n_max + 1), args.d)
            text = _csv(
                ["n", "d", "unitary_over_bound", "orthogonal_over_unitary"],
                [[r.n, r.d, _num(r.unitary_over_bound), _num(r.orthogonal_over_unitary)] for r in rows],
            )
    _emit(text, args.out)
    return 0


def cmd_diag_maximize(args) -> int:
    result = maximize_diagonal(args.grid, _seed(args), restarts=args.restarts)
    if result.gap > DIAGONAL_TOL:
        raise NonConvergenceError(
            f"diagonal maximum {result.value:.15f} is {result.gap:.3e} away from 16/27",
            diagnostics={"deltas": list(result.deltas), "gradient_norm": result.gradient_norm},
        )
    if args.json:
        print(json.dumps({
            "deltas": list(result.deltas),
            "max": result.value,
            "gap": result.gap,
            "gradient_norm": result.gradient_norm,
            "restarts_used": result.restarts_used,
            "closed_form_at_maximizer": result.closed_form_value,
        }, indent=2))
        return 0
    print(f"argmax delta = ({', '.join(f'{d:.12f}' for d in result.deltas)})")
    print(f"max eps_1 = {result.value:.15f}")
    print(f"|max - 16/27| = {result.gap:.3e}")
    print(f"gradient norm = {result.gradient_norm:.3e} (grid {result.grid}^3, {result.restarts_used} restarts)")
    print(f"closed form at the maximizer = {result.closed_form_value:.15f}")
    return 0


def cmd_means(args) -> int:
    if args.qudit is not None:
        n, d = args.qudit
        dims = (d,) * n
    else:
        dims = tuple(args.dims)
    report = means_report(dims, args.mc_samples, _seed(args), args.workers)

    if args.json:
        payload = {
            "dims": list(report.dims.dims),
            "mean_unitary": str(report.mean_unitary),
            "mean_orthogonal": str(report.mean_orthogonal),
            "upper_bound": str(report.upper_bound),
            "sampled": {
                name: {"estimate": e.estimate, "std_error": e.std_error, "n_samples": e.n_samples}
                for name, e in report.sampled.items()
            },
        }
        print(json.dumps(payload, indent=2))
        return 0

    print(f"dims: {' '.join(str(d) for d in report.dims)}")
    print(f"mean over U = {_exact(report.mean_unitary)}")
    print(f"mean over O = {_exact(report.mean_orthogonal)}")
    print(f"upper bound = {_exact(report.upper_bound)}")
    for name, estimate in report.sampled.items():
        print(f"MC {name} ({estimate.n_samples} samples) = {estimate.estimate:.6f} +- {estimate.std_error:.6f}")
    return 0


def cmd_summary(args) -> int:
    rows = three_qubit_summary(args.samples, _seed(args), args.workers)
    text = _csv(
        ["ensemble", "analytic_mean", "analytic_max", "sample_min", "sample_mean", "sample_std_error", "sample_max"],
        [
            [r.ensemble, r.analytic_mean, r.analytic_max, _num(r.sample_min), _num(r.sample.estimate),
             _num(r.sample.std_error), _num(r.sample_max)]
            for r in rows
        ],
        [f"samples {args.samples}", f"seed {args.seed}"],
    )
    _emit(text, args.out)
    return 0


def cmd_bound_gaps(args) -> int:
    gate = resolve_gate(args.gate, default_dims=args.dims)
    n = gate.dims.n_parties
    rows = []
    for split in bipartitions(n):
        for term in bound_gap_terms(gate, split):
            primed = "".join(str(p) for p in sorted(term.extended.primed_left)) or "-"
            rows.append([split.label(), primed, _num(term.weight), term.max_tangle, _num(term.tangle), _num(term.gap)])
    _emit(_csv(["split", "primed_side", "weight", "max_tangle", "tangle", "gap"], rows), args.out)
    return 0


# ====== Parser ======

def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epower",
        description="Entangling power of multipartite gates with respect to the one-tangle.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, func, summary: str, seeded: bool = False, parallel: bool = False, out: bool = False):
        sub = commands.add_parser(name, help=summary)
        sub.set_defaults(func=func)
        if seeded:
            sub.add_argument("--seed", type=_non_negative, default=0, help="RNG seed (default 0)")
        if parallel:
            sub.add_argument("--workers", type=_positive, default=None,
                             help="worker threads (overrides EPOWER_THREADS)")
        if out:
            sub.add_argument("--out", default=None, help="write CSV here instead of stdout")
        return sub

    sub = command("gate", cmd_gate, "report eps_1 of one gate", seeded=True, parallel=True)
    sub.add_argument("gate", help="builtin spec (toffoli, deutsch:pi/4, gn:3:pi, ...) or gate file path")
    sub.add_argument("--dims", type=_positive, nargs="+", default=None, help="dims for a bare identity")
    sub.add_argument(
        "--mc-samples", type=_non_negative, default=SETTINGS.mc_samples,
        help="Monte Carlo cross-check samples (0 skips it)",
    )
    sub.add_argument("--json", action="store_true")

    sub = command("permutations", cmd_permutations, "class table of all permutation gates", parallel=True, out=True)
    sub.add_argument("--qubits", type=_positive, default=3)

    sub = command("histogram", cmd_histogram, "histogram of eps_1 over an ensemble",
                  seeded=True, parallel=True, out=True)
    sub.add_argument("--ensemble", choices=("cue", "cre", "cpe", "perm"), required=True)
    sub.add_argument("--samples", type=_positive, default=20000)
    sub.add_argument("--bins", type=_positive, default=40)

    sub = command("scaling", cmd_scaling, "means and bounds as functions of d or n", out=True)
    sub.add_argument("--mode", choices=("qudit-d", "qudit-n"), required=True)
    sub.add_argument("--n", type=_positive, default=3, help="party count for qudit-d")
    sub.add_argument("--d-min", type=_positive, default=2)
    sub.add_argument("--d-max", type=_positive, default=16)
    sub.add_argument("--n-min", type=_positive, default=2)
    sub.add_argument("--n-max", type=_positive, default=8)
    sub.add_argument("--d", type=_positive, nargs="+", default=list(FIGURE_DIMS), help="local dimensions for qudit-n")

    sub = command("diag-maximize", cmd_diag_maximize, "maximize eps_1 over diagonal gates", seeded=True)
    sub.add_argument("--grid", type=_positive, default=64)
    sub.add_argument("--restarts", type=_non_negative, default=8)
    sub.add_argument("--json", action="store_true")

    sub = command("means", cmd_means, "exact group means and the upper bound", seeded=True, parallel=True)
    shape = sub.add_mutually_exclusive_group(required=True)
    shape.add_argument("--dims", type=_positive, nargs="+")
    shape.add_argument("--qudit", type=_positive, nargs=2, metavar=("N", "D"))
    sub.add_argument("--mc-samples", type=_non_negative, default=0, help="also sample both groups with this many gates")
    sub.add_argument("--json", action="store_true")

    sub = command("summary", cmd_summary, "three-qubit min/mean/max table", seeded=True, parallel=True, out=True)
    sub.add_argument("--samples", type=_positive, default=20000)

    sub = command("bound-gaps", cmd_bound_gaps, "per-term slack of the upper bound", out=True)
    sub.add_argument("gate")
    sub.add_argument("--dims", type=_positive, nargs="+", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        settings = load_settings()
        if hasattr(args, "workers"):
            args.workers = settings.with_workers(args.workers).workers
        return args.func(args)
    except NonConvergenceError as e:
        print(f"error: {e.message}", file=sys.stderr)
        for key, value in e.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return e.exit_code
    except EPowerError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
