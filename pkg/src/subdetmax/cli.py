"""Command line interface.

Exit codes: 0 success, 2 validation failure, 3 degenerate result (every
trial had objective zero), 4 enumeration cap exceeded, 5 a statistical
check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import formats
from .anticoncentration import (
    check_sampling_guarantee,
    det_objective,
    estimate_lower_tail,
    hypercube_shape,
    vertex_opt,
    volume_objective,
)
from .errors import EnumerationCapError, InstanceFormatError, SubdetError
from .instances import (
    KIND_GRAPHIC,
    KIND_PARTITION,
    KIND_REPEATED_BASIS,
    V_MODES,
    GeneratorSpec,
)
from .oracle import brute_force_partition, brute_force_regular
from .partition_solver import (
    PartitionInstance,
    reduce_to_unit_quotas,
    solve_partition,
    trials_for_confidence,
)
from .regular_solver import RegularInstance, solve_regular
from .report import SolveReport
from .simplexdomain import ProductSimplexShape, sample_uniform, substream

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_CAP = 4
EXIT_STATISTICAL = 5

DEFAULT_DELTA = 0.01


def _write_text(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _resolve_threads(flag: int | None) -> int:
    env = os.environ.get("SUBDET_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"SUBDET_THREADS must be an integer, got {env!r}")
    if flag is not None:
        return max(1, flag)
    return os.cpu_count() or 1


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated list of integers")


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated list of numbers")


def cmd_gen(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        seed=args.seed,
        m=args.m,
        t=args.t,
        quotas=_parse_int_list(args.quotas, "--quotas") if args.quotas else None,
        d=args.d,
        r=args.r,
        n_vertices=args.vertices,
        n_edges=args.edges,
        v_mode=args.v_mode,
    )
    inst = spec.build()
    _write_text(formats.dumps(formats.instance_to_json(inst)), args.out)
    return EXIT_OK


def _default_trials(inst) -> int:
    if isinstance(inst, PartitionInstance):
        return trials_for_confidence(inst.r, DEFAULT_DELTA)
    return trials_for_confidence(inst.m, DEFAULT_DELTA)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = formats.load_instance(args.instance)
    trials = args.trials if args.trials is not None else _default_trials(inst)
    threads = _resolve_threads(args.threads)
    if isinstance(inst, PartitionInstance):
        report = solve_partition(inst, trials, seed=args.seed, threads=threads)
    else:
        report = solve_regular(inst, trials, seed=args.seed, threads=threads)
    _write_text(formats.dumps(formats.report_to_json(report)), args.out)
    if report.objective_det == 0.0:
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    inst = formats.load_instance(args.instance)
    if isinstance(inst, PartitionInstance):
        result = brute_force_partition(inst)
    else:
        result = brute_force_regular(inst)
    report = SolveReport(
        chosen_set=result.best_set,
        objective_det=result.best_value,
        objective_log=math.log(result.best_value)
        if result.best_value > 0.0
        else float("-inf"),
        certified_factor_log=0.0,  # enumeration is exact
        trials=result.enumerated,
        seed=0,
        per_trial_values=None,
    )
    _write_text(formats.dumps(formats.report_to_json(report)), args.out)
    if result.best_value == 0.0:
        return EXIT_DEGENERATE
    return EXIT_OK


def _tail_rows(inst, samples: int, c_grid, seed: int):
    """One lower-tail estimate per c for a single-block restriction, then
    the full-domain sampling guarantee row."""
    if isinstance(inst, PartitionInstance):
        uq = reduce_to_unit_quotas(inst)
        shape = uq.shape
        full = volume_objective(uq)
        fixed = sample_uniform(shape, substream(seed, 0))
        p1 = shape.block_sizes[0]

        def restricted(blocks):
            (z,) = blocks
            n = z.shape[0]
            full_blocks = [
                z if i == 0 else np.tile(fixed.blocks[i], (n, 1))
                for i in range(shape.r)
            ]
            return full(full_blocks)

        tail_bound = lambda c: 2.0 * c * p1
    else:
        shape = hypercube_shape(inst.m)
        full = det_objective(inst)
        coords = substream(seed, 0).random(inst.m)
        p1 = 2

        def restricted(blocks):
            (z,) = blocks
            n = z.shape[0]
            full_blocks = [z]
            for i in range(1, inst.m):
                full_blocks.append(np.tile((coords[i], 1.0 - coords[i]), (n, 1)))
            return full(full_blocks)

        # the restriction is |a t + b| on [0, 1]; its lower tail is at most 2c
        tail_bound = lambda c: 2.0 * c

    restr_shape = ProductSimplexShape((p1,))
    restr_max = float(restricted([np.eye(p1)]).max())
    if restr_max <= 0.0:
        return None, "restriction is identically zero at the sampled anchor"
    rows = []
    for c in c_grid:
        est = estimate_lower_tail(
            restricted,
            restr_shape,
            restr_max,
            c,
            samples,
            substream(seed, 1),
            bound=tail_bound(c),
        )
        rows.append(("restriction-tail", est))
    _, opt_value = vertex_opt(full, shape)
    if opt_value <= 0.0:
        return None, "objective is zero at every vertex"
    guarantee = check_sampling_guarantee(
        full, shape, opt_value, 2.0, samples, substream(seed, 2)
    )
    rows.append(("sampling-guarantee", guarantee))
    return rows, None


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "check",
            "threshold_fraction",
            "empirical_prob",
            "samples",
            "std_error",
            "bound",
            "bound_alt",
            "comparison",
            "passed",
        ]
    )
    for name, est in rows:
        writer.writerow(
            [
                name,
                repr(est.threshold_fraction),
                repr(est.empirical_prob),
                est.samples,
                repr(est.std_error),
                repr(est.bound),
                "" if est.bound_alt is None else repr(est.bound_alt),
                est.comparison,
                "true" if est.passed else "false",
            ]
        )
    return buf.getvalue()


def _rows_to_json(rows) -> str:
    payload = {
        "format_version": formats.FORMAT_VERSION,
        "rows": [
            {
                "check": name,
                "threshold_fraction": est.threshold_fraction,
                "empirical_prob": est.empirical_prob,
                "samples": est.samples,
                "std_error": est.std_error,
                "bound": est.bound,
                "bound_alt": est.bound_alt,
                "comparison": est.comparison,
                "passed": est.passed,
            }
            for name, est in rows
        ],
    }
    return formats.dumps(payload)


def cmd_anticoncentration(args: argparse.Namespace) -> int:
    inst = formats.load_instance(args.instance)
    c_grid = _parse_float_list(args.c_grid, "--c-grid")
    if not c_grid:
        raise ValueError("--c-grid must name at least one threshold")
    rows, degenerate_msg = _tail_rows(inst, args.samples, c_grid, args.seed)
    if rows is None:
        print(f"degenerate instance: {degenerate_msg}", file=sys.stderr)
        return EXIT_DEGENERATE
    text = _rows_to_csv(rows) if args.format == "csv" else _rows_to_json(rows)
    _write_text(text, args.out)
    if not all(est.passed for _, est in rows):
        return EXIT_STATISTICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subdetmax",
        description="Subdeterminant maximization under matroid constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument(
        "--kind",
        required=True,
        choices=[KIND_PARTITION, KIND_GRAPHIC, KIND_REPEATED_BASIS],
    )
    gen.add_argument("--m", type=int, help="number of columns")
    gen.add_argument("--t", type=int, help="number of parts")
    gen.add_argument("--quotas", help="comma-separated per-part quotas")
    gen.add_argument("--d", type=int, help="kernel factor rank")
    gen.add_argument("--r", type=int, help="group count for repeated-basis")
    gen.add_argument("--vertices", type=int, help="graph vertex count")
    gen.add_argument("--edges", type=int, help="graph edge count")
    gen.add_argument("--v-mode", default="gaussian", choices=list(V_MODES))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run the randomized solver")
    solve.add_argument("--instance", required=True)
    solve.add_argument(
        "--trials",
        type=int,
        help=f"trial count (default: enough for delta={DEFAULT_DELTA})",
    )
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument(
        "--threads",
        type=int,
        help="worker cap (default: machine CPUs; SUBDET_THREADS overrides)",
    )
    solve.add_argument("--format", choices=["json"], default="json")
    solve.add_argument("--out", default="-")
    solve.set_defaults(func=cmd_solve)

    exact = sub.add_parser("exact", help="brute-force the exact optimum")
    exact.add_argument("--instance", required=True)
    exact.add_argument("--out", default="-")
    exact.set_defaults(func=cmd_exact)

    anti = sub.add_parser(
        "anticoncentration", help="empirical tail checks for an instance"
    )
    anti.add_argument("--instance", required=True)
    anti.add_argument("--samples", type=int, default=100_000)
    anti.add_argument("--c-grid", default="0.05,0.1,0.2")
    anti.add_argument("--seed", type=int, default=0)
    anti.add_argument("--format", choices=["csv", "json"], default="csv")
    anti.add_argument("--out", default="-")
    anti.set_defaults(func=cmd_anticoncentration)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceFormatError as exc:
        print(f"invalid file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EnumerationCapError as exc:
        print(f"refusing enumeration: {exc}", file=sys.stderr)
        return EXIT_CAP
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SubdetError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
