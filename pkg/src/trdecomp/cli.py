"""Command-line front end.

Subcommands: ``construct`` (write fixture files), ``als`` (fit a target
tensor from a file), ``trap`` (perturbation sweep), ``oneloop``
(single-sweep convergence study), ``verify`` (invariant battery).
Exit codes: 0 success, 1 usage or domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .als import AlsConfig, run_als
from .constructions import rank_witness_cores, spurious_minimizer, spurious_target
from .experiments import (
    OneLoopExperimentConfig,
    TrapExperimentConfig,
    run_oneloop_experiment,
    run_trap_experiment,
    write_oneloop_csv,
    write_trap_csv,
)
from .ring import dump_cores, load_cores, random_cores
from .tensors import dump_tensor, load_tensor
from .verify import run_verification_suite

__all__ = ["cli_main", "main"]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_als_flags(p):
    p.add_argument("--max-loops", type=int, default=200)
    p.add_argument("--conv-tol", type=float, default=1e-10)
    p.add_argument("--rank-tol", type=float, default=1e-10)


def _als_config(args) -> AlsConfig:
    return AlsConfig(
        max_loops=args.max_loops,
        conv_tol=args.conv_tol,
        rank_tol=args.rank_tol,
    )


def _open_out(args):
    if args.out is None:
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8"), True


def _cmd_construct(args) -> int:
    d, r, n = args.d, args.r, args.n
    os.makedirs(args.out, exist_ok=True)
    tag = f"d{d}_r{r}_n{n}"
    target_path = os.path.join(args.out, f"T0_{tag}.txt")
    cores_path = os.path.join(args.out, f"u0_{tag}.txt")
    witness_path = os.path.join(args.out, f"w_{tag}.txt")
    dump_tensor(spurious_target(d, r, n), target_path)
    dump_cores(spurious_minimizer(d, r, n), cores_path)
    dump_cores(rank_witness_cores(d, r, n), witness_path)
    for path in (target_path, cores_path, witness_path):
        print(path)
    return 0


def _cmd_als(args) -> int:
    target = load_tensor(args.target)
    if args.init is not None:
        u0 = load_cores(args.init)
    elif args.m is not None:
        u0 = random_cores(target.order, args.m, target.dims, args.seed)
    else:
        raise ValueError("provide an initial ring via --init FILE or --m BOND")
    trace = run_als(target, u0, _als_config(args))
    d = u0.order
    print(f"# initial objective {format(trace.initial_objective, '.17g')}")
    for step, (f, sigma) in enumerate(zip(trace.objectives, trace.sigma_mins)):
        loop, mode = divmod(step, d)
        print(
            f"loop {loop + 1} mode {mode + 1} "
            f"objective {format(f, '.17g')} sigma_min {format(sigma, '.17g')}"
        )
    print(f"# loops {trace.loops_run} final objective {format(trace.objectives[-1], '.17g')}")
    if args.save is not None:
        dump_cores(trace.final_cores, args.save)
        print(f"# saved {args.save}")
    return 0


def _cmd_trap(args) -> int:
    c_values = tuple(
        float(c) for c in np.linspace(args.c_min, args.c_max, args.c_steps)
    )
    cfg = TrapExperimentConfig(
        d=args.d,
        r=args.r,
        n=args.n,
        c_values=c_values,
        trials_per_c=args.trials,
        als=_als_config(args),
        trap_epsilon=args.trap_epsilon,
        base_seed=args.seed,
    )
    result = run_trap_experiment(cfg, threads=args.threads)
    fp, close = _open_out(args)
    try:
        write_trap_csv(result, fp)
    finally:
        if close:
            fp.close()
    return 0


def _cmd_oneloop(args) -> int:
    cfg = OneLoopExperimentConfig(
        d=args.d,
        r=args.r,
        n=args.n,
        m_values=tuple(args.m) if args.m else None,
        trials=args.trials,
        als=_als_config(args),
        base_seed=args.seed,
        target_support=args.target_support,
    )
    result = run_oneloop_experiment(cfg, threads=args.threads)
    fp, close = _open_out(args)
    try:
        write_oneloop_csv(result, fp)
    finally:
        if close:
            fp.close()
    return 0


def _cmd_verify(args) -> int:
    results = run_verification_suite()
    failed = 0
    for name, ok, detail in results:
        if ok:
            print(f"PASS {name}")
        else:
            failed += 1
            print(f"FAIL {name}: {detail}")
    print(f"# {len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def _build_parser() -> _Parser:
    parser = _Parser(prog="trdecomp", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("construct", help="write target/ring fixture files")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("als", help="fit a target tensor from a file")
    p.add_argument("--target", required=True, help="target tensor file")
    p.add_argument("--init", help="initial ring file")
    p.add_argument("--m", type=int, help="bond size for a random initial ring")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save", help="write the final ring to this file")
    _add_als_flags(p)
    p.set_defaults(func=_cmd_als)

    p = sub.add_parser("trap", help="perturbation sweep around the planted minimizer")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--c-min", type=float, default=0.0)
    p.add_argument("--c-max", type=float, default=0.3)
    p.add_argument("--c-steps", type=int, default=16)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--trap-epsilon", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="CSV file (default: stdout)")
    _add_als_flags(p)
    p.set_defaults(func=_cmd_trap)

    p = sub.add_parser("oneloop", help="objective after a single ALS sweep")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--n", type=int, default=10)
    p.add_argument(
        "--m",
        type=int,
        action="append",
        help="bond size, repeatable (default: r^(d-1) and r^(d-1)-1)",
    )
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument(
        "--target-support",
        choices=("full", "compact"),
        default="full",
        help="law of the random target ring (see OneLoopExperimentConfig)",
    )
    p.add_argument("--out", help="CSV file (default: stdout)")
    _add_als_flags(p)
    p.set_defaults(func=_cmd_oneloop)

    p = sub.add_parser("verify", help="run the invariant battery")
    p.set_defaults(func=_cmd_verify)

    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 1
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"trdecomp: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"trdecomp: i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
