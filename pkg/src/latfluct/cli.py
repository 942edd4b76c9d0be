"""Command line interface: seeded sampling and experiment subcommands.

Every subcommand takes --seed (required, u64) and is a deterministic
function of its flags.  Sample subcommands (sample-lattices, count-error,
sample-limit) write CSV rows by default; experiment subcommands write a
JSON report {experiment, params, stats, pass, runtime_seconds} where
params echoes the flags.  Output goes to --out when given, else stdout.

Exit codes: 0 when every entry of `pass` is true (sample subcommands
always pass), 2 when a criterion failed, 1 on usage or I/O errors.

--workers is a scheduling hint only: batches are evaluated in
deterministic index order, so results are bitwise identical for any
worker count.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .counting import error_samples_batch
from .errors import ContractViolation, InvariantViolation
from .experiments import (ExperimentReport, compare_laws, delta_experiment,
                          equidistribution_experiment, siegel_mean_check,
                          tail_report, verify_identities)
from .haar import SamplerConfig, sample_frames, sample_haar_batch
from .limitlaw import LimitConfig, limit_values
from .reporting import (ErrorRowSet, LatticeSampleSet, LimitSampleSet, emit,
                        render)
from .spectral import PhiEvaluator

_U64_MAX = (1 << 64) - 1

_EQUIDIST_KS = ((1, 0), (0, 1), (1, 1))


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not (0 <= value <= _U64_MAX):
        raise ValueError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latfluct",
                     description="Lattice counting fluctuations: sampling, "
                                 "counting errors, and the spectral limit law.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def add(name, help_text, n_default, fmt_default, **flag_defaults):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=_seed, required=True,
                       help="master seed (u64; decimal or 0x hex)")
        p.add_argument("--n", type=int, default=n_default,
                       help=f"sample count (default {n_default})")
        p.add_argument("--t", type=float,
                       default=flag_defaults.get("t", 500.0),
                       help="dilation parameter t")
        p.add_argument("--cutoff", type=float,
                       default=flag_defaults.get("cutoff", 100.0),
                       help="truncation cutoff A")
        p.add_argument("--alpha", type=float,
                       default=flag_defaults.get("alpha", 0.25),
                       help="tail threshold alpha")
        p.add_argument("--phi-tol", type=float, default=1e-10,
                       help="target absolute error of the phi evaluator")
        p.add_argument("--workers", type=int, default=1,
                       help="scheduling hint; results do not depend on it")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"),
                       default=fmt_default, help="output format")
        return p

    add("sample-lattices", "draw Haar-random unimodular bases",
        1000, "csv")
    add("count-error", "disk-counting errors over Haar lattices",
        1000, "csv", t=500.0)
    sl = add("sample-limit", "draw the truncated limit law",
             10000, "csv", cutoff=100.0)
    sl.add_argument("--tail-mode", choices=("gaussian_surrogate", "truncate"),
                    default="gaussian_surrogate",
                    help="tail handling beyond the cutoff")
    compare = add("compare-laws",
                  "KS distance: counting errors vs limit sampler",
                  20000, "json", t=500.0, cutoff=100.0)
    compare.add_argument("--n-limit", type=int, default=100000,
                         help="limit-law sample count (default 100000)")
    add("delta", "tail frequency of the count/spectral-sum gap",
        2000, "json", t=1000.0, cutoff=40.0, alpha=0.25)
    add("equidist", "phase equidistribution at k in {(1,0),(0,1),(1,1)}",
        50000, "json", t=1000.0)
    add("siegel-check", "prime-vector mean counts: unit ball and annulus (1,2)",
        200000, "json")
    add("tail", "tail index and moment diagnostics of the limit law",
        100000, "json", cutoff=100.0)
    add("verify-identities", "determinant, shape, norm, and dual identities",
        100000, "json")
    return parser


def _flag_echo(args) -> dict:
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key == "command":
            continue
        echo[key] = value
    return echo


def _with_params(report: ExperimentReport, args) -> ExperimentReport:
    params = dict(_flag_echo(args))
    params.update(report.params)
    return ExperimentReport(experiment=report.experiment, params=params,
                            stats=report.stats, passed=report.passed,
                            runtime_seconds=report.runtime_seconds)


def _deliver(obj, args, seed=None) -> None:
    if args.out is not None:
        emit(obj, args.out, args.format, seed)
    else:
        sys.stdout.write(render(obj, args.format, seed))


def _run(args) -> int:
    if args.command == "sample-lattices":
        bases = sample_haar_batch(SamplerConfig(args.seed, 0), args.n)
        _deliver(LatticeSampleSet(seed=args.seed, bases=bases), args)
        return 0

    if args.command == "count-error":
        frames = sample_frames(SamplerConfig(args.seed, 0), args.n)
        counts, errors, normalized = error_samples_batch(frames, args.t)
        _deliver(ErrorRowSet(seed=args.seed, t=args.t, counts=counts,
                             errors=errors, normalized=normalized), args)
        return 0

    if args.command == "sample-limit":
        phi_ev = PhiEvaluator.build(target_abs_error=args.phi_tol)
        cfg = LimitConfig(rng=SamplerConfig(args.seed, 0),
                          cutoff_A=args.cutoff, tail_mode=args.tail_mode,
                          phi=phi_ev)
        values = limit_values(SamplerConfig(args.seed, 0), args.n, cfg)
        _deliver(LimitSampleSet(seed=args.seed, values=values), args)
        return 0

    if args.command == "compare-laws":
        report = compare_laws(args.n, args.n_limit, args.t, args.seed,
                              cutoff=args.cutoff)
    elif args.command == "delta":
        report = delta_experiment(args.n, args.t, args.cutoff, args.alpha,
                                  args.seed)
    elif args.command == "equidist":
        report = equidistribution_experiment(args.n, args.t, _EQUIDIST_KS,
                                             args.seed)
    elif args.command == "siegel-check":
        ball = siegel_mean_check(args.n, 0.0, 1.0, args.seed, stream_index=0)
        annulus = siegel_mean_check(args.n, 1.0, 2.0, args.seed,
                                    stream_index=1)
        stats = {f"ball_{k}": v for k, v in ball.stats.items()}
        stats.update({f"annulus_{k}": v for k, v in annulus.stats.items()})
        passed = {f"ball_{k}": v for k, v in ball.passed.items()}
        passed.update({f"annulus_{k}": v for k, v in annulus.passed.items()})
        report = ExperimentReport(
            experiment="siegel_check", params={}, stats=stats, passed=passed,
            runtime_seconds=ball.runtime_seconds + annulus.runtime_seconds)
    elif args.command == "tail":
        report = tail_report(args.n, args.seed, cutoff=args.cutoff)
    elif args.command == "verify-identities":
        report = verify_identities(args.n, args.seed)
    else:  # pragma: no cover - argparse enforces the choices
        raise ContractViolation(f"unknown command {args.command!r}")

    report = _with_params(report, args)
    _deliver(report, args)
    return 0 if report.all_passed else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ContractViolation, InvariantViolation, OSError, ValueError) as exc:
        print(f"latfluct: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
