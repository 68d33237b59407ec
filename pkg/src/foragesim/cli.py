"""Command-line front-end.

Subcommands: `simulate` one (distance, agents) cell, `sweep` a grid from
a JSON spec file, `verify` an invariant suite, `coverage` the ring
instrumentation, `report` re-summarize an existing sweep CSV.

Exit codes: 0 success, 1 check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import nullcontext

from .engine import (
    ALGORITHMS,
    AlgorithmConfig,
    FixedPlacement,
    MODES,
    PHASE_LEVEL,
    RandomOnSphere,
)
from .grid import Point
from .harness import (
    CellSummary,
    ExperimentSpec,
    load_spec,
    read_cells_csv,
    run_cell,
    run_experiment,
    write_cells_csv,
    write_trials_csv,
)
from .protocols import AdviceWidth, ConfigError, GrowthFunction
from .verify import SUITES, verify_modes

SEED_ENV = "FORAGESIM_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _add_algorithm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument(
        "--phi",
        default=None,
        metavar="KIND:PARAM",
        help="growth function for the uniform search, e.g. polylog:1.5",
    )
    p.add_argument("--rho", type=float, default=2.0, help="count-approximation quality")
    p.add_argument("--delta", type=float, default=1.0, help="heavy-tail exponent offset")
    p.add_argument("--psi-eps", type=float, default=None, help="advice width exponent")


def _build_algorithm(args: argparse.Namespace) -> AlgorithmConfig:
    growth = None
    if args.phi is not None:
        kind, sep, param = args.phi.partition(":")
        if not sep:
            raise ConfigError("--phi expects KIND:PARAM, e.g. polylog:1.5")
        growth = GrowthFunction(kind, float(param))
    width = AdviceWidth(args.psi_eps) if args.psi_eps is not None else None
    return AlgorithmConfig(
        name=args.algorithm,
        growth=growth,
        rho=args.rho,
        delta=args.delta,
        advice_width=width,
    )


def _out_stream(path: str | None):
    if path is None or path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


def _print_cells(summaries: list[CellSummary]) -> None:
    header = f"{'D':>6} {'k':>7} {'trials':>6} {'mean':>12} {'median':>10} {'ci95':>10} {'cens':>5} {'compet':>10} {'bits':>4}"
    print(header)
    for s in summaries:
        st = s.stats
        print(
            f"{s.distance:>6} {s.k:>7} {s.trials:>6} "
            f"{'-' if st.mean is None else f'{st.mean:.1f}':>12} "
            f"{'-' if st.median is None else f'{st.median:.1f}':>10} "
            f"{'-' if st.ci95 is None else f'{st.ci95:.1f}':>10} "
            f"{st.censored:>5} "
            f"{'-' if s.competitiveness is None else f'{s.competitiveness:.3f}':>10} "
            f"{s.advice_bits:>4}"
        )


def _cmd_simulate(args: argparse.Namespace) -> int:
    algorithm = _build_algorithm(args)
    placement = RandomOnSphere()
    if args.placement != "sphere":
        x, _, y = args.placement.partition(",")
        placement = FixedPlacement(Point(int(x), int(y)))
    spec = ExperimentSpec(
        algorithm=algorithm,
        distances=(args.distance,),
        agent_counts=(args.agents,),
        trials=args.trials,
        cap_multiplier=args.cap_multiplier,
        master_seed=args.seed if args.seed is not None else _default_seed(),
        mode=args.mode,
        placement=placement,
    )
    summary, records = run_cell(spec, 0, args.distance, args.agents)
    print(f"algorithm {spec.algorithm.describe()}  cap {spec.cap_for(args.distance, args.agents)}")
    _print_cells([summary])
    if args.out is not None:
        with _out_stream(args.out) as fh:
            write_cells_csv([summary], fh)
    if args.per_trial is not None:
        with open(args.per_trial, "w", encoding="utf-8", newline="") as fh:
            write_trials_csv(records, fh)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_spec(args.config)
    summaries = run_experiment(spec)
    with _out_stream(args.out) as fh:
        write_cells_csv(summaries, fh)
    if args.out is not None and args.out != "-":
        _print_cells(summaries)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    suite = SUITES[args.suite]
    if args.suite == "modes" and (args.count is not None or args.seed is not None):
        results = verify_modes(
            count=args.count if args.count is not None else 1000,
            seed=args.seed if args.seed is not None else 20250801,
        )
    else:
        results = suite()
    failures = 0
    for r in results:
        print(r.line())
        failures += not r.passed
    return 1 if failures else 0


def _cmd_coverage(args: argparse.Namespace) -> int:
    from .engine import ring_coverage, focus_ring  # local import keeps startup light

    algorithm = _build_algorithm(args)
    growth = GrowthFunction(*_parse_growth(args.ring_phi))
    stats = ring_coverage(
        algorithm,
        args.agents,
        growth,
        args.horizon_scale,
        args.trials,
        args.seed if args.seed is not None else _default_seed(),
    )
    rings = stats.rings
    print(f"rings sized for agent bound {rings.agent_bound}, horizon {stats.horizon} rounds")
    print(f"{'ring':>4} {'inner':>8} {'outer':>8} {'nodes':>10} {'visited':>12} {'fraction':>9}")
    for i in range(1, rings.count + 1):
        mean = stats.mean_visited[i - 1]
        print(
            f"{i:>4} {rings.inner(i):>8} {rings.outer(i):>8} {rings.size(i):>10} "
            f"{mean:>12.1f} {stats.fraction(i):>9.4f}"
        )
    print(f"ring matched to k={args.agents}: {focus_ring(args.agents)}")
    return 0


def _parse_growth(text: str) -> tuple[str, float]:
    kind, sep, param = text.partition(":")
    if not sep:
        raise ConfigError("growth expects KIND:PARAM, e.g. constant:1")
    return kind, float(param)


def _cmd_report(args: argparse.Namespace) -> int:
    with open(args.input, "r", encoding="utf-8", newline="") as fh:
        rows = read_cells_csv(fh)
    if not rows:
        print("empty sweep CSV")
        return 0
    print(f"{len(rows)} cells from {args.input}")
    print(f"{'algorithm':<24} {'D':>6} {'k':>7} {'mean':>12} {'compet':>10} {'cens':>5}")
    worst: dict[str, float] = {}
    for row in rows:
        name = f"{row['algorithm']}[{row['params']}]"
        comp = row["competitiveness"]
        print(
            f"{name:<24} {row['D']:>6} {row['k']:>7} {row['mean'] or '-':>12} "
            f"{comp or '-':>10} {row['censored']:>5}"
        )
        if comp:
            worst[name] = max(worst.get(name, 0.0), float(comp))
    for name, c in sorted(worst.items()):
        print(f"max competitiveness {name}: {c:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foragesim",
        description="Multi-agent treasure search simulator on the infinite grid",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one (distance, agents) cell")
    _add_algorithm_flags(p)
    p.add_argument("-D", "--distance", type=int, required=True)
    p.add_argument("-k", "--agents", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--cap-multiplier", type=int, default=50)
    p.add_argument("--seed", type=int, default=None, help=f"default ${SEED_ENV} or 0")
    p.add_argument("--mode", choices=MODES, default=PHASE_LEVEL)
    p.add_argument("--placement", default="sphere", help='"sphere" or "x,y"')
    p.add_argument("--out", default=None, help="optional cell CSV path ('-' for stdout)")
    p.add_argument("--per-trial", default=None, help="optional per-trial CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a (distance x agents) grid from a JSON spec")
    p.add_argument("--config", required=True, help="JSON experiment spec")
    p.add_argument("--out", default=None, help="cell CSV path (default stdout)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--count", type=int, default=None, help="paired runs (modes suite)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("coverage", help="ring coverage instrumentation")
    _add_algorithm_flags(p)
    p.add_argument("-k", "--agents", type=int, required=True)
    p.add_argument("--horizon-scale", type=int, required=True, help="rounds / 4")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ring-phi", default="constant:1", help="growth sizing the rings")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("report", help="re-summarize an existing sweep CSV")
    p.add_argument("input")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
