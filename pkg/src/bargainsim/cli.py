"""Command line entry point: run, fig2, sweep-bound and check.

Every subcommand is a thin shell over the library. Outputs go to the config's
output directory (overridable with --out): provenance-stamped CSV and JSON,
plus rendered figures next to them. Exit status is nonzero on configuration
or I/O errors, and for `fig2 --assert` / `check` when the evaluated claims do
not hold.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import reports
from .agents import CuriosityType, reserve_price
from .config import ConfigError, RunConfig, default_config_path, load_config
from .experiments import (
    FIG2_PAIRINGS,
    Scenario,
    WelfareReport,
    _aggregate,
    fig2_assertions,
    population_sampler,
    representative_agent,
    run_fig2,
    run_scenario,
    scenario_records,
    sweep_bound,
)
from .incentives import theorem1_probe, theorem2_batch
from .experiments import _draw_with_rng
from .protocol import ProtocolConfig, run
from .records import Role, write_records

DEFAULT_BOUNDS = (100, 250, 500, 750, 1000, 1500)
DEFAULT_GRID = (1.0, 1.05, 1.1, 1.2, 1.35, 1.5)
SWEEP_PAIRINGS = ("sec-vs-unc", "unc-vs-unc", "cur-vs-unc")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bargainsim",
        description="Curiosity-aware bilateral bargaining simulator",
    )
    parser.add_argument("--config", type=Path, default=None, help="configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--out", type=Path, default=None, help="override the output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("run", help="run the configured scenario and write a welfare report")

    fig2 = sub.add_parser("fig2", help="comparative welfare: pairings x protocol variants")
    fig2.add_argument("--assert", dest="check", action="store_true",
                      help="evaluate the published orderings; exit 1 if any fails")
    fig2.add_argument("--variant", default=None, help="restrict to one variant")
    fig2.add_argument("--bound", type=int, default=None, help="proposal bound override")

    sweep = sub.add_parser("sweep-bound", help="welfare as a function of the proposal bound")
    sweep.add_argument("--bounds", default=",".join(str(b) for b in DEFAULT_BOUNDS),
                       help="comma-separated ascending bounds")

    check = sub.add_parser("check", help="incentive probes for the two theorems")
    check.add_argument("--grid", default=",".join(str(m) for m in DEFAULT_GRID),
                       help="declaration multipliers of the truthful bound-reserve")
    check.add_argument("--draws", type=int, default=None,
                       help="paired draws per declaration (default: experiment draws)")
    return parser


def _load(args) -> RunConfig:
    path = args.config if args.config is not None else default_config_path()
    cfg = load_config(path)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=str(args.out)))
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _scenario(cfg: RunConfig) -> Scenario:
    return Scenario(
        seller_type=cfg.seller_type,
        purchaser_type=cfg.purchaser_type,
        variant=cfg.variant,
        bound=cfg.bound,
        draws=cfg.draws,
        seed=cfg.seed,
        dist=cfg.dist,
        opener=cfg.opener,
        curious_counts=cfg.curious_counts,
    )


def cmd_run(cfg: RunConfig, jobs: int) -> int:
    out = _out_dir(cfg)
    if cfg.mode == "explicit":
        result = run(
            cfg.explicit_seller,
            cfg.explicit_purchaser,
            config=ProtocolConfig.for_variant(
                cfg.variant, cfg.bound, cfg.opener, cfg.curious_counts
            ),
        )
        stat = (
            result.seller_utility,
            result.purchaser_utility,
            result.outcome.kind.value,
            result.record.message_count,
        )
        report = _aggregate([stat], 1)
        if cfg.output.records:
            with (out / "records.jsonl").open("w") as fp:
                write_records([result.record], fp)
    else:
        scenario = _scenario(cfg)
        report = run_scenario(scenario, jobs=jobs)
        if cfg.output.records:
            with (out / "records.jsonl").open("w") as fp:
                write_records(scenario_records(scenario), fp)

    pairing = f"{cfg.purchaser_type.value}-vs-{cfg.seller_type.value}"
    if "csv" in cfg.output.formats:
        reports.write_welfare_csv(
            out / "welfare.csv", [(cfg.variant, pairing, report)], cfg.config_hash, cfg.seed
        )
    if "json" in cfg.output.formats:
        reports.write_json(
            out / "welfare.json",
            {"variant": cfg.variant, "pairing": pairing, "report": report.to_dict()},
            cfg.config_hash,
            cfg.seed,
        )
    if cfg.output.figures:
        reports.render_welfare(report, f"{pairing} [{cfg.variant}]", out / "welfare.png")
    print(f"{cfg.variant} {pairing}: purchaser {report.mean_purchaser:+.6g} "
          f"seller {report.mean_seller:+.6g} success {report.success_rate:.3f}")
    return 0


def cmd_fig2(cfg: RunConfig, jobs: int, check: bool, variant: str | None, bound: int | None) -> int:
    out = _out_dir(cfg)
    bound = bound if bound is not None else cfg.bound
    variants = (variant.rstrip("."),) if variant else ("barg", "mat", "bou", "all")
    table: dict[str, dict[str, WelfareReport]] = {}
    for pairing in FIG2_PAIRINGS:
        table[pairing] = {}
        for v in variants:
            scenario = replace(
                _scenario(cfg),
                seller_type=_pairing_seller(pairing),
                purchaser_type=_pairing_purchaser(pairing),
                variant=v,
                bound=bound,
            )
            table[pairing][v] = run_scenario(scenario, jobs=jobs)

    for pairing, row in table.items():
        if "csv" in cfg.output.formats:
            reports.write_welfare_csv(
                out / f"{pairing}.csv",
                [(v, pairing, rep) for v, rep in row.items()],
                cfg.config_hash,
                cfg.seed,
            )
    if "json" in cfg.output.formats:
        reports.write_json(
            out / "fig2.json",
            {p: {v: r.to_dict() for v, r in row.items()} for p, row in table.items()},
            cfg.config_hash,
            cfg.seed,
        )
    if cfg.output.figures:
        reports.render_fig2(table, out)

    for pairing, row in table.items():
        cells = "  ".join(f"{v}={r.mean_purchaser:+.4g}" for v, r in row.items())
        print(f"{pairing:12s} {cells}")

    if check:
        if len(variants) < 4:
            print("orderings need all four variants; run without --variant", file=sys.stderr)
            return 2
        failures = 0
        for assertion in fig2_assertions(table):
            print(("PASS " if assertion.holds else "FAIL ") + assertion.name
                  + " -- " + assertion.detail)
            failures += 0 if assertion.holds else 1
        return 1 if failures else 0
    return 0


def _pairing_purchaser(pairing: str) -> CuriosityType:
    from .experiments import pairing_types

    return pairing_types(pairing)[0]


def _pairing_seller(pairing: str) -> CuriosityType:
    from .experiments import pairing_types

    return pairing_types(pairing)[1]


def cmd_sweep_bound(cfg: RunConfig, jobs: int, bounds_arg: str) -> int:
    out = _out_dir(cfg)
    try:
        bounds = [int(b) for b in bounds_arg.replace(",", " ").split()]
    except ValueError:
        print(f"--bounds: expected integers, got {bounds_arg!r}", file=sys.stderr)
        return 2
    sweeps = {}
    for pairing in SWEEP_PAIRINGS:
        sweeps[pairing] = sweep_bound(
            _pairing_purchaser(pairing),
            _pairing_seller(pairing),
            cfg.dist,
            bounds,
            cfg.draws,
            cfg.seed,
            jobs=jobs,
            curious_counts=cfg.curious_counts,
        )
    if "csv" in cfg.output.formats:
        lines = reports.sweep_csv_lines(sweeps, cfg.config_hash, cfg.seed)
        (out / "sweep_bound.csv").write_text("\n".join(lines) + "\n")
    if "json" in cfg.output.formats:
        reports.write_json(
            out / "sweep_bound.json",
            {
                p: {
                    "bounds": list(s.bounds),
                    "plateau": s.plateau,
                    "welfare_purchaser": s.welfare(),
                    "reports": [r.to_dict() for r in s.reports],
                }
                for p, s in sweeps.items()
            },
            cfg.config_hash,
            cfg.seed,
        )
    if cfg.output.figures:
        reports.render_bound_sweep(sweeps, out / "sweep_bound.png")
    for pairing, sweep in sweeps.items():
        print(f"{pairing:12s} plateau={sweep.plateau} "
              + " ".join(f"{b}:{w:+.3g}" for b, w in zip(sweep.bounds, sweep.welfare())))
    return 0


def cmd_check(cfg: RunConfig, jobs: int, grid_arg: str, draws: int | None) -> int:
    out = _out_dir(cfg)
    config = ProtocolConfig.for_variant(cfg.variant, cfg.bound, cfg.opener, cfg.curious_counts)
    if not (config.matching and config.bound is not None and config.enforcement):
        print(
            "check: the declaration probe requires the all-extensions variant "
            f"(protocol.variant = all), got {cfg.variant!r}",
            file=sys.stderr,
        )
        return 2
    try:
        multipliers = [float(m) for m in grid_arg.replace(",", " ").split()]
    except ValueError:
        print(f"--grid: expected numbers, got {grid_arg!r}", file=sys.stderr)
        return 2
    if 1.0 not in multipliers:
        multipliers.append(1.0)
    draws = draws if draws is not None else cfg.draws

    agent = representative_agent(Role.PURCHASER, CuriosityType.CURIOUS, cfg.dist)
    truthful = reserve_price(agent, config.bound, config.bound, cfg.curious_counts)
    sampler = population_sampler(
        Role.SELLER,
        [CuriosityType.UNCURIOUS, CuriosityType.SECRETIVE, CuriosityType.CURIOUS],
        cfg.dist,
    )
    report = theorem1_probe(
        agent, sampler, [truthful * m for m in sorted(multipliers)], config, draws, cfg.seed
    )
    for s in report.stats:
        marker = " (truthful)" if abs(s.declared - truthful) < 1e-9 else ""
        print(f"declared {s.declared:9.4f}  mean utility {s.mean_utility:+.5f} "
              f"+- {s.ci95:.5f}  bargained {s.bargained}{marker}")
    print(f"declaration dominance: {'holds' if report.dominance_holds else 'VIOLATED'} "
          f"(cases: rejected={report.tally.case1_rejected} "
          f"overpaid={report.tally.case2_overpaid} "
          f"compatible={report.tally.case3_compatible})")

    def make_pair(rng):
        types = list(CuriosityType)
        seller = _draw_with_rng(Role.SELLER, types[rng.randrange(len(types))], cfg.dist, rng)
        purchaser = _draw_with_rng(Role.PURCHASER, types[rng.randrange(len(types))], cfg.dist, rng)
        return seller, purchaser

    seen, passed = theorem2_batch(make_pair, config, draws, cfg.seed)
    print(f"agreement dominance: {passed}/{seen} forced settlements pass")

    if "json" in cfg.output.formats:
        reports.write_json(
            out / "theorem1.json", {"probe": report.to_dict()}, cfg.config_hash, cfg.seed
        )
        reports.write_json(
            out / "theorem2.json",
            {"forced_checked": seen, "forced_passed": passed},
            cfg.config_hash,
            cfg.seed,
        )
    if cfg.output.figures:
        reports.render_theorem1(report, out / "theorem1.png")
    return 0 if report.dominance_holds and passed == seen else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            return cmd_run(cfg, args.jobs)
        if args.command == "fig2":
            return cmd_fig2(cfg, args.jobs, args.check, args.variant, args.bound)
        if args.command == "sweep-bound":
            return cmd_sweep_bound(cfg, args.jobs, args.bounds)
        if args.command == "check":
            return cmd_check(cfg, args.jobs, args.grid, args.draws)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
