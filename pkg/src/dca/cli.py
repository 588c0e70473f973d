"""Command line entry point: ``dca {synth,run,experiment,analyze}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aggregation import (
    DEFAULT_THRESHOLDS,
    accuracy_sweep,
    compute_mcav,
    presentation_ratio,
    read_presentations,
    write_accuracy,
    write_mcav,
)
from .experiment import ConfigError, dump_config, run_experiment, spec_from_dict
from .ingest import (
    KINDS,
    MAPPINGS,
    generate_session,
    read_antigen_log,
    read_truth,
    write_antigen_log,
    write_signal_log,
    write_truth,
)


def _threshold_range(text: str) -> list[float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return [lo, hi]


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine parameters")
    g.add_argument("--population", type=int, help="DC population size M (default 100)")
    g.add_argument("--antigen-capacity", type=int, help="antigen per DC N (default 50; 1 for M4/M5)")
    g.add_argument("--tissue-capacity", type=int, help="tissue antigen store size K (default 500)")
    g.add_argument("--cycles", type=int, help="cell cycles L (default 120)")
    g.add_argument("--sample-count", type=int, help="antigen sampled per DC per cycle Q (default 1)")
    g.add_argument("--threshold-range", type=_threshold_range, metavar="LO:HI", help="migration threshold range")


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("session")
    g.add_argument("--kind", choices=KINDS, help="generated session kind (default attack)")
    g.add_argument("--duration", type=int, help="generated session length in seconds (default 120)")
    g.add_argument("--session-seed", type=int, help="generator seed (default 0)")
    g.add_argument("--signals", help="signal log to replay instead of generating")
    g.add_argument("--antigen", help="antigen log to replay")
    g.add_argument("--truth", help="ground-truth labels for the replayed antigen")


def _config_from_args(args: argparse.Namespace) -> dict:
    config = json.loads(Path(args.config).read_text(encoding="utf-8")) if getattr(args, "config", None) else {}
    engine = config.setdefault("engine", {})
    for flag, key in (
        ("population", "population"),
        ("antigen_capacity", "antigen_capacity"),
        ("tissue_capacity", "tissue_capacity"),
        ("cycles", "cycles"),
        ("sample_count", "sample_count"),
        ("threshold_range", "threshold_range"),
    ):
        if getattr(args, flag) is not None:
            engine[key] = getattr(args, flag)
    session = config.setdefault("session", {})
    for flag, key in (("kind", "kind"), ("duration", "duration"), ("session_seed", "seed")):
        if getattr(args, flag) is not None:
            session[key] = getattr(args, flag)
    if args.signals or args.antigen:
        session.update(source="files", signal=args.signals, antigen=args.antigen)
    if args.truth:
        session["truth"] = args.truth
    if args.mapping is not None:
        config["mapping"] = args.mapping
    if args.seed is not None:
        config["seed"] = args.seed
    if getattr(args, "reps", None) is not None:
        config["repetitions"] = args.reps
    if args.out is not None:
        config["output"] = args.out
    return config


def _print_summary(report, out=sys.stdout) -> None:
    print("antigen_id,name,label,runs,mean,stdev", file=out)
    for s in report.summary.values():
        print(f"{s.antigen},{s.name or ''},{s.label or ''},{s.runs},{s.mean:.4f},{s.stdev:.4f}", file=out)
    if report.accuracy is not None:
        print("threshold,accuracy", file=out)
        for t, acc in report.accuracy:
            print(f"{t:.1f},{acc:.4f}", file=out)


def cmd_synth(args) -> int:
    session = generate_session(args.kind, args.duration, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_signal_log(session.samples, out / "signals.csv")
    write_antigen_log(session.antigen, out / "antigen.csv")
    write_truth(session.truth, out / "truth.csv")
    print(f"wrote {len(session.samples)} signal rows and {len(session.antigen)} antigen rows to {out}")
    return 0


def cmd_run(args) -> int:
    config = _config_from_args(args)
    config["repetitions"] = 1
    spec = spec_from_dict(config)
    report = run_experiment(spec)
    _print_summary(report)
    stats = report.runs[0].stats
    print(f"# cycles={stats.cycles} migrations={stats.migrations} presented={stats.presented} "
          f"deposited={stats.deposited} dropped={stats.dropped} discarded={stats.discarded}", file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    spec = spec_from_dict(_config_from_args(args))
    if args.dump_config:
        sys.stdout.write(dump_config(spec))
        return 0
    report = run_experiment(spec, jobs=args.jobs)
    _print_summary(report)
    return 0


def cmd_analyze(args) -> int:
    records = read_presentations(args.presentations)
    deposited: dict[int, int] = {}
    if args.antigen:
        for e in read_antigen_log(args.antigen):
            deposited[e.antigen] = deposited.get(e.antigen, 0) + 1
    report = compute_mcav(records, deposited)
    truth = read_truth(args.truth) if args.truth else None
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
        write_mcav(report, out / "mcav.csv")
    print("antigen_id,presentations,mature,mcav")
    for s in report.scores.values():
        print(f"{s.antigen},{s.presentations},{s.mature},{s.mcav:.4f}")
    if report.unpresented:
        print(f"# never presented: {' '.join(map(str, report.unpresented))}", file=sys.stderr)
    if deposited:
        print("antigen_id,presentation_ratio")
        for a, r in presentation_ratio(records, deposited).items():
            print(f"{a},{r:.4f}")
    if truth is not None:
        rows = accuracy_sweep(report, truth, DEFAULT_THRESHOLDS)
        if out:
            write_accuracy(rows, out / "accuracy.csv")
        print("threshold,accuracy")
        for t, acc in rows:
            print(f"{t:.1f},{acc:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dca", description="Dendritic Cell Algorithm anomaly detection runs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a generated session to signal/antigen/truth logs")
    p.add_argument("--kind", choices=KINDS, default="attack")
    p.add_argument("--duration", type=int, default=120)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    for name, func, helptext in (
        ("run", cmd_run, "a single engine run"),
        ("experiment", cmd_experiment, "repeated seeded runs with MCAV mean/stdev and accuracy sweep"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--mapping", choices=sorted(MAPPINGS))
        p.add_argument("--seed", type=int, help="master seed for the engine runs")
        p.add_argument("--out", help="directory for logs and tables")
        if name == "experiment":
            p.add_argument("--reps", type=int, help="repetitions (default 3)")
            p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
            p.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
        _add_engine_flags(p)
        _add_session_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="MCAV and accuracy from an existing presentation log")
    p.add_argument("presentations")
    p.add_argument("--truth")
    p.add_argument("--antigen", help="antigen log, for unpresented ids and presentation ratios")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"dca {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
