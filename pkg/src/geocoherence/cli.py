"""Command-line entry point.

Subcommands: ingest, stats, extract, evaluate, sweep, synth, threat.
Every machine-readable output is byte-reproducible for a fixed seed and
fixed inputs; GEOCOHERENCE_SEED provides a fallback seed.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from datetime import date

from . import data, evaluation, features, threat
from .ensemble import EnsembleConfig
from .errors import ConfigError, GeocoherenceError, ThreatOverflowError, TraceParseError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

# Best alpha per algorithm from the evaluation sweeps; overridable.
DEFAULT_ALPHA = {"rf": 3, "extratrees": 4, "bagging": 5}

_ALGO_ALIASES = {"rf": "rf", "et": "extratrees", "extratrees": "extratrees", "bagging": "bagging"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _default_seed() -> int:
    env = os.environ.get("GEOCOHERENCE_SEED")
    return int(env) if env else 0


def _add_common_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", choices=sorted(_ALGO_ALIASES), default="rf",
                   help="ensemble variant (et is shorthand for extratrees)")
    p.add_argument("--estimators", type=int, default=100,
                   help="trees per ensemble (default 100)")
    p.add_argument("--folds", type=int, default=10,
                   help="stratified CV folds (default 10)")


def _add_extraction_flags(p: argparse.ArgumentParser, default_alpha=None) -> None:
    p.add_argument("--alpha", type=int, default=default_alpha,
                   help="coherence feature count (defaults: rf 3, extratrees 4, bagging 5)")
    p.add_argument("--mode", choices=["daily", "weekly"], default="daily",
                   help="coherence window mode")
    p.add_argument("--scale", type=float, default=10000.0,
                   help="multiplier on coherence columns (default 10000)")
    p.add_argument("--fill", type=float, default=0.0,
                   help="value for empty coherence sets (default 0.0)")
    p.add_argument("--wrap-hours", action="store_true",
                   help="use modular-24 hour distance")


def build_parser() -> _Parser:
    parser = _Parser(prog="geocoherence",
                     description="GPS distance-coherence authentication pipeline")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (falls back to GEOCOHERENCE_SEED, then 0)")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallelism cap; never affects results")
    parser.add_argument("--format", choices=["json", "csv", "table"], default="table",
                        help="output format for reports")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a trace file and print a summary")
    p.add_argument("path")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--strict", action="store_true",
                   help="abort on the first malformed row instead of skipping")

    p = sub.add_parser("stats", help="per-feature distribution statistics")
    p.add_argument("path")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--strict", action="store_true")
    _add_extraction_flags(p, default_alpha=6)

    p = sub.add_parser("extract", help="write the feature matrix as CSV")
    p.add_argument("path")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    _add_extraction_flags(p, default_alpha=6)

    p = sub.add_parser("evaluate", help="stratified CV metrics for one configuration")
    p.add_argument("path")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--strict", action="store_true")
    _add_extraction_flags(p)
    _add_common_model_flags(p)

    p = sub.add_parser("sweep", help="alpha sweep with deltas vs the NoDC baseline")
    p.add_argument("path")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--algorithms", default="rf,et,bagging",
                   help="comma-separated list (default rf,et,bagging)")
    p.add_argument("--alpha-min", type=int, default=1)
    p.add_argument("--alpha-max", type=int, default=6)
    p.add_argument("--out", default="-", help="CSV output file (default stdout)")
    _add_extraction_flags(p)
    _add_common_model_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic habit dataset")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--output-format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--users", type=int, default=30)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--anchors", type=int, default=3)
    p.add_argument("--spread", type=float, default=0.05,
                   help="anchor scatter in degrees")
    p.add_argument("--noise", type=float, default=0.002,
                   help="per-sample Gaussian noise in degrees")
    p.add_argument("--start", default="2017-01-11")
    p.add_argument("--end", default="2017-04-26")

    p = sub.add_parser("threat", help="closed-form adversary probabilities")
    p.add_argument("--forge", type=float, required=True,
                   help="classifier false negative rate, e.g. 1e-4")
    p.add_argument("--tries", type=int, default=4, help="PIN tries before lockout")
    p.add_argument("--digits", type=int, default=6, help="PIN length")
    p.add_argument("--symbols", type=int, default=10, help="candidates per digit")

    return parser


def _load_dataset(args) -> data.Dataset:
    with open(args.path, "r", encoding="utf-8") as fh:
        dataset, rejects = data.parse_trace_file(fh, args.input_format, strict=args.strict)
    if rejects:
        print(f"skipped {len(rejects)} malformed row(s)", file=sys.stderr)
    return dataset


def _extraction_config(args, algorithm: str | None = None) -> features.ExtractionConfig:
    alpha = args.alpha
    if alpha is None:
        alpha = DEFAULT_ALPHA[algorithm] if algorithm else 6
    return features.ExtractionConfig(
        alpha=alpha, mode=args.mode, scale=args.scale,
        fill_value=args.fill, wrap_hours=args.wrap_hours,
    )


def _write_out(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_ingest(args) -> int:
    dataset = _load_dataset(args)
    summary = data.dataset_summary(dataset)
    print(f"{len(summary.per_user)} users, {summary.n_samples} samples")
    for user, count in summary.per_user.items():
        print(f"  {user}: {count}")
    if summary.date_span:
        lo, hi = summary.date_span
        print(f"span {lo:%Y-%m-%d %H:%M} .. {hi:%Y-%m-%d %H:%M}")
    if summary.bbox:
        print("bbox lat [%.6f, %.6f] lon [%.6f, %.6f]" % summary.bbox)
    return EXIT_OK


def cmd_stats(args) -> int:
    dataset = _load_dataset(args)
    matrix = features.extract_feature_matrix(dataset, _extraction_config(args))
    stats = features.feature_distribution(matrix)
    fields = ("mean", "se", "median", "sd", "kurtosis", "skewness", "minimum", "maximum")
    if args.format == "json":
        doc = {
            name: {f: (None if math.isnan(getattr(cs, f)) else getattr(cs, f)) for f in fields}
            for name, cs in stats.columns.items()
        }
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        header = "feature," + ",".join(fields)
        print(header)
        for name, cs in stats.columns.items():
            cells = ["" if math.isnan(getattr(cs, f)) else "%.9g" % getattr(cs, f) for f in fields]
            print(name + "," + ",".join(cells))
    return EXIT_OK


def cmd_extract(args) -> int:
    dataset = _load_dataset(args)
    cfg = _extraction_config(args)
    matrix = features.extract_feature_matrix(dataset, cfg)
    lines = ["user_id," + ",".join(matrix.columns)]
    for label, row in zip(matrix.labels, matrix.values):
        lines.append(label + "," + ",".join("%.9g" % v for v in row))
    _write_out(args.out, "\n".join(lines) + "\n")
    print(f"filled {matrix.fill_count} empty coherence cell(s)", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.folds < 2:
        raise ConfigError("--folds must be >= 2")
    dataset = _load_dataset(args)
    algorithm = _ALGO_ALIASES[args.algorithm]
    extraction = _extraction_config(args, algorithm)
    model = EnsembleConfig(algorithm=algorithm, n_estimators=args.estimators, seed=args.seed)
    report = evaluation.cross_validate(
        dataset, extraction, model, args.folds, args.seed, n_threads=args.threads
    )
    header = {
        "algorithm": algorithm,
        "alpha": extraction.alpha,
        "mode": extraction.mode,
        "k": args.folds,
        "trees": args.estimators,
        "scale": extraction.scale,
        "seed": args.seed,
    }
    if args.format == "json":
        print(json.dumps({"settings": header, "metrics": report.as_percentages()},
                         sort_keys=True, indent=2))
    else:
        print(", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in header.items()))
        for name in evaluation.METRIC_NAMES:
            print("%-9s %6.2f" % (name, report.as_percentages()[name]))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.folds < 2:
        raise ConfigError("--folds must be >= 2")
    if args.alpha_min < 1 or args.alpha_max < args.alpha_min:
        raise ConfigError("need 1 <= alpha-min <= alpha-max")
    dataset = _load_dataset(args)
    algorithms = [_ALGO_ALIASES[a.strip()] for a in args.algorithms.split(",") if a.strip()]
    if not algorithms:
        raise ConfigError("no algorithms given")
    extraction = _extraction_config(args, algorithms[0])
    model = EnsembleConfig(n_estimators=args.estimators, seed=args.seed)
    result = evaluation.run_experiment(
        dataset, algorithms, list(range(args.alpha_min, args.alpha_max + 1)),
        extraction=extraction, model=model, k=args.folds, seed=args.seed,
        n_threads=args.threads,
    )
    csv_text = evaluation.sweep_csv(result)
    if args.out != "-":
        _write_out(args.out, csv_text)
    if args.format == "json":
        print(evaluation.experiment_json(result))
    elif args.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(evaluation.experiment_table(result))
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = data.SynthConfig(
        n_users=args.users,
        samples_per_user=args.samples,
        anchors_per_user=args.anchors,
        anchor_spread_deg=args.spread,
        noise_sigma_deg=args.noise,
        date_start=date.fromisoformat(args.start),
        date_end=date.fromisoformat(args.end),
        seed=args.seed,
    )
    dataset = data.generate_dataset(cfg)
    buf = io.StringIO()
    if args.output_format == "csv":
        data.write_csv(dataset, buf)
    else:
        data.write_jsonl(dataset, buf)
    _write_out(args.out, buf.getvalue())
    print(f"wrote {len(dataset)} samples for {len(dataset.users)} users", file=sys.stderr)
    return EXIT_OK


def cmd_threat(args) -> int:
    params = threat.ThreatParams(
        pr_forge=args.forge, n_t=args.tries, sigma=args.symbols, tau=args.digits
    )
    pr_a = threat.adversary_probability(params)
    pr_post = threat.post_compromise_probability(params)
    if args.format == "json":
        print(json.dumps({
            "pr_adversary": pr_a,
            "pr_post_compromise": pr_post,
            "params": {"pr_forge": params.pr_forge, "n_t": params.n_t,
                       "sigma": params.sigma, "tau": params.tau},
        }, sort_keys=True, indent=2))
    else:
        print(f"pr_adversary       {threat.format_probability(pr_a)}")
        print(f"pr_post_compromise {threat.format_probability(pr_post)}")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "threat": cmd_threat,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TraceParseError, FileNotFoundError, OSError, ThreatOverflowError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GeocoherenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
