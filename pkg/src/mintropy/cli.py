"""Command-line front end: ``mintropy {select,entropy,oracle,eval,gen} ...``.

Exit codes: 0 on success, 1 for data or validation errors (message on
stderr), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import entropy as ent
from ._io import atomic_write_text
from .dataset import BinningSpec, Dataset, generate_fig1_dataset, load_csv, load_sparse
from .distribution import joint
from .evaluation import ClassifierKind, reports_to_csv, reports_to_json, run_pipeline
from .oracle import min_set_exact
from .selection import CRITERIA, Criterion, StopRule, greedy_select

MEASURES = ("h1", "hinf", "cachin", "bayes", "i1", "iinf", "renyi")


class CliError(Exception):
    pass


def default_threads() -> int:
    env = os.environ.get("MINTROPY_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise CliError(f"MINTROPY_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise CliError("MINTROPY_THREADS must be positive")
        return n
    return os.cpu_count() or 1


def format_value(v: float) -> str:
    """Six decimals; Python rounds the exact binary value, half to even."""
    return f"{v:.6f}"


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _data_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--data", required=True, help="input dataset file")
    p.add_argument("--format", choices=("csv", "sparse"), default="csv")
    p.add_argument("--label", default="class", help="label column name (csv only)")
    p.add_argument("--binning", choices=("equal-width", "equal-frequency"), help="discretize numeric columns")
    p.add_argument("--bins", type=int, default=None, help="number of bins (default 2 when --binning is set)")
    p.add_argument("--threads", type=_positive_int, default=None, help="worker threads (env MINTROPY_THREADS)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mintropy", description="Min-entropy and Shannon feature selection.")
    sub = parser.add_subparsers(dest="command", required=True)
    data = _data_parent()

    p = sub.add_parser("select", parents=[data], help="greedy forward selection")
    p.add_argument("--criterion", required=True, choices=CRITERIA)
    p.add_argument("--beta", type=float, default=None, help="MIFS redundancy weight (default 1)")
    p.add_argument("--threshold", type=float, default=None, help="stop once H(C|S) <= this many bits")
    p.add_argument("--max-features", type=_positive_int, default=None)
    p.add_argument("--target-error", type=float, default=None, help="stop once the Bayes error <= this")
    p.add_argument("--out", required=True)
    p.add_argument("--emit", choices=("json", "csv"), default="json")

    p = sub.add_parser("entropy", parents=[data], help="print one information measure")
    p.add_argument("--subset", default="", help="comma-separated 0-based feature indices (empty for none)")
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--alpha", type=float, default=None, help="Rényi order, with --measure renyi")

    p = sub.add_parser("oracle", parents=[data], help="exact minimum feature set")
    p.add_argument("--order", required=True, choices=("shannon", "min"))
    p.add_argument("--h", type=float, required=True, help="entropy threshold in bits")

    p = sub.add_parser("eval", parents=[data], help="bootstrap accuracy curves")
    p.add_argument("--criteria", required=True, help="comma list, e.g. renyi,shannon,mifs:0.5")
    p.add_argument("--classifiers", default="ideal-bayes", help="comma list of ideal-bayes, naive-bayes[:alpha]")
    p.add_argument("--bootstrap", type=_positive_int, default=5)
    p.add_argument("--max-features", type=_positive_int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--no-holdout", action="store_true", help="evaluate on the training data itself")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("gen", help="write a built-in example dataset as CSV")
    p.add_argument("--example", required=True, choices=("fig1",))
    p.add_argument("--out", required=True)
    return parser


def _load(args) -> Dataset:
    binning = None
    if args.binning or args.bins is not None:
        binning = BinningSpec(args.binning or "equal-frequency", args.bins if args.bins is not None else 2)
    if args.format == "sparse":
        return load_sparse(args.data, binning=binning)
    return load_csv(args.data, label_column=args.label, binning=binning)


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def parse_subset(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise CliError(f"bad --subset {text!r}; expected comma-separated integers") from None


def compute_measure(dataset: Dataset, subset, measure: str, alpha: float | None = None) -> float:
    """The library value printed by ``entropy``."""
    table = joint(dataset, subset)
    if measure == "h1":
        return ent.cond_shannon(table)
    if measure == "hinf":
        return ent.cond_min_entropy(table)
    if measure == "cachin":
        return ent.cachin_cond_min_entropy(table)
    if measure == "bayes":
        return ent.bayes_error(table)
    if measure == "i1":
        return ent.mutual_info_shannon(table)
    if measure == "iinf":
        return ent.mutual_info_min(table)
    if measure == "renyi":
        return ent.renyi_entropy(table.counts.ravel() / table.n_rows, alpha)
    raise CliError(f"unknown measure {measure!r}")


def _cmd_select(args) -> int:
    ds = _load(args)
    crit = Criterion(args.criterion, 1.0 if args.beta is None else args.beta)
    stop = StopRule(args.threshold, args.max_features, args.target_error)
    trace = greedy_select(ds, crit, stop, threads=_threads(args))
    atomic_write_text(args.out, trace.to_json() if args.emit == "json" else trace.to_csv())
    return 0


def _cmd_entropy(args) -> int:
    ds = _load(args)
    v = compute_measure(ds, parse_subset(args.subset), args.measure, args.alpha)
    print(format_value(v))
    return 0


def _cmd_oracle(args) -> int:
    ds = _load(args)
    res = min_set_exact(ds, args.order, args.h)
    print(json.dumps(res.to_dict(), sort_keys=True))
    return 0


def _cmd_eval(args) -> int:
    ds = _load(args)
    criteria = [Criterion.parse(c) for c in args.criteria.split(",") if c.strip()]
    kinds = [ClassifierKind.parse(c) for c in args.classifiers.split(",") if c.strip()]
    reports = run_pipeline(
        ds,
        criteria,
        kinds,
        n_bootstrap=args.bootstrap,
        max_features=args.max_features,
        seed=args.seed,
        train_fraction=None if args.no_holdout else args.train_fraction,
        dataset_id=Path(args.data).name,
        threads=_threads(args),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "report.json", reports_to_json(reports))
    atomic_write_text(out / "report.csv", reports_to_csv(reports))
    return 0


def _cmd_gen(args) -> int:
    generate_fig1_dataset().to_csv(args.out)
    return 0


_COMMANDS = {
    "select": _cmd_select,
    "entropy": _cmd_entropy,
    "oracle": _cmd_oracle,
    "eval": _cmd_eval,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "alpha", None) is not None and args.measure != "renyi":
            parser.error("--alpha is only valid with --measure renyi")
        if getattr(args, "measure", None) == "renyi" and args.alpha is None:
            parser.error("--measure renyi requires --alpha")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except (CliError, ValueError, IndexError, OSError) as exc:
        print(f"mintropy {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
