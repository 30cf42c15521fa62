"""Command-line entry point: ``meloid <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from meloid.core import ElaborationError, ParseError, TheoryContext, load_theory, pretty_equation
from meloid.learn.evaluate import evaluate_model
from meloid.learn.mining import MiningConfig, active_mine, read_jsonl, write_jsonl
from meloid.learn.recommend import recommend
from meloid.learn.tree import ModelError, RegressionTree, TreeParams, train_tree
from meloid.prover import prove_theory
from meloid.strategy.search import SearchBudget
from meloid.tactics.counterexample import ASSIGNMENT_CAP, SIZE_BOUND, find_counterexample
from meloid.tactics.replay import format_trace, replay_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("meloid")


class _FileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError()


class _UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    parser = _Parser(prog="meloid", description="Inductive prover and induct-argument recommender.", parents=[common])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("check", parents=[common], help="parse and elaborate a theory file")
    p.add_argument("file")

    p = sub.add_parser("prove", parents=[common], help="prove the lemmas of a theory file in order")
    p.add_argument("file")
    p.add_argument("--lemma")
    p.add_argument("--timeout", type=_positive_float, default=30.0, help="seconds per lemma")
    p.add_argument("--nodes", type=_positive_int, default=5_000, help="search nodes per lemma")
    p.add_argument("--trace", metavar="DIR", help="write one trace file per proved lemma")

    p = sub.add_parser("quickcheck", parents=[common], help="search for a counterexample to a lemma")
    p.add_argument("file")
    p.add_argument("--lemma", required=True)
    p.add_argument("--size", type=_positive_int, default=SIZE_BOUND)
    p.add_argument("--cap", type=_positive_int, default=ASSIGNMENT_CAP)

    p = sub.add_parser("mine", parents=[common], help="mine labelled induct variants from a corpus")
    p.add_argument("corpus", help="directory of .thy files, or a single file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--max-arbitrary", type=int, default=2)
    p.add_argument("--nodes", type=_positive_int, default=MiningConfig.node_limit)

    p = sub.add_parser("train", parents=[common], help="train a regression tree on a dataset")
    p.add_argument("data")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--max-depth", type=int, default=TreeParams.max_depth)
    p.add_argument("--min-leaf", type=_positive_int, default=TreeParams.min_leaf)

    p = sub.add_parser("recommend", parents=[common], help="rank induct variants for a lemma")
    p.add_argument("file")
    p.add_argument("--lemma", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--top", type=_positive_int, default=3)

    p = sub.add_parser("eval", parents=[common], help="cross-validate a tree on a dataset")
    p.add_argument("data")
    p.add_argument("--folds", type=int, help="default: one fold per lemma")
    return parser


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise _FileError(f"no such file: {path}")
    return p


def _load(path: str) -> TheoryContext:
    p = _existing(path)
    try:
        return load_theory(p)
    except (ParseError, ElaborationError) as e:
        raise _FileError(f"{path}: {e}") from None
    except (OSError, UnicodeDecodeError) as e:
        raise _FileError(f"{path}: {e}") from None


def _emit(args, record: dict, text: str) -> None:
    print(json.dumps(record, sort_keys=True) if args.json else text)


def _lemma_or_fail(ctx: TheoryContext, name: str):
    try:
        return ctx.lemma(name)
    except KeyError:
        raise _FileError(f"no lemma named {name!r} in {ctx.name}") from None


def cmd_check(args) -> int:
    ctx = _load(args.file)
    record = {
        "theory": ctx.name,
        "datatypes": len(ctx.datatypes),
        "functions": len(ctx.functions),
        "lemmas": len(ctx.lemmas),
        "strategies": len(ctx.strategies),
    }
    _emit(
        args,
        record,
        f"{ctx.name}: ok ({record['datatypes']} datatypes, {record['functions']} functions, "
        f"{record['lemmas']} lemmas, {record['strategies']} strategies)",
    )
    return EXIT_OK


def prove_record(result, replay) -> dict:
    record = {
        "lemma": result.lemma,
        "status": result.outcome.status,
        "strategy": result.strategy,
        "nodes": result.outcome.stats.nodes,
    }
    if result.outcome.conjecture is not None:
        record["conjecture"] = pretty_equation(result.outcome.conjecture)
    if replay is not None and not replay.ok:
        record["status"] = "replay_failed"
        record["replay_error"] = f"step {replay.step}: {replay.reason}"
    return record


def prove_text(record: dict) -> str:
    text = f"{record['lemma']}: {record['status']} ({record['strategy']}, {record['nodes']} nodes)"
    if "conjecture" in record:
        text += f" conjecture: {record['conjecture']}"
    if "replay_error" in record:
        text += f" replay error: {record['replay_error']}"
    return text


def cmd_prove(args) -> int:
    ctx = _load(args.file)
    if args.lemma is not None:
        _lemma_or_fail(ctx, args.lemma)
    trace_dir = Path(args.trace) if args.trace else None
    if trace_dir is not None:
        trace_dir.mkdir(parents=True, exist_ok=True)
    budget = SearchBudget(time_limit=args.timeout, node_limit=args.nodes)
    failed = []
    for result in prove_theory(ctx, budget, only=args.lemma):
        replay = replay_trace(result.context, result.lemma, result.outcome.trace) if result.proved else None
        record = prove_record(result, replay)
        _emit(args, record, prove_text(record))
        if record["status"] != "proved":
            failed.append(result.lemma)
        elif trace_dir is not None:
            (trace_dir / f"{result.lemma}.trace").write_text(format_trace(result.outcome.trace), encoding="utf-8")
    if failed and not args.json:
        print(f"unproved: {', '.join(failed)}")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_quickcheck(args) -> int:
    ctx = _load(args.file)
    lemma = _lemma_or_fail(ctx, args.lemma)
    cex = find_counterexample(ctx, lemma.goal, args.size, args.cap)
    record = {"lemma": lemma.name, "counterexample": cex.to_json() if cex else None}
    text = f"{lemma.name}: counterexample {cex}" if cex else f"{lemma.name}: no counterexample"
    _emit(args, record, text)
    return EXIT_FAIL if cex else EXIT_OK


def _corpus_files(path: str) -> list[Path]:
    p = _existing(path)
    if p.is_dir():
        files = sorted(p.glob("*.thy"))
        if not files:
            raise _FileError(f"no .thy files in {path}")
        return files
    return [p]


def cmd_mine(args) -> int:
    if args.max_arbitrary < 0:
        raise _UsageError()
    theories = [_load(str(f)) for f in _corpus_files(args.corpus)]
    config = MiningConfig(max_arbitrary=args.max_arbitrary, node_limit=args.nodes)
    records = active_mine(theories, config)
    write_jsonl(records, args.output)
    for r in records:
        record = {"theory": r.theory, "lemma": r.lemma, "variant": r.variant.to_json(), "label": r.label}
        _emit(args, record, f"{r.theory}.{r.lemma} {r.variant}: {r.label}")
    if not args.json:
        print(f"{len(records)} records -> {args.output}")
    return EXIT_OK


def _read_dataset(path: str):
    _existing(path)
    try:
        return read_jsonl(path)
    except (OSError, ValueError) as e:
        raise _FileError(str(e)) from None


def cmd_train(args) -> int:
    records = _read_dataset(args.data)
    if not records:
        print(f"{args.data}: empty dataset", file=sys.stderr)
        return EXIT_FAIL
    params = TreeParams(max_depth=args.max_depth, min_leaf=args.min_leaf)
    tree = train_tree([r.features.bits for r in records], [r.label for r in records], params)
    Path(args.output).write_text(tree.dumps() + "\n", encoding="utf-8")
    record = {"records": len(records), "depth": tree.depth(), "leaves": len(tree.leaves()), "model": args.output}
    _emit(args, record, f"trained on {len(records)} records: depth {record['depth']}, "
                        f"{record['leaves']} leaves -> {args.output}")
    return EXIT_OK


def _context_for(ctx: TheoryContext, lemma_name: str) -> TheoryContext:
    """Earlier lemmas count as proved only if their own strategies prove them."""
    proved = {r.lemma for r in prove_theory(ctx, SearchBudget(time_limit=None)) if r.proved}
    current = ctx.before(lemma_name)
    for lem in current.lemmas[: current.lemma_index(lemma_name)]:
        current = current.with_lemma_status(lem.name, lem.name in proved)
    return current


def cmd_recommend(args) -> int:
    ctx = _load(args.file)
    lemma = _lemma_or_fail(ctx, args.lemma)
    try:
        model = RegressionTree.loads(_existing(args.model).read_text(encoding="utf-8"))
    except ModelError as e:
        raise _FileError(f"{args.model}: {e}") from None
    ranked = recommend(_context_for(ctx, lemma.name), lemma.goal, model, args.top)
    if not len(ranked) and not args.json:
        print(f"{lemma.name}: no free variables, nothing to recommend")
    for i, rv in enumerate(ranked, 1):
        record = {"rank": i, **rv.to_json()}
        _emit(args, record, f"{i}. {rv.args} score={rv.score:.3f} path={rv.path_text()}")
    return EXIT_OK


def _fmt(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.4f}"


def cmd_eval(args) -> int:
    records = _read_dataset(args.data)
    try:
        metrics = evaluate_model(records, folds=args.folds)
    except ValueError as e:
        print(f"eval failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        print(json.dumps(metrics.to_json(), sort_keys=True))
    else:
        print(f"records: {metrics.records}")
        print(f"folds: {metrics.folds}")
        print(f"mse: {metrics.mse:.6f}")
        print(f"goals with a positive variant: {metrics.goals_with_positive}")
        print(f"top-1: {_fmt(metrics.top1)} (random {_fmt(metrics.random_top1)})")
        print(f"top-3: {_fmt(metrics.top3)} (random {_fmt(metrics.random_top3)})")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "prove": cmd_prove,
    "quickcheck": cmd_quickcheck,
    "mine": cmd_mine,
    "train": cmd_train,
    "recommend": cmd_recommend,
    "eval": cmd_eval,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    if not hasattr(args, "json"):
        args.json = False
    try:
        return COMMANDS[args.command](args)
    except _UsageError:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except _FileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
