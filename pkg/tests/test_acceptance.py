"""The eight end-to-end acceptance criteria, each printing one PASS/FAIL line."""

import json
import random
import time

import pytest

from meloid.core.terms import alpha_equivalent, apply_subst
from meloid.learn import (
    ASSERTION_IDS,
    CATALOG_HASH,
    ModelError,
    RegressionTree,
    TreeParams,
    active_mine,
    evaluate_model,
    recommend,
    train_tree,
    write_jsonl,
)
from meloid.prover import prove_theory
from meloid.rewrite import eval_ground
from meloid.strategy.search import SearchBudget, run_strategy
from meloid.strategy.syntax import BUILTIN_STRATEGIES, Ref
from meloid.tactics import enumerate_induct_args, find_counterexample, induct_goal, replay_trace
from meloid.tactics.replay import format_trace
from meloid.tactics.state import InductArgs, ProofState

from cart_oracle import check_against_oracle, random_dataset
from conftest import THEORIES, context_before, theory
from mutation import corpus_mutants

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_1_prover_end_to_end():
    required = {
        "app xs Nil = xs",
        "app (app xs ys) zs = app xs (app ys zs)",
        "length (app xs ys) = plus (length xs) (length ys)",
        "plus x Zero = x",
        "plus x (Suc y) = Suc (plus x y)",
        "rev (app xs ys) = app (rev ys) (rev xs)",
    }
    start = time.monotonic()
    failures, seen, total = [], set(), 0
    for name in THEORIES:
        for result in prove_theory(theory(name), SearchBudget(time_limit=None)):
            total += 1
            lemma = result.context.lemma(result.lemma)
            text = str(lemma.goal.conclusion)
            if not result.proved:
                failures.append(f"{name}.{result.lemma} {result.outcome.status}")
                continue
            if not replay_trace(result.context, result.lemma, result.outcome.trace):
                failures.append(f"{name}.{result.lemma} replay")
            if text in required and result.strategy == "DInd":
                seen.add(text)
    elapsed = time.monotonic() - start
    ok = not failures and seen == required and elapsed < 60
    report(1, "prove discharges and replays the whole corpus", ok,
           f"{total} lemmas, {elapsed:.1f}s, missing {sorted(required - seen)}, failures {failures}")


def test_2_quickcheck_pruning():
    ctx = theory("Lists")
    start = time.monotonic()
    problems = []
    for text in ("app xs ys = app ys xs", "itrev xs ys = rev xs", "rev xs = xs", "plus x y = x"):
        goal = ctx.goal(text)
        cex = find_counterexample(ctx, goal)
        if cex is None:
            problems.append(f"{text}: none")
            continue
        subst = dict(cex.assignment)
        lhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.lhs))
        rhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.rhs))
        if lhs is None or lhs == rhs:
            problems.append(f"{text}: not revalidated")
    elapsed = time.monotonic() - start
    report(2, "counterexamples for the false conjectures", not problems and elapsed < 10,
           f"{elapsed:.2f}s {problems}")


def test_3_conjecturing_end_to_end():
    ctx = context_before("Lists", "itrev_nil")
    start = time.monotonic()
    assert {l.name for l in ctx.proved_lemmas} >= {"app_nil", "app_assoc"}
    outcome = run_strategy(Ref("CDInd"), ProofState.initial(ctx, ctx.lemma("itrev_nil").goal),
                           SearchBudget(time_limit=None), strategies=BUILTIN_STRATEGIES)
    elapsed = time.monotonic() - start
    expected = ctx.equation("itrev v1 v2 = app (rev v1) v2")
    trace_text = format_trace(outcome.trace)
    ok = (
        outcome.proved
        and alpha_equivalent(outcome.conjecture, expected)
        and outcome.stats.fastforce_passed >= 1
        and outcome.stats.quickcheck_passed >= 1
        and bool(replay_trace(ctx, "itrev_nil", outcome.trace))
        # the step case uses the hypothesis on the left and app_assoc on the right
        and "ih:1" in trace_text
        and "lemma:app_assoc:lr" in trace_text
        and elapsed < 30
    )
    report(3, "CDInd proves itrev xs Nil = rev xs", ok,
           f"{outcome.status}, conjecture {outcome.conjecture}, {elapsed:.2f}s, stats {outcome.stats.to_json()}")


def test_4_bounded_induction_soundness():
    contexts = [theory(n) for n in THEORIES]
    false_goals = []
    for ctx, goal in corpus_mutants(contexts):
        if find_counterexample(ctx, goal) is not None:
            false_goals.append((ctx, goal))
    preserved = sum(
        1
        for ctx, goal in false_goals
        if all(
            any(find_counterexample(ctx, s) is not None for s in induct_goal(ctx, goal, args))
            for args in enumerate_induct_args(goal, 2)
        )
    )
    spurious = []
    for ctx in contexts:
        for lemma in ctx.lemmas:
            for args in enumerate_induct_args(lemma.goal, 2):
                for s in induct_goal(ctx, lemma.goal, args):
                    if find_counterexample(ctx, s) is not None:
                        spurious.append(f"{lemma.name} {args}")
    ok = len(false_goals) >= 100 and preserved == len(false_goals) and not spurious
    report(4, "induction keeps falsity visible and truth intact", ok,
           f"{preserved}/{len(false_goals)} false goals, spurious {spurious[:3]}")


def test_5_tree_oracle_equivalence():
    rng = random.Random(20261015)
    failures = 0
    for _ in range(50):
        rows, ys = random_dataset(rng, 64, 8)
        params = TreeParams(max_depth=rng.randint(1, 8), min_leaf=rng.randint(1, 4))
        tree = train_tree(rows, ys, params)
        try:
            check_against_oracle(tree.root, rows, ys, params)
        except AssertionError:
            failures += 1
    report(5, "train_tree matches the exact greedy oracle", failures == 0, f"{50 - failures}/50 datasets")


@pytest.fixture(scope="module")
def corpus_records(tmp_path_factory):
    d = tmp_path_factory.mktemp("mine")
    runs = []
    for i in range(2):
        records = active_mine([theory(n) for n in THEORIES])
        path = d / f"run{i}.jsonl"
        write_jsonl(records, path)
        runs.append((records, path.read_bytes()))
    return runs


def test_6_mining_reproducibility(corpus_records):
    (records, first), (_, second) = corpus_records
    labels = {r.label for r in records}
    itrev = {r.variant: r.label for r in records if r.lemma == "itrev_general"}
    ok = (
        first == second
        and len(records) >= 150
        and {0.0, 1.0} <= labels
        and itrev.get(InductArgs("v1", ("v2",))) == 1.0
        and itrev.get(InductArgs("v1")) == 0.0
    )
    report(6, "mining is byte-identical and labels itrev correctly", ok, f"{len(records)} records")


def test_7_recommendation_sanity(corpus_records):
    records, _ = corpus_records[0]
    metrics = evaluate_model(records)
    columns = list(zip(*(r.features.bits for r in records)))
    varying = sum(1 for col in columns if len(set(col)) > 1)
    model = train_tree([r.features.bits for r in records], [r.label for r in records])
    ctx = context_before("Lists", "itrev_general")
    ranked = [r.args for r in recommend(ctx, ctx.lemma("itrev_general").goal, model, top_k=100)]
    ok = (
        metrics.top1 is not None
        and metrics.top1 > metrics.random_top1
        and varying >= 25
        and ranked.index(InductArgs("v1", ("v2",))) < ranked.index(InductArgs("v1"))
    )
    report(7, "recommendations beat random ranking", ok,
           f"top1 {metrics.top1:.3f} vs random {metrics.random_top1:.3f}, {varying} varying assertions")


def test_8_feature_contract(corpus_records):
    records, _ = corpus_records[0]
    expected = sum(
        len(list(enumerate_induct_args(lemma.goal, 2))) for n in THEORIES for lemma in theory(n).lemmas
    )
    total = len(records) == expected and all(len(r.features.bits) == 40 for r in records)
    model = train_tree([r.features.bits for r in records], [r.label for r in records])
    data = json.loads(model.dumps())
    data_bad = dict(data, catalog_hash="0" * 64)
    try:
        RegressionTree.from_json(data_bad)
        rejected = False
    except ModelError:
        rejected = True
    ok = len(ASSERTION_IDS) == 40 and total and data["catalog_hash"] == CATALOG_HASH and rejected
    report(8, "40 total assertions and catalog-checked models", ok,
           f"{len(records)}/{expected} triples featurized")
