import math
import random
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from meloid.learn import DataRecord, FeatureVector, evaluate_model, random_hit_rate
from meloid.learn.evaluate import assign_folds
from meloid.learn.features import ASSERTION_IDS
from meloid.tactics.state import InductArgs

from conftest import mined

B05 = ASSERTION_IDS.index("B05")


def synthetic(n_lemmas=12, per_lemma=4, label_fn=None, seed=0):
    rng = random.Random(seed)
    out = []
    for l in range(n_lemmas):
        for i in range(per_lemma):
            bits = [rng.random() < 0.5 for _ in range(40)]
            if i == 0:
                bits[B05] = True  # every goal has a positive variant
            label = label_fn(bits) if label_fn else (1.0 if bits[B05] else 0.0)
            out.append(DataRecord("T", f"l{l:02d}", InductArgs(f"x{i}"), FeatureVector(tuple(bits)), label, i))
    return out


def test_perfect_feature_gives_top1_one():
    records = synthetic()
    for folds in (None, 2, 3, 12):
        m = evaluate_model(records, folds=folds)
        assert m.top1 == 1.0 and m.top3 == 1.0
        assert m.goals_with_positive == 12


def test_constant_labels_give_zero_mse():
    m = evaluate_model(synthetic(label_fn=lambda bits: 0.5), folds=3)
    assert m.mse == 0.0
    assert m.top1 is None and m.random_top1 is None
    assert m.goals_with_positive == 0


def test_fold_validation():
    records = synthetic(n_lemmas=3)
    with pytest.raises(ValueError):
        evaluate_model(records, folds=1)
    with pytest.raises(ValueError):
        evaluate_model(records, folds=4)
    with pytest.raises(ValueError):
        evaluate_model([])


def test_folds_keep_lemmas_together_and_balance():
    fold_of = assign_folds(synthetic(n_lemmas=10), 3)
    sizes = sorted(list(fold_of.values()).count(k) for k in range(3))
    assert sizes == [3, 3, 4]


def _brute_hit_rate(n, p, k):
    hits = total = 0
    labels = [1] * p + [0] * (n - p)
    for perm in permutations(range(n)):
        total += 1
        hits += any(labels[i] for i in perm[:k])
    return hits / total


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, 4))))
def test_random_baseline_matches_enumeration(args):
    n, p, k = args
    assert math.isclose(random_hit_rate(n, p, k), _brute_hit_rate(n, p, k), abs_tol=1e-12)


def test_corpus_metrics_beat_random_and_are_reproducible():
    records = list(mined())
    a = evaluate_model(records)
    b = evaluate_model(records)
    assert a == b
    assert a.folds == len({(r.theory, r.lemma) for r in records})
    assert a.top1 > a.random_top1
    assert 0.0 <= a.mse <= 1.0
