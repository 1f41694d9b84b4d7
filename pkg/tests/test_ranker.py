import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from compfix.corpus import ClassCatalog, RepairClass
from compfix.ranker import (Node, PrototypeBank, Ranker, RankingTree, TrainConfig, blend, build_prototypes,
                            build_tree, load_prototypes, n_prototypes, order_classes, prototype_score, rank,
                            save_prototypes, tree_scores)

FAST = TrainConfig(hidden=(16,), mlp_epochs=30, linear_epochs=30, mlp_learning_rate=0.1,
                   linear_learning_rate=0.1)


class Const:
    def __init__(self, p):
        self.p = np.asarray(p, dtype=float)

    def predict_proba(self, X):
        return np.tile(self.p, (np.atleast_2d(X).shape[0], 1))


def catalog(specs):
    """``specs`` is a list of (error_id, dels, ins, kind, count)."""
    return ClassCatalog([RepairClass(e, tuple(d), tuple(i), k, class_id=n, count=c)
                         for n, (e, d, i, k, c) in enumerate(specs)])


def six_class_fixture(rng):
    specs = [("E1", (), (";",), "Insert", 5), ("E1", (), (")",), "Insert", 5),
             ("E1", ("=",), ("==",), "Replace", 5), ("E2", (",",), (";",), "Replace", 5),
             ("E2", (";",), (), "Delete", 5), ("E2", (), ("(",), "Insert", 5)]
    cat = catalog(specs)
    centers = rng.normal(0, 3, (6, 8))
    labels = np.repeat(np.arange(6), 5)
    X = centers[labels] + rng.normal(0, 0.1, (30, 8))
    return cat, X, labels


def test_hand_set_chain_rule():
    tree = RankingTree(Node((), [0, Node(("b",), [1, 2], Const([0.5, 0.5]))], Const([0.4, 0.6])), 3)
    np.testing.assert_allclose(tree.scores(np.zeros(2))[0], [0.4, 0.3, 0.3])
    assert tree_scores(np.zeros(2), tree) == pytest.approx({0: 0.4, 1: 0.3, 2: 0.3})


def test_one_class_tree_scores_one():
    cat = catalog([("E1", (), (";",), "Insert", 3)])
    tree = build_tree(cat, np.eye(3), [0, 0, 0], FAST)
    assert tree_scores(np.ones(3), tree) == {0: 1.0}
    assert rank(np.ones(3), tree, None, cat)[0].class_id == 0


def test_replace_vs_insert_split_at_root(rng):
    cat = catalog([("E1", (), (";",), "Insert", 10), ("E1", ("=",), ("==",), "Replace", 10)])
    X = np.vstack([rng.normal(-2, 0.3, (10, 4)), rng.normal(2, 0.3, (10, 4))])
    tree = build_tree(cat, X, np.repeat([0, 1], 10), FAST)
    assert [n.key for n in tree.nodes()] == [()]
    assert sorted(tree.leaves()) == [0, 1]


def test_leaf_set_equals_catalog(rng):
    cat, X, labels = six_class_fixture(rng)
    tree = build_tree(cat, X, labels, FAST)
    assert sorted(tree.leaves()) == list(range(6))
    assert len(tree.leaves()) == len(set(tree.leaves()))
    # root keyed on Replace vs Other, then errorID
    assert {c.key[0] for c in tree.root.children if isinstance(c, Node)} == {"Replace", "Other"}


def test_class_without_training_points_is_excluded(rng):
    cat, X, labels = six_class_fixture(rng)
    keep = labels != 3
    tree = build_tree(cat, X[keep], labels[keep], FAST)
    assert 3 not in tree.leaves()
    assert tree.scores(X[:1])[0, 3] == 0.0


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 8, elements=st.floats(-20, 20)))
def test_tree_scores_sum_to_one(x):
    tree = _SHARED_TREE[0]
    assert abs(tree.scores(x).sum() - 1.0) < 1e-6


_SHARED_TREE = [build_tree(*six_class_fixture(np.random.default_rng(1)), FAST)]


def test_duplicate_point_keeps_topology(rng):
    cat, X, labels = six_class_fixture(rng)
    a = build_tree(cat, X, labels, FAST)
    b = build_tree(cat, np.vstack([X, X[:1]]), np.append(labels, labels[0]), FAST)
    assert [n.key for n in a.nodes()] == [n.key for n in b.nodes()]
    assert a.leaves() == b.leaves()


def test_tree_save_load(tmp_path, rng):
    cat, X, labels = six_class_fixture(rng)
    tree = build_tree(cat, X, labels, FAST)
    manifest = tree.save(tmp_path)
    back = RankingTree.load(tmp_path, manifest)
    np.testing.assert_allclose(back.scores(X), tree.scores(X), rtol=1e-6, atol=1e-9)


# ---------------------------------------------------------------------------
# prototypes

@pytest.mark.parametrize("n,k", [(1, 1), (25, 1), (26, 2), (50, 2), (51, 3)])
def test_n_prototypes(n, k):
    assert n_prototypes(n) == k


def test_prototype_counts_and_single_point(rng):
    X = rng.normal(size=(27, 3))
    labels = np.array([0] * 26 + [1])
    bank = build_prototypes(X, labels)
    assert len(bank.centroids[0]) == 2
    np.testing.assert_array_equal(bank.centroids[1][0], X[26])


def test_prototype_score_examples():
    bank = PrototypeBank({0: np.array([[0.0, 0.0]])})
    assert prototype_score([0.0, 0.0], bank, 0) == 1.0
    assert prototype_score([1.0, 1.0], bank, 0) == pytest.approx(math.exp(-1))
    assert prototype_score([1.0, 1.0], bank, 5) == 0.0


@given(arrays(np.float64, 4, elements=st.floats(-3, 3)), arrays(np.float64, (3, 4), elements=st.floats(-3, 3)))
def test_prototype_score_is_best_centroid(x, cents):
    bank = PrototypeBank({2: cents})
    oracle = max(math.exp(-0.5 * sum((a - b) ** 2 for a, b in zip(x, c))) for c in cents)
    assert prototype_score(x, bank, 2) == pytest.approx(oracle, rel=1e-9, abs=1e-300)
    assert bank.scores(x, 3)[0, 2] == pytest.approx(oracle, rel=1e-9, abs=1e-300)


def test_prototypes_save_load(tmp_path, rng):
    bank = build_prototypes(rng.normal(size=(30, 3)), np.repeat([0, 4], 15))
    save_prototypes(bank, tmp_path)
    back = load_prototypes(tmp_path)
    assert sorted(back.centroids) == [0, 4]
    np.testing.assert_allclose(back.centroids[4], bank.centroids[4], rtol=1e-8)


# ---------------------------------------------------------------------------
# blending and ordering

def test_blend_example():
    assert blend(0.5, 1.0) == pytest.approx(0.6)


def test_order_ties_by_count_then_id():
    assert order_classes([0.5, 0.5, 0.5, 0.9], [1, 3, 3, 0]) == [3, 1, 2, 0]


@given(arrays(np.float64, 6, elements=st.floats(0, 1)))
def test_disabled_bank_keeps_tree_order(s):
    counts = np.arange(6)[::-1]
    assert order_classes(blend(s, np.zeros(6)), counts) == order_classes(s, counts)


def test_reranking_corrects_tree_mistake():
    # the tree prefers class 0, but x sits on a class-1 prototype
    cat = catalog([("E1", (), (";",), "Insert", 50), ("E1", (), (")",), "Insert", 2)])
    tree = RankingTree(Node((), [0, 1], Const([0.55, 0.45])), 2)
    bank = PrototypeBank({0: np.array([[5.0, 5.0]]), 1: np.array([[0.0, 0.0]])})
    x = np.array([0.01, 0.0])
    assert rank(x, tree, None, cat)[0].class_id == 0
    top = rank(x, tree, bank, cat)
    assert top[0].class_id == 1
    assert top[0].score == pytest.approx(0.8 * 0.45 + 0.2 * math.exp(-0.5 * 1e-4))


def test_ranker_scores_are_sorted(rng):
    cat, X, labels = six_class_fixture(rng)
    r = Ranker(build_tree(cat, X, labels, FAST), build_prototypes(X, labels), cat)
    out = r.rank(X[7])
    assert [c.class_id for c in out][0] == labels[7]
    assert all(a.score >= b.score for a, b in zip(out, out[1:]))
    assert all(0 < c.prototype_score <= 1 for c in out)
    assert len(r.rank(X[7], k=3)) == 3
