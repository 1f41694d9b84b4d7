import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from compfix.corpus import bigrams
from compfix.lang import EOL
from compfix.features import build_vocabulary, encode_many
from compfix.localizer import hamming_loss, load_localizers, localize, save_localizers, train_localizers

A = ("VARIABLE_INT", "=", "VARIABLE_INT")
B = ("printf", "(", "LITERAL_STRING", ")", ";", ";")
C = ("VARIABLE_INT", "=", "LITERAL_INT")


def _fit():
    lines = [A, C, B, B, A]
    labels = [0, 0, 1, 1, 2]
    profiles = [{("VARIABLE_INT", EOL)}, {("LITERAL_INT", EOL)}, {(";", ";")}, {(";", ";")},
                {("=", "VARIABLE_INT")}]
    vocab = build_vocabulary([("E1", ln) for ln in lines])
    X = encode_many([(ln, "E1") for ln in lines], vocab)
    return vocab, X, lines, labels, profiles, train_localizers(X, labels, profiles, vocab)


def test_hamming_examples():
    assert hamming_loss({"a"}, {"b"}) == 2
    assert hamming_loss({"a", "b"}, {"b", "c"}) == 2
    assert hamming_loss(set(), set()) == 0


def test_memorizes_training_profiles():
    vocab, X, lines, labels, profiles, locs = _fit()
    for x, ln, cid, prof in zip(X, lines, labels, profiles):
        assert localize(x, ln, cid, locs, vocab) == prof


def test_single_example_class_uses_prior():
    vocab, X, lines, labels, profiles, locs = _fit()
    assert locs[2].prior is not None
    assert localize(X[0], A, 2, locs, vocab) == profiles[4]
    # prior bigrams absent from the line are dropped
    assert localize(X[2], B, 2, locs, vocab) == frozenset()


def test_unknown_class_localizes_nothing():
    vocab, X, *_ , locs = _fit()
    assert localize(X[0], A, 17, locs, vocab) == frozenset()


def test_classes_are_isolated():
    vocab, X, lines, labels, profiles, locs = _fit()
    # retraining without class 1 must not change class 0's trees
    keep = [i for i, l in enumerate(labels) if l != 1]
    locs2 = train_localizers(X[keep], [labels[i] for i in keep], [profiles[i] for i in keep], vocab)
    assert set(locs2[0].trees) == set(locs[0].trees)
    for b in locs[0].trees:
        np.testing.assert_array_equal(locs2[0].trees[b].predict(X), locs[0].trees[b].predict(X))


def test_save_load_round_trip(tmp_path):
    vocab, X, lines, labels, profiles, locs = _fit()
    save_localizers(locs, tmp_path)
    back = load_localizers(tmp_path)
    assert sorted(back) == sorted(locs)
    for x, ln in zip(X, lines):
        for cid in locs:
            assert localize(x, ln, cid, back, vocab) == localize(x, ln, cid, locs, vocab)


_TAG = st.sampled_from(["VARIABLE_INT", "=", ";", "(", ")", "LITERAL_INT"])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.lists(_TAG, min_size=1, max_size=6), st.integers(0, 2), st.integers(0, 5)),
                min_size=1, max_size=12),
       st.lists(_TAG, max_size=6))
def test_prediction_is_subset_of_line_bigrams(rows, query):
    lines = [tuple(r[0]) for r in rows]
    labels = [r[1] for r in rows]
    profiles = [{bigrams(ln)[r[2] % len(ln)]} for ln, r in zip(lines, rows)]
    vocab = build_vocabulary([("E1", ln) for ln in lines])
    X = encode_many([(ln, "E1") for ln in lines], vocab)
    locs = train_localizers(X, labels, profiles, vocab)
    xq = encode_many([(tuple(query), "E1")], vocab)[0]
    for cid in set(labels):
        assert localize(xq, query, cid, locs, vocab) <= set(bigrams(query))
