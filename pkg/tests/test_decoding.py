import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reltraj.decoding import (
    DecoderConfig,
    collapse,
    constrained_viterbi,
    score_sequence,
    viterbi_decode,
)
from reltraj.errors import (
    EmptyInputError,
    EmptySequenceError,
    InvalidStateError,
    LengthMismatchError,
)
from reltraj.features import FeatureIndex, joint_features, sparse_dot


def brute_force_argmax(contents, weights, index, pref, labels=None):
    """Enumerate all consistent state sequences in tie-preference order and
    keep the first one attaining the maximum score."""
    best, best_score = None, None
    for y in itertools.product(pref, repeat=contents.shape[0]):
        if labels is not None and any(
                lab is not None and lab != s for lab, s in zip(labels, y)):
            continue
        sc = score_sequence(contents, list(y), weights, index)
        if best_score is None or sc > best_score:
            best, best_score = list(y), sc
    return best


def random_instance(rng, states):
    index = FeatureIndex(states=states)
    l = int(rng.integers(1, 8))
    weights = rng.normal(size=index.size)
    contents = rng.normal(size=(l, 33))
    return contents, weights, index


class TestScoreSequence:
    def test_zero_weights(self):
        index = FeatureIndex()
        contents = np.ones((4, 33))
        for y in itertools.product((1, -1), repeat=4):
            assert score_sequence(contents, list(y), np.zeros(index.size), index) == 0.0

    def test_single_active_feature(self):
        index = FeatureIndex()
        w = np.zeros(index.size)
        w[index.init_id(1)] = 2.5
        contents = np.zeros((3, 33))
        assert score_sequence(contents, [1, 1, -1], w, index) == 2.5
        assert score_sequence(contents, [-1, 1, 1], w, index) == 0.0

    def test_matches_explicit_dot_product(self):
        rng = np.random.default_rng(11)
        index = FeatureIndex()
        for _ in range(20):
            contents = rng.normal(size=(5, 33))
            w = rng.normal(size=index.size)
            y = [int(s) for s in rng.choice([1, -1], size=5)]
            phi = joint_features(contents, y, index)
            dense = np.zeros(index.size)
            for fid, v in phi.items():
                dense[fid] = v
            assert score_sequence(contents, y, w, index) == pytest.approx(dense @ w)

    def test_length_mismatch(self):
        index = FeatureIndex()
        with pytest.raises(LengthMismatchError):
            score_sequence(np.zeros((3, 33)), [1, 1], np.zeros(index.size), index)


class TestViterbi:
    def test_all_zero_weights_resolve_by_tie_rule(self):
        index = FeatureIndex()
        contents = np.zeros((3, 33))
        assert viterbi_decode(contents, np.zeros(index.size), index) == [1, 1, 1]
        flipped = DecoderConfig(states=(-1, 1))
        assert viterbi_decode(contents, np.zeros(index.size), index, flipped) == [-1, -1, -1]

    def test_length_one(self):
        index = FeatureIndex()
        w = np.zeros(index.size)
        w[index.init_id(-1)] = 1.0
        assert viterbi_decode(np.zeros((1, 33)), w, index) == [-1]

    def test_empty_sequence_rejected(self):
        index = FeatureIndex()
        with pytest.raises(EmptySequenceError):
            viterbi_decode(np.zeros((0, 33)), np.zeros(index.size), index)

    def test_matches_enumeration_on_random_instances(self):
        rng = np.random.default_rng(1234)
        for _ in range(150):
            states = (1, -1) if rng.random() < 0.5 else (1, -1, 0)
            contents, weights, index = random_instance(rng, states)
            got = viterbi_decode(contents, weights, index)
            want = brute_force_argmax(contents, weights, index, states)
            assert got == want

    def test_matches_enumeration_under_ties(self):
        # integer weights and contents force frequent exact ties
        rng = np.random.default_rng(99)
        for _ in range(150):
            states = (1, -1) if rng.random() < 0.5 else (1, -1, 0)
            index = FeatureIndex(states=states)
            l = int(rng.integers(1, 6))
            weights = rng.integers(-1, 2, size=index.size).astype(float)
            contents = rng.integers(0, 2, size=(l, 33)).astype(float)
            got = viterbi_decode(contents, weights, index)
            want = brute_force_argmax(contents, weights, index, states)
            assert got == want

    def test_decoded_score_dominates_enumerable_sequences(self):
        rng = np.random.default_rng(7)
        index = FeatureIndex()
        for _ in range(25):
            contents, weights, index_ = random_instance(rng, (1, -1))
            best = viterbi_decode(contents, weights, index_)
            best_score = score_sequence(contents, best, weights, index_)
            for y in itertools.product((1, -1), repeat=contents.shape[0]):
                assert best_score >= score_sequence(contents, list(y), weights, index_) - 1e-9

    def test_shift_invariance(self):
        # adding a constant to every init weight (or every trigram weight)
        # shifts all scores equally and never changes the argmax
        rng = np.random.default_rng(21)
        index = FeatureIndex()
        for _ in range(25):
            contents, weights, _ = random_instance(rng, (1, -1))
            base = viterbi_decode(contents, weights, index)
            shifted = weights.copy()
            for s in index.states:
                shifted[index.init_id(s)] += 3.7
            assert viterbi_decode(contents, shifted, index) == base
            shifted = weights.copy()
            for s in index.states:
                for p in index.states:
                    for pp in index.states:
                        shifted[index.trans2_id(s, p, pp)] -= 1.3
            if contents.shape[0] >= 3:
                assert viterbi_decode(contents, shifted, index) == base


class TestConstrainedViterbi:
    def test_fully_constrained_returns_labels(self):
        rng = np.random.default_rng(3)
        index = FeatureIndex()
        contents = rng.normal(size=(5, 33))
        weights = rng.normal(size=index.size)
        labels = [1, -1, -1, 1, -1]
        got = constrained_viterbi(contents, labels, weights, index)
        assert got == labels

    def test_unconstrained_equals_viterbi(self):
        rng = np.random.default_rng(4)
        index = FeatureIndex()
        for _ in range(20):
            contents = rng.normal(size=(int(rng.integers(1, 8)), 33))
            weights = rng.normal(size=index.size)
            free = [None] * contents.shape[0]
            assert (constrained_viterbi(contents, free, weights, index)
                    == viterbi_decode(contents, weights, index))

    def test_matches_constrained_enumeration(self):
        rng = np.random.default_rng(77)
        for _ in range(150):
            states = (1, -1) if rng.random() < 0.5 else (1, -1, 0)
            contents, weights, index = random_instance(rng, states)
            labels = [states[rng.integers(len(states))] if rng.random() < 0.4 else None
                      for _ in range(contents.shape[0])]
            got = constrained_viterbi(contents, labels, weights, index)
            want = brute_force_argmax(contents, weights, index, states, labels)
            assert got == want

    def test_constrained_score_never_exceeds_free_score(self):
        rng = np.random.default_rng(8)
        index = FeatureIndex()
        for _ in range(30):
            contents = rng.normal(size=(int(rng.integers(1, 8)), 33))
            weights = rng.normal(size=index.size)
            labels = [int(rng.choice([1, -1])) if rng.random() < 0.5 else None
                      for _ in range(contents.shape[0])]
            free = viterbi_decode(contents, weights, index)
            cons = constrained_viterbi(contents, labels, weights, index)
            free_score = score_sequence(contents, free, weights, index)
            cons_score = score_sequence(contents, cons, weights, index)
            assert cons_score <= free_score + 1e-9
            if all(lab is None or lab == s for lab, s in zip(labels, free)):
                assert cons == free

    def test_bad_label_rejected(self):
        index = FeatureIndex()
        with pytest.raises(InvalidStateError):
            constrained_viterbi(np.zeros((2, 33)), [3, None],
                                np.zeros(index.size), index)

    def test_label_length_mismatch(self):
        index = FeatureIndex()
        with pytest.raises(LengthMismatchError):
            constrained_viterbi(np.zeros((2, 33)), [None],
                                np.zeros(index.size), index)


class TestCollapse:
    def test_examples(self):
        assert collapse([1, 1, -1, -1, -1, 1]) == [1, -1, 1]
        assert collapse([1]) == [1]
        # narrative arc: cooperative, non-cooperative, cooperative
        assert collapse([1, 1, 1, -1, -1, 1, 1]) == [1, -1, 1]

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            collapse([])

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=20))
    def test_properties(self, states):
        out = collapse(states)
        assert collapse(out) == out          # idempotent
        assert len(out) <= len(states)
        assert all(a != b for a, b in zip(out, out[1:]))
        # collapse preserves the subsequence of change points
        assert out[0] == states[0] and out[-1] == states[-1]
