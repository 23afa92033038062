"""Exact decoding for the second-order segmentation scorer.

The sequence score is the sum over positions of the per-state content
score plus a first-state weight at position 0, a state-bigram weight at
position 1 and a state-trigram weight afterwards. Decoding runs on a
lattice whose nodes are state pairs: a pair (s_i, s_j) at position t can
only be followed by pairs (s_j, s_k) at t+1, which keeps the search
exact while exposing two states of history to the transition weights.

Ties are broken by a fixed preference order over states, applied
lexicographically from the start of the sequence: among all maximizing
sequences the decoder returns the one that is first in that order. This
is implemented with a backward best-completion table and a greedy
forward walk that always takes the most-preferred state still achieving
the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence as Seq

import numpy as np

from .errors import EmptyInputError, EmptySequenceError, InvalidStateError, LengthMismatchError
from .features import FeatureIndex, joint_features, sparse_dot


@dataclass(frozen=True)
class DecoderConfig:
    """State set for decoding; tuple order is the tie-break preference."""

    states: tuple[int, ...] = (1, -1)

    @property
    def num_states(self) -> int:
        return len(self.states)


def collapse(states: Seq[int]) -> list[int]:
    """Merge adjacent duplicate states into the relationship sequence."""
    if len(states) == 0:
        raise EmptyInputError("cannot collapse an empty state sequence")
    out = [states[0]]
    for s in states[1:]:
        if s != out[-1]:
            out.append(s)
    return out


def score_sequence(contents: np.ndarray, y: Seq[int], weights: np.ndarray,
                   index: FeatureIndex) -> float:
    """Dot product of the weights with the joint feature map of (x, y)."""
    if len(y) != contents.shape[0]:
        raise LengthMismatchError(
            f"{len(y)} states for {contents.shape[0]} sentences")
    return sparse_dot(weights, joint_features(contents, y, index))


def _check_setup(contents: np.ndarray, index: FeatureIndex,
                 config: Optional[DecoderConfig]) -> DecoderConfig:
    if config is None:
        config = DecoderConfig(states=index.states)
    if set(config.states) != set(index.states):
        raise InvalidStateError(
            f"decoder states {config.states} do not match index states {index.states}")
    if contents.shape[0] == 0:
        raise EmptySequenceError("cannot decode an empty sequence")
    return config


def viterbi_decode(contents: np.ndarray, weights: np.ndarray,
                   index: FeatureIndex,
                   config: Optional[DecoderConfig] = None) -> list[int]:
    """Exact argmax state sequence for one content matrix."""
    config = _check_setup(contents, index, config)
    return _decode(contents, weights, index, config.states,
                   [None] * contents.shape[0])


def constrained_viterbi(contents: np.ndarray,
                        partial_labels: Seq[Optional[int]],
                        weights: np.ndarray, index: FeatureIndex,
                        config: Optional[DecoderConfig] = None) -> list[int]:
    """Exact argmax over state sequences consistent with the given labels.

    Positions labeled None are free; with no labels this equals
    ``viterbi_decode`` and with all positions labeled it returns the
    labels verbatim.
    """
    config = _check_setup(contents, index, config)
    if len(partial_labels) != contents.shape[0]:
        raise LengthMismatchError(
            f"{len(partial_labels)} labels for {contents.shape[0]} sentences")
    for lab in partial_labels:
        if lab is not None and lab not in config.states:
            raise InvalidStateError(f"label {lab!r} not in state set {config.states}")
    return _decode(contents, weights, index, config.states, list(partial_labels))


def _decode(contents: np.ndarray, weights: np.ndarray, index: FeatureIndex,
            pref: tuple[int, ...], labels: list[Optional[int]]) -> list[int]:
    l = contents.shape[0]
    emissions = contents @ index.content_weight_matrix(weights)  # (l, S)
    emit = {s: emissions[:, j] for j, s in enumerate(index.states)}
    allowed = [pref if lab is None else (lab,) for lab in labels]

    if l == 1:
        best_state, best_score = None, None
        for s in allowed[0]:
            sc = weights[index.init_id(s)] + emit[s][0]
            if best_score is None or sc > best_score:
                best_state, best_score = s, sc
        return [best_state]

    init_w = {s: weights[index.init_id(s)] for s in pref}
    trans1_w = {(s, p): weights[index.trans1_id(s, p)]
                for s in pref for p in pref}
    trans2_w = {(s, p, pp): weights[index.trans2_id(s, p, pp)]
                for s in pref for p in pref for pp in pref}

    # beta[t][(a, b)]: best achievable score of positions t+1.. given the
    # states at positions (t-1, t) are (a, b)
    betas: list[dict[tuple[int, int], float]] = [None] * l
    betas[l - 1] = {(a, b): 0.0 for a in allowed[l - 2] for b in allowed[l - 1]}
    for t in range(l - 2, 0, -1):
        beta_t = {}
        nxt = betas[t + 1]
        for a in allowed[t - 1]:
            for b in allowed[t]:
                best = None
                for c in allowed[t + 1]:
                    val = emit[c][t + 1] + trans2_w[(c, b, a)] + nxt[(b, c)]
                    if best is None or val > best:
                        best = val
                beta_t[(a, b)] = best
        betas[t] = beta_t

    best_pair, best_score = None, None
    for a in allowed[0]:
        for b in allowed[1]:
            sc = (init_w[a] + emit[a][0] + emit[b][1] + trans1_w[(b, a)]
                  + betas[1][(a, b)])
            if best_score is None or sc > best_score:
                best_pair, best_score = (a, b), sc
    y = list(best_pair)

    for t in range(2, l):
        a, b = y[t - 2], y[t - 1]
        target = betas[t - 1][(a, b)]
        nxt = betas[t]
        for c in allowed[t]:
            if emit[c][t] + trans2_w[(c, b, a)] + nxt[(b, c)] == target:
                y.append(c)
                break
    return y
