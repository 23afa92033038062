"""Training and prediction for the relationship segmentation model.

The structured model scores full state sequences (see ``decoding``) and
is trained with an averaged structured perceptron. Partially labeled
sequences are folded in by an outer loop that alternates completing
them with constrained decoding and retraining the perceptron on the
completed data. The unstructured baseline is a logistic regression over
the same per-sentence content vectors, trained by plain SGD.

Core functions operate on featurized instances: a content matrix of
shape (sequence length, 33) plus a label tuple. ``featurize_dataset``
bridges from the corpus types; the sklearn-style estimators at the
bottom wrap the same functions for pipeline use.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional, Sequence as Seq

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .corpus import Dataset, PairSequence
from .decoding import (
    DecoderConfig,
    collapse,
    constrained_viterbi,
    score_sequence,
    viterbi_decode,
)
from .errors import (
    EmptyTrainingSetError,
    LengthMismatchError,
    ModelFormatError,
    ValidationError,
)
from .features import (
    NUM_CONTENT_FEATURES,
    FeatureIndex,
    extract_content_matrix,
    joint_features,
    sparse_diff,
)
from .lexicons import LexiconSet

FullInstance = tuple[np.ndarray, tuple[int, ...]]
PartialInstance = tuple[np.ndarray, tuple[Optional[int], ...]]


@dataclass
class ModelWeights:
    """Raw weight vector plus the running accumulators for averaging."""

    w: np.ndarray
    sum_w: np.ndarray
    update_count: int = 0
    epoch_mistakes: tuple[int, ...] = ()

    @property
    def averaged(self) -> np.ndarray:
        return self.sum_w / max(self.update_count, 1)

    def decode_weights(self) -> np.ndarray:
        """Averaged weights once any instance has been visited, else raw."""
        return self.averaged if self.update_count > 0 else self.w


@dataclass(frozen=True)
class TrainConfig:
    outer_iterations: int = 10
    perceptron_epochs: int = 100
    seed: int = 0
    init_scale: float = 0.01
    use_unlabeled: bool = False
    stop_on_convergence: bool = True

    def __post_init__(self):
        if self.outer_iterations < 1:
            raise ValidationError("outer_iterations must be >= 1",
                                  field="outer_iterations")
        if self.perceptron_epochs < 1:
            raise ValidationError("perceptron_epochs must be >= 1",
                                  field="perceptron_epochs")


@dataclass(frozen=True)
class Prediction:
    states: tuple[int, ...]
    relationship_sequence: tuple[int, ...]
    score: float


def make_prediction(contents: np.ndarray, states: Seq[int],
                    weights: np.ndarray, index: FeatureIndex) -> Prediction:
    return Prediction(states=tuple(states),
                      relationship_sequence=tuple(collapse(list(states))),
                      score=score_sequence(contents, states, weights, index))


@dataclass(frozen=True)
class FeaturizedDataset:
    """Content matrices plus labels, grouped by labeling regime."""

    fully_labeled: tuple[FullInstance, ...] = ()
    partially_labeled: tuple[PartialInstance, ...] = ()
    unlabeled: tuple[np.ndarray, ...] = ()


def featurize_dataset(dataset: Dataset, lexicons: LexiconSet) -> FeaturizedDataset:
    def contents(seq: PairSequence) -> np.ndarray:
        return extract_content_matrix(seq, lexicons)

    return FeaturizedDataset(
        fully_labeled=tuple((contents(s), tuple(s.labels))
                            for s in dataset.fully_labeled),
        partially_labeled=tuple((contents(s), tuple(s.labels))
                                for s in dataset.partially_labeled),
        unlabeled=tuple(contents(s) for s in dataset.unlabeled),
    )


def init_weights(index: FeatureIndex, scale: float, seed: int) -> np.ndarray:
    """Uniform random weights in [-scale, +scale], seeded."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, index.size)


def perceptron_train(instances: Seq[FullInstance], epochs: int, seed: int,
                     index: FeatureIndex,
                     config: Optional[DecoderConfig] = None,
                     initial: Optional[np.ndarray] = None,
                     stop_on_convergence: bool = True) -> ModelWeights:
    """Averaged structured perceptron over fully labeled instances.

    Per epoch the instances are visited in a fresh seeded-shuffle order;
    a decode mismatch triggers the additive update with the gold/pred
    feature difference. The averaging accumulator runs after every
    instance visit, so a mistake-free run averages to its own weights.
    With ``stop_on_convergence`` training ends after the first epoch
    with zero mistakes (later epochs could only dilute the average
    toward the already-final weights).
    """
    if not instances:
        raise EmptyTrainingSetError("no training sequences given")
    w = (initial.astype(float).copy() if initial is not None
         else np.zeros(index.size))
    if w.shape != (index.size,):
        raise LengthMismatchError(
            f"initial weights of size {w.shape} for index of size {index.size}")
    sum_w = np.zeros_like(w)
    count = 0
    mistakes_per_epoch = []
    rng = np.random.default_rng(seed)

    for _ in range(epochs):
        order = rng.permutation(len(instances))
        mistakes = 0
        for i in order:
            contents, gold = instances[i]
            pred = viterbi_decode(contents, w, index, config)
            if tuple(pred) != tuple(gold):
                diff = sparse_diff(joint_features(contents, gold, index),
                                   joint_features(contents, pred, index))
                for fid, v in diff.items():
                    w[fid] += v
                mistakes += 1
            sum_w += w
            count += 1
        mistakes_per_epoch.append(mistakes)
        if stop_on_convergence and mistakes == 0:
            break
    return ModelWeights(w=w, sum_w=sum_w, update_count=count,
                        epoch_mistakes=tuple(mistakes_per_epoch))


def semisupervised_train(data: FeaturizedDataset, config: TrainConfig,
                         index: FeatureIndex,
                         decoder_config: Optional[DecoderConfig] = None) -> ModelWeights:
    """Outer completion/retraining loop over full + partial sequences.

    Weights start uniformly random in [-init_scale, +init_scale]. Each
    outer iteration (a) completes every partially labeled sequence with
    constrained decoding under the current averaged weights (and, when
    ``use_unlabeled`` is set, decodes unlabeled sequences freely), then
    (b) retrains the averaged perceptron from the same random starting
    point on the fully labeled and completed sequences. With no partial
    or unlabeled data every iteration is identical, so the result equals
    a single perceptron run from the same seed and initialization.
    """
    if not data.fully_labeled:
        raise EmptyTrainingSetError("need at least one fully labeled sequence")
    w0 = init_weights(index, config.init_scale, config.seed)
    decode_w = w0
    weights: Optional[ModelWeights] = None

    for _ in range(config.outer_iterations):
        completed: list[FullInstance] = []
        for contents, labels in data.partially_labeled:
            states = constrained_viterbi(contents, labels, decode_w, index,
                                         decoder_config)
            completed.append((contents, tuple(states)))
        if config.use_unlabeled:
            for contents in data.unlabeled:
                states = viterbi_decode(contents, decode_w, index, decoder_config)
                completed.append((contents, tuple(states)))
        weights = perceptron_train(
            list(data.fully_labeled) + completed,
            epochs=config.perceptron_epochs, seed=config.seed, index=index,
            config=decoder_config, initial=w0,
            stop_on_convergence=config.stop_on_convergence)
        decode_w = weights.decode_weights()
    return weights


# ---------------------------------------------------------------------------
# unstructured per-sentence baseline

def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class BaselineModel:
    coef: np.ndarray
    intercept: float
    tie_state: int = 1

    def decision(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept

    def predict(self, X: np.ndarray) -> np.ndarray:
        z = self.decision(np.atleast_2d(X))
        out = np.where(z > 0, 1, -1)
        out[z == 0] = self.tie_state
        return out


def baseline_train(X: np.ndarray, y: Seq[int], epochs: int = 200,
                   learning_rate: float = 0.1, seed: int = 0,
                   tie_state: int = 1) -> BaselineModel:
    """Binary logistic regression over content vectors, trained by SGD."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise LengthMismatchError(
            f"features {X.shape} do not align with {y.shape[0]} labels")
    if X.shape[0] == 0:
        raise EmptyTrainingSetError("no labeled sentences given")
    t = (y + 1) / 2.0  # targets in {0, 1}
    w = np.zeros(X.shape[1])
    b = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(X.shape[0]):
            g = t[i] - _sigmoid(np.array([X[i] @ w + b]))[0]
            w += learning_rate * g * X[i]
            b += learning_rate * g
    return BaselineModel(coef=w, intercept=b, tie_state=tie_state)


def baseline_predict(model: BaselineModel, x: np.ndarray) -> int:
    """State of one content vector under the baseline model."""
    return int(model.predict(x.reshape(1, -1))[0])


# ---------------------------------------------------------------------------
# model persistence

MODEL_FORMAT_VERSION = 1


def config_hash(config: TrainConfig) -> str:
    payload = json.dumps({f: getattr(config, f) for f in config.__dataclass_fields__},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def save_model(path, weights: ModelWeights, index: FeatureIndex,
               decoder_config: DecoderConfig, train_config: TrainConfig,
               metadata: Optional[dict] = None):
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "index": index.to_dict(),
        "weights": weights.decode_weights().tolist(),
        "decoder": {"states": list(decoder_config.states)},
        "training": {
            "seed": train_config.seed,
            "outer_iterations": train_config.outer_iterations,
            "perceptron_epochs": train_config.perceptron_epochs,
            "init_scale": train_config.init_scale,
            "use_unlabeled": train_config.use_unlabeled,
            "stop_on_convergence": train_config.stop_on_convergence,
            "config_hash": config_hash(train_config),
        },
        "metadata": metadata or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> tuple[np.ndarray, FeatureIndex, DecoderConfig, dict]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {doc.get('format_version')!r}")
    try:
        index = FeatureIndex.from_dict(doc["index"])
    except ValidationError as exc:
        raise ModelFormatError(str(exc)) from exc
    weights = np.asarray(doc["weights"], dtype=float)
    if weights.shape != (index.size,):
        raise ModelFormatError(
            f"weight vector of size {weights.shape[0]} does not match "
            f"index size {index.size}")
    decoder = DecoderConfig(states=tuple(doc["decoder"]["states"]))
    return weights, index, decoder, doc


# ---------------------------------------------------------------------------
# sklearn-style estimators

def _check_content_matrices(X) -> list[np.ndarray]:
    out = []
    for i, c in enumerate(X):
        c = np.asarray(c, dtype=float)
        if c.ndim != 2 or c.shape[1] != NUM_CONTENT_FEATURES:
            raise ValidationError(
                f"expected an (l, {NUM_CONTENT_FEATURES}) content matrix, "
                f"got shape {c.shape}", field=f"X[{i}]")
        if c.shape[0] == 0:
            raise ValidationError("empty sequence", field=f"X[{i}]")
        out.append(c)
    return out


class RelationshipSegmenter(BaseEstimator):
    """Second-order sequence labeler with fit/predict over pair sequences.

    ``X`` is a list of per-sentence content matrices, one per sequence;
    ``y`` is a list of aligned label sequences whose entries are +1, -1
    or None (unknown). Sequences with all labels known train the
    perceptron directly, sequences with some labels known enter the
    semi-supervised completion loop, and all-None sequences are used
    only when ``use_unlabeled`` is set.
    """

    def __init__(self, states=(1, -1), outer_iterations=10,
                 perceptron_epochs=100, init_scale=0.01, seed=0,
                 use_unlabeled=False, stop_on_convergence=True):
        self.states = states
        self.outer_iterations = outer_iterations
        self.perceptron_epochs = perceptron_epochs
        self.init_scale = init_scale
        self.seed = seed
        self.use_unlabeled = use_unlabeled
        self.stop_on_convergence = stop_on_convergence

    def _configs(self) -> tuple[TrainConfig, DecoderConfig]:
        train = TrainConfig(
            outer_iterations=self.outer_iterations,
            perceptron_epochs=self.perceptron_epochs,
            seed=self.seed, init_scale=self.init_scale,
            use_unlabeled=self.use_unlabeled,
            stop_on_convergence=self.stop_on_convergence)
        return train, DecoderConfig(states=tuple(self.states))

    def fit(self, X, y):
        contents = _check_content_matrices(X)
        if len(contents) != len(y):
            raise LengthMismatchError(
                f"{len(contents)} sequences but {len(y)} label sequences")
        states = set(self.states)
        full, partial, unlabeled = [], [], []
        for i, (c, labels) in enumerate(zip(contents, y)):
            labels = tuple(labels)
            if len(labels) != c.shape[0]:
                raise LengthMismatchError(
                    f"sequence {i}: {c.shape[0]} sentences but {len(labels)} labels")
            known = [s for s in labels if s is not None]
            if any(s not in states for s in known):
                raise ValidationError(
                    f"labels outside state set {tuple(self.states)}", field=f"y[{i}]")
            if len(known) == len(labels):
                full.append((c, labels))
            elif known:
                partial.append((c, labels))
            else:
                unlabeled.append(c)
        train_config, decoder_config = self._configs()
        data = FeaturizedDataset(fully_labeled=tuple(full),
                                 partially_labeled=tuple(partial),
                                 unlabeled=tuple(unlabeled))
        self.index_ = FeatureIndex(states=tuple(self.states))
        self.weights_ = semisupervised_train(data, train_config, self.index_,
                                             decoder_config)
        self.coef_ = self.weights_.decode_weights()
        return self

    def predict(self, X) -> list[list[int]]:
        contents = _check_content_matrices(X)
        _, decoder_config = self._configs()
        return [viterbi_decode(c, self.coef_, self.index_, decoder_config)
                for c in contents]

    def predict_one(self, contents: np.ndarray) -> Prediction:
        [c] = _check_content_matrices([contents])
        _, decoder_config = self._configs()
        states = viterbi_decode(c, self.coef_, self.index_, decoder_config)
        return make_prediction(c, states, self.coef_, self.index_)


class SentenceBaseline(BaseEstimator, ClassifierMixin):
    """Flat logistic-regression classifier over single-sentence vectors."""

    def __init__(self, epochs=200, learning_rate=0.1, seed=0, tie_state=1):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.tie_state = tie_state

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if set(np.unique(y)) - {1, -1}:
            raise ValidationError("labels must be +1/-1", field="y")
        self.model_ = baseline_train(X, y, epochs=self.epochs,
                                     learning_rate=self.learning_rate,
                                     seed=self.seed, tie_state=self.tie_state)
        self.coef_ = self.model_.coef
        self.intercept_ = self.model_.intercept
        self.classes_ = np.array([-1, 1])
        return self

    def decision_function(self, X) -> np.ndarray:
        return self.model_.decision(np.asarray(X, dtype=float))

    def predict(self, X) -> np.ndarray:
        return self.model_.predict(np.asarray(X, dtype=float))
