"""Evaluation metrics, cross-validation harness and synthetic corpora.

Per-sentence quality is scored with precision/recall/F1 per state,
pooled over all test sentences and macro-averaged over the two states;
zero denominators resolve to 0. Sequence-level quality is the mean
Levenshtein distance between collapsed gold and collapsed predicted
relationship sequences. Change detection treats a sequence as positive
when its collapsed prediction contains more than one state.

The harness runs a (restart x fold) grid, each cell seeded from
(seed, restart, fold) only, so results are identical for any worker
count and any execution order.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence as Seq

import numpy as np

from .corpus import (
    Dataset,
    Document,
    MentionSpan,
    PairSequence,
    Sentence,
    Token,
    DependencyEdge,
    extract_pair_sequences,
)
from .decoding import DecoderConfig, collapse, viterbi_decode
from .errors import InvalidParameterError, LengthMismatchError
from .features import FeatureIndex, extract_content_matrix
from .lexicons import (
    FrameLexicon,
    LexiconSet,
    PolarityLexicon,
    StopwordList,
    load_frame_lexicon,
    load_stopwords,
    default_data_path,
)
from .model import (
    FeaturizedDataset,
    TrainConfig,
    baseline_train,
    semisupervised_train,
)

__all__ = [
    "collapse", "edit_distance", "state_prf", "change_detection",
    "change_eval", "ConfusionCounts", "MetricsReport", "cross_validate",
    "GeneratorSpec", "SyntheticCorpus", "generate_synthetic",
]


def edit_distance(a: Seq, b: Seq) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, sa in enumerate(a, start=1):
        cur = [i]
        for j, sb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,           # delete
                           cur[j - 1] + 1,        # insert
                           prev[j - 1] + (sa != sb)))  # substitute
        prev = cur
    return prev[len(b)]


@dataclass
class ConfusionCounts:
    """Pooled per-state true positive / false positive / false negative."""

    tp: dict = field(default_factory=dict)
    fp: dict = field(default_factory=dict)
    fn: dict = field(default_factory=dict)

    def add(self, gold, pred):
        if gold == pred:
            self.tp[gold] = self.tp.get(gold, 0) + 1
        else:
            self.fp[pred] = self.fp.get(pred, 0) + 1
            self.fn[gold] = self.fn.get(gold, 0) + 1

    def prf(self, state) -> tuple[float, float, float]:
        return _prf(self.tp.get(state, 0), self.fp.get(state, 0),
                    self.fn.get(state, 0))


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def state_prf(gold: Seq[int], pred: Seq[int],
              states: tuple[int, ...] = (1, -1)) -> tuple[float, float, float]:
    """Macro-averaged P/R/F over the state set, from pooled counts.

    ``gold`` and ``pred`` are aligned flat sentence-label lists (pool
    sequences before calling).
    """
    if len(gold) != len(pred):
        raise LengthMismatchError(f"{len(gold)} gold vs {len(pred)} predicted")
    counts = ConfusionCounts()
    for g, p in zip(gold, pred):
        counts.add(g, p)
    per_state = [counts.prf(s) for s in states]
    n = len(states)
    return (sum(x[0] for x in per_state) / n,
            sum(x[1] for x in per_state) / n,
            sum(x[2] for x in per_state) / n)


def change_detection(states_or_prediction) -> bool:
    """True when the collapsed sequence contains more than one state."""
    rel = getattr(states_or_prediction, "relationship_sequence", None)
    if rel is None:
        rel = collapse(list(states_or_prediction))
    return len(rel) >= 2


def change_eval(gold_flags: Seq[bool], pred_flags: Seq[bool]) -> tuple[float, float, float]:
    """Macro-averaged P/R/F of the binary changed/unchanged task."""
    if len(gold_flags) != len(pred_flags):
        raise LengthMismatchError(
            f"{len(gold_flags)} gold vs {len(pred_flags)} predicted flags")
    counts = ConfusionCounts()
    for g, p in zip(gold_flags, pred_flags):
        counts.add(bool(g), bool(p))
    pos = counts.prf(True)
    neg = counts.prf(False)
    return ((pos[0] + neg[0]) / 2, (pos[1] + neg[1]) / 2, (pos[2] + neg[2]) / 2)


# ---------------------------------------------------------------------------
# cross-validation harness

@dataclass(frozen=True)
class FoldResult:
    restart: int
    fold: int
    precision: float
    recall: float
    f1: float
    mean_edit_distance: float
    gold_changes: tuple[bool, ...]
    pred_changes: tuple[bool, ...]
    num_sequences: int
    num_sentences: int

    def to_dict(self) -> dict:
        return {
            "restart": self.restart, "fold": self.fold,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "mean_edit_distance": self.mean_edit_distance,
            "num_sequences": self.num_sequences,
            "num_sentences": self.num_sentences,
        }


@dataclass(frozen=True)
class MetricsReport:
    averaged_p: float
    averaged_r: float
    averaged_f: float
    mean_edit_distance: float
    change_prf: tuple[float, float, float]
    per_restart: tuple[dict, ...]
    per_fold: tuple[FoldResult, ...]

    def to_dict(self) -> dict:
        return {
            "summary": {
                "averaged_precision": self.averaged_p,
                "averaged_recall": self.averaged_r,
                "averaged_f1": self.averaged_f,
                "mean_edit_distance": self.mean_edit_distance,
                "change_precision": self.change_prf[0],
                "change_recall": self.change_prf[1],
                "change_f1": self.change_prf[2],
            },
            "per_restart": list(self.per_restart),
            "per_fold": [fr.to_dict() for fr in self.per_fold],
        }


def _task_seed(seed: int, restart: int, fold: int) -> int:
    return int(np.random.SeedSequence([seed, restart, fold]).generate_state(1)[0])


def _labeled_sentences(data: FeaturizedDataset) -> tuple[np.ndarray, np.ndarray]:
    """All gold-labeled sentence vectors in a train split (full sequences
    plus the annotated positions of partial ones)."""
    rows, labels = [], []
    for contents, gold in data.fully_labeled:
        rows.append(contents)
        labels.extend(gold)
    for contents, gold in data.partially_labeled:
        for i, g in enumerate(gold):
            if g is not None:
                rows.append(contents[i:i + 1])
                labels.append(g)
    X = np.concatenate(rows) if rows else np.zeros((0, 0))
    return X, np.array(labels)


def _run_fold(args) -> FoldResult:
    (restart, fold, train_data, test_data, harness_seed, train_config, states,
     model_kind, baseline_epochs, baseline_lr) = args
    seed = _task_seed(harness_seed, restart, fold)
    decoder_config = DecoderConfig(states=states)
    index = FeatureIndex(states=states)

    if model_kind == "order2":
        config = replace(train_config, seed=seed)
        weights = semisupervised_train(train_data, config, index, decoder_config)
        w = weights.decode_weights()
        preds = [viterbi_decode(c, w, index, decoder_config)
                 for c, _ in test_data]
    elif model_kind == "baseline":
        X, y = _labeled_sentences(train_data)
        bl = baseline_train(X, y, epochs=baseline_epochs,
                            learning_rate=baseline_lr, seed=seed,
                            tie_state=states[0])
        preds = [bl.predict(c).tolist() for c, _ in test_data]
    else:
        raise InvalidParameterError(f"unknown model kind {model_kind!r}")

    flat_gold = [g for _, gold in test_data for g in gold]
    flat_pred = [p for pred in preds for p in pred]
    p, r, f = state_prf(flat_gold, flat_pred, states=states)
    eds = [edit_distance(collapse(list(gold)), collapse(pred))
           for (_, gold), pred in zip(test_data, preds)]
    gold_changes = tuple(change_detection(list(gold)) for _, gold in test_data)
    pred_changes = tuple(change_detection(pred) for pred in preds)
    return FoldResult(
        restart=restart, fold=fold, precision=p, recall=r, f1=f,
        mean_edit_distance=float(np.mean(eds)),
        gold_changes=gold_changes, pred_changes=pred_changes,
        num_sequences=len(test_data),
        num_sentences=len(flat_gold),
    )


def cross_validate(dataset: Dataset, lexicons: LexiconSet,
                   train_config: TrainConfig, k: int = 10, restarts: int = 100,
                   seed: int = 0, states: tuple[int, ...] = (1, -1),
                   model_kind: str = "order2", workers: int = 1,
                   baseline_epochs: int = 200, baseline_lr: float = 0.1) -> MetricsReport:
    """k-fold cross validation, averaged over random restarts.

    Folds over the fully labeled sequences are fixed by ``seed``; each
    (restart, fold) cell derives its own training seed. Per-restart
    values average the fold entries (change P/R/F pools the fold test
    sequences); the summary averages the restarts.
    """
    from .corpus import split_folds  # local import to keep module load light

    folds = split_folds(dataset, k, seed)

    # featurize each unique sequence once, up front
    contents_cache: dict[tuple, np.ndarray] = {}
    for group in (dataset.fully_labeled, dataset.partially_labeled, dataset.unlabeled):
        for s in group:
            contents_cache[s.key] = extract_content_matrix(s, lexicons)

    def featurized(train: Dataset, test: list[PairSequence]):
        train_data = FeaturizedDataset(
            fully_labeled=tuple((contents_cache[s.key], tuple(s.labels))
                                for s in train.fully_labeled),
            partially_labeled=tuple((contents_cache[s.key], tuple(s.labels))
                                    for s in train.partially_labeled),
            unlabeled=tuple(contents_cache[s.key] for s in train.unlabeled),
        )
        test_data = tuple((contents_cache[s.key], tuple(s.labels)) for s in test)
        return train_data, test_data

    tasks = []
    for restart in range(restarts):
        for fold, (train, test) in enumerate(folds):
            train_data, test_data = featurized(train, test)
            tasks.append((restart, fold, train_data, test_data, seed,
                          train_config, tuple(states),
                          model_kind, baseline_epochs, baseline_lr))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_fold, tasks))
    else:
        results = [_run_fold(t) for t in tasks]
    results.sort(key=lambda fr: (fr.restart, fr.fold))

    per_restart = []
    for restart, group in itertools.groupby(results, key=lambda fr: fr.restart):
        group = list(group)
        gold_flags = [g for fr in group for g in fr.gold_changes]
        pred_flags = [p for fr in group for p in fr.pred_changes]
        cp, cr, cf = change_eval(gold_flags, pred_flags)
        per_restart.append({
            "restart": restart,
            "precision": float(np.mean([fr.precision for fr in group])),
            "recall": float(np.mean([fr.recall for fr in group])),
            "f1": float(np.mean([fr.f1 for fr in group])),
            "mean_edit_distance": float(np.mean([fr.mean_edit_distance
                                                 for fr in group])),
            "change_precision": cp, "change_recall": cr, "change_f1": cf,
        })

    return MetricsReport(
        averaged_p=float(np.mean([e["precision"] for e in per_restart])),
        averaged_r=float(np.mean([e["recall"] for e in per_restart])),
        averaged_f=float(np.mean([e["f1"] for e in per_restart])),
        mean_edit_distance=float(np.mean([e["mean_edit_distance"]
                                          for e in per_restart])),
        change_prf=(
            float(np.mean([e["change_precision"] for e in per_restart])),
            float(np.mean([e["change_recall"] for e in per_restart])),
            float(np.mean([e["change_f1"] for e in per_restart])),
        ),
        per_restart=tuple(per_restart),
        per_fold=tuple(results),
    )


# ---------------------------------------------------------------------------
# synthetic corpus generator

POSITIVE_VERBS = ("help", "hug", "comfort", "praise", "rescue",
                  "support", "defend", "protect", "embrace", "assist")
NEGATIVE_VERBS = ("attack", "betray", "insult", "shun", "deceive",
                  "threaten", "harm", "mock", "abandon", "scorn")


@dataclass(frozen=True)
class GeneratorSpec:
    num_sequences: int = 200
    min_length: int = 5
    max_length: int = 12
    persistence: float = 0.9
    noise: float = 0.3
    fraction_partial: float = 0.0
    mask_rate: float = 0.5
    negation_rate: float = 0.15

    def __post_init__(self):
        if self.num_sequences < 1:
            raise InvalidParameterError("num_sequences must be >= 1")
        if not 1 <= self.min_length <= self.max_length:
            raise InvalidParameterError(
                f"invalid length range [{self.min_length}, {self.max_length}]")
        if not 0.0 < self.persistence <= 1.0:
            raise InvalidParameterError("persistence must be in (0, 1]")
        if not 0.0 <= self.noise < 0.5:
            raise InvalidParameterError("noise must be in [0, 0.5)")
        if not 0.0 <= self.fraction_partial <= 1.0:
            raise InvalidParameterError("fraction_partial must be in [0, 1]")
        if not 0.0 < self.mask_rate < 1.0:
            raise InvalidParameterError("mask_rate must be in (0, 1)")
        if not 0.0 <= self.negation_rate < 1.0:
            raise InvalidParameterError("negation_rate must be in [0, 1)")


@dataclass(frozen=True)
class SyntheticCorpus:
    documents: tuple[Document, ...]
    dataset: Dataset
    lexicons: LexiconSet


def synthetic_lexicons() -> LexiconSet:
    """Lexicon bundle covering the generator's verb vocabulary.

    All verbs carry a connotation and sentiment entry; half of each list
    also carries a prior-polarity entry, so the three lexicon channels
    differ the way real resources do.
    """
    conn = {v: 1 for v in POSITIVE_VERBS} | {v: -1 for v in NEGATIVE_VERBS}
    sent = dict(conn)
    prior = {v: 1 for v in POSITIVE_VERBS[:5]} | {v: -1 for v in NEGATIVE_VERBS[:5]}
    return LexiconSet(
        connotation=PolarityLexicon(name="connotation", entries=conn),
        sentiment=PolarityLexicon(name="sentiment", entries=sent),
        prior_polarity=PolarityLexicon(name="prior_polarity", entries=prior),
        frames=load_frame_lexicon(default_data_path("frames.tsv")),
        stopwords=load_stopwords(default_data_path("stopwords.txt")),
    )


def _synthetic_sentence(position: int, evidence: int, negate: bool,
                        rng: np.random.Generator) -> Sentence:
    verbs = POSITIVE_VERBS if (evidence == 1) != negate else NEGATIVE_VERBS
    lemma = verbs[rng.integers(len(verbs))]
    surface = lemma + "s"
    flip = bool(rng.integers(2))  # which character acts
    a_name, b_name = ("Ana", "Bo") if not flip else ("Bo", "Ana")
    a_id, b_id = (1, 2) if not flip else (2, 1)
    if negate:
        tokens = (
            Token(0, a_name, a_name.lower(), "NNP"),
            Token(1, "does", "do", "VBZ"),
            Token(2, "not", "not", "RB"),
            Token(3, lemma, lemma, "VB"),
            Token(4, b_name, b_name.lower(), "NNP"),
            Token(5, ".", ".", "."),
        )
        deps = (
            DependencyEdge(-1, 3, "root"),
            DependencyEdge(3, 0, "nsubj"),
            DependencyEdge(3, 1, "aux"),
            DependencyEdge(3, 2, "neg"),
            DependencyEdge(3, 4, "dobj"),
        )
        mentions = (MentionSpan(a_id, 0, 1), MentionSpan(b_id, 4, 5))
    else:
        tokens = (
            Token(0, a_name, a_name.lower(), "NNP"),
            Token(1, surface, lemma, "VBZ"),
            Token(2, b_name, b_name.lower(), "NNP"),
            Token(3, ".", ".", "."),
        )
        deps = (
            DependencyEdge(-1, 1, "root"),
            DependencyEdge(1, 0, "nsubj"),
            DependencyEdge(1, 2, "dobj"),
        )
        mentions = (MentionSpan(a_id, 0, 1), MentionSpan(b_id, 2, 3))
    return Sentence(tokens=tokens, deps=deps, mentions=mentions, frames=(),
                    doc_position=position)


def generate_synthetic(spec: GeneratorSpec, seed: int) -> SyntheticCorpus:
    """Sample a corpus whose gold states follow a sticky two-state chain.

    Each sequence becomes one two-character document in the canonical
    format; per sentence, the realized verb agrees with the gold state
    with probability 1 - noise and contradicts it otherwise, so the
    content features carry a controllable signal. A fraction of the
    sequences is only partially labeled (masking each position with
    ``mask_rate``, always keeping at least one label and one gap).
    """
    rng = np.random.default_rng(seed)
    documents = []
    full, partial = [], []

    for i in range(spec.num_sequences):
        length = int(rng.integers(spec.min_length, spec.max_length + 1))
        states = [1 if rng.random() < 0.5 else -1]
        for _ in range(length - 1):
            if rng.random() < spec.persistence:
                states.append(states[-1])
            else:
                states.append(-states[-1])

        sentences = []
        for t, y in enumerate(states):
            evidence = y if rng.random() >= spec.noise else -y
            negate = rng.random() < spec.negation_rate
            sentences.append(_synthetic_sentence(t, evidence, negate, rng))

        doc = Document(doc_id=f"synth-{i:04d}",
                       characters=((1, "Ana"), (2, "Bo")),
                       sentences=tuple(sentences))
        documents.append(doc)
        [seq] = extract_pair_sequences(doc, min_cooccurrence=1)

        if rng.random() < spec.fraction_partial and length >= 2:
            labels: list[Optional[int]] = [
                None if rng.random() < spec.mask_rate else s for s in states]
            if all(lab is None for lab in labels):
                keep = int(rng.integers(length))
                labels[keep] = states[keep]
            if all(lab is not None for lab in labels):
                drop = int(rng.integers(length))
                labels[drop] = None
            partial.append(replace(seq, labels=tuple(labels)))
        else:
            full.append(replace(seq, labels=tuple(states)))

    dataset = Dataset(fully_labeled=tuple(full),
                      partially_labeled=tuple(partial))
    return SyntheticCorpus(documents=tuple(documents), dataset=dataset,
                           lexicons=synthetic_lexicons())
