"""Per-sentence content features and the joint sequence feature map.

Each sentence yields a 33-slot content vector describing how the two
characters of a pair act on each other:

  slot 0        F1   are-team: both characters agents (or both patients)
                     of one verb
  slots 1-6     F2-F7    acts-together verb polarities, one agent and the
                         other patient: {connotation, sentiment,
                         prior-polarity} x {positive, negative} counts
  slots 7-12    F8-F13   surrogate acts-together: verbs attached to
                         exactly one of the pair, only in sentences free
                         of third characters
  slots 13-18   F14-F19  adverb polarities over the acts-together verbs
  slots 19-24   F20-F25  adverb polarities over the surrogate verbs
  slots 25-26   F26-F27  positive / negative connotation words strictly
                         between mention pairs (stopwords excluded)
  slots 27-29   F28-F30  positive / negative / relationship frames fired
                         with a pair character in a relevant element
  slots 30-32   F31-F33  positive / negative / relationship frames fired

Verb polarity counts are negation-aware (a negated verb contributes with
flipped sign); adverbs take the negation status of their governing verb.

The joint map places each content vector into per-state slots and adds
one transition indicator per position: a first-state indicator at i=0, a
state-bigram indicator at i=1 and a state-trigram indicator at i>=2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence as Seq

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import PairSequence, Sentence, Token
from .errors import LengthMismatchError, ValidationError
from .lexicons import (
    LexiconSet,
    NEGATIVE,
    POSITIVE,
    RELATIONSHIP,
    classify_frame,
    token_polarity,
)

NUM_CONTENT_FEATURES = 33

# slot offsets into the content vector
F_ARE_TEAM = 0
F_ACTS_TOGETHER = 1        # 6 slots
F_SURROGATE = 7            # 6 slots
F_ADVERBS_TOGETHER = 13    # 6 slots
F_SURROGATE_ADVERBS = 19   # 6 slots
F_BETWEEN_POS = 25
F_BETWEEN_NEG = 26
F_FRAMES_PARTICIPANT = 27  # 3 slots: positive, negative, relationship
F_FRAMES_FIRED = 30        # 3 slots

_FRAME_COLUMN = {POSITIVE: 0, NEGATIVE: 1, RELATIONSHIP: 2}

AGENT_RELATIONS = frozenset({"nsubj", "agent"})
PATIENT_RELATIONS = frozenset({"dobj", "nsubjpass"})


@dataclass(frozen=True)
class VerbGroup:
    """One verb with its resolved participants.

    Agents and patients hold entity ids; dependents outside any mention
    span do not resolve. Verbs lacking their own agents (or patients)
    inherit them, one step, from conj-linked verbs.
    """

    verb_token: int
    lemma: str
    agents: frozenset[int]
    patients: frozenset[int]
    negated: bool
    adverbs: tuple[Token, ...]

    @property
    def adverb_lemmas(self) -> tuple[str, ...]:
        return tuple(t.lemma for t in self.adverbs)


def _is_verb(token: Token) -> bool:
    return token.pos.startswith("VB")


def analyze_actions(sentence: Sentence) -> list[VerbGroup]:
    """Build one VerbGroup per verbal token of the sentence."""
    token_entities: dict[int, set[int]] = {}
    for m in sentence.mentions:
        for ti in range(m.start, m.end):
            token_entities.setdefault(ti, set()).add(m.entity_id)

    verb_ids = [t.index for t in sentence.tokens if _is_verb(t)]
    verb_set = set(verb_ids)

    agents: dict[int, set[int]] = {v: set() for v in verb_ids}
    patients: dict[int, set[int]] = {v: set() for v in verb_ids}
    negated: dict[int, bool] = {v: False for v in verb_ids}
    adverbs: dict[int, list[Token]] = {v: [] for v in verb_ids}
    conj_partners: dict[int, set[int]] = {v: set() for v in verb_ids}

    for edge in sentence.deps:
        if edge.head not in verb_set:
            continue
        v, d = edge.head, edge.dependent
        if edge.relation in AGENT_RELATIONS:
            agents[v] |= token_entities.get(d, set())
        elif edge.relation in PATIENT_RELATIONS:
            patients[v] |= token_entities.get(d, set())
        elif edge.relation == "neg":
            negated[v] = True
        elif edge.relation == "advmod":
            adverbs[v].append(sentence.tokens[d])
        elif edge.relation == "conj" and d in verb_set:
            conj_partners[v].add(d)
            conj_partners[d].add(v)

    groups = []
    for v in verb_ids:
        ag, pat = agents[v], patients[v]
        # one-step inheritance from the partners' own (pre-inheritance) sets
        if not ag:
            ag = set().union(*(agents[p] for p in conj_partners[v])) \
                if conj_partners[v] else set()
        if not pat:
            pat = set().union(*(patients[p] for p in conj_partners[v])) \
                if conj_partners[v] else set()
        groups.append(VerbGroup(
            verb_token=v,
            lemma=sentence.tokens[v].lemma,
            agents=frozenset(ag),
            patients=frozenset(pat),
            negated=negated[v],
            adverbs=tuple(adverbs[v]),
        ))
    return groups


def _count_verb_polarities(out: np.ndarray, offset: int, verbs: list[VerbGroup],
                           sentence: Sentence, lexicons: LexiconSet):
    for g in verbs:
        token = sentence.tokens[g.verb_token]
        for li, lex in enumerate(lexicons.polarity_lexicons):
            pol = token_polarity(lex, token, g.negated)
            if pol == 1:
                out[offset + 2 * li] += 1
            elif pol == -1:
                out[offset + 2 * li + 1] += 1


def _count_adverb_polarities(out: np.ndarray, offset: int, verbs: list[VerbGroup],
                             lexicons: LexiconSet):
    for g in verbs:
        for adv in g.adverbs:
            for li, lex in enumerate(lexicons.polarity_lexicons):
                pol = token_polarity(lex, adv, g.negated)
                if pol == 1:
                    out[offset + 2 * li] += 1
                elif pol == -1:
                    out[offset + 2 * li + 1] += 1


def content_features(sentence: Sentence, pair: tuple[int, int],
                     lexicons: LexiconSet) -> np.ndarray:
    """Compute the 33-slot content vector for one sentence and pair."""
    a, b = pair
    both = {a, b}
    out = np.zeros(NUM_CONTENT_FEATURES)

    groups = analyze_actions(sentence)
    has_third = any(m.entity_id not in both for m in sentence.mentions)

    if any(both <= g.agents or both <= g.patients for g in groups):
        out[F_ARE_TEAM] = 1

    acts_together = [
        g for g in groups
        if (a in g.agents and b in g.patients) or (b in g.agents and a in g.patients)
    ]
    surrogate = [] if has_third else [
        g for g in groups if len(both & (g.agents | g.patients)) == 1
    ]

    _count_verb_polarities(out, F_ACTS_TOGETHER, acts_together, sentence, lexicons)
    _count_verb_polarities(out, F_SURROGATE, surrogate, sentence, lexicons)
    _count_adverb_polarities(out, F_ADVERBS_TOGETHER, acts_together, lexicons)
    _count_adverb_polarities(out, F_SURROGATE_ADVERBS, surrogate, lexicons)

    # connotation words strictly between every cross-pair mention pair;
    # overlapping windows may count a token more than once
    a_mentions = [m for m in sentence.mentions if m.entity_id == a]
    b_mentions = [m for m in sentence.mentions if m.entity_id == b]
    stop = lexicons.stopwords
    for ma in a_mentions:
        for mb in b_mentions:
            first, second = (ma, mb) if ma.start <= mb.start else (mb, ma)
            for ti in range(first.end, second.start):
                token = sentence.tokens[ti]
                if token.surface in stop or token.lemma in stop:
                    continue
                pol = token_polarity(lexicons.connotation, token)
                if pol == 1:
                    out[F_BETWEEN_POS] += 1
                elif pol == -1:
                    out[F_BETWEEN_NEG] += 1

    for frame in sentence.frames:
        category = classify_frame(lexicons.frames, lexicons.connotation,
                                  frame, sentence)
        if category is None:
            continue
        col = _FRAME_COLUMN[category]
        _, relevant = lexicons.frames.lookup(frame.frame_name)
        participant = any(
            e.name.lower() in relevant and any(
                m.entity_id in both and m.overlaps(e.start, e.end)
                for m in sentence.mentions)
            for e in frame.elements
        )
        if participant:
            out[F_FRAMES_PARTICIPANT + col] += 1
        out[F_FRAMES_FIRED + col] += 1

    return out


def extract_content_matrix(seq: PairSequence, lexicons: LexiconSet) -> np.ndarray:
    """Stack the content vectors of a pair sequence into an (l, 33) matrix."""
    return np.array([content_features(s, seq.pair, lexicons)
                     for s in seq.sentences])


class FeatureIndex:
    """Bijective map from feature templates to dense ids.

    The template space is fixed up front from the state set: per-state
    content slots, then first-state, state-bigram and state-trigram
    indicators. Total size = 33*S + S + S^2 + S^3 for S states.
    """

    FORMAT_VERSION = 1

    def __init__(self, states: Seq[int] = (1, -1),
                 num_content: int = NUM_CONTENT_FEATURES):
        states = tuple(int(s) for s in states)
        if len(states) < 2:
            raise ValidationError("need at least two states", field="states")
        if len(set(states)) != len(states):
            raise ValidationError("states must be distinct", field="states")
        self.states = states
        self.num_content = num_content
        self._pos = {s: i for i, s in enumerate(states)}
        n = len(states)
        self._init_base = num_content * n
        self._trans1_base = self._init_base + n
        self._trans2_base = self._trans1_base + n * n
        self.size = self._trans2_base + n * n * n

    @property
    def num_states(self) -> int:
        return len(self.states)

    def content_id(self, alpha: int, state: int) -> int:
        return alpha * len(self.states) + self._pos[state]

    def init_id(self, state: int) -> int:
        return self._init_base + self._pos[state]

    def trans1_id(self, state: int, prev: int) -> int:
        n = len(self.states)
        return self._trans1_base + self._pos[state] * n + self._pos[prev]

    def trans2_id(self, state: int, prev: int, prev2: int) -> int:
        n = len(self.states)
        return (self._trans2_base
                + self._pos[state] * n * n + self._pos[prev] * n + self._pos[prev2])

    def content_weight_matrix(self, weights: np.ndarray) -> np.ndarray:
        """View of the content block as a (num_content, S) matrix."""
        return weights[:self._init_base].reshape(self.num_content, len(self.states))

    def to_dict(self) -> dict:
        return {"version": self.FORMAT_VERSION,
                "states": list(self.states),
                "num_content": self.num_content}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureIndex":
        if data.get("version") != cls.FORMAT_VERSION:
            raise ValidationError(
                f"unsupported feature index version {data.get('version')!r}",
                field="index.version")
        return cls(states=tuple(data["states"]), num_content=data["num_content"])

    def __eq__(self, other) -> bool:
        return (isinstance(other, FeatureIndex)
                and self.states == other.states
                and self.num_content == other.num_content)

    def __repr__(self) -> str:
        return f"FeatureIndex(states={self.states}, num_content={self.num_content})"


def joint_features(contents: np.ndarray, y: Seq[int],
                   index: FeatureIndex) -> dict[int, float]:
    """Joint feature map of a full state assignment, as {feature id: value}.

    Sums per-position contributions: the content vector of sentence i in
    the slots of state y_i, plus one transition indicator per position.
    Zero-valued entries are dropped.
    """
    if len(y) != contents.shape[0]:
        raise LengthMismatchError(
            f"{len(y)} states for {contents.shape[0]} sentences")
    phi: dict[int, float] = {}
    for i, yi in enumerate(y):
        row = contents[i]
        for alpha in np.nonzero(row)[0]:
            fid = index.content_id(int(alpha), yi)
            phi[fid] = phi.get(fid, 0.0) + float(row[alpha])
        if i == 0:
            fid = index.init_id(yi)
        elif i == 1:
            fid = index.trans1_id(yi, y[0])
        else:
            fid = index.trans2_id(yi, y[i - 1], y[i - 2])
        phi[fid] = phi.get(fid, 0.0) + 1.0
    return {fid: v for fid, v in phi.items() if v != 0.0}


def sparse_dot(weights: np.ndarray, phi: dict[int, float]) -> float:
    return float(sum(weights[fid] * v for fid, v in phi.items()))


def sparse_diff(a: dict[int, float], b: dict[int, float]) -> dict[int, float]:
    """a - b, with zero entries dropped."""
    out = dict(a)
    for fid, v in b.items():
        out[fid] = out.get(fid, 0.0) - v
    return {fid: v for fid, v in out.items() if v != 0.0}


def write_feature_dump(path, sequences: Seq[PairSequence], lexicons: LexiconSet):
    """Debug/baseline TSV dump: doc_id, pair, seq_index, F1..F33."""
    header = ["doc_id", "pair", "seq_index"] + [f"F{i}" for i in range(1, 34)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for seq in sequences:
            contents = extract_content_matrix(seq, lexicons)
            for i, row in enumerate(contents):
                cells = [seq.doc_id, f"{seq.pair[0]},{seq.pair[1]}", str(i)]
                cells += [format(v, "g") for v in row]
                fh.write("\t".join(cells) + "\n")


class ContentFeaturizer(BaseEstimator, TransformerMixin):
    """Transformer from pair sequences to per-sentence content matrices.

    Stateless apart from its lexicon bundle; ``transform`` maps a list of
    PairSequence to a list of (sequence length, 33) arrays.
    """

    def __init__(self, lexicons: Optional[LexiconSet] = None):
        self.lexicons = lexicons

    def fit(self, X, y=None):
        if self.lexicons is None:
            raise ValidationError("a LexiconSet is required", field="lexicons")
        return self

    def transform(self, X: Seq[PairSequence]) -> list[np.ndarray]:
        if self.lexicons is None:
            raise ValidationError("a LexiconSet is required", field="lexicons")
        return [extract_content_matrix(seq, self.lexicons) for seq in X]
