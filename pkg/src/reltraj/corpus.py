"""Preprocessed-document data model and character-pair sequence extraction.

Documents arrive as one JSON object per file:

    {"doc_id": ..., "characters": [{"id", "name"}],
     "sentences": [{"tokens": [{"surface", "lemma", "pos"}],
                    "deps": [{"head", "dep", "rel"}],
                    "mentions": [{"entity", "start", "end"}],
                    "frames": [{"name", "lu",
                                "elements": [{"name", "start", "end"}]}]}]}

Token references are 0-based sentence-local indices; head = -1 denotes the
root. Mention and frame-element spans are [start, end) over token indices.

Annotations are JSON Lines, one record per labeled sentence:

    {"doc_id": ..., "pair": [idA, idB], "seq_index": ..., "state": 1 | -1}

All types here are immutable after construction; the operations are pure
functions and safe to call from concurrent workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    IndexOutOfRangeError,
    InsufficientDataError,
    InvalidStateError,
    ParseError,
    UnknownSequenceError,
    ValidationError,
)

STATES = (1, -1)


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: str


@dataclass(frozen=True)
class DependencyEdge:
    head: int          # token index, -1 for root
    dependent: int
    relation: str


@dataclass(frozen=True)
class MentionSpan:
    entity_id: int
    start: int         # inclusive
    end: int           # exclusive

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end


@dataclass(frozen=True)
class FrameElement:
    name: str
    start: int
    end: int


@dataclass(frozen=True)
class FrameAnnotation:
    frame_name: str
    lexical_unit_token: int
    elements: tuple[FrameElement, ...]


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    deps: tuple[DependencyEdge, ...]
    mentions: tuple[MentionSpan, ...]
    frames: tuple[FrameAnnotation, ...]
    doc_position: int

    def __len__(self) -> int:
        return len(self.tokens)

    def entities_present(self) -> set[int]:
        return {m.entity_id for m in self.mentions}


@dataclass(frozen=True)
class Document:
    doc_id: str
    characters: tuple[tuple[int, str], ...]   # (entity_id, canonical name)
    sentences: tuple[Sentence, ...]

    def character_ids(self) -> set[int]:
        return {cid for cid, _ in self.characters}


@dataclass(frozen=True)
class PairSequence:
    """Ordered co-occurrence sentences for one character pair.

    ``labels`` is None for unlabeled sequences; otherwise a tuple aligned
    with ``sentences`` whose entries are +1, -1 or None (unannotated).
    """

    doc_id: str
    pair: tuple[int, int]                     # entity_a < entity_b
    sentences: tuple[Sentence, ...]
    labels: Optional[tuple[Optional[int], ...]] = None

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.doc_id, self.pair[0], self.pair[1])

    def num_labeled(self) -> int:
        if self.labels is None:
            return 0
        return sum(1 for s in self.labels if s is not None)

    def is_fully_labeled(self) -> bool:
        return self.labels is not None and self.num_labeled() == len(self)

    def is_partially_labeled(self) -> bool:
        n = self.num_labeled()
        return 0 < n < len(self)


@dataclass(frozen=True)
class Dataset:
    fully_labeled: tuple[PairSequence, ...] = ()
    partially_labeled: tuple[PairSequence, ...] = ()
    unlabeled: tuple[PairSequence, ...] = ()

    def __post_init__(self):
        for seq in self.fully_labeled:
            if not seq.is_fully_labeled():
                raise ValidationError(
                    f"sequence {seq.key} is not fully labeled", field="fully_labeled")
        for seq in self.partially_labeled:
            if not seq.is_partially_labeled():
                raise ValidationError(
                    f"sequence {seq.key} is not partially labeled", field="partially_labeled")
        for seq in self.unlabeled:
            if seq.num_labeled() != 0:
                raise ValidationError(
                    f"sequence {seq.key} carries labels", field="unlabeled")


def _require(cond: bool, message: str, where: str):
    if not cond:
        raise ValidationError(message, field=where)


def _parse_sentence(rec: dict, position: int, where: str,
                    valid_entities: set[int]) -> Sentence:
    tokens = []
    for j, t in enumerate(rec.get("tokens", [])):
        _require(isinstance(t.get("surface"), str) and t["surface"] != "",
                 "surface must be a non-empty string", f"{where}.tokens[{j}].surface")
        tokens.append(Token(index=j, surface=t["surface"],
                            lemma=t.get("lemma", t["surface"]),
                            pos=t.get("pos", "")))
    n = len(tokens)
    _require(n > 0, "sentence has no tokens", f"{where}.tokens")

    deps = []
    for j, d in enumerate(rec.get("deps", [])):
        head, dep, rel = d.get("head"), d.get("dep"), d.get("rel")
        _require(isinstance(head, int) and -1 <= head < n,
                 f"head {head} out of range", f"{where}.deps[{j}].head")
        _require(isinstance(dep, int) and 0 <= dep < n,
                 f"dependent {dep} out of range", f"{where}.deps[{j}].dep")
        _require(isinstance(rel, str) and rel != "",
                 "relation must be non-empty", f"{where}.deps[{j}].rel")
        deps.append(DependencyEdge(head=head, dependent=dep, relation=rel))

    mentions = []
    for j, m in enumerate(rec.get("mentions", [])):
        ent, start, end = m.get("entity"), m.get("start"), m.get("end")
        _require(ent in valid_entities,
                 f"entity {ent} not declared in characters", f"{where}.mentions[{j}].entity")
        _require(isinstance(start, int) and isinstance(end, int)
                 and 0 <= start < end <= n,
                 f"span [{start},{end}) invalid for sentence of length {n}",
                 f"{where}.mentions[{j}]")
        mentions.append(MentionSpan(entity_id=ent, start=start, end=end))

    frames = []
    for j, f in enumerate(rec.get("frames", [])):
        name, lu = f.get("name"), f.get("lu")
        _require(isinstance(name, str) and name != "",
                 "frame name must be non-empty", f"{where}.frames[{j}].name")
        _require(isinstance(lu, int) and 0 <= lu < n,
                 f"lexical unit token {lu} out of range", f"{where}.frames[{j}].lu")
        elements = []
        for k, e in enumerate(f.get("elements", [])):
            ename, start, end = e.get("name"), e.get("start"), e.get("end")
            _require(isinstance(ename, str) and ename != "",
                     "element name must be non-empty",
                     f"{where}.frames[{j}].elements[{k}].name")
            _require(isinstance(start, int) and isinstance(end, int)
                     and 0 <= start < end <= n,
                     f"span [{start},{end}) invalid",
                     f"{where}.frames[{j}].elements[{k}]")
            elements.append(FrameElement(name=ename, start=start, end=end))
        frames.append(FrameAnnotation(frame_name=name, lexical_unit_token=lu,
                                      elements=tuple(elements)))

    return Sentence(tokens=tuple(tokens), deps=tuple(deps),
                    mentions=tuple(mentions), frames=tuple(frames),
                    doc_position=position)


def document_from_dict(data: dict) -> Document:
    """Build and validate a Document from the canonical JSON structure."""
    _require(isinstance(data.get("doc_id"), str) and data["doc_id"] != "",
             "doc_id must be a non-empty string", "doc_id")
    characters = []
    seen_ids = set()
    for i, c in enumerate(data.get("characters", [])):
        cid, name = c.get("id"), c.get("name")
        _require(isinstance(cid, int), "id must be an integer",
                 f"characters[{i}].id")
        _require(cid not in seen_ids, f"duplicate character id {cid}",
                 f"characters[{i}].id")
        _require(isinstance(name, str) and name != "",
                 "name must be non-empty", f"characters[{i}].name")
        seen_ids.add(cid)
        characters.append((cid, name))

    raw_sentences = data.get("sentences", [])
    _require(len(raw_sentences) > 0, "document has no sentences", "sentences")
    sentences = [
        _parse_sentence(rec, i, f"sentences[{i}]", seen_ids)
        for i, rec in enumerate(raw_sentences)
    ]
    return Document(doc_id=data["doc_id"], characters=tuple(characters),
                    sentences=tuple(sentences))


def document_to_dict(doc: Document) -> dict:
    """Serialize a Document back to the canonical JSON structure."""
    return {
        "doc_id": doc.doc_id,
        "characters": [{"id": cid, "name": name} for cid, name in doc.characters],
        "sentences": [
            {
                "tokens": [{"surface": t.surface, "lemma": t.lemma, "pos": t.pos}
                           for t in s.tokens],
                "deps": [{"head": d.head, "dep": d.dependent, "rel": d.relation}
                         for d in s.deps],
                "mentions": [{"entity": m.entity_id, "start": m.start, "end": m.end}
                             for m in s.mentions],
                "frames": [
                    {"name": f.frame_name, "lu": f.lexical_unit_token,
                     "elements": [{"name": e.name, "start": e.start, "end": e.end}
                                  for e in f.elements]}
                    for f in s.frames
                ],
            }
            for s in doc.sentences
        ],
    }


def load_document(path) -> Document:
    """Load and validate one canonical document JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top-level value must be a JSON object")
    return document_from_dict(data)


def extract_pair_sequences(doc: Document, min_cooccurrence: int = 5) -> list[PairSequence]:
    """One unlabeled PairSequence per character pair co-occurring in at
    least ``min_cooccurrence`` sentences, in document order."""
    cooc: dict[tuple[int, int], list[Sentence]] = {}
    for sentence in doc.sentences:
        present = sorted(sentence.entities_present())
        for i, a in enumerate(present):
            for b in present[i + 1:]:
                cooc.setdefault((a, b), []).append(sentence)

    out = []
    for pair in sorted(cooc):
        sents = cooc[pair]
        if len(sents) >= min_cooccurrence:
            out.append(PairSequence(doc_id=doc.doc_id, pair=pair,
                                    sentences=tuple(sents)))
    return out


def _parse_annotation_line(line: str, lineno: int, path) -> tuple[str, tuple[int, int], int, int]:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{lineno}: {exc}") from exc
    try:
        doc_id = rec["doc_id"]
        a, b = rec["pair"]
        seq_index = rec["seq_index"]
        state = rec["state"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}:{lineno}: missing or malformed field: {exc}") from exc
    if state not in STATES:
        raise InvalidStateError(
            f"{path}:{lineno}: state must be 1 or -1, got {state!r}")
    pair = (a, b) if a < b else (b, a)
    return doc_id, pair, seq_index, state


def load_annotations(path, sequences: list[PairSequence]) -> Dataset:
    """Attach JSONL annotations to sequences and partition the result.

    Classification is by label coverage, not by file of origin: a sequence
    whose records happen to cover every sentence lands in ``fully_labeled``.
    """
    by_key = {seq.key: seq for seq in sequences}
    labels: dict[tuple, list[Optional[int]]] = {
        key: [None] * len(seq) for key, seq in by_key.items()
    }

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            doc_id, pair, seq_index, state = _parse_annotation_line(line, lineno, path)
            key = (doc_id, pair[0], pair[1])
            if key not in by_key:
                raise UnknownSequenceError(
                    f"{path}:{lineno}: no extracted sequence for doc {doc_id!r} pair {pair}")
            if not 0 <= seq_index < len(by_key[key]):
                raise IndexOutOfRangeError(
                    f"{path}:{lineno}: seq_index {seq_index} out of range "
                    f"for sequence of length {len(by_key[key])}")
            labels[key][seq_index] = state

    fully, partial, unlabeled = [], [], []
    for seq in sequences:
        lab = labels[seq.key]
        n = sum(1 for s in lab if s is not None)
        if n == len(seq):
            fully.append(replace(seq, labels=tuple(lab)))
        elif n > 0:
            partial.append(replace(seq, labels=tuple(lab)))
        else:
            unlabeled.append(replace(seq, labels=None))
    return Dataset(fully_labeled=tuple(fully),
                   partially_labeled=tuple(partial),
                   unlabeled=tuple(unlabeled))


def split_folds(dataset: Dataset, k: int, seed: int) -> list[tuple[Dataset, list[PairSequence]]]:
    """Partition the fully labeled sequences into k near-equal test folds.

    Sequences are shuffled with a seeded PRNG and dealt round-robin; all
    partially labeled and unlabeled data appears in every train split.
    """
    full = list(dataset.fully_labeled)
    if k < 2:
        raise InsufficientDataError(f"k must be >= 2, got {k}")
    if len(full) < k:
        raise InsufficientDataError(
            f"need at least {k} fully labeled sequences for {k}-fold CV, have {len(full)}")

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(full))
    fold_indices: list[list[int]] = [[] for _ in range(k)]
    for pos, idx in enumerate(order):
        fold_indices[pos % k].append(int(idx))

    out = []
    for f in range(k):
        test_idx = set(fold_indices[f])
        test = [full[i] for i in sorted(test_idx)]
        train_full = tuple(seq for i, seq in enumerate(full) if i not in test_idx)
        train = Dataset(fully_labeled=train_full,
                        partially_labeled=dataset.partially_labeled,
                        unlabeled=dataset.unlabeled)
        out.append((train, test))
    return out
