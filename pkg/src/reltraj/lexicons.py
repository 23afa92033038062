"""Word-polarity lexicons, frame category lists and stopwords.

Three polarity lexicons (connotation, sentiment, prior-polarity) map
words to +1/-1 and are consulted with negation-aware lookup. The frame
lexicon categorizes frame names as positive / negative / ambiguous /
relationship and names the frame elements that identify participants;
ambiguous frames are resolved on the fly from the connotation polarity
of their lexical unit.

File formats:
  polarity lexicon   TSV ``word<TAB>{+1|-1}`` (pos/neg accepted as
                     aliases); ``#`` starts a comment line
  frame lexicon      TSV ``frame<TAB>category<TAB>elem1,elem2,...``
  stopwords          one word per line

All lexicons are immutable after load and all lookups are pure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .corpus import FrameAnnotation, Sentence, Token
from .errors import ParseError

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
AMBIGUOUS = "ambiguous"
RELATIONSHIP = "relationship"
FRAME_CATEGORIES = (POSITIVE, NEGATIVE, AMBIGUOUS, RELATIONSHIP)

_POLARITY_ALIASES = {
    "+1": 1, "1": 1, "pos": 1, "positive": 1,
    "-1": -1, "neg": -1, "negative": -1,
}


@dataclass(frozen=True)
class PolarityLexicon:
    name: str
    entries: dict[str, int] = field(default_factory=dict)

    def lookup(self, word: Optional[str]) -> Optional[int]:
        if word is None:
            return None
        return self.entries.get(word.lower())

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class FrameLexicon:
    # frame name (lowercase) -> (category, relevant element names)
    entries: dict[str, tuple[str, frozenset[str]]] = field(default_factory=dict)

    def lookup(self, frame_name: str) -> Optional[tuple[str, frozenset[str]]]:
        return self.entries.get(frame_name.lower())

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words


def load_polarity_lexicon(path, name: str) -> PolarityLexicon:
    """Load a TSV polarity lexicon.

    Words listed with both polarities are dropped entirely (with a
    warning): arbitrary precedence would silently bias the features.
    Rows with a neutral/unknown polarity value are skipped.
    """
    entries: dict[str, int] = {}
    conflicts: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ParseError(f"{path}:{lineno}: expected 'word<TAB>polarity'")
            word = parts[0].strip().lower()
            pol_raw = parts[1].strip().lower()
            if not word:
                raise ParseError(f"{path}:{lineno}: empty word")
            pol = _POLARITY_ALIASES.get(pol_raw)
            if pol is None:
                continue  # neutral/objective rows are ignored
            if word in entries and entries[word] != pol:
                conflicts.add(word)
            elif word not in conflicts:
                entries[word] = pol
    for word in conflicts:
        entries.pop(word, None)
        logger.warning("lexicon %s: conflicting polarities for %r, dropped", name, word)
    return PolarityLexicon(name=name, entries=entries)


def load_frame_lexicon(path) -> FrameLexicon:
    entries: dict[str, tuple[str, frozenset[str]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise ParseError(
                    f"{path}:{lineno}: expected 'frame<TAB>category<TAB>elements'")
            frame = parts[0].strip().lower()
            category = parts[1].strip().lower()
            elements = frozenset(
                e.strip().lower() for e in parts[2].split(",") if e.strip())
            if category not in FRAME_CATEGORIES:
                raise ParseError(
                    f"{path}:{lineno}: unknown category {category!r}")
            if not elements:
                raise ParseError(f"{path}:{lineno}: no relevant elements listed")
            if frame in entries:
                raise ParseError(f"{path}:{lineno}: duplicate frame {frame!r}")
            entries[frame] = (category, elements)
    return FrameLexicon(entries=entries)


def load_stopwords(path) -> StopwordList:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    if not words:
        raise ParseError(f"{path}: stopword list is empty")
    return StopwordList(words=frozenset(words))


def effective_polarity(lex: PolarityLexicon, lemma: str,
                       negated: bool = False) -> Optional[int]:
    """Lexicon polarity of ``lemma``, sign-flipped under negation."""
    pol = lex.lookup(lemma)
    if pol is None:
        return None
    return -pol if negated else pol


def token_polarity(lex: PolarityLexicon, token: Token,
                   negated: bool = False) -> Optional[int]:
    """Polarity keyed by lemma first, lowercase surface as fallback."""
    pol = effective_polarity(lex, token.lemma, negated)
    if pol is None:
        pol = effective_polarity(lex, token.surface, negated)
    return pol


def classify_frame(flex: FrameLexicon, connotation: PolarityLexicon,
                   frame: FrameAnnotation, sentence: Sentence) -> Optional[str]:
    """Resolve a fired frame to positive / negative / relationship.

    Ambiguous frames take the connotation polarity of the lexical unit
    they fired at; unlisted frames, and ambiguous frames whose lexical
    unit is unknown to the lexicon, resolve to None.
    """
    entry = flex.lookup(frame.frame_name)
    if entry is None:
        return None
    category, _ = entry
    if category != AMBIGUOUS:
        return category
    lu = frame.lexical_unit_token
    if not 0 <= lu < len(sentence.tokens):
        return None
    pol = token_polarity(connotation, sentence.tokens[lu])
    if pol == 1:
        return POSITIVE
    if pol == -1:
        return NEGATIVE
    return None


@dataclass(frozen=True)
class LexiconSet:
    """The full bundle of resources the content features consume."""

    connotation: PolarityLexicon
    sentiment: PolarityLexicon
    prior_polarity: PolarityLexicon
    frames: FrameLexicon
    stopwords: StopwordList

    @property
    def polarity_lexicons(self) -> tuple[PolarityLexicon, ...]:
        return (self.connotation, self.sentiment, self.prior_polarity)


def load_lexicon_set(connotation_path, sentiment_path, prior_polarity_path,
                     frames_path=None, stopwords_path=None) -> LexiconSet:
    """Load all resources; frame list and stopwords default to the
    bundled data files when no path is given."""
    if frames_path is None:
        frames_path = default_data_path("frames.tsv")
    if stopwords_path is None:
        stopwords_path = default_data_path("stopwords.txt")
    return LexiconSet(
        connotation=load_polarity_lexicon(connotation_path, "connotation"),
        sentiment=load_polarity_lexicon(sentiment_path, "sentiment"),
        prior_polarity=load_polarity_lexicon(prior_polarity_path, "prior_polarity"),
        frames=load_frame_lexicon(frames_path),
        stopwords=load_stopwords(stopwords_path),
    )


def default_data_path(filename: str):
    """Path of a data file bundled with the package."""
    return resources.files("reltraj").joinpath("data", filename)
