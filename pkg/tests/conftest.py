from pathlib import Path

import pytest

from reltraj.corpus import extract_pair_sequences, load_document
from reltraj.lexicons import load_lexicon_set

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_paths():
    return {
        "doc": FIXTURES / "docs" / "tomsawyer.json",
        "docs_dir": FIXTURES / "docs",
        "connotation": FIXTURES / "lexicons" / "connotation.tsv",
        "sentiment": FIXTURES / "lexicons" / "sentiment.tsv",
        "prior_polarity": FIXTURES / "lexicons" / "prior_polarity.tsv",
        "full_annotations": FIXTURES / "annotations" / "full.jsonl",
        "partial_annotations": FIXTURES / "annotations" / "partial.jsonl",
    }


@pytest.fixture(scope="session")
def fixture_doc(fixture_paths):
    return load_document(fixture_paths["doc"])


@pytest.fixture(scope="session")
def fixture_lexicons(fixture_paths):
    return load_lexicon_set(fixture_paths["connotation"],
                            fixture_paths["sentiment"],
                            fixture_paths["prior_polarity"])


@pytest.fixture(scope="session")
def fixture_sequence(fixture_doc):
    [seq] = extract_pair_sequences(fixture_doc, min_cooccurrence=5)
    return seq
