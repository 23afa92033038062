"""Evolving relationship trajectories between narrative character pairs.

Given preprocessed narrative documents, the package extracts the
sentences where a character pair co-occurs, scores binary
cooperative/non-cooperative state sequences over them with a
second-order linear model, and trains it with an averaged structured
perceptron inside a semi-supervised completion loop.
"""

from .corpus import (
    Dataset,
    Document,
    PairSequence,
    Sentence,
    Token,
    document_from_dict,
    document_to_dict,
    extract_pair_sequences,
    load_annotations,
    load_document,
    split_folds,
)
from .decoding import (
    DecoderConfig,
    collapse,
    constrained_viterbi,
    score_sequence,
    viterbi_decode,
)
from .evaluation import (
    GeneratorSpec,
    MetricsReport,
    change_detection,
    change_eval,
    cross_validate,
    edit_distance,
    generate_synthetic,
    state_prf,
)
from .features import (
    ContentFeaturizer,
    FeatureIndex,
    analyze_actions,
    content_features,
    extract_content_matrix,
    joint_features,
)
from .lexicons import (
    LexiconSet,
    PolarityLexicon,
    classify_frame,
    effective_polarity,
    load_lexicon_set,
    load_polarity_lexicon,
)
from .model import (
    ModelWeights,
    Prediction,
    RelationshipSegmenter,
    SentenceBaseline,
    TrainConfig,
    baseline_predict,
    baseline_train,
    featurize_dataset,
    load_model,
    perceptron_train,
    save_model,
    semisupervised_train,
)

__version__ = "0.1.0"
