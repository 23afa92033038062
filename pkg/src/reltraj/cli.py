"""Command-line interface: extract, train, predict, evaluate, cv, synth.

Every command is driven by a TOML config file; the common flags
(--seed, --workers, --min-cooccur, --report, output paths) override the
corresponding config values. All outputs are JSON with the effective
config echoed, and are byte-identical across reruns with the same config
and seed, at any worker count. Failures exit nonzero with a one-line
machine-readable JSON error on stderr.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import evaluation
from .corpus import extract_pair_sequences, load_annotations, load_document
from .decoding import DecoderConfig, collapse, viterbi_decode
from .errors import RelTrajError
from .features import FeatureIndex, extract_content_matrix, write_feature_dump
from .lexicons import default_data_path, load_lexicon_set
from .model import (
    TrainConfig,
    featurize_dataset,
    load_model,
    make_prediction,
    save_model,
    semisupervised_train,
)


def _load_config(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _fail(exc: Exception):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(1)


def _write_json(path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _paths(config: dict, *keys: str) -> list[Path]:
    paths = config.get("paths", {})
    out = []
    for key in keys:
        if key not in paths:
            raise RelTrajError(f"config is missing paths.{key}")
        out.append(Path(paths[key]))
    return out


def _load_documents(docs_dir: Path):
    files = sorted(docs_dir.glob("*.json"))
    if not files:
        raise RelTrajError(f"no documents found in {docs_dir}")
    return [load_document(p) for p in files]


def _load_lexicons(config: dict):
    paths = config.get("paths", {})
    for key in ("connotation", "sentiment", "prior_polarity"):
        if key not in paths:
            raise RelTrajError(f"config is missing paths.{key}")
    return load_lexicon_set(
        paths["connotation"], paths["sentiment"], paths["prior_polarity"],
        frames_path=paths.get("frames"), stopwords_path=paths.get("stopwords"))


def _extract_all(config: dict, min_cooccur=None):
    (docs_dir,) = _paths(config, "documents")
    threshold = min_cooccur
    if threshold is None:
        threshold = config.get("extract", {}).get("min_cooccurrence", 5)
    documents = _load_documents(docs_dir)
    sequences = []
    for doc in documents:
        sequences.extend(extract_pair_sequences(doc, min_cooccurrence=threshold))
    return documents, sequences, threshold


def _train_config(config: dict, seed=None) -> TrainConfig:
    section = dict(config.get("model", {}))
    if seed is not None:
        section["seed"] = seed
    section.setdefault("seed", 0)
    return TrainConfig(
        outer_iterations=section.get("outer_iterations", 10),
        perceptron_epochs=section.get("perceptron_epochs", 100),
        seed=section["seed"],
        init_scale=section.get("init_scale", 0.01),
        use_unlabeled=section.get("use_unlabeled", False),
        stop_on_convergence=section.get("stop_on_convergence", True),
    )


def _config_echo(config: dict, **overrides) -> dict:
    echo = json.loads(json.dumps(config))  # plain-JSON deep copy
    echo.update({k: v for k, v in overrides.items() if v is not None})
    return echo


@click.group()
def main():
    """Learn and evaluate evolving character-pair relationship sequences."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--min-cooccur", type=int, default=None,
              help="Minimum co-occurrence sentence count for a pair.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--features-dump", type=click.Path(), default=None,
              help="Also write a TSV dump of F1..F33 per sentence.")
def extract(config_path, min_cooccur, out_path, features_dump):
    """Extract pair sequences from the document collection."""
    try:
        config = _load_config(config_path)
        documents, sequences, threshold = _extract_all(config, min_cooccur)
        if features_dump:
            lexicons = _load_lexicons(config)
            write_feature_dump(features_dump, sequences, lexicons)
        payload = {
            "config": _config_echo(config, min_cooccurrence=threshold),
            "documents": len(documents),
            "sequences": [
                {"doc_id": s.doc_id, "pair": list(s.pair), "length": len(s),
                 "doc_positions": [sent.doc_position for sent in s.sentences]}
                for s in sequences
            ],
        }
        out = out_path or config.get("paths", {}).get("sequences", "sequences.json")
        _write_json(out, payload)
        click.echo(f"wrote {len(sequences)} sequences to {out}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def train(config_path, seed, out_path):
    """Train the semi-supervised second-order model and save it."""
    try:
        config = _load_config(config_path)
        (annotations_path,) = _paths(config, "annotations")
        _, sequences, _ = _extract_all(config)
        lexicons = _load_lexicons(config)
        dataset = load_annotations(annotations_path, sequences)
        train_config = _train_config(config, seed)
        index = FeatureIndex()
        weights = semisupervised_train(
            featurize_dataset(dataset, lexicons), train_config, index)
        out = out_path or config.get("paths", {}).get("model", "model.json")
        save_model(out, weights, index, DecoderConfig(states=index.states),
                   train_config,
                   metadata={"config": _config_echo(config, seed=train_config.seed),
                             "fully_labeled": len(dataset.fully_labeled),
                             "partially_labeled": len(dataset.partially_labeled),
                             "unlabeled": len(dataset.unlabeled)})
        click.echo(f"wrote model to {out}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def predict(config_path, model_path, out_path):
    """Decode relationship sequences for every extracted pair."""
    try:
        config = _load_config(config_path)
        model_file = model_path or config.get("paths", {}).get("model")
        if not model_file:
            raise RelTrajError("no model file given (flag --model or paths.model)")
        weights, index, decoder_config, _ = load_model(model_file)
        _, sequences, _ = _extract_all(config)
        lexicons = _load_lexicons(config)
        predictions = []
        for seq in sequences:
            contents = extract_content_matrix(seq, lexicons)
            states = viterbi_decode(contents, weights, index, decoder_config)
            pred = make_prediction(contents, states, weights, index)
            predictions.append({
                "doc_id": seq.doc_id, "pair": list(seq.pair),
                "states": list(pred.states),
                "relationship_sequence": list(pred.relationship_sequence),
                "score": pred.score,
            })
        payload = {"config": _config_echo(config), "predictions": predictions}
        out = out_path or config.get("paths", {}).get("predictions", "predictions.json")
        _write_json(out, payload)
        click.echo(f"wrote {len(predictions)} predictions to {out}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def evaluate(config_path, model_path, report_path):
    """Score a trained model against the fully labeled sequences."""
    try:
        config = _load_config(config_path)
        model_file = model_path or config.get("paths", {}).get("model")
        if not model_file:
            raise RelTrajError("no model file given (flag --model or paths.model)")
        weights, index, decoder_config, _ = load_model(model_file)
        (annotations_path,) = _paths(config, "annotations")
        _, sequences, _ = _extract_all(config)
        lexicons = _load_lexicons(config)
        dataset = load_annotations(annotations_path, sequences)
        if not dataset.fully_labeled:
            raise RelTrajError("no fully labeled sequences to evaluate on")

        golds, preds, entries = [], [], []
        eds = []
        gold_flags, pred_flags = [], []
        for seq in dataset.fully_labeled:
            contents = extract_content_matrix(seq, lexicons)
            states = viterbi_decode(contents, weights, index, decoder_config)
            gold = list(seq.labels)
            golds.extend(gold)
            preds.extend(states)
            ed = evaluation.edit_distance(collapse(gold), collapse(states))
            eds.append(ed)
            gold_flags.append(evaluation.change_detection(gold))
            pred_flags.append(evaluation.change_detection(states))
            entries.append({"doc_id": seq.doc_id, "pair": list(seq.pair),
                            "gold": gold, "predicted": states,
                            "edit_distance": ed})
        p, r, f = evaluation.state_prf(golds, preds, states=index.states)
        cp, cr, cf = evaluation.change_eval(gold_flags, pred_flags)
        payload = {
            "config": _config_echo(config),
            "summary": {
                "averaged_precision": p, "averaged_recall": r, "averaged_f1": f,
                "mean_edit_distance": float(np.mean(eds)),
                "change_precision": cp, "change_recall": cr, "change_f1": cf,
                "num_sequences": len(dataset.fully_labeled),
                "num_sentences": len(golds),
            },
            "per_sequence": entries,
        }
        out = report_path or config.get("paths", {}).get("report", "report.json")
        _write_json(out, payload)
        click.echo(f"wrote report to {out}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def cv(config_path, seed, workers, report_path):
    """Cross-validate with random restarts on the annotated corpus."""
    try:
        config = _load_config(config_path)
        (annotations_path,) = _paths(config, "annotations")
        _, sequences, _ = _extract_all(config)
        lexicons = _load_lexicons(config)
        dataset = load_annotations(annotations_path, sequences)
        section = config.get("eval", {})
        harness_seed = seed if seed is not None else section.get("seed", 0)
        n_workers = workers if workers is not None else section.get("workers", 1)
        report = evaluation.cross_validate(
            dataset, lexicons, _train_config(config),
            k=section.get("folds", 10),
            restarts=section.get("restarts", 100),
            seed=harness_seed,
            model_kind=section.get("model_kind", "order2"),
            workers=n_workers,
            baseline_epochs=section.get("baseline_epochs", 200),
            baseline_lr=section.get("baseline_learning_rate", 0.1),
        )
        payload = {"config": _config_echo(config, seed=harness_seed),
                   **report.to_dict()}
        out = report_path or config.get("paths", {}).get("report", "report.json")
        _write_json(out, payload)
        click.echo(f"wrote report to {out}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def synth(config_path, seed, out_dir):
    """Generate a synthetic corpus, annotations, lexicons and config."""
    try:
        config = _load_config(config_path) if config_path else {}
        section = config.get("generator", {})
        spec = evaluation.GeneratorSpec(
            num_sequences=section.get("num_sequences", 200),
            min_length=section.get("min_length", 5),
            max_length=section.get("max_length", 12),
            persistence=section.get("persistence", 0.9),
            noise=section.get("noise", 0.3),
            fraction_partial=section.get("fraction_partial", 0.0),
            mask_rate=section.get("mask_rate", 0.5),
            negation_rate=section.get("negation_rate", 0.15),
        )
        gen_seed = seed if seed is not None else section.get("seed", 0)
        target = Path(out_dir or section.get("out_dir", "synth"))
        corpus = evaluation.generate_synthetic(spec, gen_seed)
        write_synthetic_corpus(corpus, target, spec, gen_seed)
        click.echo(f"wrote synthetic corpus ({spec.num_sequences} sequences) to {target}")
    except (RelTrajError, OSError) as exc:
        _fail(exc)


def write_synthetic_corpus(corpus, target: Path, spec, seed: int):
    """Lay out documents, annotations, lexicons and a ready config file."""
    from .corpus import document_to_dict

    docs_dir = target / "documents"
    lex_dir = target / "lexicons"
    docs_dir.mkdir(parents=True, exist_ok=True)
    lex_dir.mkdir(parents=True, exist_ok=True)

    for doc in corpus.documents:
        _write_json(docs_dir / f"{doc.doc_id}.json", document_to_dict(doc))

    with open(target / "annotations.jsonl", "w", encoding="utf-8") as fh:
        for seq in corpus.dataset.fully_labeled + corpus.dataset.partially_labeled:
            for i, state in enumerate(seq.labels):
                if state is None:
                    continue
                fh.write(json.dumps({"doc_id": seq.doc_id, "pair": list(seq.pair),
                                     "seq_index": i, "state": state}) + "\n")

    for name, lex in (("connotation", corpus.lexicons.connotation),
                      ("sentiment", corpus.lexicons.sentiment),
                      ("prior_polarity", corpus.lexicons.prior_polarity)):
        with open(lex_dir / f"{name}.tsv", "w", encoding="utf-8") as fh:
            for word in sorted(lex.entries):
                fh.write(f"{word}\t{lex.entries[word]:+d}\n")
    shutil.copyfile(default_data_path("frames.tsv"), lex_dir / "frames.tsv")
    shutil.copyfile(default_data_path("stopwords.txt"), lex_dir / "stopwords.txt")

    config_text = f"""# Generated synthetic-corpus config (seed {seed}).
[paths]
documents = "{docs_dir}"
annotations = "{target / 'annotations.jsonl'}"
connotation = "{lex_dir / 'connotation.tsv'}"
sentiment = "{lex_dir / 'sentiment.tsv'}"
prior_polarity = "{lex_dir / 'prior_polarity.tsv'}"
frames = "{lex_dir / 'frames.tsv'}"
stopwords = "{lex_dir / 'stopwords.txt'}"
model = "{target / 'model.json'}"
report = "{target / 'report.json'}"

[extract]
min_cooccurrence = {min(spec.min_length, 5)}

[model]
outer_iterations = 3
perceptron_epochs = 20
init_scale = 0.01
seed = {seed}

[eval]
folds = 5
restarts = 1
workers = 1
seed = {seed}
"""
    (target / "config.toml").write_text(config_text, encoding="utf-8")


if __name__ == "__main__":
    main()
