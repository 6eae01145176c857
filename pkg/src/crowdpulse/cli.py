"""Command-line harness over the library.

Every command reads and writes plain files (JSONL corpora, JSON reports,
CSV trend tables) and prints deterministic output: JSON is emitted with
sorted keys so identical inputs give byte-identical reports.

Exit codes: 0 success, 1 usage error, 2 malformed data, 3 numeric
failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .bundle import load_bundle, save_bundle
from .classifiers import JointCategory
from .config import apply_overrides, load_config
from .corpus import (
    AnnotatedTweet,
    Sentiment,
    Tweet,
    clean_corpus,
    clean_tweet,
    dump_corpus,
    load_corpus,
    load_registry,
)
from .errors import CrowdPulseError, DataError, NumericError
from .evaluation import RankedList, average_precision
from .features import fit_vocabulary, tokenize
from .pipeline import evaluate_pipeline, predict_pipeline, train_pipeline
from .prediction import aggregate, expert_influence, rank_outcome, trend_series
from .synth import generate_synthetic, load_synth_spec


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_lines(objs, out: str | None) -> None:
    text = "".join(json.dumps(o, sort_keys=True) + "\n" for o in objs)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_predictions(path: str) -> list[tuple[JointCategory, int]]:
    """Read (target, sentiment, ts) triples from a predictions or gold JSONL."""
    pairs = []
    p = Path(path)
    if not p.exists():
        raise DataError(f"predictions file not found: {path}")
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        try:
            pair = JointCategory(obj["target"], Sentiment.parse(obj["sentiment"]))
            pairs.append((pair, int(obj["ts"])))
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
    if not pairs:
        raise DataError(f"predictions file {path} holds no records")
    return pairs


@click.group()
def cli():
    """Microblog sentiment pipeline: corpus prep, training, prediction,
    and outcome aggregation."""


@cli.command()
@click.argument("corpus", type=click.Path())
@click.option("--schema", type=click.Choice(["annotated", "raw"]), default="annotated")
@click.option("--registry", "registry_path", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None, help="Normalized JSONL output.")
def ingest(corpus, schema, registry_path, out):
    """Validate a corpus file and echo it back as normalized JSONL."""
    registry = load_registry(registry_path) if registry_path else None
    records = load_corpus(corpus, schema=schema, registry=registry)
    if out:
        dump_corpus(records, out)
    summary = {"records": len(records), "schema": schema}
    _emit(summary, None)


@cli.command()
@click.argument("corpus", type=click.Path())
@click.option("--schema", type=click.Choice(["annotated", "raw"]), default="annotated")
@click.option("--out", type=click.Path(), required=True, help="Cleaned JSONL output.")
@click.option("--report", "report_path", type=click.Path(), default=None)
def clean(corpus, schema, out, report_path):
    """Run the text filters and drop rules, writing survivors and a report."""
    records = load_corpus(corpus, schema=schema)
    if schema == "annotated":
        survivors, rep = clean_corpus(records)
    else:
        # raw text has no annotations, so only the text transforms and
        # retweet/duplicate rules apply
        wrapped = [
            AnnotatedTweet(tweet=t, target="_", sentiment=Sentiment.POSITIVE)
            for t in records
        ]
        cleaned, rep = clean_corpus(wrapped)
        survivors = [a.tweet for a in cleaned]
    dump_corpus(survivors, out)
    report = {"input": len(records), "output": len(survivors), **rep.as_dict()}
    _emit(report, report_path)


@cli.command()
@click.argument("corpus", type=click.Path())
@click.option("--features", default="f1", help="Feature bundle f1..f4.")
@click.option("--min-count", default=1, type=int)
@click.option("--lexicon", "lexicon_path", type=click.Path(), default=None)
@click.option("--synonyms", "synonyms_path", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None)
def featurize(corpus, features, min_count, lexicon_path, synonyms_path, out):
    """Fit a vocabulary on a corpus and write one sparse vector per tweet."""
    from .features import PolarityLexicon, assemble_vector, load_lexicon

    records = load_corpus(corpus, schema="annotated")
    survivors, _ = clean_corpus(records)
    tokens_list = [tokenize(a.tweet.text) for a in survivors]
    vocab = fit_vocabulary(tokens_list, min_count=min_count)
    lexicon = (
        load_lexicon(lexicon_path, synonyms_path)
        if lexicon_path
        else PolarityLexicon.empty()
    )
    rows = []
    for a, toks in zip(survivors, tokens_list):
        v = assemble_vector(toks, vocab, features, lexicon)
        rows.append(
            {
                "id": a.tweet.id,
                "indices": [int(i) for i in v.indices],
                "values": [float(x) for x in v.values],
                "dimension": v.dimension,
            }
        )
    _emit_lines(rows, out)


def _config_from_flags(config_path, features, classifier, seed):
    cfg = load_config(config_path)
    return apply_overrides(cfg, features=features, classifier=classifier, seed=seed)


@cli.command()
@click.argument("corpus", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), required=True, help="Bundle output path.")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--features", default=None, help="Feature bundle f1..f6.")
@click.option("--classifier", default=None, help="nb, svm, elman, or rakel.")
@click.option("--seed", type=int, default=None)
def train(corpus, registry_path, out, config_path, features, classifier, seed):
    """Train a model and save it as a self-contained bundle."""
    cfg = _config_from_flags(config_path, features, classifier, seed)
    registry = load_registry(registry_path)
    records = load_corpus(corpus, schema="annotated", registry=registry)
    bundle, report = train_pipeline(records, registry, cfg)
    save_bundle(bundle, out)
    _emit(
        {
            "bundle": str(out),
            "classifier": bundle.classifier_kind,
            "features": bundle.feature_bundle,
            "input": len(records),
            "trained_on": len(records) - report.total_dropped,
            "clean_report": report.as_dict(),
        },
        None,
    )


@cli.command()
@click.argument("bundle_path", type=click.Path())
@click.argument("corpus", type=click.Path())
@click.option("--schema", type=click.Choice(["raw", "annotated"]), default="raw")
@click.option("--out", type=click.Path(), default=None)
def predict(bundle_path, corpus, schema, out):
    """Label each tweet with its (target, sentiment) pair."""
    bundle = load_bundle(bundle_path)
    records = load_corpus(corpus, schema=schema)
    tweets = [r.tweet if isinstance(r, AnnotatedTweet) else r for r in records]
    preds = predict_pipeline(bundle, tweets)
    rows = [
        {
            "id": r.tweet_id,
            "ts": r.timestamp,
            "target": r.category.target,
            "sentiment": r.category.sentiment.short,
            "scores": {k: round(v, 10) for k, v in sorted(r.scores.items())},
        }
        for r in preds
    ]
    _emit_lines(rows, out)


@cli.command()
@click.argument("bundle_path", type=click.Path())
@click.argument("corpus", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=None)
def evaluate(bundle_path, corpus, registry_path, out):
    """Score a bundle against gold annotations."""
    bundle = load_bundle(bundle_path)
    registry = load_registry(registry_path)
    records = load_corpus(corpus, schema="annotated", registry=registry)
    _emit(evaluate_pipeline(bundle, records, registry), out)


@cli.command()
@click.argument("predictions", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(), required=True)
@click.option("--mode", type=click.Choice(["half_list", "top_n"]), default="half_list")
@click.option("--top-n", type=int, default=None)
@click.option(
    "--actual",
    default=None,
    help="Comma-separated actual outcome, adds average precision to the report.",
)
@click.option("--out", type=click.Path(), default=None)
def outcome(predictions, registry_path, mode, top_n, actual, out):
    """Rank participants by positive-mention share."""
    registry = load_registry(registry_path)
    pairs = _load_predictions(predictions)
    ranked = rank_outcome(aggregate(pairs), registry, mode=mode, top_n=top_n)
    report = {
        "event": registry.event_id,
        "k": ranked.k,
        "selected": list(ranked.selected),
        "entries": [
            {
                "target": e.target,
                "raw": round(e.raw, 10),
                "normalized": round(e.normalized, 10),
                "positive": e.positive,
                "negative": e.negative,
            }
            for e in ranked.entries
        ],
    }
    if actual:
        relevant = frozenset(t.strip() for t in actual.split(",") if t.strip())
        unknown = relevant - set(registry.participants)
        if unknown:
            raise DataError(f"actual outcome names unknown participants: {sorted(unknown)}")
        query = RankedList(
            query_id=registry.event_id,
            predicted=ranked.selected,
            relevant=relevant,
        )
        report["average_precision"] = round(average_precision(query), 10)
    _emit(report, out)


@cli.command()
@click.argument("predictions", type=click.Path())
@click.option(
    "--registry",
    "registry_paths",
    type=click.Path(),
    multiple=True,
    required=True,
    help="Repeat for event bucketing over several events.",
)
@click.option("--bucketing", type=click.Choice(["hour", "day", "event"]), default="hour")
@click.option("--out", type=click.Path(), default=None)
def trends(predictions, registry_paths, bucketing, out):
    """Write a CSV time series of per-target sentiment per bucket."""
    registries = [load_registry(p) for p in registry_paths]
    pairs = _load_predictions(predictions)
    series = trend_series(pairs, bucketing, registries)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["bucket", "start", "end", "volume", "target", "positive", "negative", "score"]
    )
    for bucket in series.buckets:
        for target in series.targets:
            cell = bucket.cells[target]
            score = cell.score
            writer.writerow(
                [
                    bucket.key,
                    bucket.start,
                    bucket.end,
                    bucket.volume,
                    target,
                    cell.positive,
                    cell.negative,
                    "" if score is None else f"{score:.6f}",
                ]
            )
    if out:
        Path(out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())


@cli.command()
@click.argument("predictions", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=None)
def influence(predictions, registry_path, out):
    """Positive-share shift around the expert announcement."""
    registry = load_registry(registry_path)
    pairs = _load_predictions(predictions)
    table = expert_influence(pairs, registry)
    report = {
        "event": registry.event_id,
        "announcement": registry.expert_announcement_time,
        "targets": {
            t: {
                "before": None if e.before is None else round(e.before, 10),
                "after": None if e.after is None else round(e.after, 10),
                "delta": None if e.delta is None else round(e.delta, 10),
            }
            for t, e in table.items()
        },
    }
    _emit(report, out)


@cli.command()
@click.argument("spec", type=click.Path())
@click.option("--out", type=click.Path(), required=True, help="Corpus JSONL output.")
@click.option("--registry-out", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
def synth(spec, out, registry_out, seed):
    """Generate a synthetic annotated corpus with planted structure."""
    s = load_synth_spec(spec)
    if seed is not None:
        s.seed = seed
    corpus = generate_synthetic(s)
    dump_corpus(corpus, out)
    if registry_out:
        reg = s.registry()
        payload = {
            "event_id": reg.event_id,
            "participants": list(reg.participants),
            "event_time": reg.event_time,
        }
        if reg.expert_announcement_time is not None:
            payload["expert_announcement_time"] = reg.expert_announcement_time
        Path(registry_out).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    _emit({"tweets": len(corpus), "out": str(out)}, None)


def entry() -> None:
    """Console entry point mapping library errors onto exit codes."""
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except NumericError as exc:
        click.echo(f"numeric error: {exc}", err=True)
        sys.exit(3)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(2)
    except CrowdPulseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entry()
