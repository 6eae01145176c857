"""End-to-end train and predict flows tying the stages together.

Training cleans the corpus, builds the selected feature bundle, fits the
selected classifier, and packs everything prediction needs into one
portable bundle. Prediction replays the same cleaning and featurization
against the frozen components, with per-document inference seeds derived
from the bundle's master seed so repeated runs give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bundle import ModelBundle
from .classifiers import (
    ElmanConfig,
    JointCategory,
    category_order,
    predict as classify,
    train_elman,
    train_naive_bayes,
    train_svm_ovr,
)
from .config import PipelineConfig
from .corpus import AnnotatedTweet, CleanReport, EventRegistry, Tweet, clean_corpus, clean_tweet
from .embeddings import PvConfig, infer_vector, train_pv
from .errors import DataError, NumericError
from .evaluation import hamming_loss, mean_f1, pair_counts, to_multilabel
from .features import (
    PolarityLexicon,
    SparseVector,
    assemble_vector,
    fit_vocabulary,
    load_lexicon,
    tokenize,
)
from .multilabel import (
    LabelSpace,
    RakelConfig,
    joint_to_labelset,
    predict_rakel,
    to_pair,
    train_rakel,
)
from .seeds import derive_seed
from .topics import LdaConfig, fit_lda, infer_theta


@dataclass
class PredictionRecord:
    tweet_id: str
    timestamp: int
    category: JointCategory
    scores: dict[str, float]

    @property
    def pair(self) -> tuple[JointCategory, int]:
        return (self.category, self.timestamp)


def _load_lexicon_if_any(config: PipelineConfig) -> PolarityLexicon:
    if config.feature.lexicon_path:
        return load_lexicon(config.feature.lexicon_path, config.feature.synonyms_path)
    return PolarityLexicon.empty()


def _dense_rows(
    doc_vectors: np.ndarray, thetas: np.ndarray | None
) -> list[SparseVector]:
    rows = []
    for i in range(doc_vectors.shape[0]):
        row = doc_vectors[i]
        if thetas is not None:
            row = np.concatenate([row, thetas[i]])
        rows.append(SparseVector.from_dense(row))
    return rows


def _shift_vector(vectors: Sequence[SparseVector]) -> np.ndarray:
    """Per-dimension offset making every training value non-negative."""
    dim = vectors[0].dimension
    mins = np.zeros(dim, dtype=np.float64)
    for v in vectors:
        dense = v.to_dense()
        mins = np.minimum(mins, dense)
    return np.maximum(0.0, -mins)


def _apply_shift(v: SparseVector, shift: np.ndarray) -> SparseVector:
    return SparseVector.from_dense(v.to_dense() + shift)


def train_pipeline(
    annotated: Sequence[AnnotatedTweet],
    registry: EventRegistry,
    config: PipelineConfig | None = None,
) -> tuple[ModelBundle, CleanReport]:
    """Clean, featurize, and fit; returns the bundle plus the clean report."""
    config = config or PipelineConfig()
    survivors, report = clean_corpus(list(annotated))
    if not survivors:
        raise DataError("cleaning removed every training tweet")
    for a in survivors:
        if a.target not in registry:
            raise DataError(
                f"tweet {a.tweet.id} targets {a.target!r}, unknown to event "
                f"{registry.event_id!r}"
            )
    tokens_list = [tokenize(a.tweet.text) for a in survivors]
    categories = category_order(registry)
    gold = [JointCategory(a.target, a.sentiment) for a in survivors]
    master = config.seed

    vocabulary = None
    lexicon = None
    pv_model = None
    lda_model = None
    nb_shift = None
    xs: list[SparseVector] | None = None

    if config.classifier == "elman":
        pass  # sequence model, no vectorization needed
    elif config.features in ("f1", "f2", "f3", "f4"):
        vocabulary = fit_vocabulary(tokens_list, min_count=config.feature.min_count)
        if config.features == "f4":
            lexicon = _load_lexicon_if_any(config)
        xs = [
            assemble_vector(toks, vocabulary, config.features, lexicon)
            for toks in tokens_list
        ]
    else:
        pv_cfg = PvConfig(
            d=config.pv.d,
            window=config.pv.window,
            negatives=config.pv.negatives,
            epochs=config.pv.epochs,
            lr_start=config.pv.lr_start,
            lr_end=config.pv.lr_end,
            seed=derive_seed(master, "pv"),
            workers=config.pv.workers,
        )
        pv_model = train_pv(tokens_list, pv_cfg)
        thetas = None
        if config.features == "f6":
            lda_cfg = LdaConfig(
                T=config.lda.topics,
                alpha=config.lda.alpha,
                beta=config.lda.beta,
                iterations=config.lda.iterations,
                burn_in=config.lda.burn_in,
                sample_every=config.lda.sample_every,
                seed=derive_seed(master, "lda"),
            )
            lda_model, thetas = fit_lda(tokens_list, lda_cfg)
        xs = _dense_rows(pv_model.doc_vectors, thetas)

    label_space = None
    if config.classifier == "nb":
        assert xs is not None
        if config.features in ("f5", "f6"):
            nb_shift = _shift_vector(xs)
            xs = [_apply_shift(x, nb_shift) for x in xs]
        classifier = train_naive_bayes(
            list(zip(xs, gold)),
            smoothing=config.nb.smoothing,
            categories=categories,
        )
    elif config.classifier == "svm":
        assert xs is not None
        classifier = train_svm_ovr(
            list(zip(xs, gold)),
            C=config.svm.C,
            tol=config.svm.tol,
            max_passes=config.svm.max_passes,
            seed=derive_seed(master, "svm"),
            categories=categories,
        )
    elif config.classifier == "elman":
        classifier = train_elman(
            list(zip(tokens_list, gold)),
            ElmanConfig(
                e=config.elman.e,
                h=config.elman.h,
                epochs=config.elman.epochs,
                lr=config.elman.lr,
                bptt_limit=config.elman.bptt_limit,
                seed=derive_seed(master, "elman"),
            ),
            categories=categories,
        )
    else:
        assert xs is not None
        if config.rakel.base == "nb" and config.features in ("f5", "f6"):
            nb_shift = _shift_vector(xs)
            xs = [_apply_shift(x, nb_shift) for x in xs]
        label_space = LabelSpace.for_registry(registry)
        gold_sets = [joint_to_labelset(c, label_space) for c in gold]
        classifier = train_rakel(
            list(zip(xs, gold_sets)),
            label_space,
            RakelConfig(
                k=config.rakel.k,
                m=config.rakel.m,
                threshold=config.rakel.threshold,
                base=config.rakel.base,
                seed=derive_seed(master, "rakel"),
                svm_c=config.svm.C,
                svm_tol=config.svm.tol,
                svm_max_passes=config.svm.max_passes,
                nb_smoothing=config.nb.smoothing,
            ),
        )

    bundle = ModelBundle(
        feature_bundle=config.features,
        classifier_kind=config.classifier,
        classifier=classifier,
        seed=master,
        vocabulary=vocabulary,
        lexicon=lexicon,
        pv_model=pv_model,
        lda_model=lda_model,
        label_space=label_space,
        nb_shift=nb_shift,
        registry_participants=registry.participants,
        config={
            "features": config.features,
            "classifier": config.classifier,
            "seed": master,
            "pv_infer_steps": config.pv.infer_steps,
            "lda_infer_iterations": config.lda.infer_iterations,
        },
    )
    return bundle, report


def featurize_tweet(bundle: ModelBundle, tweet: Tweet) -> SparseVector:
    """Rebuild the feature vector for one (possibly unseen) tweet."""
    tokens = tokenize(clean_tweet(tweet.text))
    if bundle.feature_bundle in ("f1", "f2", "f3", "f4"):
        if bundle.vocabulary is None:
            raise DataError("bundle is missing its vocabulary")
        return assemble_vector(
            tokens, bundle.vocabulary, bundle.feature_bundle, bundle.lexicon
        )
    if bundle.pv_model is None:
        raise DataError("bundle is missing its embedding model")
    steps = bundle.config.get("pv_infer_steps", 200)
    doc = infer_vector(
        bundle.pv_model,
        tokens,
        steps=steps,
        seed=derive_seed(bundle.seed, f"infer:{tweet.id}"),
    ).vector
    if bundle.feature_bundle == "f5":
        return SparseVector.from_dense(doc)
    if bundle.lda_model is None:
        raise DataError("bundle is missing its topic model")
    theta = infer_theta(
        bundle.lda_model,
        tokens,
        iterations=bundle.config.get("lda_infer_iterations", 50),
        seed=derive_seed(bundle.seed, f"theta:{tweet.id}"),
    ).theta
    return SparseVector.from_dense(np.concatenate([doc, theta]))


def predict_pipeline(
    bundle: ModelBundle, tweets: Sequence[Tweet]
) -> list[PredictionRecord]:
    """Classify each input tweet; order follows the input."""
    out = []
    for tweet in tweets:
        if bundle.classifier_kind == "elman":
            tokens = tokenize(clean_tweet(tweet.text))
            category, scores = classify(bundle.classifier, tokens)
            score_map = {str(c): float(s) for c, s in scores.items()}
        elif bundle.classifier_kind == "rakel":
            x = featurize_tweet(bundle, tweet)
            if bundle.nb_shift is not None:
                x = _apply_shift(x, bundle.nb_shift)
            labels, ratios = predict_rakel(bundle.classifier, x)
            if not np.all(np.isfinite(ratios)):
                raise NumericError(f"non-finite vote ratios for tweet {tweet.id}")
            category = to_pair(labels, ratios, bundle.label_space)
            score_map = {
                name: float(r)
                for name, r in zip(bundle.label_space.labels, ratios)
            }
        else:
            x = featurize_tweet(bundle, tweet)
            if bundle.nb_shift is not None:
                x = _apply_shift(x, bundle.nb_shift)
            category, scores = classify(bundle.classifier, x)
            score_map = {str(c): float(s) for c, s in scores.items()}
        if not all(np.isfinite(v) for v in score_map.values()):
            raise NumericError(f"non-finite scores for tweet {tweet.id}")
        out.append(
            PredictionRecord(
                tweet_id=tweet.id,
                timestamp=tweet.timestamp,
                category=category,
                scores=score_map,
            )
        )
    return out


def evaluate_pipeline(
    bundle: ModelBundle, annotated: Sequence[AnnotatedTweet], registry: EventRegistry
) -> dict:
    """Score the bundle against gold annotations.

    Single-label predictions are bridged to two-element label sets so the
    multi-label metrics apply across every classifier kind.
    """
    if not annotated:
        raise DataError("cannot evaluate on an empty gold set")
    space = bundle.label_space or LabelSpace.for_registry(registry)
    records = predict_pipeline(bundle, [a.tweet for a in annotated])
    gold_pairs = [JointCategory(a.target, a.sentiment) for a in annotated]
    truth = [to_multilabel(g, space) for g in gold_pairs]
    pred = [to_multilabel(r.category, space) for r in records]
    exact = sum(1 for g, r in zip(gold_pairs, records) if g == r.category)
    return {
        "examples": len(annotated),
        "accuracy": exact / len(annotated),
        "hamming_loss": hamming_loss(truth, pred, space),
        "mean_f1": mean_f1(pair_counts(truth, pred)),
    }
