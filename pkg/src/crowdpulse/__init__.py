"""Sentiment-over-time analysis for microblog posts about live events.

The pipeline classifies each post with a (target, sentiment) pair, then
aggregates predicted sentiment per target to rank likely event outcomes
and trace opinion trends.
"""

from .bundle import ModelBundle, load_bundle, save_bundle
from .classifiers import (
    ElmanConfig,
    ElmanModel,
    JointCategory,
    NaiveBayesModel,
    SvmBinaryModel,
    SvmOvrModel,
    category_order,
    predict,
    smo_solve,
    train_elman,
    train_naive_bayes,
    train_svm_ovr,
)
from .config import PipelineConfig, apply_overrides, load_config
from .corpus import (
    AnnotatedTweet,
    CleanReport,
    EventRegistry,
    Sentiment,
    Tweet,
    clean_corpus,
    clean_tweet,
    filter_corpus,
    load_corpus,
    load_registry,
)
from .embeddings import PvConfig, PvModel, infer_vector, train_pv
from .errors import CrowdPulseError, DataError, NumericError
from .evaluation import (
    PrfCounts,
    RankedList,
    average_precision,
    hamming_loss,
    mean_average_precision,
    mean_f1,
    to_multilabel,
)
from .features import (
    PolarityLexicon,
    SparseVector,
    Vocabulary,
    assemble_vector,
    dal_features,
    fit_vocabulary,
    load_lexicon,
    tag_pos,
    tokenize,
)
from .multilabel import (
    LabelSet,
    LabelSpace,
    RakelConfig,
    RakelModel,
    predict_rakel,
    sample_labelsets,
    to_pair,
    train_rakel,
)
from .pipeline import (
    PredictionRecord,
    evaluate_pipeline,
    featurize_tweet,
    predict_pipeline,
    train_pipeline,
)
from .prediction import (
    InfluenceEntry,
    RankedOutcome,
    SentimentTally,
    TrendSeries,
    aggregate,
    expert_influence,
    rank_outcome,
    trend_series,
)
from .seeds import derive_seed
from .synth import Shock, SynthSpec, generate_synthetic, load_synth_spec
from .topics import LdaConfig, LdaModel, fit_lda, infer_theta

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
