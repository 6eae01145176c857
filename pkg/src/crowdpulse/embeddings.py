"""Paragraph-vector document embeddings (distributed-memory variant).

Each training document owns a dense vector that is optimized jointly with
word vectors: at every position the model predicts the center word from
the mean of the surrounding context word vectors and the document vector,
trained by SGD with negative sampling. Unseen documents are embedded by
freezing the word and output matrices and optimizing a fresh document
vector alone.

Training is exactly reproducible in single-threaded mode; an optional
lock-free threaded mode trades determinism for throughput.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import expit

from .errors import DataError

NEGATIVE_SAMPLING_POWER = 0.75


@dataclass
class PvConfig:
    d: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 20
    lr_start: float = 0.025
    lr_end: float = 0.0001
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise DataError("embedding dimension must be >= 1")
        if self.epochs < 0:
            raise DataError("epochs must be >= 0")
        if self.negatives < 0:
            raise DataError("negatives must be >= 0")


@dataclass
class PvModel:
    vocab: tuple[str, ...]
    word_vectors: np.ndarray      # |V| x d, context side
    doc_vectors: np.ndarray       # |D| x d, one per training document
    output_vectors: np.ndarray    # |V| x d, prediction side
    config: PvConfig
    unigram_table: np.ndarray     # sampling distribution over V
    epoch_losses: list[float] = field(default_factory=list)
    word_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.word_index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def d(self) -> int:
        return self.config.d


class InferResult(NamedTuple):
    vector: np.ndarray
    all_oov: bool


def _log_sigmoid(x: float) -> float:
    # -log(1 + e^-x), stable for large |x|
    return -float(np.logaddexp(0.0, -x))


def position_forward_backward(
    vbar: np.ndarray,
    output_vectors: np.ndarray,
    center: int,
    negatives: Sequence[int],
) -> tuple[float, np.ndarray, list[tuple[int, np.ndarray]]]:
    """Negative-sampling loss and gradients at one position.

    Returns (loss, gradient wrt the combined context mean, and
    (word id, gradient) pairs for the output vectors involved). This is
    the single source of truth for the objective; training, inference,
    and the gradient checks all go through it.
    """
    u_o = output_vectors[center]
    score = float(u_o @ vbar)
    loss = -_log_sigmoid(score)
    g = float(expit(score)) - 1.0          # d loss / d score
    grad_vbar = g * u_o
    out_grads = [(center, g * vbar)]
    for n in negatives:
        u_n = output_vectors[n]
        s_n = float(u_n @ vbar)
        loss -= _log_sigmoid(-s_n)
        g_n = float(expit(s_n))
        grad_vbar = grad_vbar + g_n * u_n
        out_grads.append((n, g_n * vbar))
    return loss, grad_vbar, out_grads


def _context_ids(doc: Sequence[int], t: int, window: int) -> list[int]:
    lo = max(0, t - window)
    hi = min(len(doc), t + window + 1)
    return [doc[j] for j in range(lo, hi) if j != t]


def batch_loss(
    word_vectors: np.ndarray,
    output_vectors: np.ndarray,
    doc_vectors: np.ndarray,
    examples: Sequence[tuple[int, list[int], int, list[int]]],
) -> float:
    """Total loss over frozen (doc, context, center, negatives) examples."""
    total = 0.0
    for doc_id, ctx, center, negs in examples:
        vbar = _combine(word_vectors, doc_vectors[doc_id], ctx)
        loss, _, _ = position_forward_backward(vbar, output_vectors, center, negs)
        total += loss
    return total


def batch_gradients(
    word_vectors: np.ndarray,
    output_vectors: np.ndarray,
    doc_vectors: np.ndarray,
    examples: Sequence[tuple[int, list[int], int, list[int]]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`batch_loss` wrt all three matrices."""
    gW = np.zeros_like(word_vectors)
    gO = np.zeros_like(output_vectors)
    gD = np.zeros_like(doc_vectors)
    for doc_id, ctx, center, negs in examples:
        vbar = _combine(word_vectors, doc_vectors[doc_id], ctx)
        _, grad_vbar, out_grads = position_forward_backward(
            vbar, output_vectors, center, negs
        )
        share = grad_vbar / (len(ctx) + 1)
        gD[doc_id] += share
        for w in ctx:
            gW[w] += share
        for w, g in out_grads:
            gO[w] += g
    return gW, gO, gD


def _combine(word_vectors: np.ndarray, doc_vec: np.ndarray, ctx: Sequence[int]) -> np.ndarray:
    if ctx:
        return (word_vectors[list(ctx)].sum(axis=0) + doc_vec) / (len(ctx) + 1)
    return doc_vec.copy()


def build_unigram_table(corpus_ids: Sequence[Sequence[int]], vocab_size: int) -> np.ndarray:
    counts = np.zeros(vocab_size, dtype=np.float64)
    for doc in corpus_ids:
        for w in doc:
            counts[w] += 1
    table = counts ** NEGATIVE_SAMPLING_POWER
    total = table.sum()
    if total <= 0:
        raise DataError("cannot build a sampling table from an empty corpus")
    return table / total


def _draw_negatives(cdf: np.ndarray, k: int, center: int, rng: np.random.Generator) -> list[int]:
    if k == 0:
        return []
    draws = np.searchsorted(cdf, rng.random(k), side="right")
    # classic behavior: a negative that hits the center word is dropped
    return [int(n) for n in draws if n != center]


def _train_span(
    model: PvModel,
    corpus_ids: list[list[int]],
    doc_ids: Sequence[int],
    rng: np.random.Generator,
    cdf: np.ndarray,
    step_base: int,
    total_steps: int,
    loss_out: list[float],
) -> int:
    """One pass over the given documents; returns positions processed."""
    cfg = model.config
    W, O, D = model.word_vectors, model.output_vectors, model.doc_vectors
    lr_span = cfg.lr_end - cfg.lr_start
    step = step_base
    loss_sum = 0.0
    for doc_id in doc_ids:
        doc = corpus_ids[doc_id]
        dvec = D[doc_id]
        for t in range(len(doc)):
            lr = cfg.lr_start + lr_span * (step / max(1, total_steps - 1))
            ctx = _context_ids(doc, t, cfg.window)
            vbar = _combine(W, dvec, ctx)
            negs = _draw_negatives(cdf, cfg.negatives, doc[t], rng)
            loss, grad_vbar, out_grads = position_forward_backward(
                vbar, O, doc[t], negs
            )
            loss_sum += loss
            share = (lr / (len(ctx) + 1)) * grad_vbar
            dvec -= share
            for w in ctx:
                W[w] -= share
            for w, g in out_grads:
                O[w] -= lr * g
            step += 1
    loss_out.append(loss_sum)
    return step - step_base


def train_pv(corpus: Sequence[Sequence[str]], config: PvConfig | None = None) -> PvModel:
    """Fit document and word vectors on a tokenized corpus.

    With ``config.workers == 1`` the result is bit-identical for a given
    (corpus, config) pair. ``workers > 1`` runs lock-free threaded updates
    over document shards and is not deterministic.
    """
    if not corpus:
        raise DataError("cannot train paragraph vectors on an empty corpus")
    cfg = config or PvConfig()
    vocab = tuple(sorted(set(w for doc in corpus for w in doc)))
    if not vocab:
        raise DataError("corpus contains no tokens")
    word_index = {w: i for i, w in enumerate(vocab)}
    corpus_ids = [[word_index[w] for w in doc] for doc in corpus]

    rng = np.random.default_rng(cfg.seed)
    bound = 0.5 / cfg.d
    word_vectors = rng.uniform(-bound, bound, size=(len(vocab), cfg.d))
    doc_vectors = rng.uniform(-bound, bound, size=(len(corpus), cfg.d))
    output_vectors = np.zeros((len(vocab), cfg.d), dtype=np.float64)

    table = build_unigram_table(corpus_ids, len(vocab))
    model = PvModel(
        vocab=vocab,
        word_vectors=word_vectors,
        doc_vectors=doc_vectors,
        output_vectors=output_vectors,
        config=cfg,
        unigram_table=table,
    )
    positions = sum(len(doc) for doc in corpus_ids)
    if positions == 0:
        raise DataError("corpus contains no tokens")
    total_steps = cfg.epochs * positions
    cdf = np.cumsum(table)

    doc_order = list(range(len(corpus_ids)))
    if cfg.workers > 1:
        shards = [doc_order[i :: cfg.workers] for i in range(cfg.workers)]
        shards = [s for s in shards if s]
    step = 0
    for epoch in range(cfg.epochs):
        losses: list[float] = []
        if cfg.workers > 1:
            threads = []
            for i, shard in enumerate(shards):
                shard_rng = np.random.default_rng((cfg.seed, epoch, i))
                args = (model, corpus_ids, shard, shard_rng, cdf, step, total_steps, losses)
                th = threading.Thread(target=_train_span, args=args)
                threads.append(th)
                th.start()
            for th in threads:
                th.join()
            step += positions
        else:
            step += _train_span(
                model, corpus_ids, doc_order, rng, cdf, step, total_steps, losses
            )
        model.epoch_losses.append(sum(losses) / positions)
    if not np.all(np.isfinite(model.word_vectors)) or not np.all(
        np.isfinite(model.doc_vectors)
    ):
        raise DataError("non-finite values after paragraph-vector training")
    return model


def infer_vector(
    model: PvModel, tokens: Sequence[str], steps: int = 200, seed: int = 1
) -> InferResult:
    """Embed an unseen document with the trained model frozen.

    Unknown tokens are skipped; a document with no known tokens returns a
    zero vector flagged ``all_oov``. Each step performs one SGD update of
    the fresh document vector at one position, cycling through the
    document.
    """
    cfg = model.config
    ids = [model.word_index[w] for w in tokens if w in model.word_index]
    rng = np.random.default_rng(seed)
    if not ids:
        return InferResult(np.zeros(cfg.d, dtype=np.float64), True)
    bound = 0.5 / cfg.d
    dvec = rng.uniform(-bound, bound, size=cfg.d)
    cdf = np.cumsum(model.unigram_table)
    lr_span = cfg.lr_end - cfg.lr_start
    for step in range(steps):
        t = step % len(ids)
        lr = cfg.lr_start + lr_span * (step / max(1, steps - 1))
        ctx = _context_ids(ids, t, cfg.window)
        vbar = _combine(model.word_vectors, dvec, ctx)
        negs = _draw_negatives(cdf, cfg.negatives, ids[t], rng)
        _, grad_vbar, _ = position_forward_backward(
            vbar, model.output_vectors, ids[t], negs
        )
        dvec -= (lr / (len(ctx) + 1)) * grad_vbar
    return InferResult(dvec, False)
