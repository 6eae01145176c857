"""Topic mixtures by collapsed Gibbs sampling.

Token-topic assignments are resampled one token at a time from the full
conditional with the token's own count removed. Document-topic
proportions are the smoothed count ratios averaged over post-burn-in
samples. Unseen documents are folded in against the frozen topic-word
distribution, so fitting never sees test documents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError


@dataclass
class LdaConfig:
    T: int = 20
    alpha: float | None = None   # defaults to 50/T
    beta: float = 0.01
    iterations: int = 500
    burn_in: int = 200
    sample_every: int = 10
    seed: int = 1

    def __post_init__(self):
        if self.T < 1:
            raise DataError("topic count must be >= 1")
        if self.iterations < 1:
            raise DataError("iterations must be >= 1")
        if self.alpha is None:
            self.alpha = 50.0 / self.T


@dataclass
class LdaModel:
    vocab: tuple[str, ...]
    config: LdaConfig
    topic_word_counts: np.ndarray   # T x |V|, final sweep
    topic_counts: np.ndarray        # length T, final sweep
    phi: np.ndarray                 # T x |V|, averaged post-burn-in estimate
    assignments: list[list[int]] = field(default_factory=list, repr=False)
    word_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.word_index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def T(self) -> int:
        return self.config.T


class ThetaResult(NamedTuple):
    theta: np.ndarray
    all_oov: bool


def _sample_index(weights: list[float], rng: random.Random) -> int:
    r = rng.random() * sum(weights)
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if r < acc:
            return i
    return len(weights) - 1


def fit_lda(
    corpus: Sequence[Sequence[str]], config: LdaConfig | None = None
) -> tuple[LdaModel, np.ndarray]:
    """Fit topics on a tokenized corpus; returns (model, per-doc theta).

    Deterministic for a given (corpus, config) pair. If the iteration
    budget ends before any post-burn-in sample is taken, the final sweep
    state supplies the single estimate.
    """
    if not corpus:
        raise DataError("cannot fit topics on an empty corpus")
    cfg = config or LdaConfig()
    T, alpha, beta = cfg.T, cfg.alpha, cfg.beta
    vocab = tuple(sorted(set(w for doc in corpus for w in doc)))
    if not vocab:
        raise DataError("corpus contains no tokens")
    word_index = {w: i for i, w in enumerate(vocab)}
    docs = [[word_index[w] for w in doc] for doc in corpus]
    V = len(vocab)
    D = len(docs)
    rng = random.Random(cfg.seed)

    n_dt = [[0] * T for _ in range(D)]
    n_tw = [[0] * V for _ in range(T)]
    n_t = [0] * T
    z: list[list[int]] = []
    for d, doc in enumerate(docs):
        zd = []
        for w in doc:
            t = rng.randrange(T)
            zd.append(t)
            n_dt[d][t] += 1
            n_tw[t][w] += 1
            n_t[t] += 1
        z.append(zd)

    beta_sum = beta * V
    theta_acc = np.zeros((D, T), dtype=np.float64)
    phi_acc = np.zeros((T, V), dtype=np.float64)
    samples = 0

    def take_sample():
        nonlocal samples
        for d in range(D):
            denom = len(docs[d]) + T * alpha
            row = n_dt[d]
            for t in range(T):
                theta_acc[d, t] += (row[t] + alpha) / denom
        for t in range(T):
            denom = n_t[t] + beta_sum
            row = n_tw[t]
            for w in range(V):
                phi_acc[t, w] += (row[w] + beta) / denom
        samples += 1

    for sweep in range(1, cfg.iterations + 1):
        for d, doc in enumerate(docs):
            zd = z[d]
            row_d = n_dt[d]
            for i, w in enumerate(doc):
                t_old = zd[i]
                row_d[t_old] -= 1
                n_tw[t_old][w] -= 1
                n_t[t_old] -= 1
                weights = [
                    (row_d[t] + alpha) * (n_tw[t][w] + beta) / (n_t[t] + beta_sum)
                    for t in range(T)
                ]
                t_new = _sample_index(weights, rng)
                zd[i] = t_new
                row_d[t_new] += 1
                n_tw[t_new][w] += 1
                n_t[t_new] += 1
        if sweep > cfg.burn_in and (sweep - cfg.burn_in) % cfg.sample_every == 0:
            take_sample()
    if samples == 0:
        take_sample()

    theta = theta_acc / samples
    phi = phi_acc / samples
    model = LdaModel(
        vocab=vocab,
        config=cfg,
        topic_word_counts=np.array(n_tw, dtype=np.int64),
        topic_counts=np.array(n_t, dtype=np.int64),
        phi=phi,
        assignments=z,
    )
    return model, theta


def infer_theta(
    model: LdaModel, tokens: Sequence[str], iterations: int = 50, seed: int = 1
) -> ThetaResult:
    """Fold one document in against the frozen topic-word estimate.

    Averages the smoothed proportions over the second half of the sweeps.
    A document with no in-vocabulary tokens gets the uniform vector,
    flagged ``all_oov``.
    """
    if iterations < 1:
        raise DataError("iterations must be >= 1")
    cfg = model.config
    T, alpha = cfg.T, cfg.alpha
    ids = [model.word_index[w] for w in tokens if w in model.word_index]
    if not ids:
        return ThetaResult(np.full(T, 1.0 / T, dtype=np.float64), True)
    rng = random.Random(seed)
    phi = model.phi
    n_local = [0] * T
    z = []
    for w in ids:
        t = rng.randrange(T)
        z.append(t)
        n_local[t] += 1

    burn = iterations // 2
    acc = np.zeros(T, dtype=np.float64)
    samples = 0
    denom = len(ids) + T * alpha
    for sweep in range(1, iterations + 1):
        for i, w in enumerate(ids):
            t_old = z[i]
            n_local[t_old] -= 1
            weights = [(n_local[t] + alpha) * phi[t, w] for t in range(T)]
            t_new = _sample_index(weights, rng)
            z[i] = t_new
            n_local[t_new] += 1
        if sweep > burn:
            for t in range(T):
                acc[t] += (n_local[t] + alpha) / denom
            samples += 1
    if samples == 0:
        for t in range(T):
            acc[t] += (n_local[t] + alpha) / denom
        samples = 1
    return ThetaResult(acc / samples, False)
