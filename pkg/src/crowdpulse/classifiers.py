"""Single-label classifiers over (target, sentiment) joint categories.

Three families, all trained from scratch:

* multinomial Naive Bayes with Laplace smoothing,
* linear SVMs fit by sequential minimal optimization (SMO), wrapped
  one-vs-rest for the multiclass joint space,
* an Elman recurrent network over the raw token sequence, trained by
  truncated backpropagation through time.

Category labels are opaque hashable objects; the joint
(target, sentiment) pair is the primary instantiation but the label
powerset ensemble reuses these trainers over projected label subsets.
Ties everywhere break toward the lowest category index in the model's
category ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import EventRegistry, Sentiment
from .errors import DataError
from .features import SparseVector


@dataclass(frozen=True)
class JointCategory:
    target: str
    sentiment: Sentiment

    def __str__(self) -> str:
        return f"{self.target}/{self.sentiment.short}"


def category_order(registry: EventRegistry) -> tuple[JointCategory, ...]:
    """Canonical ordering: registry order, positive before negative."""
    return tuple(
        JointCategory(p, s)
        for p in registry.participants
        for s in (Sentiment.POSITIVE, Sentiment.NEGATIVE)
    )


def stack_vectors(vectors: Sequence[SparseVector]) -> sp.csr_matrix:
    """Stack sparse feature vectors into one CSR matrix."""
    if not vectors:
        raise DataError("cannot stack an empty vector list")
    dim = vectors[0].dimension
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    for v in vectors:
        if v.dimension != dim:
            raise DataError("feature vectors have mismatched dimensions")
        indices.extend(int(i) for i in v.indices)
        values.extend(float(x) for x in v.values)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(values), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(vectors), dim),
    )


def _resolve_categories(
    labels: Sequence[Hashable], categories: Sequence[Hashable] | None
) -> tuple:
    if categories is None:
        seen: dict = {}
        for c in labels:
            if c not in seen:
                seen[c] = len(seen)
        return tuple(seen)
    categories = tuple(categories)
    missing = set(labels) - set(categories)
    if missing:
        raise DataError(f"labels outside the declared categories: {sorted(map(str, missing))}")
    return categories


# ---------------------------------------------------------------------------
# Naive Bayes
# ---------------------------------------------------------------------------


@dataclass
class NaiveBayesModel:
    categories: tuple
    log_priors: np.ndarray        # len C
    log_likelihoods: np.ndarray   # C x dim
    smoothing: float
    dimension: int

    def scores(self, x: SparseVector) -> np.ndarray:
        """Unnormalized log-joint per category."""
        if x.dimension != self.dimension:
            raise DataError(
                f"feature dimension {x.dimension} does not match model "
                f"dimension {self.dimension}"
            )
        out = self.log_priors.copy()
        for c in range(len(self.categories)):
            out[c] += float(self.log_likelihoods[c, x.indices] @ x.values)
        return out

    def log_posteriors(self, x: SparseVector) -> np.ndarray:
        s = self.scores(x)
        m = s.max()
        return s - (m + np.log(np.exp(s - m).sum()))


def train_naive_bayes(
    data: Sequence[tuple[SparseVector, Hashable]],
    smoothing: float = 1.0,
    categories: Sequence[Hashable] | None = None,
) -> NaiveBayesModel:
    """Fit a multinomial model: priors from category frequency, smoothed
    count-ratio likelihoods over the feature universe."""
    if not data:
        raise DataError("cannot train Naive Bayes on empty data")
    if smoothing <= 0:
        raise DataError("smoothing must be > 0")
    cats = _resolve_categories([c for _, c in data], categories)
    # a zero-frequency prior puts exactly zero posterior mass on a
    # category, so declared-but-unseen categories are dropped rather than
    # carried around as -inf scores
    present = {c for _, c in data}
    cats = tuple(c for c in cats if c in present)
    cat_index = {c: i for i, c in enumerate(cats)}
    dim = data[0][0].dimension
    counts = np.zeros((len(cats), dim), dtype=np.float64)
    doc_counts = np.zeros(len(cats), dtype=np.float64)
    for x, c in data:
        if x.dimension != dim:
            raise DataError("feature vectors have mismatched dimensions")
        if len(x.values) and x.values.min() < 0:
            raise DataError("multinomial Naive Bayes requires non-negative features")
        ci = cat_index[c]
        doc_counts[ci] += 1
        counts[ci, x.indices] += x.values
    log_priors = np.log(doc_counts / len(data))
    totals = counts.sum(axis=1, keepdims=True)
    log_likelihoods = np.log(counts + smoothing) - np.log(totals + smoothing * dim)
    return NaiveBayesModel(
        categories=cats,
        log_priors=log_priors,
        log_likelihoods=log_likelihoods,
        smoothing=smoothing,
        dimension=dim,
    )


# ---------------------------------------------------------------------------
# SVM via SMO
# ---------------------------------------------------------------------------


@dataclass
class SvmBinaryModel:
    alphas: np.ndarray
    bias: float
    support_indices: np.ndarray
    weights: np.ndarray           # linear kernel collapses to one vector
    C: float
    kernel: str = "linear"

    def decision(self, x: SparseVector) -> float:
        if x.dimension != len(self.weights):
            raise DataError(
                f"feature dimension {x.dimension} does not match model "
                f"dimension {len(self.weights)}"
            )
        return float(self.weights[x.indices] @ x.values + self.bias)


def _smo_core(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float,
    max_passes: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Pairwise coordinate ascent on the dual QP.

    Follows the classic two-loop structure: sweeps alternate between all
    examples and the non-bound subset; the second index comes from the
    max-|E1-E2| heuristic with randomized fallback scans. Terminates when
    a full sweep finds no violation it can improve, or after
    ``max_passes`` consecutive sweeps without progress.
    """
    n = len(y)
    alphas = np.zeros(n, dtype=np.float64)
    b = 0.0
    # u[i] = sum_j alpha_j y_j K_ij, maintained incrementally
    u = np.zeros(n, dtype=np.float64)
    eps = 1e-12

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, u
        if i1 == i2:
            return False
        a1, a2 = alphas[i1], alphas[i2]
        y1, y2 = y[i1], y[i2]
        E1 = u[i1] + b - y1
        E2 = u[i2] + b - y2
        s = y1 * y2
        if s > 0:
            L, H = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        else:
            L, H = max(0.0, a2 - a1), min(C, C + a2 - a1)
        if H - L < eps:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (E1 - E2) / eta
            a2_new = min(max(a2_new, L), H)
        else:
            # flat direction: evaluate the objective at both clip ends
            f1 = y1 * (E1 - b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (E2 - b) - s * a1 * k12 - a2 * k22
            L1 = a1 + s * (a2 - L)
            H1 = a1 + s * (a2 - H)
            psi_l = (
                L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22
                + s * L * L1 * k12
            )
            psi_h = (
                H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22
                + s * H * H1 * k12
            )
            if psi_l < psi_h - eps:
                a2_new = L
            elif psi_l > psi_h + eps:
                a2_new = H
            else:
                return False
        if abs(a2_new - a2) < eps * (a2_new + a2 + eps):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        b1 = b - E1 - y1 * (a1_new - a1) * k11 - y2 * (a2_new - a2) * k12
        b2 = b - E2 - y1 * (a1_new - a1) * k12 - y2 * (a2_new - a2) * k22
        if 0.0 < a1_new < C:
            b_new = b1
        elif 0.0 < a2_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        u += y1 * (a1_new - a1) * K[:, i1] + y2 * (a2_new - a2) * K[:, i2]
        alphas[i1], alphas[i2] = a1_new, a2_new
        b = b_new
        return True

    def examine(i2: int) -> bool:
        y2, a2 = y[i2], alphas[i2]
        E2 = u[i2] + b - y2
        r2 = E2 * y2
        if not ((r2 < -tol and a2 < C) or (r2 > tol and a2 > 0)):
            return False
        non_bound = np.flatnonzero((alphas > 0) & (alphas < C))
        if len(non_bound) > 1:
            E = u + b - y
            i1 = int(non_bound[np.argmax(np.abs(E2 - E[non_bound]))])
            if take_step(i1, i2):
                return True
        if len(non_bound):
            start = int(rng.integers(len(non_bound)))
            for offset in range(len(non_bound)):
                i1 = int(non_bound[(start + offset) % len(non_bound)])
                if take_step(i1, i2):
                    return True
        start = int(rng.integers(n))
        for offset in range(n):
            i1 = (start + offset) % n
            if take_step(i1, i2):
                return True
        return False

    examine_all = True
    stalled = 0
    while True:
        changed = 0
        if examine_all:
            for i in range(n):
                changed += examine(i)
        else:
            for i in np.flatnonzero((alphas > 0) & (alphas < C)):
                changed += examine(int(i))
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
        stalled = stalled + 1 if changed == 0 else 0
        if stalled >= max_passes:
            break
    return alphas, b


def kkt_violation(
    K: np.ndarray, y: np.ndarray, alphas: np.ndarray, b: float, C: float
) -> float:
    """Largest KKT violation of a dual solution (0 means exact)."""
    margins = y * (K @ (alphas * y) + b)
    viol = np.zeros_like(margins)
    at_zero = alphas <= 1e-12
    at_c = alphas >= C - 1e-12
    interior = ~(at_zero | at_c)
    viol[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    viol[interior] = np.abs(margins[interior] - 1.0)
    viol[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
    return float(viol.max()) if len(viol) else 0.0


def smo_solve(
    data: Sequence[tuple[SparseVector, int]],
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    seed: int = 1,
    gram: np.ndarray | None = None,
) -> SvmBinaryModel:
    """Train one soft-margin linear SVM on +/-1 labeled vectors."""
    if C <= 0:
        raise DataError("C must be > 0")
    y = np.array([float(lab) for _, lab in data], dtype=np.float64)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise DataError("SMO labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise DataError("SMO needs at least one example of each sign")
    X = stack_vectors([x for x, _ in data])
    if gram is None:
        gram = np.asarray((X @ X.T).todense(), dtype=np.float64)
    rng = np.random.default_rng(seed)
    alphas, b = _smo_core(gram, y, C, tol, max_passes, rng)
    weights = np.asarray(X.T @ (alphas * y)).ravel()
    support = np.flatnonzero(alphas > 1e-12)
    return SvmBinaryModel(
        alphas=alphas,
        bias=b,
        support_indices=support,
        weights=weights,
        C=C,
    )


@dataclass
class SvmOvrModel:
    categories: tuple
    models: list[SvmBinaryModel]
    dimension: int

    def scores(self, x: SparseVector) -> np.ndarray:
        if x.dimension != self.dimension:
            raise DataError(
                f"feature dimension {x.dimension} does not match model "
                f"dimension {self.dimension}"
            )
        return np.array([m.decision(x) for m in self.models])


def train_svm_ovr(
    data: Sequence[tuple[SparseVector, Hashable]],
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    seed: int = 1,
    categories: Sequence[Hashable] | None = None,
    gram: np.ndarray | None = None,
) -> SvmOvrModel:
    """One binary SMO problem per category, that category against the rest."""
    if not data:
        raise DataError("cannot train an SVM on empty data")
    cats = _resolve_categories([c for _, c in data], categories)
    present = {c for _, c in data}
    if len(present) < 2:
        raise DataError("one-vs-rest needs at least 2 categories present")
    X = stack_vectors([x for x, _ in data])
    if gram is None:
        gram = np.asarray((X @ X.T).todense(), dtype=np.float64)
    models = []
    for k, cat in enumerate(cats):
        y = np.array([1.0 if c == cat else -1.0 for _, c in data])
        if len(np.unique(y)) < 2:
            # category absent from (or covering all of) the training data:
            # pin its decision value to the worst margin
            dim = data[0][0].dimension
            models.append(
                SvmBinaryModel(
                    alphas=np.zeros(len(data)),
                    bias=-1.0 if 1.0 not in y else 1.0,
                    support_indices=np.array([], dtype=np.int64),
                    weights=np.zeros(dim),
                    C=C,
                )
            )
            continue
        rng = np.random.default_rng((seed, k))
        alphas, b = _smo_core(gram, y, C, tol, max_passes, rng)
        weights = np.asarray(X.T @ (alphas * y)).ravel()
        models.append(
            SvmBinaryModel(
                alphas=alphas,
                bias=b,
                support_indices=np.flatnonzero(alphas > 1e-12),
                weights=weights,
                C=C,
            )
        )
    return SvmOvrModel(categories=cats, models=models, dimension=data[0][0].dimension)


# ---------------------------------------------------------------------------
# Elman recurrent network
# ---------------------------------------------------------------------------


@dataclass
class ElmanConfig:
    e: int = 50            # embedding width
    h: int = 32            # hidden width
    epochs: int = 30
    lr: float = 0.05
    bptt_limit: int = 16
    seed: int = 1


@dataclass
class ElmanModel:
    vocab: tuple[str, ...]
    categories: tuple
    embeddings: np.ndarray   # |V| x e
    w_xh: np.ndarray         # e x h
    w_hh: np.ndarray         # h x h
    b_h: np.ndarray          # h
    w_hy: np.ndarray         # h x |C|
    b_y: np.ndarray          # |C|
    config: ElmanConfig
    epoch_losses: list[float] = field(default_factory=list)
    empty_skipped: int = 0
    word_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.word_index = {w: i for i, w in enumerate(self.vocab)}

    def token_ids(self, tokens: Sequence[str]) -> list[int]:
        return [self.word_index[t] for t in tokens if t in self.word_index]

    def forward(self, ids: Sequence[int]) -> tuple[np.ndarray, list[np.ndarray]]:
        """Returns (softmax probabilities, hidden states h_1..h_T)."""
        h = np.zeros(self.config.h, dtype=np.float64)
        states = []
        for w in ids:
            h = np.tanh(self.embeddings[w] @ self.w_xh + h @ self.w_hh + self.b_h)
            states.append(h)
        logits = h @ self.w_hy + self.b_y
        logits = logits - logits.max()
        exp = np.exp(logits)
        return exp / exp.sum(), states


def elman_loss_and_grads(
    model: ElmanModel, ids: Sequence[int], target: int
) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy loss and analytic gradients for one sequence.

    Backpropagation through time runs at most ``bptt_limit`` steps back
    from the end of the sequence.
    """
    probs, states = model.forward(ids)
    loss = -float(np.log(probs[target] + 1e-300))
    grads = {
        "embeddings": np.zeros_like(model.embeddings),
        "w_xh": np.zeros_like(model.w_xh),
        "w_hh": np.zeros_like(model.w_hh),
        "b_h": np.zeros_like(model.b_h),
        "w_hy": np.zeros_like(model.w_hy),
        "b_y": np.zeros_like(model.b_y),
    }
    dlogits = probs.copy()
    dlogits[target] -= 1.0
    h_last = states[-1] if states else np.zeros(model.config.h)
    grads["w_hy"] = np.outer(h_last, dlogits)
    grads["b_y"] = dlogits
    if not states:
        return loss, grads
    dh = model.w_hy @ dlogits
    T = len(ids)
    for t in range(T - 1, max(-1, T - 1 - model.config.bptt_limit), -1):
        h_t = states[t]
        dpre = dh * (1.0 - h_t * h_t)
        h_prev = states[t - 1] if t > 0 else np.zeros(model.config.h)
        grads["w_xh"] += np.outer(model.embeddings[ids[t]], dpre)
        grads["w_hh"] += np.outer(h_prev, dpre)
        grads["b_h"] += dpre
        grads["embeddings"][ids[t]] += model.w_xh @ dpre
        dh = model.w_hh @ dpre
    return loss, grads


def train_elman(
    data: Sequence[tuple[Sequence[str], Hashable]],
    config: ElmanConfig | None = None,
    categories: Sequence[Hashable] | None = None,
) -> ElmanModel:
    """Fit the recurrent classifier by per-example SGD.

    Examples with empty token sequences are skipped and counted on the
    returned model. Example order is shuffled each epoch from the seed.
    """
    if not data:
        raise DataError("cannot train on empty data")
    cfg = config or ElmanConfig()
    usable = [(list(tokens), c) for tokens, c in data if len(tokens)]
    skipped = len(data) - len(usable)
    if not usable:
        raise DataError("every training sequence is empty")
    cats = _resolve_categories([c for _, c in usable], categories)
    cat_index = {c: i for i, c in enumerate(cats)}
    vocab = tuple(sorted(set(w for tokens, _ in usable for w in tokens)))
    rng = np.random.default_rng(cfg.seed)
    model = ElmanModel(
        vocab=vocab,
        categories=cats,
        embeddings=rng.uniform(-0.1, 0.1, size=(len(vocab), cfg.e)),
        w_xh=rng.uniform(-1.0, 1.0, size=(cfg.e, cfg.h)) / np.sqrt(cfg.e),
        w_hh=rng.uniform(-1.0, 1.0, size=(cfg.h, cfg.h)) / np.sqrt(cfg.h),
        b_h=np.zeros(cfg.h),
        w_hy=rng.uniform(-1.0, 1.0, size=(cfg.h, len(cats))) / np.sqrt(cfg.h),
        b_y=np.zeros(len(cats)),
        config=cfg,
        empty_skipped=skipped,
    )
    examples = [(model.token_ids(tokens), cat_index[c]) for tokens, c in usable]
    order = np.arange(len(examples))
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        total = 0.0
        for i in order:
            ids, target = examples[i]
            loss, grads = elman_loss_and_grads(model, ids, target)
            total += loss
            model.embeddings -= cfg.lr * grads["embeddings"]
            model.w_xh -= cfg.lr * grads["w_xh"]
            model.w_hh -= cfg.lr * grads["w_hh"]
            model.b_h -= cfg.lr * grads["b_h"]
            model.w_hy -= cfg.lr * grads["w_hy"]
            model.b_y -= cfg.lr * grads["b_y"]
        model.epoch_losses.append(total / len(examples))
    return model


# ---------------------------------------------------------------------------
# Shared prediction entry point
# ---------------------------------------------------------------------------


def predict(model, x) -> tuple[Hashable, dict]:
    """Classify one input; returns (best category, score per category).

    Naive Bayes and SVM models take a :class:`SparseVector`; the Elman
    model takes a token sequence. Scores are normalized log-posteriors,
    decision values, and softmax probabilities respectively.
    """
    if isinstance(model, NaiveBayesModel):
        if not isinstance(x, SparseVector):
            raise DataError("Naive Bayes expects a SparseVector input")
        scores = model.log_posteriors(x)
    elif isinstance(model, SvmOvrModel):
        if not isinstance(x, SparseVector):
            raise DataError("SVM expects a SparseVector input")
        scores = model.scores(x)
    elif isinstance(model, ElmanModel):
        if isinstance(x, SparseVector):
            raise DataError("Elman model expects a token sequence input")
        probs, _ = model.forward(model.token_ids(x))
        scores = probs
    else:
        raise DataError(f"unknown model type: {type(model).__name__}")
    if not np.all(np.isfinite(scores)):
        raise DataError("non-finite classifier scores")
    best = int(np.argmax(scores))
    return model.categories[best], {
        c: float(s) for c, s in zip(model.categories, scores)
    }
