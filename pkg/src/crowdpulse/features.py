"""Tokenization and the lexical feature families.

Feature bundles over a fitted vocabulary:

* f1: unigram counts
* f2: bigram counts
* f3: unigram + bigram counts
* f4: f3 plus the MISC block: punctuation counts per symbol class,
  part-of-speech tag counts, the prior-polarity triple from a
  pleasantness lexicon, and hashtag / mention / hyperlink counts

Dense document-embedding and topic bundles (f5, f6) are assembled at the
pipeline layer from the embeddings and topics modules.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DataError

# Hashtags stay whole; words keep internal apostrophes; anything else
# non-space comes out as a punctuation-run token.
_TOKEN_RE = re.compile(r"#\w+|\w+(?:'\w+)*|[^\w\s]+")

POS_TAGSET = (
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET",
    "ADP", "NUM", "CONJ", "PRT", "PUNCT", "X",
)

PUNCT_CLASSES = ("exclam", "question", "period", "comma", "colon", "quote", "other")

_PUNCT_CLASS_OF = {
    "!": "exclam",
    "?": "question",
    ".": "period",
    ",": "comma",
    ":": "colon",
    ";": "colon",
    "'": "quote",
    '"': "quote",
}

DAL_POSITIVE_THRESHOLD = 0.8
DAL_NEGATIVE_THRESHOLD = 0.5

BUNDLES = ("f1", "f2", "f3", "f4")

_BUNDLE_BLOCKS = {
    "f1": ("unigram",),
    "f2": ("bigram",),
    "f3": ("unigram", "bigram"),
    "f4": ("unigram", "bigram", "punct", "pos", "dal", "twitter"),
}


def tokenize(text: str) -> list[str]:
    """Split cleaned text into lowercased word, hashtag, and punctuation tokens."""
    return [t.lower() for t in _TOKEN_RE.findall(text)]


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) pairs over a fixed dimension."""

    indices: np.ndarray
    values: np.ndarray
    dimension: int

    @classmethod
    def from_counts(cls, counts: dict[int, float], dimension: int) -> "SparseVector":
        idx = np.array(sorted(counts), dtype=np.int64)
        vals = np.array([float(counts[i]) for i in idx], dtype=np.float64)
        return cls(indices=idx, values=vals, dimension=dimension)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64)
        idx = np.flatnonzero(dense).astype(np.int64)
        return cls(indices=idx, values=dense[idx], dimension=int(dense.size))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=np.float64)
        out[self.indices] = self.values
        return out

    def dot(self, other: "SparseVector") -> float:
        i = j = 0
        total = 0.0
        a_idx, a_val = self.indices, self.values
        b_idx, b_val = other.indices, other.values
        while i < len(a_idx) and j < len(b_idx):
            if a_idx[i] == b_idx[j]:
                total += a_val[i] * b_val[j]
                i += 1
                j += 1
            elif a_idx[i] < b_idx[j]:
                i += 1
            else:
                j += 1
        return float(total)

    def validate(self) -> None:
        if len(self.indices) != len(self.values):
            raise DataError("sparse vector index/value length mismatch")
        if len(self.indices) and (
            np.any(np.diff(self.indices) <= 0)
            or self.indices[0] < 0
            or self.indices[-1] >= self.dimension
        ):
            raise DataError("sparse vector indices must be strictly increasing and in range")
        if len(self.values) and not np.all(np.isfinite(self.values)):
            raise DataError("sparse vector values must be finite")


@dataclass
class PolarityLexicon:
    """Word pleasantness scores on the raw 1-3 scale, plus optional synonyms."""

    scores: dict[str, float] = field(default_factory=dict)
    synonyms: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        for word, s in self.scores.items():
            if not (1.0 <= s <= 3.0):
                raise DataError(
                    f"lexicon score for {word!r} is {s}, outside the raw 1-3 scale"
                )

    @classmethod
    def empty(cls) -> "PolarityLexicon":
        return cls()

    def normalized(self, word: str) -> float | None:
        """Score mapped from [1,3] to [0,1], resolving through synonyms.

        A missing word falls back to its first synonym present in the
        lexicon; returns None when nothing resolves.
        """
        s = self.scores.get(word)
        if s is None:
            for syn in self.synonyms.get(word, ()):
                s = self.scores.get(syn)
                if s is not None:
                    break
        if s is None:
            return None
        return (s - 1.0) / 2.0


def load_lexicon(path: str | Path, synonyms_path: str | Path | None = None) -> PolarityLexicon:
    """Read a TSV word<TAB>score lexicon and optional synonym TSV."""
    scores: dict[str, float] = {}
    path = Path(path)
    if not path.exists():
        raise DataError(f"lexicon file not found: {path}")
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"lexicon line {lineno}: expected word<TAB>score")
        try:
            scores[parts[0].strip().lower()] = float(parts[1])
        except ValueError:
            raise DataError(f"lexicon line {lineno}: invalid score {parts[1]!r}") from None
    synonyms: dict[str, list[str]] = {}
    if synonyms_path is not None:
        spath = Path(synonyms_path)
        if not spath.exists():
            raise DataError(f"synonym file not found: {spath}")
        for lineno, line in enumerate(spath.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"synonym line {lineno}: expected word<TAB>syn1,syn2,...")
            synonyms[parts[0].strip().lower()] = [
                w.strip().lower() for w in parts[1].split(",") if w.strip()
            ]
    return PolarityLexicon(scores=scores, synonyms=synonyms)


# ---------------------------------------------------------------------------
# POS tagging: deterministic closed-class lexicon + suffix rules. A trained
# tagger can be plugged in anywhere a `tagger` callable is accepted.
# ---------------------------------------------------------------------------

_CLOSED_CLASS = {}
for _tag, _words in {
    "DET": "the a an this that these those each every some any no another",
    "PRON": (
        "i you he she it we they me him her us them my your his its our their "
        "mine yours hers ours theirs who whom whose which what himself herself "
        "myself yourself itself ourselves themselves someone everyone anyone nobody"
    ),
    "ADP": (
        "in on at of for with from by about against between into through during "
        "before after above below under over near behind beyond across along"
    ),
    "CONJ": "and or but nor so yet because although though while if unless since whereas",
    "PRT": "to not",
    "VERB": (
        "is am are was were be been being have has had do does did will would "
        "can could shall should may might must say said says go goes went gone "
        "don't doesn't didn't won't can't couldn't isn't aren't wasn't weren't"
    ),
    "ADV": (
        "very too now then here there never always often again just still also "
        "maybe really quite rather soon already"
    ),
    "NUM": "zero one two three four five six seven eight nine ten hundred thousand million",
}.items():
    for _w in _words.split():
        _CLOSED_CLASS[_w] = _tag

_SUFFIX_RULES = (
    ("ing", "VERB", 5),
    ("ize", "VERB", 5),
    ("ise", "VERB", 5),
    ("ify", "VERB", 5),
    ("ed", "VERB", 4),
    ("ly", "ADV", 4),
    ("ous", "ADJ", 5),
    ("ful", "ADJ", 5),
    ("ive", "ADJ", 5),
    ("able", "ADJ", 6),
    ("ible", "ADJ", 6),
    ("ic", "ADJ", 5),
    ("tion", "NOUN", 6),
    ("sion", "NOUN", 6),
    ("ment", "NOUN", 6),
    ("ness", "NOUN", 6),
    ("ity", "NOUN", 5),
    ("ship", "NOUN", 6),
    ("hood", "NOUN", 6),
    ("ism", "NOUN", 5),
)

_NUMBER_RE = re.compile(r"^\d+([.,]\d+)*$")
_WORD_CHAR_RE = re.compile(r"\w")


def _tag_token(token: str) -> str:
    if not _WORD_CHAR_RE.search(token):
        return "PUNCT"
    if token.startswith("#"):
        return "X"
    if _NUMBER_RE.match(token):
        return "NUM"
    tag = _CLOSED_CLASS.get(token)
    if tag is not None:
        return tag
    for suffix, t, min_len in _SUFFIX_RULES:
        if len(token) >= min_len and token.endswith(suffix):
            return t
    return "NOUN"


def tag_pos(tokens: Sequence[str], tagger: Callable[[Sequence[str]], list[str]] | None = None) -> list[str]:
    """Tag each token with one of the 12 universal POS tags."""
    if tagger is not None:
        tags = tagger(tokens)
        if len(tags) != len(tokens):
            raise DataError("POS tagger returned wrong number of tags")
        return list(tags)
    return [_tag_token(t) for t in tokens]


def dal_features(
    tokens: Sequence[str], lexicon: PolarityLexicon | None
) -> tuple[int, int, float]:
    """Prior-polarity triple: (positive count, negative count, score sum).

    Normalized scores above 0.8 count as positive words, below 0.5 as
    negative; the sum covers every word the lexicon resolves.
    """
    if lexicon is None:
        return 0, 0, 0.0
    pos = neg = 0
    total = 0.0
    for tok in tokens:
        score = lexicon.normalized(tok)
        if score is None:
            continue
        total += score
        if score > DAL_POSITIVE_THRESHOLD:
            pos += 1
        elif score < DAL_NEGATIVE_THRESHOLD:
            neg += 1
    return pos, neg, total


@dataclass
class Vocabulary:
    """Frozen n-gram universe plus the fixed-feature block registry."""

    unigrams: tuple[str, ...]
    bigrams: tuple[str, ...]
    min_count: int = 1
    pos_tagset: tuple[str, ...] = POS_TAGSET
    punct_classes: tuple[str, ...] = PUNCT_CLASSES
    unigram_index: dict[str, int] = field(init=False, repr=False)
    bigram_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.unigram_index = {t: i for i, t in enumerate(self.unigrams)}
        self.bigram_index = {t: i for i, t in enumerate(self.bigrams)}

    def block_sizes(self) -> dict[str, int]:
        return {
            "unigram": len(self.unigrams),
            "bigram": len(self.bigrams),
            "punct": len(self.punct_classes),
            "pos": len(self.pos_tagset),
            "dal": 3,
            "twitter": 3,
        }

    def blocks_for(self, bundle: str) -> list[tuple[str, int, int]]:
        """(name, offset, size) for each block of a bundle, in order."""
        if bundle not in _BUNDLE_BLOCKS:
            raise DataError(f"unknown feature bundle: {bundle!r}")
        sizes = self.block_sizes()
        out = []
        offset = 0
        for name in _BUNDLE_BLOCKS[bundle]:
            out.append((name, offset, sizes[name]))
            offset += sizes[name]
        return out

    def dimension(self, bundle: str) -> int:
        return sum(size for _, _, size in self.blocks_for(bundle))

    def registry_dump(self) -> dict:
        """JSON-ready description of blocks, offsets, and dimensions."""
        return {
            "version": 1,
            "min_count": self.min_count,
            "unigrams": list(self.unigrams),
            "bigrams": list(self.bigrams),
            "pos_tagset": list(self.pos_tagset),
            "punct_classes": list(self.punct_classes),
            "bundles": {
                b: {
                    "dimension": self.dimension(b),
                    "blocks": [
                        {"name": n, "offset": o, "size": s}
                        for n, o, s in self.blocks_for(b)
                    ],
                }
                for b in BUNDLES
            },
        }

    def registry_hash(self) -> str:
        payload = json.dumps(self.registry_dump(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


def iter_bigrams(tokens: Sequence[str]) -> Iterable[str]:
    for a, b in zip(tokens, tokens[1:]):
        yield f"{a}_{b}"


def fit_vocabulary(corpus: Sequence[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Collect unigrams and bigrams with frequency >= min_count.

    Index order is lexicographic within each block, so the fitted registry
    is independent of document order.
    """
    if not corpus:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    uni: Counter = Counter()
    bi: Counter = Counter()
    for tokens in corpus:
        uni.update(tokens)
        bi.update(iter_bigrams(tokens))
    unigrams = tuple(sorted(t for t, c in uni.items() if c >= min_count))
    bigrams = tuple(sorted(t for t, c in bi.items() if c >= min_count))
    return Vocabulary(unigrams=unigrams, bigrams=bigrams, min_count=min_count)


def _punct_counts(tokens: Sequence[str], classes: Sequence[str]) -> list[int]:
    counts = dict.fromkeys(classes, 0)
    for tok in tokens:
        if _WORD_CHAR_RE.search(tok):
            continue
        for ch in tok:
            cls = _PUNCT_CLASS_OF.get(ch, "other")
            counts[cls] += 1
    return [counts[c] for c in classes]


def assemble_vector(
    tokens: Sequence[str],
    vocab: Vocabulary,
    bundle: str,
    lexicon: PolarityLexicon | None = None,
    tagger: Callable[[Sequence[str]], list[str]] | None = None,
) -> SparseVector:
    """Build the feature vector for one token sequence under a bundle.

    Out-of-vocabulary n-grams are ignored. The dimension depends only on
    (vocab, bundle), never on the tweet.
    """
    dim = vocab.dimension(bundle)
    if dim == 0:
        raise DataError(
            f"bundle {bundle!r} has dimension 0 under this vocabulary "
            "(min_count removed every term)"
        )
    counts: dict[int, float] = {}
    for name, offset, size in vocab.blocks_for(bundle):
        if name == "unigram":
            for tok in tokens:
                idx = vocab.unigram_index.get(tok)
                if idx is not None:
                    counts[offset + idx] = counts.get(offset + idx, 0.0) + 1.0
        elif name == "bigram":
            for term in iter_bigrams(tokens):
                idx = vocab.bigram_index.get(term)
                if idx is not None:
                    counts[offset + idx] = counts.get(offset + idx, 0.0) + 1.0
        elif name == "punct":
            for i, c in enumerate(_punct_counts(tokens, vocab.punct_classes)):
                if c:
                    counts[offset + i] = float(c)
        elif name == "pos":
            tag_index = {t: i for i, t in enumerate(vocab.pos_tagset)}
            for tag in tag_pos(tokens, tagger):
                i = tag_index[tag]
                counts[offset + i] = counts.get(offset + i, 0.0) + 1.0
        elif name == "dal":
            pos_n, neg_n, total = dal_features(tokens, lexicon)
            for i, v in enumerate((float(pos_n), float(neg_n), total)):
                if v:
                    counts[offset + i] = v
        elif name == "twitter":
            hashtags = sum(1 for t in tokens if t.startswith("#"))
            mentions = sum(1 for t in tokens if t == "user")
            links = sum(1 for t in tokens if t == "url")
            for i, v in enumerate((hashtags, mentions, links)):
                if v:
                    counts[offset + i] = float(v)
    return SparseVector.from_counts(counts, dim)
