"""Trained-model persistence: one file carrying everything prediction needs.

Layout: 4-byte magic, 2-byte big-endian format version, 32-byte SHA-256
of the payload, 8-byte big-endian payload length, pickled payload. Load
verifies each field in that order and then cross-checks that the stored
feature-space hash still matches the components in the file, so a bundle
stitched together from mismatched parts is rejected.
"""

from __future__ import annotations

import hashlib
import json
import pickle
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import DataError
from .features import PolarityLexicon, Vocabulary

MAGIC = b"CWPB"
FORMAT_VERSION = 1
_HEADER_LEN = len(MAGIC) + 2 + 32 + 8


@dataclass
class ModelBundle:
    feature_bundle: str                  # f1..f6
    classifier_kind: str                 # nb | svm | elman | rakel
    classifier: Any
    seed: int
    vocabulary: Vocabulary | None = None
    lexicon: PolarityLexicon | None = None
    pv_model: Any = None                 # embeddings.PvModel
    lda_model: Any = None                # topics.LdaModel
    label_space: Any = None              # multilabel.LabelSpace, rakel only
    nb_shift: Any = None                 # per-dimension offset for dense NB
    registry_participants: tuple[str, ...] = ()
    config: dict = field(default_factory=dict)
    feature_space_hash: str = ""


def _array_digest(h: "hashlib._Hash", arr) -> None:
    h.update(str(arr.shape).encode())
    h.update(arr.tobytes())


def feature_space_hash(bundle: ModelBundle) -> str:
    """Digest of every component that defines the feature space."""
    h = hashlib.sha256()
    h.update(bundle.feature_bundle.encode())
    if bundle.vocabulary is not None:
        h.update(bundle.vocabulary.registry_hash().encode())
    if bundle.lexicon is not None:
        payload = json.dumps(
            {
                "scores": bundle.lexicon.scores,
                "synonyms": {k: list(v) for k, v in bundle.lexicon.synonyms.items()},
            },
            sort_keys=True,
        )
        h.update(payload.encode())
    if bundle.pv_model is not None:
        h.update(json.dumps(list(bundle.pv_model.vocab)).encode())
        _array_digest(h, bundle.pv_model.word_vectors)
        _array_digest(h, bundle.pv_model.output_vectors)
    if bundle.lda_model is not None:
        h.update(json.dumps(list(bundle.lda_model.vocab)).encode())
        _array_digest(h, bundle.lda_model.phi)
    return h.hexdigest()


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    bundle.feature_space_hash = feature_space_hash(bundle)
    payload = pickle.dumps(bundle, protocol=pickle.HIGHEST_PROTOCOL)
    digest = hashlib.sha256(payload).digest()
    header = (
        MAGIC
        + FORMAT_VERSION.to_bytes(2, "big")
        + digest
        + len(payload).to_bytes(8, "big")
    )
    Path(path).write_bytes(header + payload)


def load_bundle(path: str | Path) -> ModelBundle:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read bundle {path}: {exc}") from exc
    if len(blob) < _HEADER_LEN:
        raise DataError(f"bundle {path} is truncated before the header ends")
    if blob[:4] != MAGIC:
        raise DataError(f"bundle {path} has wrong magic bytes")
    version = int.from_bytes(blob[4:6], "big")
    if version != FORMAT_VERSION:
        raise DataError(
            f"bundle {path} has format version {version}, expected {FORMAT_VERSION}"
        )
    digest = blob[6:38]
    length = int.from_bytes(blob[38:46], "big")
    payload = blob[_HEADER_LEN:]
    if len(payload) != length:
        raise DataError(
            f"bundle {path} payload length {len(payload)} does not match "
            f"header claim {length}"
        )
    if hashlib.sha256(payload).digest() != digest:
        raise DataError(f"bundle {path} failed its checksum")
    try:
        bundle = pickle.loads(payload)
    except Exception as exc:
        raise DataError(f"bundle {path} payload does not unpickle: {exc}") from exc
    if not isinstance(bundle, ModelBundle):
        raise DataError(f"bundle {path} does not contain a model bundle")
    if feature_space_hash(bundle) != bundle.feature_space_hash:
        raise DataError(
            f"bundle {path} feature-space hash mismatch: components were "
            "altered after training"
        )
    return bundle
