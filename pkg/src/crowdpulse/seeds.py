"""Deterministic seed derivation.

All randomness in a pipeline run flows from one master seed. Each module
(and each per-document inference call) gets its own stream derived by
hashing the master seed together with a fixed label, so adding or removing
one stage never shifts the randomness of another.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, label: str) -> int:
    """Derive a 63-bit child seed from ``master`` and a stream label."""
    digest = hashlib.blake2b(
        f"{master}:{label}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") & 0x7FFFFFFFFFFFFFFF
