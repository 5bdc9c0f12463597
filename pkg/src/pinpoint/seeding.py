"""Deterministic seed derivation.

Builtin hash() is salted per process, so every derived seed goes through
sha256 over a joined string of the coordinates instead.
"""

from __future__ import annotations

import hashlib


def stable_int(*parts) -> int:
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return int(digest, 16)


def derive_seed(*parts) -> int:
    return stable_int(*parts) % (2**63)
