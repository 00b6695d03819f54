"""Deterministic seed derivation.

All randomness in the package flows from one top-level seed. Component
streams (program draws, per-trial noise, sweep points) get their own
seeds by hashing the top-level seed together with a role tag, so runs
are reproducible and streams never alias each other.
"""

from __future__ import annotations

import hashlib


def derive_seed(base_seed: int, *tags) -> int:
    """Derive a 64-bit child seed from a base seed and role tags.

    The derivation is sha256 over "mlclogic:<base>:<tag>:<tag>...",
    truncated to 64 bits. Tags may be strings or integers.
    """
    text = "mlclogic:" + str(int(base_seed))
    for tag in tags:
        text += ":" + str(tag)
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")
