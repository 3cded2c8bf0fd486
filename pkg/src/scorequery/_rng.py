import hashlib
import random


def derive_rng(seed: int, *parts) -> random.Random:
    """Independent, reproducible stream keyed by ``seed`` and ``parts``.

    Hash-derived rather than ``hash()``-derived so streams survive
    PYTHONHASHSEED changes and process boundaries.
    """
    key = "\x1f".join([str(int(seed))] + [str(p) for p in parts]).encode()
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:16], "big"))
