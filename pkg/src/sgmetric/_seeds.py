import hashlib
import random


def derive_seed(seed, *parts) -> int:
    """Stable 64-bit sub-seed; independent of ``PYTHONHASHSEED`` and of worker scheduling."""
    text = "/".join(str(p) for p in (seed, *parts))
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def rng_for(seed, *parts) -> random.Random:
    return random.Random(derive_seed(seed, *parts))
