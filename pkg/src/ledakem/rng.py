"""Seed-expanded randomness, fixed-weight sampling and the hash-based KDF.

The DRBG is SHAKE256 absorbing ``customization || seed`` and squeezed as one
continuous little-endian bit stream: bit j of the stream is bit (j mod 8) of
output byte j // 8.
"""

from __future__ import annotations

import hashlib

from .errors import ParameterError
from .ring import SparseRingElement

SEED_LENGTHS = (24, 32, 40)
_KDF = {32: hashlib.sha3_256, 48: hashlib.sha3_384, 64: hashlib.sha3_512}


class Drbg:
    """Deterministic bit stream expanded from a seed.

    Not thread-safe: an instance has a single reader.
    """

    def __init__(self, seed: bytes, customization: bytes = b"", *, check_length=True):
        seed = bytes(seed)
        if check_length and len(seed) not in SEED_LENGTHS:
            raise ParameterError(f"seed must be one of {SEED_LENGTHS} bytes, got {len(seed)}")
        self._xof = hashlib.shake_256(customization + seed)
        self._buf = b""
        self._bitpos = 0

    def _ensure(self, nbytes: int) -> None:
        if nbytes > len(self._buf):
            # hashlib squeezes from scratch, so grow geometrically to stay linear overall
            self._buf = self._xof.digest(max(nbytes, 2 * len(self._buf), 256))

    def bits(self, k: int) -> int:
        """Next k bits of the stream as an integer, first bit least significant."""
        if k <= 0:
            return 0
        start, end = self._bitpos, self._bitpos + k
        self._ensure((end + 7) // 8)
        chunk = int.from_bytes(self._buf[start // 8:(end + 7) // 8], "little")
        self._bitpos = end
        return (chunk >> (start % 8)) & ((1 << k) - 1)

    def bytes(self, n: int) -> bytes:
        return self.bits(8 * n).to_bytes(n, "little")

    @property
    def position(self) -> int:
        """Number of bits consumed so far."""
        return self._bitpos


def _uniform_below(drbg: Drbg, bound: int, width: int) -> int:
    while True:
        x = drbg.bits(width)
        if x < bound:
            return x


def sample_positions(drbg: Drbg, bound: int, w: int) -> list[int]:
    """w distinct integers in [0, bound), in draw order.

    Each candidate is a ceil(log2 bound)-bit integer; out-of-range values and
    repeats are rejected, so the result is uniform over weight-w patterns.
    """
    if not 0 <= w <= bound:
        raise ParameterError(f"cannot draw {w} distinct positions below {bound}")
    width = max(1, (bound - 1).bit_length())
    seen: set[int] = set()
    out = []
    while len(out) < w:
        x = _uniform_below(drbg, bound, width)
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def sample_sparse(drbg: Drbg, p: int, w: int) -> SparseRingElement:
    if w >= p:
        raise ParameterError(f"weight {w} must be below p={p}")
    return SparseRingElement(p, tuple(sorted(sample_positions(drbg, p, w))))


def sample_error(drbg: Drbg, n: int, t: int) -> tuple[int, ...]:
    """Sorted support of a uniformly random length-n vector of weight t."""
    return tuple(sorted(sample_positions(drbg, n, t)))


def kdf(data: bytes, out_len: int) -> bytes:
    """SHA3 digest with 256/384/512-bit output selected by ``out_len``."""
    try:
        return _KDF[out_len](data).digest()
    except KeyError:
        raise ParameterError(f"KDF output length must be 32, 48 or 64 bytes, got {out_len}") from None
