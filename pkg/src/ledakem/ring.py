"""Arithmetic in the binary polynomial ring F2[x]/<x^p + 1>.

Elements of this ring are in one-to-one correspondence with p x p binary
circulant matrices: the coefficients of a(x) are the first row of the matrix.

Two representations are provided:

* :class:`RingElement` -- dense, the coefficient of x^i is bit i of a Python
  integer.  An integer is a little-endian array of machine words, so shifting
  by k is a word-level monomial multiplication.  Bits at positions >= p are
  always zero.
* :class:`SparseRingElement` -- a sorted tuple of the exponents carrying a one,
  used for the low-weight blocks of H and Q and for error vectors.

All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import ParameterError, SingularError

try:  # GMP big-integer shifts/XORs speed up the inverse roughly 1.5x
    from gmpy2 import mpz as _bigint
except ImportError:  # pragma: no cover
    _bigint = int

WORD_BITS = 64


def words_per_element(p: int) -> int:
    return -(-p // WORD_BITS)


def element_bytes(p: int) -> int:
    """Serialized size of a dense element, padded to whole 64-bit words."""
    return words_per_element(p) * (WORD_BITS // 8)


@dataclass(frozen=True)
class RingElement:
    p: int
    bits: int = 0

    def __post_init__(self):
        if self.p <= 2:
            raise ParameterError(f"ring size p must exceed 2, got {self.p}")
        if self.bits < 0 or self.bits >> self.p:
            raise ParameterError("coefficients beyond x^(p-1) are not allowed")

    @classmethod
    def zero(cls, p: int) -> RingElement:
        return cls(p, 0)

    @classmethod
    def one(cls, p: int) -> RingElement:
        return cls(p, 1)

    @classmethod
    def from_exponents(cls, p: int, exponents: Iterable[int]) -> RingElement:
        """Sum of monomials x^k; repeated exponents cancel."""
        bits = 0
        for k in exponents:
            bits ^= 1 << (k % p)
        return cls(p, bits)

    @classmethod
    def from_array(cls, p: int, coeffs) -> RingElement:
        arr = np.asarray(coeffs, dtype=np.uint8) & 1
        if arr.shape != (p,):
            raise ParameterError(f"expected {p} coefficients, got shape {arr.shape}")
        return cls(p, int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little"))

    @classmethod
    def from_bytes(cls, p: int, data: bytes) -> RingElement:
        """Inverse of :meth:`to_bytes`; nonzero padding bits are rejected."""
        if len(data) != element_bytes(p):
            raise ParameterError(f"expected {element_bytes(p)} bytes, got {len(data)}")
        bits = int.from_bytes(data, "little")
        if bits >> p:
            raise ParameterError("padding bits beyond x^(p-1) are set")
        return cls(p, bits)

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes(element_bytes(self.p), "little")

    def to_words(self) -> list[int]:
        mask = (1 << WORD_BITS) - 1
        return [(self.bits >> (WORD_BITS * i)) & mask for i in range(words_per_element(self.p))]

    def to_array(self) -> np.ndarray:
        raw = np.frombuffer(self.to_bytes(), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.p]

    def exponents(self) -> list[int]:
        return [i for i, c in enumerate(reversed(format(self.bits, f"0{self.p}b"))) if c == "1"]

    def __getitem__(self, i: int) -> int:
        return (self.bits >> (i % self.p)) & 1

    def __add__(self, other):
        return add(self, other)

    __sub__ = __add__

    def __mul__(self, other):
        if isinstance(other, SparseRingElement):
            return mul_sparse_dense(other, self)
        return mul_dense(self, other)

    def __repr__(self):
        return f"RingElement(p={self.p}, weight={weight(self)})"


@dataclass(frozen=True)
class SparseRingElement:
    p: int
    positions: tuple[int, ...] = ()

    def __post_init__(self):
        pos = tuple(self.positions)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ParameterError("positions must be strictly increasing")
        if pos and (pos[0] < 0 or pos[-1] >= self.p):
            raise ParameterError(f"positions must lie in [0, {self.p - 1}]")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_exponents(cls, p: int, exponents: Iterable[int]) -> SparseRingElement:
        """Sum of monomials x^k; pairs of equal exponents cancel."""
        acc: set[int] = set()
        for k in exponents:
            acc ^= {k % p}
        return cls(p, tuple(sorted(acc)))

    @property
    def weight(self) -> int:
        return len(self.positions)

    def __len__(self):
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def __mul__(self, other):
        if isinstance(other, SparseRingElement):
            return mul_sparse_sparse(self, other)
        return mul_sparse_dense(self, other)


AnyElement = Union[RingElement, SparseRingElement]


def _check_same_ring(a: AnyElement, b: AnyElement) -> None:
    if a.p != b.p:
        raise ParameterError(f"ring size mismatch: {a.p} != {b.p}")


def _reduce(bits: int, p: int) -> int:
    mask = (1 << p) - 1
    while bits >> p:
        bits = (bits & mask) ^ (bits >> p)
    return bits


def _rotate(bits: int, k: int, p: int) -> int:
    """Multiply a dense element by x^k."""
    k %= p
    if not k:
        return bits
    mask = (1 << p) - 1
    return ((bits << k) & mask) | (bits >> (p - k))


def densify(a: AnyElement) -> RingElement:
    if isinstance(a, RingElement):
        return a
    bits = 0
    for k in a.positions:
        bits |= 1 << k
    return RingElement(a.p, bits)


def sparsify(a: AnyElement) -> SparseRingElement:
    if isinstance(a, SparseRingElement):
        return a
    return SparseRingElement(a.p, tuple(a.exponents()))


def add(a: AnyElement, b: AnyElement) -> AnyElement:
    """Coefficient-wise XOR.  Sparse + sparse stays sparse."""
    _check_same_ring(a, b)
    if isinstance(a, SparseRingElement) and isinstance(b, SparseRingElement):
        return SparseRingElement(a.p, tuple(sorted(set(a.positions) ^ set(b.positions))))
    return RingElement(a.p, densify(a).bits ^ densify(b).bits)


def mul_dense(a: RingElement, b: RingElement) -> RingElement:
    """Schoolbook shift-and-XOR product followed by folding x^p -> 1."""
    _check_same_ring(a, b)
    x, y = a.bits, b.bits
    if x.bit_count() < y.bit_count():
        x, y = y, x
    acc = 0
    shift = 0
    while y:
        low = y & -y
        k = low.bit_length() - 1
        x <<= k - shift
        shift = k
        acc ^= x
        y ^= low
    return RingElement(a.p, _reduce(acc, a.p))


def mul_sparse_dense(a: SparseRingElement, b: RingElement) -> RingElement:
    _check_same_ring(a, b)
    acc = 0
    for k in a.positions:
        acc ^= _rotate(b.bits, k, b.p)
    return RingElement(b.p, acc)


def mul_sparse_sparse(a: SparseRingElement, b: SparseRingElement) -> SparseRingElement:
    _check_same_ring(a, b)
    p = a.p
    acc: set[int] = set()
    for i in a.positions:
        acc ^= {(i + k) % p for k in b.positions}
    return SparseRingElement(p, tuple(sorted(acc)))


def transpose(a: AnyElement) -> AnyElement:
    """Circulant transpose: exponent i moves to (p - i) mod p."""
    p = a.p
    if isinstance(a, SparseRingElement):
        return SparseRingElement(p, tuple(sorted((-k) % p for k in a.positions)))
    high = a.bits >> 1
    rev = int(format(high, f"0{p - 1}b")[::-1], 2) if high else 0
    return RingElement(p, (rev << 1) | (a.bits & 1))


def inverse(a: AnyElement) -> RingElement:
    """Multiplicative inverse by the extended Euclidean algorithm against x^p + 1.

    Raises :class:`SingularError` when gcd(a, x^p + 1) != 1.
    """
    a = densify(a)
    p = a.p
    if a.bits == 0:
        raise SingularError("zero has no inverse")
    # invariants: g1 * a == u and g2 * a == v  (mod x^p + 1)
    u, v = _bigint(a.bits), _bigint((1 << p) | 1)
    g1, g2 = _bigint(1), _bigint(0)
    while u > 1:
        j = u.bit_length() - v.bit_length()
        if j < 0:
            u, v, g1, g2 = v, u, g2, g1
            j = -j
        u ^= v << j
        g1 ^= g2 << j
    if u == 1:
        g = int(g1)
    elif v == 1:
        g = int(g2)
    else:
        raise SingularError(f"element shares a factor of degree {v.bit_length() - 1} with x^p + 1")
    return RingElement(p, _reduce(g, p))


def is_invertible(a: AnyElement) -> bool:
    """Invertibility test valid when ord_p(2) = p - 1.

    Then x^p + 1 = (x + 1) * Phi(x) with Phi irreducible, so a is a unit iff
    it has odd weight and is not the all-ones polynomial Phi itself.
    """
    w = weight(a)
    return w % 2 == 1 and w != a.p


def weight(a: AnyElement) -> int:
    if isinstance(a, SparseRingElement):
        return len(a.positions)
    return a.bits.bit_count()

