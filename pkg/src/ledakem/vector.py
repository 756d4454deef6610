from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .ring import SparseRingElement


@dataclass(frozen=True)
class ErrorVector:
    """Sparse binary vector of length n = n0 * p, split into n0 circulant-sized blocks."""

    p: int
    n0: int
    positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(sorted(self.positions))
        if len(set(pos)) != len(pos):
            raise ParameterError("error positions must be distinct")
        if pos and (pos[0] < 0 or pos[-1] >= self.n):
            raise ParameterError(f"error positions must lie in [0, {self.n - 1}]")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.n0 * self.p

    @property
    def weight(self) -> int:
        return len(self.positions)

    def blocks(self) -> list[SparseRingElement]:
        parts: list[list[int]] = [[] for _ in range(self.n0)]
        for v in self.positions:
            parts[v // self.p].append(v % self.p)
        return [SparseRingElement(self.p, tuple(b)) for b in parts]

    def to_bytes(self) -> bytes:
        """Dense n-bit string, bit v at byte v // 8 bit v % 8, zero-padded."""
        bits = 0
        for v in self.positions:
            bits |= 1 << v
        return bits.to_bytes((self.n + 7) // 8, "little")

    @classmethod
    def from_blocks(cls, blocks) -> ErrorVector:
        p = blocks[0].p
        return cls(p, len(blocks), tuple(j * p + k for j, b in enumerate(blocks) for k in b.positions))
