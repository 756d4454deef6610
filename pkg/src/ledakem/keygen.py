"""Key generation: secret H and Q from a seed, public key M_l = L_{n0-1}^{-1} L_l."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import params as _params
from .errors import KeyGenerationError, ParameterError, SingularError
from .params import ParamSet
from .ring import (RingElement, SparseRingElement, add, element_bytes, inverse,
                   is_invertible, mul_sparse_dense, mul_sparse_sparse)
from .rng import Drbg, sample_sparse

MAX_KEYGEN_ATTEMPTS = 16
_FAILURE_SECRET_DOMAIN = b"\x01decapsulation-failure"


@dataclass(frozen=True)
class PrivateKey:
    params: ParamSet
    seed: bytes
    H: tuple[SparseRingElement, ...]
    Q: tuple[tuple[SparseRingElement, ...], ...]
    L: tuple[SparseRingElement, ...]
    failure_secret: bytes
    attempts: int = 1

    @property
    def l_last(self) -> SparseRingElement:
        return self.L[-1]

    @cached_property
    def l_last_inv(self) -> RingElement:
        return inverse(self.l_last)

    def __repr__(self):
        # never show key material
        return f"PrivateKey(params={self.params.name!r})"

    def to_bytes(self) -> bytes:
        """At-rest form: the seed alone."""
        return self.seed


@dataclass(frozen=True)
class PublicKey:
    params: ParamSet
    blocks: tuple[RingElement, ...]

    def to_bytes(self) -> bytes:
        return public_key_bytes(self)

    @classmethod
    def from_bytes(cls, ps: ParamSet, data: bytes) -> PublicKey:
        size = element_bytes(ps.p)
        if len(data) != (ps.n0 - 1) * size:
            raise ParameterError(f"public key for {ps.name} must be {(ps.n0 - 1) * size} bytes")
        return cls(ps, tuple(RingElement.from_bytes(ps.p, data[i * size:(i + 1) * size])
                             for i in range(ps.n0 - 1)))


def public_key_bytes(pk: PublicKey) -> bytes:
    return b"".join(block.to_bytes() for block in pk.blocks)


def public_key_size(ps: ParamSet) -> int:
    return (ps.n0 - 1) * element_bytes(ps.p)


def _sample_secrets(ps: ParamSet, drbg: Drbg):
    H = tuple(sample_sparse(drbg, ps.p, ps.dv) for _ in range(ps.n0))
    wq = ps.weight_matrix()
    Q = tuple(tuple(sample_sparse(drbg, ps.p, wq[i][j]) for j in range(ps.n0))
              for i in range(ps.n0))
    return H, Q


def compute_L(H, Q) -> tuple[SparseRingElement, ...]:
    """Blocks of L = HQ: L_j = sum_i H_i Q_{i,j}."""
    n0 = len(H)
    blocks = []
    for j in range(n0):
        acc = SparseRingElement(H[0].p)
        for i in range(n0):
            acc = add(acc, mul_sparse_sparse(H[i], Q[i][j]))
        blocks.append(acc)
    return tuple(blocks)


def expand_private(ps: ParamSet, seed: bytes) -> PrivateKey:
    """Regenerate the full private key from its seed."""
    _params.check(ps)
    seed = bytes(seed)
    if len(seed) != ps.seed_bytes:
        raise ParameterError(f"{ps.name} needs a {ps.seed_bytes}-byte seed, got {len(seed)}")
    drbg = Drbg(seed)
    for attempt in range(1, MAX_KEYGEN_ATTEMPTS + 1):
        H, Q = _sample_secrets(ps, drbg)
        L = compute_L(H, Q)
        if is_invertible(L[-1]):
            break
    else:
        raise KeyGenerationError(f"L_(n0-1) singular in {MAX_KEYGEN_ATTEMPTS} attempts")
    failure_secret = Drbg(seed, _FAILURE_SECRET_DOMAIN).bytes(ps.ss_bytes)
    return PrivateKey(ps, seed, H, Q, L, failure_secret, attempt)


def derive_public(sk: PrivateKey) -> PublicKey:
    try:
        inv = sk.l_last_inv
    except SingularError as exc:
        raise KeyGenerationError(str(exc)) from exc
    return PublicKey(sk.params, tuple(mul_sparse_dense(Lj, inv) for Lj in sk.L[:-1]))


def gen_keypair(ps: ParamSet, seed: bytes) -> tuple[PrivateKey, PublicKey]:
    sk = expand_private(ps, seed)
    return sk, derive_public(sk)
