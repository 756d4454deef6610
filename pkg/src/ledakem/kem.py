"""Niederreiter-style encapsulation and failure-hiding decapsulation."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .decoder import DecoderWorkspace, decode
from .errors import DecodingFailure, ParameterError
from .keygen import PrivateKey, PublicKey
from .params import ParamSet
from .ring import RingElement, element_bytes, mul_sparse_dense, transpose
from .rng import Drbg, kdf, sample_error
from .thresholds import build_threshold_table
from .vector import ErrorVector

_SUCCESS = b"\x01"
_FAILURE = b"\x00"
_ENCAP_DOMAIN = b"\x02encapsulation"


@dataclass(frozen=True)
class Ciphertext:
    params: ParamSet
    syndrome: RingElement

    def to_bytes(self) -> bytes:
        return self.syndrome.to_bytes()

    @classmethod
    def from_bytes(cls, ps: ParamSet, data: bytes) -> Ciphertext:
        return cls(ps, RingElement.from_bytes(ps.p, data))


def ciphertext_size(ps: ParamSet) -> int:
    return element_bytes(ps.p)


@dataclass
class DecapReport:
    """Decoder outcome of one decapsulation; never part of the public API result."""

    success: bool
    iterations: int
    reason: str = ""


def public_syndrome(pk: PublicKey, error: ErrorVector) -> RingElement:
    """s = [M_0 | ... | M_{n0-2} | I] e^T."""
    blocks = error.blocks()
    acc = 0
    for Mj, ej in zip(pk.blocks, blocks):
        acc ^= mul_sparse_dense(ej, transpose(Mj)).bits
    acc ^= RingElement.from_exponents(error.p, blocks[-1].positions).bits
    return RingElement(error.p, acc)


def _success_secret(error: ErrorVector, ss_bytes: int) -> bytes:
    return kdf(_SUCCESS + error.to_bytes(), ss_bytes)


def _failure_secret(sk: PrivateKey, ct_bytes: bytes) -> bytes:
    return kdf(_FAILURE + sk.failure_secret + ct_bytes, sk.params.ss_bytes)


def encap_with_error(pk: PublicKey, error: ErrorVector) -> tuple[Ciphertext, bytes]:
    ps = pk.params
    if error.p != ps.p or error.n0 != ps.n0:
        raise ParameterError("error vector does not match the public key parameters")
    return Ciphertext(ps, public_syndrome(pk, error)), _success_secret(error, ps.ss_bytes)


def encap(pk: PublicKey, entropy: bytes | Drbg | None = None) -> tuple[Ciphertext, bytes]:
    """Encapsulate a fresh weight-t error vector; returns (ciphertext, shared secret).

    ``entropy`` may be a Drbg, a byte string seeding one, or None for os.urandom.
    """
    ps = pk.params
    if isinstance(entropy, Drbg):
        drbg = entropy
    else:
        drbg = Drbg(os.urandom(32) if entropy is None else entropy, _ENCAP_DOMAIN,
                    check_length=False)
    error = ErrorVector(ps.p, ps.n0, sample_error(drbg, ps.n, ps.t))
    return encap_with_error(pk, error)


def private_syndrome(sk: PrivateKey, syndrome: RingElement) -> RingElement:
    """s' = L_{n0-1} s = H Q e^T."""
    return mul_sparse_dense(transpose(sk.l_last), syndrome)


def decapsulate(sk: PrivateKey, ct_bytes: bytes, *, workspace: DecoderWorkspace | None = None,
                constant_time: bool = False, table=None) -> tuple[bytes, DecapReport]:
    """Shared secret plus decoder report for a raw ciphertext of the right length.

    Both candidate secrets are always derived; the decoder outcome only selects
    which one is returned.
    """
    ps = sk.params
    if len(ct_bytes) != ciphertext_size(ps):
        raise ParameterError(f"ciphertext for {ps.name} must be {ciphertext_size(ps)} bytes")
    ct_bytes = bytes(ct_bytes)
    table = table or build_threshold_table(ps)
    fallback = _failure_secret(sk, ct_bytes)
    bits = int.from_bytes(ct_bytes, "little")
    report = DecapReport(False, 0, "padding")
    candidate = fallback
    if not bits >> ps.p:
        s_prime = private_syndrome(sk, RingElement(ps.p, bits))
        try:
            result = decode(s_prime, sk, table, ps.l_max, workspace=workspace,
                            constant_time=constant_time)
        except DecodingFailure as exc:
            report = DecapReport(False, exc.iterations, exc.reason)
            candidate = _success_secret(ErrorVector(ps.p, ps.n0, ()), ps.ss_bytes)
        else:
            candidate = _success_secret(result.error, ps.ss_bytes)
            ok = result.error.weight == ps.t
            report = DecapReport(ok, result.iterations, "" if ok else "weight")
    return (candidate if report.success else fallback), report


def decap(sk: PrivateKey, ct: Ciphertext | bytes) -> bytes:
    """Shared secret for ``ct``.  Decoding failures yield a pseudorandom secret
    bound to the private key and the ciphertext; no failure is signalled."""
    data = ct.to_bytes() if isinstance(ct, Ciphertext) else bytes(ct)
    return decapsulate(sk, data)[0]
