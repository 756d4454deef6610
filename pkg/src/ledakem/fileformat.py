"""On-disk formats: key and ciphertext files, KAT files.

Every binary file is a 7-byte header followed by the payload::

    magic (4 bytes) | version (1) | category tag (1) | n0 (1)

The category tag is 1, 3 or 5 for categories 1, 2-3 and 4-5.  Payloads are
the seed (private key), the padded public-key blocks (public key) or the
padded syndrome (ciphertext).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import params as _params
from .errors import FormatError, ParameterError
from .keygen import PublicKey, public_key_size
from .kem import Ciphertext, ciphertext_size
from .params import CATEGORY_TAG, ParamSet

VERSION = 1
MAGIC = {"private": b"LKsk", "public": b"LKpk", "ciphertext": b"LKct"}
HEADER_SIZE = 7


@dataclass(frozen=True)
class KeyFileHeader:
    kind: str
    version: int
    category_tag: int
    n0: int

    def to_bytes(self) -> bytes:
        return MAGIC[self.kind] + bytes([self.version, self.category_tag, self.n0])

    @property
    def params(self) -> ParamSet:
        try:
            return _params.by_tag(self.category_tag, self.n0)
        except ParameterError as exc:
            raise FormatError(str(exc)) from None


def header_for(kind: str, ps: ParamSet) -> KeyFileHeader:
    return KeyFileHeader(kind, VERSION, CATEGORY_TAG[ps.category], ps.n0)


def parse_header(data: bytes, kind: str) -> KeyFileHeader:
    if len(data) < HEADER_SIZE:
        raise FormatError("file too short for a header")
    if data[:4] != MAGIC[kind]:
        raise FormatError(f"not a {kind} file (bad magic {data[:4]!r})")
    if data[4] != VERSION:
        raise FormatError(f"unsupported format version {data[4]}")
    return KeyFileHeader(kind, data[4], data[5], data[6])


def _payload(data: bytes, kind: str, expected) -> tuple[ParamSet, bytes]:
    hdr = parse_header(data, kind)
    ps = hdr.params
    body = data[HEADER_SIZE:]
    size = expected(ps)
    if len(body) != size:
        raise FormatError(f"{kind} payload for {ps.name} must be {size} bytes, got {len(body)}")
    return ps, body


def dump_private(ps: ParamSet, seed: bytes) -> bytes:
    return header_for("private", ps).to_bytes() + seed


def load_private(data: bytes) -> tuple[ParamSet, bytes]:
    return _payload(data, "private", lambda ps: ps.seed_bytes)


def dump_public(pk: PublicKey) -> bytes:
    return header_for("public", pk.params).to_bytes() + pk.to_bytes()


def load_public(data: bytes) -> PublicKey:
    ps, body = _payload(data, "public", public_key_size)
    try:
        return PublicKey.from_bytes(ps, body)
    except ParameterError as exc:
        raise FormatError(str(exc)) from None


def dump_ciphertext(ct: Ciphertext) -> bytes:
    return header_for("ciphertext", ct.params).to_bytes() + ct.to_bytes()


def load_ciphertext(data: bytes) -> tuple[ParamSet, bytes]:
    """Parameter set and raw syndrome bytes (padding is checked by decapsulation)."""
    return _payload(data, "ciphertext", ciphertext_size)


# --- known-answer test files -------------------------------------------------

KAT_FIELDS = ("count", "seed", "entropy", "pk_sha3_256", "ct", "ss")


@dataclass(frozen=True)
class KatRecord:
    count: int
    seed: bytes
    entropy: bytes
    pk_digest: bytes
    ct: bytes
    ss: bytes

    def lines(self) -> list[str]:
        return [
            f"count = {self.count}",
            f"seed = {self.seed.hex().upper()}",
            f"entropy = {self.entropy.hex().upper()}",
            f"pk_sha3_256 = {self.pk_digest.hex().upper()}",
            f"ct = {self.ct.hex().upper()}",
            f"ss = {self.ss.hex().upper()}",
        ]


def pk_digest(pk_bytes: bytes) -> bytes:
    return hashlib.sha3_256(pk_bytes).digest()


def format_kat(ps: ParamSet, records) -> str:
    out = [f"# {ps.name}", ""]
    for rec in records:
        out += rec.lines() + [""]
    return "\n".join(out)


def parse_kat(text: str) -> tuple[ParamSet, list[KatRecord]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError("KAT file must start with '# <params id>'")
    try:
        ps = _params.get(lines[0][1:].strip())
    except ParameterError as exc:
        raise FormatError(str(exc)) from None
    records, cur = [], {}

    def flush():
        if not cur:
            return
        missing = [f for f in KAT_FIELDS if f not in cur]
        if missing:
            raise FormatError(f"KAT record missing {', '.join(missing)}")
        try:
            records.append(KatRecord(int(cur["count"]), bytes.fromhex(cur["seed"]),
                                     bytes.fromhex(cur["entropy"]), bytes.fromhex(cur["pk_sha3_256"]),
                                     bytes.fromhex(cur["ct"]), bytes.fromhex(cur["ss"])))
        except ValueError as exc:
            raise FormatError(f"bad KAT value: {exc}") from None
        cur.clear()

    for line in lines[1:]:
        line = line.strip()
        if not line:
            flush()
            continue
        key, sep, value = line.partition("=")
        if not sep or key.strip() not in KAT_FIELDS:
            raise FormatError(f"unexpected KAT line {line[:40]!r}")
        if key.strip() in cur:
            raise FormatError(f"duplicate field {key.strip()!r}")
        cur[key.strip()] = value.strip()
    flush()
    return ps, records
