"""The Q-decoder and a classical bit-flipping decoder over the public code.

Conventions.  A syndrome is a length-p 0/1 vector; check r of the private code
involves positions (i, r + k) for k in H_i, and flipping bit (j, c) of the
error estimate toggles the syndrome bits (c - u) mod p for u in L_j, the
column of L = HQ at (j, c).  Error positions are numbered v = j * p + c.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecodingFailure
from .ring import RingElement, SparseRingElement
from .thresholds import ThresholdTable
from .vector import ErrorVector


@dataclass
class IterationTrace:
    iteration: int
    syndrome_weight: int
    threshold: int
    flips: int


@dataclass
class DecodeResult:
    error: ErrorVector
    iterations: int
    trace: list[IterationTrace] = field(default_factory=list)


class DecoderWorkspace:
    """Scratch buffers for one decode at a time (not shareable across threads)."""

    def __init__(self, p: int, n0: int):
        self.p, self.n0 = p, n0
        self.syndrome = np.zeros(2 * p, dtype=np.int32)   # doubled for wrap-free slicing
        self.sigma = np.zeros((n0, 2 * p), dtype=np.int32)
        self.rho = np.zeros((n0, p), dtype=np.int32)
        self.estimate = np.zeros(n0 * p, dtype=np.uint8)

    def fits(self, p: int, n0: int) -> bool:
        return self.p == p and self.n0 == n0


def _shifted(doubled: np.ndarray, k: int, p: int) -> np.ndarray:
    """View v with v[c] = x[(c - k) mod p] where ``doubled`` is x repeated twice."""
    return doubled[p - k: 2 * p - k]


def _column_syndromes(flips: np.ndarray, columns, p: int) -> np.ndarray:
    """Parity of the syndrome contributions of the given error positions."""
    hits = []
    for v in flips:
        j, c = divmod(int(v), p)
        hits.append((c - columns[j]) % p)
    if not hits:
        return np.zeros(p, dtype=np.int32)
    return (np.bincount(np.concatenate(hits), minlength=p) & 1).astype(np.int32)


def _columns(blocks) -> list[np.ndarray]:
    return [np.asarray(b.positions, dtype=np.int64) for b in blocks]


def syndrome_of(error: ErrorVector, L_blocks) -> RingElement:
    """Private syndrome H Q e^T of an error vector, computed through L = HQ."""
    p = L_blocks[0].p
    vec = _column_syndromes(np.asarray(error.positions, dtype=np.int64), _columns(L_blocks), p)
    return RingElement.from_array(p, vec)


def counters(syndrome: np.ndarray, H) -> np.ndarray:
    """Sigma = s * H in the integers: unsatisfied checks touching each position."""
    p = syndrome.shape[0]
    doubled = np.concatenate([syndrome, syndrome]).astype(np.int32)
    out = np.zeros((len(H), p), dtype=np.int32)
    for i, h in enumerate(H):
        for k in h.positions:
            out[i] += _shifted(doubled, k, p)
    return out


def correlations(sigma: np.ndarray, Q) -> np.ndarray:
    """R = Sigma * Q in the integers."""
    n0, p = sigma.shape
    doubled = np.concatenate([sigma, sigma], axis=1)
    out = np.zeros((n0, p), dtype=np.int32)
    for j in range(n0):
        for i in range(n0):
            for k in Q[i][j].positions:
                out[j] += _shifted(doubled[i], k, p)
    return out


def decode(s_prime: RingElement, sk, table: ThresholdTable, l_max: int | None = None, *,
           constant_time: bool = False, workspace: DecoderWorkspace | None = None,
           threshold_mode: str = "table", trace: bool = False, observer=None) -> DecodeResult:
    """Recover e from the private syndrome s' = H Q e^T.

    ``sk`` supplies the sparse blocks ``H``, ``Q`` and ``L``.  Raises
    :class:`DecodingFailure` when the syndrome is not cleared within ``l_max``
    iterations or when an iteration selects nothing to flip.

    With ``constant_time`` every call runs ``l_max`` iterations, leaving the
    estimate untouched once the syndrome is cleared.  ``threshold_mode="max"``
    uses the maximum correlation as threshold (diagnostic only).  ``observer``,
    if given, is called as ``observer(iteration, syndrome, estimate)`` with
    copies of both arrays after every update.
    """
    ps = sk.params
    p, n0 = ps.p, ps.n0
    l_max = ps.l_max if l_max is None else l_max
    ws = workspace if workspace is not None and workspace.fits(p, n0) else DecoderWorkspace(p, n0)
    H, Q = sk.H, sk.Q
    columns = _columns(sk.L)

    s = ws.syndrome
    s[:p] = s_prime.to_array()
    s[p:] = s[:p]
    sigma, rho, est = ws.sigma, ws.rho, ws.estimate
    est[:] = 0
    log: list[IterationTrace] = []
    done_at = 0 if not s[:p].any() else None
    failure = None

    for it in range(1, l_max + 1):
        if done_at is not None and not constant_time:
            break
        sigma[:] = 0
        for i in range(n0):
            for k in H[i].positions:
                sigma[i, :p] += _shifted(s, k, p)
        sigma[:, p:] = sigma[:, :p]
        rho[:] = 0
        for j in range(n0):
            for i in range(n0):
                for k in Q[i][j].positions:
                    rho[j] += _shifted(sigma[i], k, p)
        weight = int(s[:p].sum())
        b = int(rho.max()) if threshold_mode == "max" else table.lookup(weight)
        flips = np.flatnonzero(rho.reshape(-1) >= b)
        if done_at is not None or failure is not None:
            continue  # constant-time padding iteration
        if trace:
            log.append(IterationTrace(it, weight, b, int(flips.size)))
        if flips.size == 0:
            failure = ("stall", it)
            if not constant_time:
                break
            continue
        est[flips] ^= 1
        s[:p] ^= _column_syndromes(flips, columns, p)
        s[p:] = s[:p]
        if observer is not None:
            observer(it, s[:p].copy(), est.copy())
        if not s[:p].any():
            done_at = it

    if done_at is None:
        reason, at = failure if failure else ("max-iterations", l_max)
        raise DecodingFailure(reason, at, log)
    result = ErrorVector(p, n0, tuple(int(v) for v in np.flatnonzero(est)))
    if syndrome_of(result, sk.L) != s_prime:
        raise DecodingFailure("inconsistent", done_at, log)
    return DecodeResult(result, done_at, log)


def classic_bf_decode(s_prime: RingElement, L_blocks, table: ThresholdTable, l_max: int, *,
                      threshold_mode: str = "table", trace: bool = False) -> DecodeResult:
    """Bit flipping over the public parity-check matrix L = HQ.

    Counters are s * L in the integers; the same syndrome-weight lookup table
    supplies the thresholds.  Used as a reference for the Q-decoder.
    """
    p, n0 = s_prime.p, len(L_blocks)
    columns = _columns(L_blocks)
    s = np.concatenate([s_prime.to_array(), s_prime.to_array()]).astype(np.int32)
    est = np.zeros(n0 * p, dtype=np.uint8)
    log: list[IterationTrace] = []
    if not s[:p].any():
        return DecodeResult(ErrorVector(p, n0, ()), 0, log)
    for it in range(1, l_max + 1):
        sig = np.zeros((n0, p), dtype=np.int32)
        for j in range(n0):
            for u in L_blocks[j].positions:
                sig[j] += _shifted(s, u, p)
        weight = int(s[:p].sum())
        b = int(sig.max()) if threshold_mode == "max" else table.lookup(weight)
        flips = np.flatnonzero(sig.reshape(-1) >= b)
        if trace:
            log.append(IterationTrace(it, weight, b, int(flips.size)))
        if flips.size == 0:
            raise DecodingFailure("stall", it, log)
        est[flips] ^= 1
        s[:p] ^= _column_syndromes(flips, columns, p)
        s[p:] = s[:p]
        if not s[:p].any():
            return DecodeResult(ErrorVector(p, n0, tuple(int(v) for v in np.flatnonzero(est))), it, log)
    raise DecodingFailure("max-iterations", l_max, log)


def trace_csv(trace) -> str:
    lines = ["iteration,syndrome_weight,threshold,flips"]
    lines += [f"{r.iteration},{r.syndrome_weight},{r.threshold},{r.flips}" for r in trace]
    return "\n".join(lines) + "\n"
