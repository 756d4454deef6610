"""Syndrome-weight driven flip thresholds for the Q-decoder.

For every candidate residual error weight t_l = j (j = 0..t) the table stores
the syndrome weight expected when the expanded error has weight t' = j*m, and
the smallest correlation rho for which a bit is more likely in error than not
by the margin delta:

    P{e_i = 1 | rho} > (1 + delta) / (2 + delta)

with the posterior built from the per-check probabilities

    p_ci(t') = P{check unsatisfied | bit correct}
    p_ic(t') = P{check unsatisfied | bit in error}

over a check of n0*dv positions, and m*dv checks feeding each correlation.

Two models are available:

``"consistent"`` (default)
    Expected syndrome weight is p times the probability that a check holds an
    odd number of the t' expanded errors, and the posterior evaluates the
    per-check probabilities at the expanded weight t' = j*m.
``"printed"``
    Expected syndrome weight is p * (p_ic(t') + p_ci(t')) and the posterior
    evaluates the per-check probabilities at t_l = j.  Kept for comparison; it
    predicts syndrome weights close to p for every j > 0 and so degenerates to
    a single threshold.

Binomial sums are evaluated with mpmath in log space at 30 significant digits.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .params import ParamSet

MODELS = ("consistent", "printed")
_DPS = 30


@dataclass(frozen=True)
class ThresholdTable:
    weights: tuple[float, ...]        # expected syndrome weight for t_l = j
    raw_thresholds: tuple[int, ...]   # before the post-minimum clamp
    thresholds: tuple[int, ...]
    min_index: int
    m: int
    max_rho: int
    model: str = "consistent"
    delta: float = 0.0

    def __post_init__(self):
        order = sorted(range(len(self.weights)), key=lambda j: self.weights[j])
        object.__setattr__(self, "_order", tuple(order))
        object.__setattr__(self, "_sorted_weights", tuple(self.weights[j] for j in order))

    def __len__(self):
        return len(self.weights)

    def lookup(self, syndrome_weight: int) -> int:
        return lookup_threshold(self, syndrome_weight)

    def rows(self):
        """(j, t', expected weight, raw threshold, clamped threshold) per entry."""
        return [(j, j * self.m, self.weights[j], self.raw_thresholds[j], self.thresholds[j])
                for j in range(len(self))]


def lookup_threshold(tbl: ThresholdTable, syndrome_weight: int) -> int:
    """Threshold of the entry with the largest expected weight strictly below
    ``syndrome_weight``; the smallest entry's threshold when there is none."""
    k = bisect.bisect_left(tbl._sorted_weights, syndrome_weight)
    j = tbl._order[max(k - 1, 0)]
    return tbl.thresholds[j]


def _log_binomial(n, k):
    return mpmath.loggamma(n + 1) - mpmath.loggamma(k + 1) - mpmath.loggamma(n - k + 1)


def _parity_sum(a, b, t, denom_log, parity, shift=0):
    """sum over j = parity (mod 2), 0 <= j <= a, of C(a, j) C(b, t - shift - j) / exp(denom_log)."""
    top = t - shift
    lo = max(0, top - b)
    hi = min(a, top)
    total = mpmath.mpf(0)
    if hi < lo:
        return total
    # consecutive terms share most factors; step the log term incrementally
    log_term = _log_binomial(a, lo) + _log_binomial(b, top - lo) - denom_log
    term = mpmath.exp(log_term)
    for j in range(lo, hi + 1):
        if j % 2 == parity:
            total += term
        if j < hi:
            term *= mpmath.mpf((a - j) * (top - j)) / ((j + 1) * (b - top + j + 1))
    return total


def check_probabilities(n: int, check_weight: int, t: int):
    """(p_ci, p_ic) for t errors among n positions and checks of the given weight."""
    if t <= 0:
        return mpmath.mpf(0), mpmath.mpf(0)
    a, b = check_weight - 1, n - check_weight
    p_ci = _parity_sum(a, b, t, _log_binomial(n - 1, t), parity=1)
    p_ic = _parity_sum(a, b, t, _log_binomial(n - 1, t - 1), parity=0, shift=1)
    return p_ci, p_ic


def odd_check_probability(n: int, check_weight: int, t: int):
    """P{a weight-``check_weight`` check sees an odd number of t random errors}."""
    if t <= 0:
        return mpmath.mpf(0)
    return _parity_sum(check_weight, n - check_weight, t, _log_binomial(n, t), parity=1)


def _xlogy(x, y):
    if x == 0:
        return mpmath.mpf(0)
    if y == 0:
        return mpmath.mpf("-inf")
    return x * mpmath.log(y)


def flip_threshold(n: int, t_l: int, p_ci, p_ic, max_rho: int, delta: float) -> int:
    """Smallest rho in [0, max_rho] whose posterior error probability exceeds
    (1 + delta) / (2 + delta); ``max_rho`` when none qualifies."""
    if t_l <= 0 or t_l >= n:
        return max_rho
    log_prior = mpmath.log(t_l) - mpmath.log(n - t_l)
    log_margin = mpmath.log(1 + mpmath.mpf(delta))
    for rho in range(max_rho + 1):
        k = max_rho - rho
        ll_err = _xlogy(rho, p_ic) + _xlogy(k, 1 - p_ic)
        ll_ok = _xlogy(rho, p_ci) + _xlogy(k, 1 - p_ci)
        if ll_err == mpmath.mpf("-inf"):
            continue
        if ll_ok == mpmath.mpf("-inf") or log_prior + ll_err > log_margin + ll_ok:
            return rho
    return max_rho


def clamp_after_minimum(raw) -> tuple[tuple[int, ...], int]:
    """Walking from the largest j down, replace every threshold past the first
    minimum with that minimum."""
    j_min = max(range(len(raw)), key=lambda j: (-raw[j], j))
    clamped = tuple(raw[j_min] if j < j_min else b for j, b in enumerate(raw))
    return clamped, j_min


def build_threshold_table(ps: ParamSet, model: str = "consistent", delta: float | None = None
                          ) -> ThresholdTable:
    if model not in MODELS:
        raise ValueError(f"unknown threshold model {model!r}; choose from {MODELS}")
    delta = ps.delta if delta is None else delta
    return _build(ps.n0, ps.p, ps.dv, ps.m, ps.t, model, float(delta))


@lru_cache(maxsize=64)
def _build(n0, p, dv, m, t, model, delta) -> ThresholdTable:
    n = n0 * p
    check_weight = n0 * dv
    max_rho = m * dv
    weights, raw = [], []
    with mpmath.workdps(_DPS):
        for j in range(t + 1):
            t_exp = j * m
            p_ci, p_ic = check_probabilities(n, check_weight, t_exp)
            if model == "consistent":
                w = odd_check_probability(n, check_weight, t_exp) * p
                q_ci, q_ic = p_ci, p_ic
            else:
                w = (p_ic + p_ci) * p
                q_ci, q_ic = check_probabilities(n, check_weight, j)
            weights.append(float(w))
            raw.append(flip_threshold(n, j, q_ci, q_ic, max_rho, delta))
    clamped, j_min = clamp_after_minimum(raw)
    return ThresholdTable(tuple(weights), tuple(raw), clamped, j_min, m, max_rho, model, delta)
