"""Montecarlo estimation of the decoding failure rate."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import keygen, kem
from .decoder import DecoderWorkspace
from .params import ParamSet
from .thresholds import build_threshold_table


@dataclass
class TrialReport:
    params_id: str
    trials: int
    failures: int
    iteration_histogram: dict[int, int]
    failed_trials: list[int] = field(default_factory=list)
    failure_reasons: dict[str, int] = field(default_factory=dict)
    keygen_ms: tuple[float, float] = (0.0, 0.0)
    encap_ms: tuple[float, float] = (0.0, 0.0)
    decap_ms: tuple[float, float] = (0.0, 0.0)
    fixed_key: bool = False
    master_seed: str = ""

    @property
    def successes(self) -> int:
        return self.trials - self.failures

    @property
    def dfr_upper_bound(self) -> float:
        """Rough resolution of the run: failures / trials, or 1 / trials with none."""
        if not self.trials:
            return 1.0
        return max(self.failures, 1) / self.trials

    def to_dict(self) -> dict:
        d = asdict(self)
        d["iteration_histogram"] = {str(k): v for k, v in sorted(self.iteration_histogram.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> TrialReport:
        d = dict(d)
        d["iteration_histogram"] = {int(k): v for k, v in d["iteration_histogram"].items()}
        for key in ("keygen_ms", "encap_ms", "decap_ms"):
            d[key] = tuple(d[key])
        return cls(**d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["params", "trials", "failures", "iterations", "count"])
        for k, v in sorted(self.iteration_histogram.items()):
            w.writerow([self.params_id, self.trials, self.failures, k, v])
        return buf.getvalue()


def trial_seeds(master_seed: bytes, index: int, seed_bytes: int) -> tuple[bytes, bytes]:
    """Key seed and encapsulation entropy for one trial, bound to its index."""
    stream = hashlib.shake_256(b"dfr-trial" + master_seed + index.to_bytes(8, "little"))
    out = stream.digest(seed_bytes + 32)
    return out[:seed_bytes], out[seed_bytes:]


def _mean_std(xs) -> tuple[float, float]:
    if not xs:
        return 0.0, 0.0
    return statistics.fmean(xs), (statistics.stdev(xs) if len(xs) > 1 else 0.0)


def _run_chunk(ps: ParamSet, master_seed: bytes, indices, fixed_key: bool, constant_time: bool):
    table = build_threshold_table(ps)
    ws = DecoderWorkspace(ps.p, ps.n0)
    fixed = None
    if fixed_key:
        fixed = keygen.gen_keypair(ps, trial_seeds(master_seed, 0, ps.seed_bytes)[0])
    rows = []
    for i in indices:
        key_seed, entropy = trial_seeds(master_seed, i, ps.seed_bytes)
        t0 = time.perf_counter()
        sk, pk = fixed if fixed else keygen.gen_keypair(ps, key_seed)
        t1 = time.perf_counter()
        ct, ss = kem.encap(pk, entropy)
        t2 = time.perf_counter()
        ss2, rep = kem.decapsulate(sk, ct.to_bytes(), workspace=ws, table=table,
                                   constant_time=constant_time)
        t3 = time.perf_counter()
        ok = ss == ss2
        rows.append((i, ok, rep.iterations, rep.reason if not ok else "",
                     (t1 - t0) * 1e3, (t2 - t1) * 1e3, (t3 - t2) * 1e3))
    return rows


def run_trials(ps: ParamSet, n_trials: int, master_seed: bytes = b"", workers: int = 1, *,
               fixed_key: bool = False, constant_time: bool = False) -> TrialReport:
    """Run keygen/encap/decap cycles and count shared-secret mismatches.

    Trial i is fully determined by (master_seed, i), so the counts do not
    depend on ``workers`` or on scheduling.
    """
    indices = list(range(n_trials))
    if workers <= 1 or n_trials < 2:
        rows = _run_chunk(ps, master_seed, indices, fixed_key, constant_time)
    else:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [ps] * workers, [master_seed] * workers, chunks,
                             [fixed_key] * workers, [constant_time] * workers)
            rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: r[0])
    hist = Counter(r[2] for r in rows if r[1])
    failed = [r[0] for r in rows if not r[1]]
    reasons = Counter(r[3] or "mismatch" for r in rows if not r[1])
    return TrialReport(
        params_id=ps.name,
        trials=n_trials,
        failures=len(failed),
        iteration_histogram=dict(sorted(hist.items())),
        failed_trials=failed,
        failure_reasons=dict(reasons),
        keygen_ms=_mean_std([r[4] for r in rows if not fixed_key]),
        encap_ms=_mean_std([r[5] for r in rows]),
        decap_ms=_mean_std([r[6] for r in rows]),
        fixed_key=fixed_key,
        master_seed=master_seed.hex(),
    )
