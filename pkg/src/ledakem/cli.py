"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 format, 4 crypto-internal.  Private-key
material is never printed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import statistics
import sys
import time
from pathlib import Path

from . import dfr, fileformat, keygen, kem, params, thresholds
from .decoder import DecoderWorkspace, decode, trace_csv
from .errors import DecodingFailure, FormatError, LedaError, ParameterError

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_CRYPTO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _params(name):
    try:
        return params.get(name)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, data: bytes, force: bool = True):
    path = Path(path)
    if path.exists() and not force:
        raise UsageError(f"{path} exists; use --force to overwrite")
    path.write_bytes(data)


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# --- commands ----------------------------------------------------------------

def cmd_keygen(args):
    ps = _params(args.params)
    if args.seed_file:
        seed = _read(args.seed_file)
        if len(seed) != ps.seed_bytes:
            raise UsageError(f"seed file must hold exactly {ps.seed_bytes} bytes for {ps.name}")
    else:
        seed = os.urandom(ps.seed_bytes)
    priv_path, pub_path = Path(args.out_prefix + ".sk"), Path(args.out_prefix + ".pk")
    for path in (priv_path, pub_path):
        if path.exists() and not args.force:
            raise UsageError(f"{path} exists; use --force to overwrite")
    sk, pk = keygen.gen_keypair(ps, seed)
    _write(priv_path, fileformat.dump_private(ps, seed))
    _write(pub_path, fileformat.dump_public(pk))
    _emit(args, {"params": ps.name, "private": str(priv_path), "public": str(pub_path),
                 "public_bytes": keygen.public_key_size(ps), "attempts": sk.attempts},
          f"{ps.name}: wrote {priv_path} and {pub_path} ({keygen.public_key_size(ps)} B public key)")


def cmd_encap(args):
    pk = fileformat.load_public(_read(args.pub))
    ct, ss = kem.encap(pk)
    _write(args.out_ct, fileformat.dump_ciphertext(ct))
    _write(args.out_ss, ss)
    _emit(args, {"params": pk.params.name, "ciphertext": args.out_ct, "shared_secret": args.out_ss},
          f"{pk.params.name}: wrote {args.out_ct} and {args.out_ss}")


def cmd_decap(args):
    ps, seed = fileformat.load_private(_read(args.priv))
    ct_ps, ct_bytes = fileformat.load_ciphertext(_read(args.ct))
    if ct_ps != ps:
        raise FormatError(f"ciphertext is for {ct_ps.name} but the private key is for {ps.name}")
    sk = keygen.expand_private(ps, seed)
    ss = kem.decap(sk, ct_bytes)
    _write(args.out_ss, ss)
    if args.trace_csv:
        # diagnostic rerun of the decoder with tracing enabled
        s_prime = kem.private_syndrome(sk, kem.Ciphertext.from_bytes(ps, ct_bytes).syndrome)
        try:
            log = decode(s_prime, sk, thresholds.build_threshold_table(ps), trace=True).trace
        except DecodingFailure as exc:
            log = exc.trace
        Path(args.trace_csv).write_text(trace_csv(log))
    _emit(args, {"params": ps.name, "shared_secret": args.out_ss},
          f"{ps.name}: wrote {args.out_ss}")


def _kat_records(ps, count: int, master: bytes):
    out = []
    for i in range(count):
        stream = hashlib.shake_256(b"kat" + master + i.to_bytes(4, "little"))
        material = stream.digest(ps.seed_bytes + 32)
        seed, entropy = material[:ps.seed_bytes], material[ps.seed_bytes:]
        _, pk = keygen.gen_keypair(ps, seed)
        ct, ss = kem.encap(pk, entropy)
        out.append(fileformat.KatRecord(i, seed, entropy, fileformat.pk_digest(pk.to_bytes()),
                                        ct.to_bytes(), ss))
    return out


def cmd_kat(args):
    ps = _params(args.params)
    if args.count < 1:
        raise UsageError("--count must be positive")
    text = fileformat.format_kat(ps, _kat_records(ps, args.count, args.seed.encode()))
    if args.out:
        _write(args.out, text.encode())
    else:
        sys.stdout.write(text)


def cmd_kat_verify(args):
    try:
        text = _read(args.file).decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("KAT file is not ASCII text") from None
    ps, records = fileformat.parse_kat(text)
    bad = []
    for rec in records:
        sk, pk = keygen.gen_keypair(ps, rec.seed)
        ct, ss = kem.encap(pk, rec.entropy)
        ok = (fileformat.pk_digest(pk.to_bytes()) == rec.pk_digest and ct.to_bytes() == rec.ct
              and ss == rec.ss and kem.decap(sk, rec.ct) == rec.ss)
        if not ok:
            bad.append(rec.count)
    _emit(args, {"params": ps.name, "records": len(records), "mismatches": bad},
          f"{ps.name}: {len(records) - len(bad)}/{len(records)} records verified"
          + (f"; mismatched counts {bad}" if bad else ""))
    if bad:
        return EXIT_CRYPTO
    return EXIT_OK


def _stats(xs):
    return {"mean": statistics.fmean(xs), "std": statistics.stdev(xs) if len(xs) > 1 else 0.0}


def cmd_bench(args):
    ps = _params(args.params)
    if args.iterations < 1:
        raise UsageError("--iterations must be positive")
    table = thresholds.build_threshold_table(ps)
    ws = DecoderWorkspace(ps.p, ps.n0)
    times = {"keygen": [], "encap": [], "decap": []}
    iterations = []
    for i in range(args.iterations):
        seed, entropy = dfr.trial_seeds(args.seed.encode(), i, ps.seed_bytes)
        t0 = time.perf_counter()
        sk, pk = keygen.gen_keypair(ps, seed)
        t1 = time.perf_counter()
        ct, ss = kem.encap(pk, entropy)
        t2 = time.perf_counter()
        ss2, rep = kem.decapsulate(sk, ct.to_bytes(), workspace=ws, table=table)
        t3 = time.perf_counter()
        times["keygen"].append((t1 - t0) * 1e3)
        times["encap"].append((t2 - t1) * 1e3)
        times["decap"].append((t3 - t2) * 1e3)
        iterations.append(rep.iterations if ss == ss2 else -1)
    summary = {k: _stats(v) for k, v in times.items()}
    payload = {"params": ps.name, "runs": args.iterations, "ms": summary,
               "decoder_iterations": iterations}
    lines = [f"{ps.name} over {args.iterations} runs (ms)"]
    for k, v in summary.items():
        lines.append(f"  {k:<7} {v['mean']:9.2f} ± {v['std']:.2f}")
    _emit(args, payload, "\n".join(lines))


def cmd_thresholds(args):
    ps = _params(args.params)
    table = thresholds.build_threshold_table(ps, model=args.model, delta=args.delta)
    rows = [{"errors": j, "syndrome_weight": w, "raw_threshold": r, "threshold": b}
            for j, (w, r, b) in enumerate(zip(table.weights, table.raw_thresholds, table.thresholds))]
    if args.json:
        print(json.dumps({"params": ps.name, "model": table.model, "delta": table.delta,
                          "rows": rows}, sort_keys=True))
        return
    print(f"# {ps.name} model={table.model} delta={table.delta}")
    print("errors,syndrome_weight,raw_threshold,threshold")
    for r in rows:
        print(f"{r['errors']},{r['syndrome_weight']:.3f},{r['raw_threshold']},{r['threshold']}")


def cmd_dfr(args):
    ps = _params(args.params)
    if args.trials < 1 or args.workers < 1:
        raise UsageError("--trials and --workers must be positive")
    overrides = {}
    if args.delta is not None:
        overrides["delta"] = args.delta
    if args.l_max is not None:
        overrides["l_max"] = args.l_max
    if overrides:
        try:
            ps = params.check(ps.with_overrides(**overrides))
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
    report = dfr.run_trials(ps, args.trials, args.seed.encode(), args.workers,
                            fixed_key=args.fixed_key)
    if args.csv:
        sys.stdout.write(report.to_csv())
    elif args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        hist = ", ".join(f"{k}:{v}" for k, v in sorted(report.iteration_histogram.items()))
        print(f"{ps.name}: {report.failures}/{report.trials} failures; iterations {{{hist}}}")
    if args.max_failures is not None and report.failures > args.max_failures:
        return EXIT_CRYPTO
    return EXIT_OK


# --- plumbing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    default_params = os.environ.get(params.ENV_PARAMS, "cat1-n2")
    parser = argparse.ArgumentParser(prog="ledakem", description="QC-LDPC Niederreiter KEM")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("keygen", cmd_keygen, "generate a keypair")
    p.add_argument("--params", default=default_params)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--seed-file")
    src.add_argument("--system-entropy", action="store_true")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--force", action="store_true")

    p = add("encap", cmd_encap, "encapsulate to a public key")
    p.add_argument("--pub", required=True)
    p.add_argument("--out-ct", required=True)
    p.add_argument("--out-ss", required=True)

    p = add("decap", cmd_decap, "decapsulate a ciphertext")
    p.add_argument("--priv", required=True)
    p.add_argument("--ct", required=True)
    p.add_argument("--out-ss", required=True)
    p.add_argument("--trace-csv", help="write the per-iteration decoder trace here")

    p = add("kat", cmd_kat, "generate known-answer records")
    p.add_argument("--params", default=default_params)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", default="")
    p.add_argument("--out")

    p = add("kat-verify", cmd_kat_verify, "check a known-answer file")
    p.add_argument("file")

    p = add("bench", cmd_bench, "time keygen/encap/decap")
    p.add_argument("--params", default=default_params)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--seed", default="bench")

    p = add("thresholds", cmd_thresholds, "print the flip-threshold table")
    p.add_argument("--params", default=default_params)
    p.add_argument("--model", choices=thresholds.MODELS, default="consistent")
    p.add_argument("--delta", type=float)

    p = add("dfr", cmd_dfr, "Montecarlo decoding-failure run")
    p.add_argument("--params", default=default_params)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", default="")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fixed-key", action="store_true")
    p.add_argument("--max-failures", type=int)
    p.add_argument("--delta", type=float, help="override the flip margin (tuning)")
    p.add_argument("--l-max", type=int, help="override the iteration cap (tuning)")
    p.add_argument("--csv", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (LedaError, ArithmeticError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
