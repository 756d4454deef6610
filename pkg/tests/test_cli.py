import json

import pytest

from ledakem import dfr, fileformat, keygen, params
from ledakem.cli import EXIT_CRYPTO, EXIT_FORMAT, EXIT_USAGE, main
from ledakem.errors import FormatError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def keys(tmp_path, capsys):
    seed = tmp_path / "seed"
    seed.write_bytes(bytes(range(24)))
    prefix = str(tmp_path / "k")
    assert run(capsys, "keygen", "--params", "cat1-n2", "--seed-file", str(seed),
               "--out-prefix", prefix)[0] == 0
    return tmp_path, prefix


def test_keygen_files(keys):
    tmp, prefix = keys
    sk = (tmp / "k.sk").read_bytes()
    pk = (tmp / "k.pk").read_bytes()
    assert len(sk) == fileformat.HEADER_SIZE + 24
    assert len(pk) == fileformat.HEADER_SIZE + 3480
    assert sk[:4] == b"LKsk" and pk[:4] == b"LKpk"


def test_keygen_deterministic_and_no_overwrite(keys, capsys, tmp_path):
    tmp, prefix = keys
    first = (tmp / "k.pk").read_bytes()
    code, _, err = run(capsys, "keygen", "--seed-file", str(tmp / "seed"), "--out-prefix", prefix)
    assert code == EXIT_USAGE and "--force" in err
    assert run(capsys, "keygen", "--seed-file", str(tmp / "seed"), "--out-prefix", prefix,
               "--force")[0] == 0
    assert (tmp / "k.pk").read_bytes() == first


def test_bad_usage(capsys, tmp_path):
    assert run(capsys, "keygen", "--params", "cat9-n9", "--system-entropy",
               "--out-prefix", str(tmp_path / "z"))[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "keygen", "--out-prefix", "x")[0] == EXIT_USAGE
    (tmp_path / "short").write_bytes(b"abc")
    assert run(capsys, "keygen", "--seed-file", str(tmp_path / "short"),
               "--out-prefix", str(tmp_path / "z"))[0] == EXIT_USAGE


def test_encap_decap_roundtrip(keys, capsys):
    tmp, prefix = keys
    assert run(capsys, "encap", "--pub", prefix + ".pk", "--out-ct", str(tmp / "ct"),
               "--out-ss", str(tmp / "ss1"))[0] == 0
    code, out, _ = run(capsys, "decap", "--priv", prefix + ".sk", "--ct", str(tmp / "ct"),
                       "--out-ss", str(tmp / "ss2"), "--trace-csv", str(tmp / "trace.csv"), "--json")
    assert code == 0 and json.loads(out)["params"] == "cat1-n2"
    assert (tmp / "ss1").read_bytes() == (tmp / "ss2").read_bytes()
    assert (tmp / "trace.csv").read_text().startswith("iteration,")
    assert (tmp / "ct").stat().st_size == fileformat.HEADER_SIZE + 3480


def test_truncated_and_mismatched_ciphertext(keys, capsys):
    tmp, prefix = keys
    run(capsys, "encap", "--pub", prefix + ".pk", "--out-ct", str(tmp / "ct"), "--out-ss", str(tmp / "ss"))
    data = (tmp / "ct").read_bytes()
    (tmp / "short").write_bytes(data[:-5])
    code, _, err = run(capsys, "decap", "--priv", prefix + ".sk", "--ct", str(tmp / "short"),
                       "--out-ss", str(tmp / "o"))
    assert code == EXIT_FORMAT
    # same ciphertext relabelled as category 3
    relabelled = data[:5] + bytes([3]) + data[6:]
    (tmp / "other").write_bytes(relabelled)
    code, _, err = run(capsys, "decap", "--priv", prefix + ".sk", "--ct", str(tmp / "other"),
                       "--out-ss", str(tmp / "o"))
    assert code == EXIT_FORMAT
    # a cat1-n3 ciphertext against the cat1-n2 key is refused as a mismatch
    ps3 = params.get("cat1-n3")
    (tmp / "n3").write_bytes(fileformat.header_for("ciphertext", ps3).to_bytes()
                             + bytes(fileformat.ciphertext_size(ps3)))
    code, _, err = run(capsys, "decap", "--priv", prefix + ".sk", "--ct", str(tmp / "n3"),
                       "--out-ss", str(tmp / "o"))
    assert code == EXIT_FORMAT and "cat1-n3" in err
    assert not (tmp / "o").exists()


def test_no_private_material_printed(keys, capsys):
    tmp, prefix = keys
    seed_hex = bytes(range(24)).hex()
    code, out, err = run(capsys, "keygen", "--seed-file", str(tmp / "seed"), "--out-prefix",
                         prefix, "--force", "--json")
    assert seed_hex not in out + err and seed_hex.upper() not in out + err
    assert json.loads(out)["public_bytes"] == 3480


def test_kat_generate_verify_and_corrupt(tmp_path, capsys):
    kat = tmp_path / "kat.rsp"
    assert run(capsys, "kat", "--params", "cat1-n2", "--count", "3", "--seed", "s",
               "--out", str(kat))[0] == 0
    ps, records = fileformat.parse_kat(kat.read_text())
    assert ps.name == "cat1-n2" and [r.count for r in records] == [0, 1, 2]
    code, out, _ = run(capsys, "kat-verify", str(kat), "--json")
    assert code == 0 and json.loads(out) == {"params": "cat1-n2", "records": 3, "mismatches": []}
    text = kat.read_text()
    i = text.index("ss = ") + 5
    flipped = "0" if text[i] != "0" else "1"
    kat.write_text(text[:i] + flipped + text[i + 1:])
    code, out, _ = run(capsys, "kat-verify", str(kat))
    assert code == EXIT_CRYPTO and "2/3" in out
    kat.write_text(text.replace("ct = ", "ct = zz", 1))
    assert run(capsys, "kat-verify", str(kat))[0] == EXIT_FORMAT


def test_kat_stdout_deterministic(capsys):
    _, a, _ = run(capsys, "kat", "--params", "cat1-n3", "--count", "1")
    _, b, _ = run(capsys, "kat", "--params", "cat1-n3", "--count", "1")
    assert a == b and a.startswith("# cat1-n3")


def test_thresholds_json_roundtrip(capsys, cat1n2):
    code, out, _ = run(capsys, "thresholds", "--params", "cat1-n2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["model"] == "consistent" and len(doc["rows"]) == cat1n2.t + 1
    b = [r["threshold"] for r in doc["rows"]]
    raw = [r["raw_threshold"] for r in doc["rows"]]
    j_min = max(j for j, x in enumerate(raw) if x == min(raw))
    assert all(x == min(raw) for x in b[:j_min + 1])
    assert b[j_min:] == sorted(b[j_min:])
    code, out, _ = run(capsys, "thresholds", "--params", "cat1-n2", "--model", "printed")
    assert code == 0 and out.startswith("# cat1-n2 model=printed")


def test_bench_json(capsys, monkeypatch):
    monkeypatch.setenv(params.ENV_PARAMS, "cat1-n3")
    code, out, _ = run(capsys, "bench", "--iterations", "2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["params"] == "cat1-n3"
    assert set(doc["ms"]) == {"keygen", "encap", "decap"}
    _, again, _ = run(capsys, "bench", "--iterations", "2", "--json")
    assert json.loads(again)["decoder_iterations"] == doc["decoder_iterations"]
    _, text, _ = run(capsys, "bench", "--iterations", "2")
    assert "±" in text


def test_dfr_command(capsys):
    code, out, _ = run(capsys, "dfr", "--params", "cat1-n3", "--trials", "3", "--json",
                       "--max-failures", "0")
    doc = json.loads(out)
    assert code == 0 and doc["trials"] == 3 and doc["failures"] == 0
    assert json.loads(json.dumps(dfr.TrialReport.from_dict(doc).to_dict())) == doc
    code, out, _ = run(capsys, "dfr", "--params", "cat1-n3", "--trials", "2", "--csv")
    assert out.startswith("params,trials")


def test_fileformat_errors(cat1n2):
    sk_file = fileformat.dump_private(cat1n2, bytes(24))
    assert fileformat.load_private(sk_file) == (cat1n2, bytes(24))
    with pytest.raises(FormatError):
        fileformat.load_private(sk_file[:3])
    with pytest.raises(FormatError):
        fileformat.load_public(sk_file)
    with pytest.raises(FormatError):
        fileformat.load_private(sk_file[:4] + b"\x09" + sk_file[5:])
    with pytest.raises(FormatError):
        fileformat.load_private(sk_file[:5] + b"\x02" + sk_file[6:])
    _, pk = keygen.gen_keypair(cat1n2, bytes(24))
    blob = bytearray(fileformat.dump_public(pk))
    blob[-1] |= 0x80
    with pytest.raises(FormatError):
        fileformat.load_public(bytes(blob))
    with pytest.raises(FormatError):
        fileformat.parse_kat("count = 1\n")
