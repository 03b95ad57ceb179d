"""End-to-end runs of the cmv command line, in process."""

import csv
import io
import json

import numpy as np
import pytest

from cmvkit.cli import main
from cmvkit.coefficients import load_sequence
from cmvkit.laurent import PLUS, window_family


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def mat_json(a):
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return [[[z.real, z.imag] for z in row] for row in a]


def from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def free_sequence_file(tmp_path, n=8):
    alphas = {str(k): mat_json([[0.0]]) for k in range(n + 1)}
    alphas["0"] = mat_json([[1.0]])
    alphas[str(n)] = mat_json([[1.0]])
    return write_json(tmp_path / "free.json",
                      {"m": 1, "k_min": 0, "k_max": n, "alphas": alphas})


def test_gen_then_assemble_round_trip(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    code, _, _ = run(capsys, "gen", "--seed", "3", "--m", "2",
                     "--window", "0,16", "--out", seq_file)
    assert code == 0
    seq = load_sequence(seq_file)
    assert seq.m == 2 and (seq.k_min, seq.k_max) == (0, 16)

    code, out, _ = run(capsys, "assemble", "--in", seq_file)
    assert code == 0
    doc = json.loads(out)
    U = from_json(doc["U"])
    n = U.shape[0]
    assert doc["m"] == 2 and doc["offset"] == 0
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) < 1e-12
    V, W = from_json(doc["V"]), from_json(doc["W"])
    np.testing.assert_allclose(V @ W, U, atol=1e-14)


def test_assemble_split_decouples(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "5", "--window", "0,12", "--out", seq_file)
    code, out, _ = run(capsys, "assemble", "--in", seq_file, "--split", "6")
    assert code == 0
    doc = json.loads(out)
    U = from_json(doc["U"])
    cut = 6 - doc["offset"]
    assert np.all(U[:cut, cut:] == 0)
    assert np.all(U[cut:, :cut] == 0)


def test_decouple_minimal_and_bumped(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "7", "--window", "0,12", "--out", seq_file)
    code, out, _ = run(capsys, "decouple", "--in", seq_file, "--k0", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["minimal"] is True
    assert doc["op_rank"] == 1
    assert doc["det_criterion"] < 1e-10
    assert all(r == 1 for r in doc["resolvent_ranks"].values())
    assert len(doc["t"]) == 1 and len(doc["s"]) == 1

    bumped = str(doc["t"][0] + 0.1)
    code, out, _ = run(capsys, "decouple", "--in", seq_file, "--k0", "6",
                       "--s", "0.0", "--t", bumped)
    assert code == 0
    doc = json.loads(out)
    assert doc["minimal"] is False
    assert doc["op_rank"] == 2
    assert doc["det_criterion"] > 0.01


def test_laurent_free_case_monomials(tmp_path, capsys):
    seq_file = free_sequence_file(tmp_path)
    code, out, _ = run(capsys, "laurent", "--in", seq_file, "--k0", "4",
                       "--z", "0.5,0.0", "--range", "2,6")
    assert code == 0
    doc = json.loads(out)
    got = {site["k"]: from_json(site["P"])[0, 0] for site in doc["sites"]}
    z = 0.5
    want = {2: z, 3: 1.0, 4: 1.0, 5: z, 6: 1 / z}
    for k, val in want.items():
        assert got[k] == pytest.approx(val, abs=1e-13)


def test_laurent_matches_library(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "11", "--m", "2", "--window", "0,10",
        "--out", seq_file)
    code, out, _ = run(capsys, "laurent", "--in", seq_file, "--k0", "5",
                       "--z", "0.4,0.3", "--sign", "+")
    assert code == 0
    doc = json.loads(out)
    seq = load_sequence(seq_file)
    fam = window_family(seq, np.eye(2), 0.4 + 0.3j, 5, PLUS)
    for site in doc["sites"]:
        ref = fam.at(site["k"])
        np.testing.assert_allclose(from_json(site["Q"]), ref.Q, atol=1e-13)
        np.testing.assert_allclose(from_json(site["S"]), ref.S, atol=1e-13)


def test_mfun_single_sample_and_sign_filter(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "13", "--window", "0,14", "--out", seq_file)
    code, out, _ = run(capsys, "mfun", "--in", seq_file, "--k0", "7",
                       "--z", "0.0,0.0")
    assert code == 0
    doc = json.loads(out)
    np.testing.assert_allclose(from_json(doc["m_plus"]), [[1.0]], atol=0)
    np.testing.assert_allclose(from_json(doc["m_minus"]), [[-1.0]], atol=0)
    assert doc["caratheodory_plus"] is True
    assert doc["anti_caratheodory_minus"] is True

    code, out, _ = run(capsys, "mfun", "--in", seq_file, "--k0", "7",
                       "--z", "0.3,0.1", "--sign", "+")
    doc = json.loads(out)
    assert "m_plus" in doc and "m_minus" not in doc
    assert "Phi_minus" not in doc


def test_mfun_grid_csv(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "17", "--window", "0,14", "--out", seq_file)
    code, out, _ = run(capsys, "mfun", "--in", seq_file, "--k0", "7",
                       "--grid", "0.5,1.8,4")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    header = rows[0]
    assert header[:2] == ["z_re", "z_im"]
    assert "m_plus_00_re" in header and "Phi_minus_00_im" in header
    assert "schur_plus" in header
    assert len(rows) == 1 + 2 * 4
    flag = header.index("caratheodory_plus")
    assert all(row[flag] == "1" for row in rows[1:])


def test_green_csv_residuals(tmp_path, capsys):
    seq_file = str(tmp_path / "seq.json")
    run(capsys, "gen", "--seed", "19", "--window", "0,16", "--radius", "0.8",
        "--out", seq_file)
    pairs_file = tmp_path / "pairs.csv"
    pairs_file.write_text("k,kp\n8,8\n7,9\n10,6\n")
    for extra in ([], ["--half", "+"]):
        if extra:
            pairs_file.write_text("k,kp\n8,9\n9,8\n10,10\n")
        code, out, _ = run(capsys, "green", "--in", seq_file, "--k0", "8",
                           "--z", "0.4,0.2", "--pairs", str(pairs_file),
                           *extra)
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][-1] == "residual"
        assert len(rows) == 4
        assert all(float(r[-1]) < 1e-9 for r in rows[1:])


def test_analytic_exit_codes(tmp_path, capsys):
    rng = np.random.default_rng(0)
    G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    H = rng.standard_normal((2, 2))
    F = G @ G.conj().T + 1j * (H + H.T)
    good = [{"z": [0.2, 0.1], "F": mat_json(F)}]
    bad = [{"z": [0.2, 0.1], "F": mat_json(-np.eye(2))}]
    good_file = write_json(tmp_path / "good.json", good)
    bad_file = write_json(tmp_path / "bad.json", bad)

    code, out, _ = run(capsys, "analytic", "--check", "caratheodory",
                       "--in", good_file)
    assert code == 0 and json.loads(out)["valid"] is True
    code, out, _ = run(capsys, "analytic", "--check", "caratheodory",
                       "--in", bad_file)
    assert code == 1 and json.loads(out)["valid"] is False

    small = [{"z": [0.2, 0.1], "F": mat_json(0.5 * np.eye(2))}]
    code, _, _ = run(capsys, "analytic", "--check", "schur",
                     "--in", write_json(tmp_path / "s.json", small))
    assert code == 0
    code, _, _ = run(capsys, "analytic", "--check", "schur",
                     "--in", write_json(tmp_path / "s2.json",
                                        [{"z": [0.2, 0.1],
                                          "F": mat_json(2 * np.eye(2))}]))
    assert code == 1


def test_verify_subset_and_formats(capsys):
    code, out, err = run(capsys, "verify", "--suite", "unitarity,analytic",
                         "--seed", "2", "--window", "0,20")
    assert code == 0
    doc = json.loads(out)
    assert all(r["passed"] for r in doc["results"])
    suites = {r["suite"] for r in doc["results"]}
    assert suites == {"unitarity", "analytic"}
    assert "PASS unitarity/" in err

    code, out, _ = run(capsys, "verify", "--suite", "analytic",
                       "--seed", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["suite", "check", "residual", "tol", "passed"]
    assert all(row[-1] == "True" for row in rows[1:])


def test_verify_unknown_suite_is_usage_error(capsys):
    code, _, err = run(capsys, "verify", "--suite", "nonsense")
    assert code == 2
    assert "error:" in err


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    monkeypatch.setenv("CMV_SEED", "23")
    run(capsys, "gen", "--window", "0,8", "--out", a)
    monkeypatch.delenv("CMV_SEED")
    run(capsys, "gen", "--seed", "23", "--window", "0,8", "--out", b)
    sa, sb = load_sequence(a), load_sequence(b)
    for k in range(0, 9):
        np.testing.assert_allclose(sa.alpha(k), sb.alpha(k), atol=0)


def test_missing_input_file_is_error(capsys):
    code, _, err = run(capsys, "mfun", "--in", "/nonexistent.json",
                       "--k0", "3", "--z", "0.1,0.1")
    assert code == 2
    assert "error:" in err
