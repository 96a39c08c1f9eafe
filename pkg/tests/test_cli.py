import csv
import io
import json

import numpy as np
import pytest

from entsub.cli import EXIT_INVALID, EXIT_OK, EXIT_SEARCH_FAILURE, run
from entsub.jsonio import (
    OutputDocument,
    certificate_from_dict,
    certificate_to_dict,
    decode_complex,
    encode_complex,
    load_json,
    product_from_dict,
    product_to_dict,
    subspace_from_dict,
    subspace_to_dict,
)
from entsub.discrimination import chefles_certificate, StateSet
from entsub.sampling import RngStream, random_product_state, random_states, random_subspace
from entsub.search import SearchConfig


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def payload(out):
    return json.loads(out)["payload"]


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_bounds(capsys):
    code, out, _ = call(capsys, "bounds", "--dims", "2,2,2", "--copies", "1,2", "--n", "8")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["command"] == "bounds"
    p = doc["payload"]
    assert p["s_max"] == 4 and p["segre_degree"] == 6
    assert p["locc_threshold"] == {"1": 4, "2": 7} and p["min_copies"] == {"8": 3}


def test_verdict(capsys):
    code, out, _ = call(capsys, "verdict", "--dims", "2,2", "--n", "4", "--copies", "1")
    assert code == EXIT_OK
    assert payload(out)["verdict"] == "expected-indistinguishable"


def test_config_echo_is_complete(capsys):
    code, out, _ = call(capsys, "sample-subspace", "--dims", "2,3", "--s", "2")
    cfg = json.loads(out)["config"]
    assert cfg == {"command": "sample-subspace", "dims": [2, 3], "s": 2, "seed": 20070601}


@pytest.mark.parametrize("argv", [
    ["sample-state", "--dims", "2,3"],
    ["sample-state", "--dims", "2,3", "--product"],
    ["sample-state", "--dims", "2,2", "--n", "3"],
    ["sample-subspace", "--dims", "2,2,2", "--s", "4", "--seed", "9"],
])
def test_same_argv_same_payload(capsys, argv):
    a = json.loads(call(capsys, *argv)[1])
    b = json.loads(call(capsys, *argv)[1])
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a) == json.dumps(b)


def test_sample_state_is_unit_and_reproducible(capsys):
    code, out, _ = call(capsys, "sample-state", "--dims", "2,3", "--seed", "5")
    amps = decode_complex(payload(out)["amps"])
    assert code == EXIT_OK and abs(np.linalg.norm(amps) - 1) < 1e-12
    code, out, _ = call(capsys, "sample-state", "--dims", "2,3", "--seed", "6")
    assert not np.allclose(decode_complex(payload(out)["amps"]), amps)


def test_find_and_count_product(capsys, tmp_path):
    sub = tmp_path / "s.json"
    assert call(capsys, "sample-subspace", "--dims", "2,2", "--s", "2", "--out", sub)[0] == EXIT_OK
    code, out, _ = call(capsys, "find-product", sub, "--restarts", "40")
    assert code == EXIT_OK and payload(out)["verdict"] == "found"
    code, out, _ = call(capsys, "count-product", sub)
    p = payload(out)
    assert code == EXIT_OK and p["count"] == 2 and p["formula_expected"] == 2 and p["saturated"]
    a = product_from_dict(p["representatives"][0])
    assert a.space.dims == (2, 2)


def test_find_product_absent(capsys, tmp_path):
    sub = write(tmp_path, "s.json", subspace_to_dict(random_subspace((2, 3), 2, RngStream(3, 0))))
    code, out, _ = call(capsys, "find-product", sub, "--restarts", "40")
    p = payload(out)
    assert code == EXIT_OK and p["verdict"] == "not-found" and p["heuristic_absence"]
    assert p["best_state"] is None and p["best_candidate"] is not None


def test_count_unsupported(capsys, tmp_path):
    sub = write(tmp_path, "s.json", subspace_to_dict(random_subspace((2, 2), 3, RngStream(3, 0))))
    code, _, err = call(capsys, "count-product", sub)
    assert code == EXIT_INVALID
    assert json.loads(err)["formula_expected"] == "infinite"


def test_find_low_rank(capsys, tmp_path):
    sub = write(tmp_path, "s.json", subspace_to_dict(random_subspace((3, 3), 2, RngStream(4, 0))))
    code, out, _ = call(capsys, "find-low-rank", sub, "--rank", "2", "--restarts", "40")
    assert code == EXIT_OK and payload(out)["verdict"] == "found"
    code, _, err = call(capsys, "find-low-rank", sub, "--rank", "3")
    assert code == EXIT_INVALID and json.loads(err)["error"] == "invalid-input"


def test_certify_and_simulate(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, _, _ = call(capsys, "certify", "--dims", "2,2", "--n", "3", "--out", cert)
    assert code == EXIT_OK
    doc = load_json(cert)
    assert doc["valid"] and doc["expected"] == "expected-distinguishable"
    code, out, _ = call(capsys, "simulate", "--cert", cert, "--trials", "20000")
    p = payload(out)
    assert code == EXIT_OK and p["misidentified"] == 0 and p["within_3sigma"]
    assert p["completeness_error"] < 1e-10 and p["min_eigenvalue"] >= -1e-10
    code, _, err = call(capsys, "simulate", "--cert", cert, "--trials", "10", "--weights", "5,5,5")
    assert code == EXIT_INVALID and json.loads(err)["error"] == "IndefiniteRemainderError"


def test_certify_from_states_file(capsys, tmp_path):
    states = random_states((2, 2), 3, RngStream(5, 0), product=True)
    f = write(tmp_path, "psi.json", {"dims": [2, 2], "states": [encode_complex(x.amps) for x in states]})
    code, out, _ = call(capsys, "certify", "--states", f, "--copies", "2")
    p = payload(out)
    assert code == EXIT_OK and p["valid"] and p["copies"] == 2 and p["dims"] == [2, 2, 2, 2]


def test_certify_failure_exit_code(capsys):
    code, out, err = call(capsys, "certify", "--dims", "2,2", "--n", "4")
    assert code == EXIT_SEARCH_FAILURE and out == ""
    e = json.loads(err)
    assert e["error"] == "search-failure" and set(e["complement_schmidt_ranks"].values()) == {2}
    assert e["heuristic"] is False


@pytest.mark.parametrize("argv", [
    ["bounds"],
    ["bounds", "--dims", "1,2"],
    ["bounds", "--dims", "a,b"],
    ["nonsense"],
    ["verdict", "--dims", "2,2", "--n", "1"],
    ["sample-subspace", "--dims", "2,2", "--s", "5"],
    ["certify"],
    ["find-product", "/nonexistent.json"],
])
def test_invalid_input_exit_code(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == EXIT_INVALID and out == ""
    assert "error" in json.loads(err)


def test_dependent_states_exit_code(capsys, tmp_path):
    f = write(tmp_path, "psi.json", {"dims": [2, 2], "states": [
        encode_complex([1, 0, 0, 0]), encode_complex([0, 1, 0, 0]),
        encode_complex(np.array([1, 1, 0, 0]) / np.sqrt(2))]})
    assert call(capsys, "certify", "--states", f)[0] == EXIT_INVALID


def _read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_threshold_sweep_flips(capsys, tmp_path):
    spec = write(tmp_path, "spec.json", {"kind": "threshold", "seed": 1, "instances": 5,
                                         "grid": {"dims": [[2, 2]], "n": [2, 3, 4, 5, 6]}})
    code, out, _ = call(capsys, "sweep", spec)
    rows = _read_csv(out)
    assert code == EXIT_OK and [int(r["n"]) for r in rows] == [2, 3, 4, 5, 6]
    valid = [int(r["valid"]) for r in rows]
    assert valid[:2] == [5, 5] and valid[2:] == [0, 0, 0]
    assert all(float(r["concordant"]) == 1.0 for r in rows)
    assert [int(r["dependent"]) for r in rows] == [0, 0, 0, 5, 5]


def test_count_sweep_and_json_agree(capsys, tmp_path):
    spec = write(tmp_path, "spec.json", {"kind": "count", "seed": 2, "instances": 3,
                                         "grid": {"dims": [[2, 2]], "s": [1, 2, 3]}})
    code, out, _ = call(capsys, "sweep", spec)
    rows = _read_csv(out)
    assert code == EXIT_OK and [r["count"] for r in rows] == ["0", "2", "infinite"]
    code, out, _ = call(capsys, "sweep", spec, "--format", "json")
    js = payload(out)
    assert [str(r["count"]) for r in js] == [r["count"] for r in rows]
    for a, b in zip(rows, js):
        assert a == {k: str(v) for k, v in b.items()}


def test_empty_grid_is_header_only(capsys, tmp_path):
    spec = write(tmp_path, "spec.json", {"kind": "threshold", "grid": {"dims": [], "n": []}})
    code, out, _ = call(capsys, "sweep", spec)
    assert code == EXIT_OK and out.strip().split(",")[0] == "cell" and len(out.strip().splitlines()) == 1


@pytest.mark.parametrize("spec", [[1, 2], {"kind": "weird"}, {"grid": {"dims": [[1]]}},
                                  {"grid": {"dims": [[2, 2]], "n": ["x"]}}, {"instances": 0}])
def test_malformed_sweep(capsys, tmp_path, spec):
    assert call(capsys, "sweep", write(tmp_path, "spec.json", spec))[0] == EXIT_INVALID


def test_sweep_resume(capsys, tmp_path):
    spec = {"kind": "threshold", "seed": 3, "instances": 2, "grid": {"dims": [[2, 2]], "n": [2, 3, 4]}}
    full = tmp_path / "full.csv"
    assert call(capsys, "sweep", write(tmp_path, "a.json", spec), "--out", full)[0] == EXIT_OK
    part = tmp_path / "part.csv"
    lines = full.read_text().splitlines(keepends=True)
    part.write_text("".join(lines[:2]))          # header plus the first cell
    assert call(capsys, "sweep", write(tmp_path, "a.json", spec), "--out", part)[0] == EXIT_OK
    assert part.read_text() == full.read_text()


class TestSerialization:
    def test_subspace_round_trip(self, rng):
        S = random_subspace((2, 3), 3, rng)
        T = subspace_from_dict(json.loads(json.dumps(subspace_to_dict(S))))
        assert np.array_equal(S.basis, T.basis)

    def test_spanning_set_is_orthonormalized(self):
        T = subspace_from_dict({"dims": [2, 2], "basis": encode_complex(
            np.array([[1, 1], [0, 1], [0, 0], [0, 0]], dtype=complex))})
        assert np.allclose(T.basis.conj().T @ T.basis, np.eye(2))

    def test_product_round_trip(self, rng):
        p = random_product_state((2, 3, 2), rng)
        q = product_from_dict(json.loads(json.dumps(product_to_dict(p))))
        assert np.array_equal(p.amps, q.amps)

    def test_certificate_round_trip(self):
        psi = StateSet.of(random_states((2, 2), 3, RngStream(6, 0)))
        cert = chefles_certificate(psi, SearchConfig(), RngStream(7, 0))
        back = certificate_from_dict(json.loads(json.dumps(certificate_to_dict(cert))))
        assert back.valid and np.array_equal(back.overlaps, cert.overlaps)

    def test_complex_encoding(self):
        z = np.array([1 + 2j, -0.5j])
        assert np.array_equal(decode_complex(encode_complex(z)), z)
        with pytest.raises(ValueError):
            decode_complex([[1.0, float("nan")]])
        with pytest.raises(ValueError):
            decode_complex([1.0, 2.0, 3.0])

    def test_document_round_trip(self):
        doc = OutputDocument("bounds", {"dims": [2, 2]}, {"s_max": 1}, {"seconds": 0.1})
        back = OutputDocument.from_json(doc.to_json())
        assert back == doc
        with pytest.raises(ValueError):
            OutputDocument("x", {}, {"v": float("inf")}).to_json()
