import json

import numpy as np
import pytest

from apwiener import jsonio as jio
from apwiener.apcore import ApMatrix, ApPolynomial, FrequencyBasis
from apwiener.cli import main, run_command, run_corpus
from apwiener.factorization import factorize
from apwiener.geometry import Halfspace, SpectralMask

from conftest import mono, row


def roundtrip(to, frm, obj, *extra):
    text = jio.dumps(jio.document(x=to(obj)))
    back = frm(jio.loads(text)["x"], *extra)
    assert jio.dumps(jio.document(x=to(back))) == text
    return back


def test_poly_and_matrix_roundtrip(b1):
    b = FrequencyBasis.from_rows([["1/1", "0/1"], ["1/3", "2/7"]])
    f = ApPolynomial(b, {(1, 0): 0.1 + 0.2j, (-2, 3): 1 / 3, (0, 0): -1e-300 + 5.0})
    assert roundtrip(jio.poly_to_json, jio.poly_from_json, f) == f
    M = ApMatrix([[f, f * f], [ApPolynomial.zero(b), f.conj()]], b)
    assert roundtrip(jio.matrix_to_json, jio.matrix_from_json, M) == M


def test_halfspace_mask_factorization_roundtrip(b1, s1):
    S = Halfspace.from_rows([["0", "1"], ["-1", "1/2"]])
    assert roundtrip(jio.halfspace_to_json, jio.halfspace_from_json, S) == S
    for kind in ("S", "S_minus_zero", "minus_S", "minus_S_minus_zero", "zero_only"):
        mk = roundtrip(jio.mask_to_json, jio.mask_from_json, SpectralMask(kind, S), S)
        assert mk.kind == kind
    G = row(b1, ApPolynomial.constant(b1, 1.0) - mono(b1, 1, 0.5), mono(b1, -1, 0.25))
    fact = factorize(G, s1).factorization
    back = roundtrip(jio.factorization_to_json, jio.factorization_from_json, fact)
    assert back.g_plus == fact.g_plus and back.indices == fact.indices


def test_malformed_json_reports_location(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"apw_schema": 1,\n  "f": [1, 2,,]}')
    assert main(["analyze", "--input", str(p)]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["error"]["class"] == "ParseError" and "line 2" in out["error"]["message"]


def test_missing_schema_and_unknown_fields():
    code, rep = run_command("analyze", {"apw_schema": 1, "f": {"basis": [["1"]], "terms": []}, "extra": 1})
    assert code == 2 and "extra" in rep["error"]["message"]
    with pytest.raises(Exception):
        jio.loads('{"f": 1}')


def _poly_doc(terms):
    return {"basis": [["1/1"]], "terms": [{"coord": [c], "re": re, "im": im} for c, re, im in terms]}


def test_analyze_shift():
    code, rep = run_command("analyze", jio.document(f=_poly_doc([(1, 1.0, 0.0)])))
    assert code == 0
    assert rep["spectrum"] == [[1]] and rep["wiener_norm"] == 1.0 and rep["bohr_mean"] == 0.0
    assert abs(rep["sup_norm_estimate"] - 1.0) < 1e-12


def test_factorize_scalar_via_cli():
    doc = jio.document(G=_poly_doc([(0, 1.0, 0.0), (1, -0.5, 0.0)]), S={"Z": [["1"]]})
    code, rep = run_command("factorize", doc)
    assert code == 0 and rep["status"] == "canonical"
    assert rep["factorization"]["indices"] == [[0]]
    assert rep["verification"]["passes"]
    assert rep["canonical_test"]["verdict"] == "likely_canonical"


def test_factorize_not_invertible_exit_code():
    doc = jio.document(G=_poly_doc([(0, 1.0, 0.0), (1, -1.0, 0.0)]), S={"Z": [["1"]]})
    code, rep = run_command("factorize", doc)
    assert code == 5 and rep["status"] == "not_invertible"


def test_flags_override_request_values():
    doc = jio.document(F=_poly_doc([(1, 1.0, 0.0)]), S={"Z": [["1"]]}, cutoff=3)
    code, rep = run_command("toeplitz", doc)
    assert len(rep["index_set"]) == 4
    code, rep = run_command("toeplitz", doc, {"cutoff": 5})
    assert len(rep["index_set"]) == 6 and rep["options"]["cutoff"] == 5


def _worked(gamma):
    b1 = FrequencyBasis.standard(1)
    one = ApPolynomial.constant(b1, 1.0)
    A = row(b1, one - mono(b1, 1, 0.5), mono(b1, 1, 0.5))
    return jio.document(A=jio.matrix_to_json(A), B=jio.matrix_to_json(ApMatrix([[one]], b1)),
                        gamma=gamma, S={"Z": [["1"]]})


def test_corona_worked_instance_via_main(tmp_path, capsys):
    p = tmp_path / "in.json"
    p.write_text(jio.dumps(_worked(3.0)))
    out = tmp_path / "out.json"
    assert main(["--command", "corona", "--input", str(p), "--output", str(out)]) == 0
    rep = jio.loads(out.read_text())
    res = rep["solution"]["residuals"]
    assert res["AF0_residual"] <= 1e-7 and res["F0_sup_norm"] <= 3 + 1e-6
    assert rep["solution"]["J0"] == [1, -1]
    p.write_text(jio.dumps(_worked(1.0)))
    assert main(["corona", "--input", str(p)]) == 6
    err = json.loads(capsys.readouterr().out)["error"]
    assert err["class"] == "InfeasibleError" and err["message"].startswith("[gram]")


def test_parametrize_via_cli():
    doc = _worked(3.0)
    b1 = FrequencyBasis.standard(1)
    doc["G"] = jio.matrix_to_json(ApMatrix([[ApPolynomial.constant(b1, 0.5 - 0.25j)]], b1))
    code, rep = run_command("parametrize", doc)
    assert code == 0 and rep["certificates"]["round_trip"] <= 1e-6
    doc["G"] = jio.matrix_to_json(ApMatrix([[ApPolynomial.constant(b1, 2.0)]], b1))
    assert run_command("parametrize", doc)[0] == 3


def test_corpus_passes_and_is_deterministic(tmp_path):
    code, rep = run_corpus()
    assert code == 0 and rep["failed"] == 0 and rep["passed"] >= 15
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["corpus", "--output", str(a)]) == 0
    assert main(["corpus", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dense_and_complex_helpers():
    assert jio.complex_to_json(2.0) == 2.0
    assert jio.complex_to_json(1j) == {"re": 0.0, "im": 1.0}
    assert jio.dense_to_json(np.eye(2))["im"] == [[0.0, 0.0], [0.0, 0.0]]
    assert jio.finite(float("inf")) == "inf"
