"""Regenerate the shipped regression corpus under src/apwiener/corpus/.

Each instance stores the command, its input, and bounds on the report fields
the corpus runner checks.  Values that are not residuals are pinned with a
small tolerance taken from a fresh run.
"""

from __future__ import annotations

import sys
from pathlib import Path

from apwiener import jsonio as jio
from apwiener.apcore import ApMatrix, ApPolynomial, FrequencyBasis
from apwiener.cli import _lookup, run_command
from apwiener.geometry import Halfspace

OUT = Path(__file__).resolve().parents[1] / "src" / "apwiener" / "corpus"

B1 = FrequencyBasis.standard(1)
S1 = jio.halfspace_to_json(Halfspace.standard(1))


def poly(basis, terms):
    return ApPolynomial(basis, {tuple(c): v for c, v in terms})


def mat(basis, rows):
    return jio.matrix_to_json(ApMatrix([[poly(basis, t) for t in row] for row in rows], basis))


def e(n, c=1.0):
    return ((n,), c)


WORKED_A = mat(B1, [[[e(0), e(1, -0.5)], [e(1, 0.5)]]])
ONE = mat(B1, [[[e(0)]]])

B2 = FrequencyBasis.from_columns([["1", "1/2"]])  # one generator beta = (1, 1/2) in R^2
S2 = jio.halfspace_to_json(Halfspace.standard(2))

INSTANCES = [
    ("analyze_shift", "analyze", {"f": jio.poly_to_json(poly(B1, [e(1)]))},
     {"spectrum": "pin", "wiener_norm": "pin", "bohr_mean": "pin"}),
    ("project_minus", "project", {"f": jio.poly_to_json(poly(B1, [e(-2, 0.5), e(0, 1.0), e(3, 2.0)])),
                                  "mask": {"kind": "minus_S_minus_zero"}, "S": S1},
     {"result.terms": "pin"}),
    ("factorize_scalar_canonical", "factorize", {"G": jio.poly_to_json(poly(B1, [e(0), e(1, -0.5)])), "S": S1},
     {"status": "pin", "factorization.indices": "pin", "factorization.residual": 1e-8,
      "canonical_test.verdict": "pin"}),
    ("factorize_scalar_index", "factorize", {"G": jio.poly_to_json(poly(B1, [e(-1), e(0, -0.5)])), "S": S1},
     {"status": "pin", "factorization.indices": "pin", "factorization.residual": 1e-8,
      "canonical_test.verdict": "pin"}),
    ("factorize_not_invertible", "factorize", {"G": jio.poly_to_json(poly(B1, [e(-1), e(1)])), "S": S1},
     {"exit_code": "pin", "status": "pin"}),
    ("factorize_row", "factorize", {"G": WORKED_A, "S": S1},
     {"status": "pin", "factorization.residual": 1e-7, "verification.passes": "pin",
      "verification.plus_right_inverse_residual": 1e-7}),
    ("factorize_row_index", "factorize", {"G": mat(B1, [[[e(-1), e(0, -0.5)], [e(0)]]]), "S": S1},
     {"status": "pin", "factorization.indices": "pin", "factorization.residual": 1e-7}),
    ("factorize_rank2", "factorize",
     {"G": jio.poly_to_json(poly(FrequencyBasis.standard(2), [((0, 0), 1.0), ((1, 0), 0.2), ((0, 1), 0.3)])),
      "S": S2},
     {"exit_code": "pin", "status": "pin"}),
    ("augment_row", "augment", {"G": WORKED_A, "S": S1},
     {"factorization.residual": 1e-7, "factorization.certificates.plus_det_min_modulus": "pin"}),
    ("toeplitz_shift", "toeplitz", {"F": jio.poly_to_json(poly(B1, [e(1)])), "S": S1, "cutoff": 2},
     {"index_set": "pin", "matrix.re": "pin"}),
    ("gram_worked_gamma1", "gram", {"A": WORKED_A, "B": ONE, "gamma": 1.0, "S": S1, "cutoff": 32},
     {"passes": "pin", "margin": "pin"}),
    ("gram_worked_gamma3", "gram", {"A": WORKED_A, "B": ONE, "gamma": 3.0, "S": S1, "cutoff": 32},
     {"passes": "pin", "margin": "pin"}),
    ("corona_worked_gamma3", "corona", {"A": WORKED_A, "B": ONE, "gamma": 3.0, "S": S1, "cutoff": 32,
                                        "tolerances": {"tail_tol": 1e-12}},
     {"solution.residuals.AF0_residual": 1e-7, "solution.residuals.theta_isometry": 1e-8,
      "solution.residuals.F0_sup_norm": ("max", 3.0 + 1e-6), "solution.residuals.gram_margin": "pin",
      "solution.J0": "pin"}),
    ("corona_worked_gamma1", "corona", {"A": WORKED_A, "B": ONE, "gamma": 1.0, "S": S1, "cutoff": 32},
     {"exit_code": "pin", "error.class": "pin"}),
    ("corona_unit_row", "corona", {"A": mat(B1, [[[e(0)], []]]), "B": ONE, "gamma": 2.0, "S": S1, "cutoff": 16},
     {"solution.residuals.AF0_residual": 1e-8, "solution.residuals.theta_isometry": 1e-8,
      "solution.residuals.F0_sup_norm": ("max", 2.0 + 1e-6)}),
    ("corona_plane_generator", "corona",
     {"A": mat(B2, [[[((0,), 1.0), ((1,), -0.3)], [((2,), 0.4)], [((0,), 0.2)]]]),
      "B": mat(B2, [[[((0,), 1.0), ((1,), 0.2)]]]), "gamma": 4.0, "S": S2, "cutoff": 32},
     {"solution.residuals.AF0_residual": 1e-7, "solution.residuals.theta_isometry": 1e-8,
      "solution.residuals.F0_sup_norm": ("max", 4.0 + 1e-6), "solution.J0": "pin"}),
    ("parametrize_worked", "parametrize",
     {"A": WORKED_A, "B": ONE, "gamma": 3.0, "S": S1, "cutoff": 32, "G": mat(B1, [[[e(0, 0.5 - 0.25j)]]])},
     {"certificates.AF_residual": 1e-6, "certificates.F_sup_norm": ("max", 3.0 + 1e-4),
      "certificates.round_trip": 1e-6}),
]


def expectation(report, code, key, rule):
    actual = code if key == "exit_code" else _lookup(report, key)
    if rule == "pin":
        if isinstance(actual, float):
            return {"value": actual, "tol": 1e-9 * max(1.0, abs(actual))}
        return {"equals": actual}
    if isinstance(rule, tuple):
        return {rule[0]: rule[1]}
    return {"max": rule}


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    for i, (name, command, inp, rules) in enumerate(INSTANCES):
        code, report = run_command(command, jio.document(**inp))
        expected = {k: expectation(report, code, k, r) for k, r in rules.items()}
        inst = jio.document(name=name, command=command, input=inp, expected=expected)
        (OUT / f"{i:02d}_{name}.json").write_text(jio.dumps(inst))
        print(f"{name}: exit {code}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
