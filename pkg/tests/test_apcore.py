import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apwiener.apcore import (
    ApMatrix,
    ApPolynomial,
    FrequencyBasis,
    bohr_inner,
    bohr_mean,
    conj,
    evaluate,
    join_bases,
    make_polynomial,
    mat_conj_transpose,
    mat_distance,
    mat_mul,
    rebase,
    spectrum,
    sup_norm_bound,
    sup_norm_estimate,
    wiener_norm,
)
from apwiener.errors import BasisError, DimensionError

from conftest import mono, random_poly


def test_make_polynomial_merges_and_thresholds(b1):
    f = make_polynomial(b1, [((1,), 1), ((1,), 2)])
    assert f.terms == {(1,): 3}
    assert make_polynomial(b1, []).is_zero()
    g = make_polynomial(b1, [((0,), 1), ((2,), 1e-18)])
    assert spectrum(g) == {(0,)}
    with pytest.raises(DimensionError):
        make_polynomial(b1, [((1, 2), 1.0)])


def test_ring_examples(b1):
    assert mono(b1, 2) * mono(b1, 3) == mono(b1, 5)
    assert conj(mono(b1, 1, 1j)) == mono(b1, -1, -1j)
    a = 0.3
    one = ApPolynomial.constant(b1, 1.0)
    assert (one - mono(b1, 1, a)) * (one + mono(b1, 1, a)) == one - mono(b1, 2, a * a)


def test_basis_mismatch_is_an_error(b1):
    other = FrequencyBasis.from_rows([["1/2"]])
    with pytest.raises(BasisError):
        mono(b1, 1) + ApPolynomial.monomial(other, (1,))


def test_rank_zero_and_dependent_bases():
    with pytest.raises(BasisError):
        FrequencyBasis.from_columns([["1", "2"], ["2", "4"]])
    b0 = FrequencyBasis.from_rows([[]])
    assert ApPolynomial.constant(b0, 2.0).coeff(()) == 2.0


def test_eval_examples(b1):
    assert evaluate(mono(b1, 5), [0.0]) == 1
    f = ApPolynomial.constant(b1, 1.0) - mono(b1, 1)
    assert abs(evaluate(f, [math.pi]) - 2) < 1e-15
    with pytest.raises(DimensionError):
        evaluate(f, [0.0, 1.0])


def test_eval_matches_extended_precision():
    rng = np.random.default_rng(3)
    basis = FrequencyBasis.from_columns([["1", "1/3"], ["-2/5", "7/2"]])
    mpmath.mp.dps = 40
    for _ in range(20):
        f = random_poly(rng, basis, support=8, spread=6)
        x = rng.uniform(-10, 10, size=2)
        ref = mpmath.mpc(0)
        for c, v in f.items():
            lam = basis.embed(c)
            phase = sum(mpmath.mpf(q.numerator) / q.denominator * mpmath.mpf(float(xi)) for q, xi in zip(lam, x))
            ref += mpmath.mpc(v.real, v.imag) * mpmath.expj(phase)
        assert abs(evaluate(f, x) - complex(ref)) <= 1e-12 * max(1.0, wiener_norm(f))


def test_bohr_mean_and_spectrum(b1):
    assert bohr_mean(mono(b1, 0)) == 1
    assert bohr_mean(mono(b1, 3)) == 0
    assert bohr_mean(ApPolynomial.constant(b1, 3.0) + mono(b1, 1, 2.0)) == 3
    assert spectrum(ApPolynomial.zero(b1)) == frozenset()
    assert spectrum(ApPolynomial.constant(b1, 1.0) + mono(b1, 1)) == {(0,), (1,)}


def test_norms(b1):
    f = ApPolynomial.constant(b1, 1.0) - mono(b1, 1, 0.5)
    assert wiener_norm(f) == 1.5
    assert abs(sup_norm_estimate(mono(b1, 7), 64) - 1) < 1e-12
    g = ApPolynomial.constant(b1, 1.0) + mono(b1, 1)
    assert abs(sup_norm_estimate(g, 10_000) - 2) < 1e-6
    assert sup_norm_bound(g) == 2


def test_bohr_inner_properties(b1):
    assert bohr_inner(mono(b1, 2), mono(b1, 2)) == 1
    assert bohr_inner(mono(b1, 2), mono(b1, 3)) == 0
    rng = np.random.default_rng(5)
    for _ in range(10):
        f, g = random_poly(rng, b1), random_poly(rng, b1)
        assert bohr_inner(f, g) == bohr_inner(g, f).conjugate()
        nf = bohr_inner(f, f)
        assert nf.imag == 0 and 0 <= nf.real <= wiener_norm(f) ** 2


def test_matrix_identities(b1):
    rng = np.random.default_rng(11)
    A = ApMatrix([[random_poly(rng, b1) for _ in range(2)] for _ in range(2)], b1)
    B = ApMatrix([[random_poly(rng, b1) for _ in range(2)] for _ in range(2)], b1)
    assert mat_mul(ApMatrix.identity(b1, 2), A) == A
    assert mat_conj_transpose(mat_conj_transpose(A)) == A
    lhs = mat_conj_transpose(mat_mul(A, B))
    rhs = mat_mul(mat_conj_transpose(B), mat_conj_transpose(A))
    assert mat_distance(lhs, rhs) == 0.0


def test_rebase_and_join():
    b_half = FrequencyBasis.from_rows([["1/2"]])
    b_third = FrequencyBasis.from_rows([["1/3"]])
    joined = join_bases(b_half, b_third)
    f = ApPolynomial.monomial(b_half, (1,), 2.0)
    g = rebase(f, joined)
    assert abs(evaluate(g, [1.3]) - evaluate(f, [1.3])) < 1e-14


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
terms = st.dictionaries(st.integers(-5, 5).map(lambda n: (n,)), coeff, max_size=6)


@settings(max_examples=60, deadline=None)
@given(terms, terms, st.floats(-20, 20))
def test_hypothesis_ring_laws(t1, t2, x):
    b = FrequencyBasis.standard(1)
    f, g = ApPolynomial(b, t1), ApPolynomial(b, t2)
    fg = f * g
    assert wiener_norm(fg) <= wiener_norm(f) * wiener_norm(g) * (1 + 1e-12) + 1e-300
    assert spectrum(fg) <= {(a[0] + c[0],) for a in spectrum(f) for c in spectrum(g)}
    assert spectrum(f + g) <= spectrum(f) | spectrum(g)
    scale = max(1.0, wiener_norm(f) * wiener_norm(g))
    assert abs(evaluate(fg, [x]) - evaluate(f, [x]) * evaluate(g, [x])) <= 1e-10 * scale
    assert conj(conj(f)) == f
    assert mat_distance(ApMatrix([[conj(fg)]], b), ApMatrix([[conj(f) * conj(g)]], b)) <= 1e-12 * scale
