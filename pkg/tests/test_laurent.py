import numpy as np
import pytest

from apwiener.apcore import ApPolynomial, FrequencyBasis
from apwiener.errors import CompletionError, NotInvertibleError, UnsupportedRankError
from apwiener.geometry import Halfspace
from apwiener.laurent import (
    LaurentPoly,
    bezout_residual,
    bezout_solve,
    complete_unimodular_row,
    laurent_inverse_truncated,
    matrix_series_inverse,
    phase_winding,
    pm,
    pm_mul,
    rank1_reduce,
    spectral_split,
    unit_det_spread,
    winding_index,
)

from conftest import poly_from_roots

Z = LaurentPoly.monomial(1)
ONE = LaurentPoly.const(1.0)


def L(low, coeffs):
    return LaurentPoly(low, np.asarray(coeffs, complex))


def test_rank1_reduce_examples():
    b = FrequencyBasis.standard(1)
    S = Halfspace.standard(1)
    f = ApPolynomial(b, {(0,): 1, (2,): 1, (4,): 1})
    red = rank1_reduce(f, S)
    assert red.generator.coords == (2,)
    assert red.images == L(0, [1, 1, 1])
    red = rank1_reduce(ApPolynomial.monomial(b, (-1,)), S)
    assert red.generator.coords == (1,) and red.images == L(-1, [1])
    b2 = FrequencyBasis.standard(2)
    with pytest.raises(UnsupportedRankError):
        rank1_reduce(ApPolynomial(b2, {(1, 0): 1, (0, 1): 1}), Halfspace.standard(2))


def test_generator_flipped_into_halfspace():
    b = FrequencyBasis.standard(1)
    neg = Halfspace.from_rows([[-1]])
    red = rank1_reduce(ApPolynomial(b, {(3,): 1, (6,): 2}), neg)
    assert red.generator.coords == (-3,)
    assert red.images == L(-2, [2, 1])
    assert red.back(red.images) == ApPolynomial(b, {(3,): 1, (6,): 2})


def test_winding_examples():
    assert winding_index(Z) == 1
    assert winding_index(Z - 2) == 0
    assert winding_index(Z - 0.5) == 1
    assert winding_index(L(-1, [1, -0.3])) == -1
    with pytest.raises(NotInvertibleError):
        winding_index(Z - 1)


def test_winding_is_additive_and_matches_phase_oracle():
    rng = np.random.default_rng(4)
    for _ in range(30):
        p = L(int(rng.integers(-3, 4)), rng.normal(size=5) + 1j * rng.normal(size=5))
        q = L(int(rng.integers(-3, 4)), rng.normal(size=4) + 1j * rng.normal(size=4))
        try:
            wp, wq = winding_index(p), winding_index(q)
        except NotInvertibleError:
            continue
        assert winding_index(p * q) == wp + wq
        assert wp == phase_winding(p)


def test_spectral_split_examples():
    pp, w, pm_ = spectral_split(Z - 2)
    assert (pp, w, pm_) == (Z - 2, 0, ONE)
    pp, w, pm_ = spectral_split(Z - 0.5)
    assert w == 1 and np.allclose(pp.coeffs, [1]) and pm_ == L(-1, [-0.5, 1])
    pp, w, pm_ = spectral_split(LaurentPoly.const(3.0))
    assert (pp, w, pm_) == (LaurentPoly.const(3.0), 0, ONE)


def test_spectral_split_reconstruction_random():
    rng = np.random.default_rng(6)
    for _ in range(40):
        n_in, n_out = rng.integers(0, 5), rng.integers(0, 5)
        inner = rng.uniform(0.1, 0.95, n_in) * np.exp(2j * np.pi * rng.uniform(size=n_in))
        outer = rng.uniform(1.05, 3.0, n_out) * np.exp(2j * np.pi * rng.uniform(size=n_out))
        low, c = poly_from_roots(np.concatenate([inner, outer]), lead=rng.normal() + 1j)
        p = L(int(rng.integers(-3, 3)), c)
        pp, w, pm_ = spectral_split(p)
        rec = pp * LaurentPoly.monomial(w) * pm_
        assert (rec - p).norm1() <= 1e-8 * p.norm1()
        assert w == phase_winding(p)
        assert pp.low == 0 and (pp.roots().size == 0 or np.min(np.abs(pp.roots())) > 1)
        assert pm_.high == 0


def test_truncated_inverse_examples():
    q = laurent_inverse_truncated(1 - 0.5 * Z, "plus", 1e-10)
    assert 33 <= len(q.coeffs) <= 36
    assert np.allclose(q.coeffs, 0.5 ** np.arange(len(q.coeffs)))
    assert laurent_inverse_truncated(LaurentPoly.const(2.0)) == LaurentPoly.const(0.5)
    m = L(-1, [-0.4, 1])  # 1 - 0.4/z
    qm = laurent_inverse_truncated(m, "minus", 1e-12)
    assert qm.high == 0 and (m * qm - 1.0).norm1() <= 1e-12
    with pytest.raises(NotInvertibleError):
        laurent_inverse_truncated(Z - 0.5, "plus")


def test_truncated_inverse_random_residual():
    rng = np.random.default_rng(8)
    for _ in range(20):
        outer = rng.uniform(1.1, 3.0, 4) * np.exp(2j * np.pi * rng.uniform(size=4))
        _, c = poly_from_roots(outer, lead=1.0)
        p = L(0, c)
        q = laurent_inverse_truncated(p, "plus", 1e-11)
        assert (p * q - 1.0).norm1() <= 1e-11


def test_bezout_examples():
    assert bezout_residual([ONE], bezout_solve([ONE])) <= 1e-12
    b = bezout_solve([Z, 1 - Z])
    assert bezout_residual([Z, 1 - Z], b) <= 1e-9
    b = bezout_solve([Z, 1 - Z], ring="poly")
    assert bezout_residual([Z, 1 - Z], b) <= 1e-9 and all(x.low >= 0 for x in b if not x.is_zero())
    assert bezout_solve([Z - 1, Z * Z - 1]) is None
    assert bezout_solve([LaurentPoly.zero(), LaurentPoly.zero()]) is None


def test_bezout_random_coprime():
    rng = np.random.default_rng(10)
    for _ in range(20):
        a = [L(0, rng.normal(size=5) + 1j * rng.normal(size=5)) for _ in range(3)]
        b = bezout_solve(a)
        assert b is not None and bezout_residual(a, b) <= 1e-9


def test_completion_examples():
    F = complete_unimodular_row([ONE, LaurentPoly.zero()])
    assert F[0, 0] == ONE and F[1, 1] == ONE and F[1, 0].is_zero() and F[0, 1].is_zero()
    F = complete_unimodular_row([Z, 1 - Z])
    assert F[0, 0] == Z and F[0, 1] == 1 - Z
    assert unit_det_spread(F) <= 1e-8
    with pytest.raises(CompletionError):
        complete_unimodular_row([Z - 1, Z * Z - 1])


def test_completion_without_coprime_pair():
    a = [(Z - 1) * (Z - 2), (Z - 1) * (Z - 3), (Z - 2) * (Z - 3)]
    F = complete_unimodular_row(a)
    assert all(F[0, j] == a[j] for j in range(3))
    assert unit_det_spread(F) <= 1e-8


def test_matrix_series_inverse():
    P = pm([[1 - 0.5 * Z, 0.3 * Z], [0.2 * Z, 1 + 0.1 * Z]])
    X = matrix_series_inverse(P, 1e-12)
    R = pm_mul(P, X)
    for i in range(2):
        for j in range(2):
            assert (R[i, j] - (1.0 if i == j else 0.0)).norm1() <= 1e-11
    with pytest.raises(NotInvertibleError):
        matrix_series_inverse(pm([[Z - 0.5, 0.0], [0.0, ONE]]))
