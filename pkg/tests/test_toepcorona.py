import numpy as np
import pytest

from apwiener.apcore import ApMatrix, ApPolynomial, FrequencyBasis, mat_distance, sup_norm_matrix
from apwiener.errors import DomainError, InfeasibleError
from apwiener.geometry import Halfspace
from apwiener.toepcorona import (
    corona_parametrize,
    corona_solve,
    gram_test,
    kernel_range_check,
    right_coprime_from_left,
    symmetric_factorize,
    toeplitz_truncate,
)

from conftest import mono, random_poly, row


def one(b):
    return ApPolynomial.constant(b, 1.0)


def zero(b):
    return ApPolynomial.zero(b)


@pytest.fixture
def worked(b1):
    A = row(b1, one(b1) - mono(b1, 1, 0.5), mono(b1, 1, 0.5))
    B = ApMatrix([[one(b1)]], b1)
    return A, B


def test_toeplitz_identity_and_shift(b1, s1):
    T = toeplitz_truncate(ApMatrix.identity(b1, 2), s1, 3)
    assert np.array_equal(T.matrix, np.eye(8))
    T = toeplitz_truncate(mono(b1, 1), s1, 2)
    assert [l.coords for l in T.index_set] == [(0,), (1,), (2,)]
    assert np.array_equal(T.matrix, np.eye(3, k=-1))


def test_toeplitz_constant_symbol_is_block_diagonal(b1, s1):
    F = ApMatrix.from_array(b1, [[1, 2], [3, 4]])
    T = toeplitz_truncate(F, s1, 2).matrix
    assert np.array_equal(T, np.kron(np.eye(3), [[1, 2], [3, 4]]))


def test_toeplitz_adjoint_consistency(b1, s1):
    rng = np.random.default_rng(1)
    F = ApMatrix([[random_poly(rng, b1) for _ in range(2)] for _ in range(3)], b1)
    T = toeplitz_truncate(F, s1, 5).matrix
    Ts = toeplitz_truncate(F.conj_transpose(), s1, 5).matrix
    assert np.array_equal(Ts, T.conj().T)


def test_toeplitz_rank2_index_set():
    b2 = FrequencyBasis.standard(2)
    S = Halfspace.standard(2)
    T = toeplitz_truncate(ApMatrix.identity(b2, 1), S, 2)
    coords = [l.coords for l in T.index_set]
    assert coords[0] == (0, 0) and len(coords) == len(set(coords)) == 7
    assert all(c[0] > 0 or (c[0] == 0 and c[1] >= 0) for c in coords)


def test_toeplitz_product_defect_sits_in_the_corners(b1, s1):
    F = one(b1) + mono(b1, 1, 0.5) + mono(b1, -1, 0.3)
    G = one(b1) - mono(b1, 2, 0.2) + mono(b1, -1, 0.4)
    N = 12
    TF, TG, TFG = (toeplitz_truncate(X, s1, N).matrix for X in (F, G, F * G))
    diff = np.abs(TFG - TF @ TG)
    # a nonzero entry needs a summation index outside 0..N within reach of both supports
    assert np.all(diff[3 : N - 2, :] == 0) and np.all(diff[:, 3 : N - 2] == 0)
    assert diff[0, 0] > 0 and diff[N - 1 :, N - 1 :].max() > 0


def test_toeplitz_product_is_exact_for_minus_times_plus(b1, s1):
    F = one(b1) + mono(b1, -1, 0.5) + mono(b1, -2, 0.1)
    G = one(b1) - mono(b1, 1, 0.3) + mono(b1, 3, 0.2)
    TF, TG, TFG = (toeplitz_truncate(X, s1, 10).matrix for X in (F, G, F * G))
    assert np.allclose(TFG[:8, :8], (TF @ TG)[:8, :8], atol=1e-15)


def test_gram_examples(b1, s1):
    A = row(b1, one(b1), zero(b1))
    B = ApMatrix([[one(b1)]], b1)
    g = gram_test(A, B, 1.0, s1, 8)
    assert g.passes and abs(g.margin) < 1e-12
    assert gram_test(A, B, 1.1, s1, 8).margin > 0
    assert not gram_test(ApMatrix([[one(b1) * 0.5]], b1), B, 1.0, s1, 8).passes
    with pytest.raises(DomainError):
        gram_test(A, ApMatrix([[one(b1) - mono(b1, 1)]], b1), 1.0, s1, 8)
    with pytest.raises(DomainError):
        gram_test(row(b1, mono(b1, -1), zero(b1)), B, 1.0, s1, 8)


def test_right_coprime_examples(b1, s1):
    A = row(b1, mono(b1, 1), one(b1) - mono(b1, 1))
    B = ApMatrix([[one(b1)]], b1)
    r = right_coprime_from_left(A, B, s1)
    assert r.C == A and r.D == ApMatrix.identity(b1, 2)

    a = ApMatrix([[one(b1) - mono(b1, 1, 0.5)]], b1)
    b = ApMatrix([[one(b1) + mono(b1, 1, 0.25)]], b1)
    r = right_coprime_from_left(a, b, s1)
    assert r.certificates["bezout_residual"] <= 1e-8
    assert r.certificates["fraction_residual"] <= 1e-8
    ratio = lambda X, Y: np.array([X[0, 0]([t]) / Y[0, 0]([t]) for t in np.linspace(0, 6, 7)])  # noqa: E731
    assert np.allclose(ratio(a, b), ratio(r.C, r.D))


def test_kernel_range(b1, s1):
    I1 = ApMatrix([[one(b1)]], b1)
    assert kernel_range_check(I1, I1, I1, I1, s1, 6).residual == 0.0
    A = row(b1, one(b1) - mono(b1, 1, 0.5), mono(b1, 1, 0.5))
    B = ApMatrix([[one(b1) + mono(b1, 1, 0.3)]], b1)
    r = right_coprime_from_left(A, B, s1)
    k = kernel_range_check(A, B, r.C, r.D, s1, 10)
    assert k.product_residual <= 1e-7
    bad = kernel_range_check(A, B, r.C + ApMatrix.from_array(b1, [[0.01, 0.0]]), r.D, s1, 10)
    assert bad.product_residual > 1e-3


def test_symmetric_examples(b1, s1):
    s = symmetric_factorize(ApMatrix.identity(b1, 2), s1)
    assert np.array_equal(s.J0, np.eye(2)) and mat_distance(s.R, ApMatrix.identity(b1, 2)) <= 1e-12
    s = symmetric_factorize(ApMatrix.from_array(b1, np.diag([1.0, -1.0])), s1)
    assert np.array_equal(s.J0, np.diag([1.0, -1.0]))
    g = one(b1) - mono(b1, 1, 0.5)
    H = ApMatrix([[g.conj() * g]], b1)
    s = symmetric_factorize(H, s1)
    assert np.array_equal(s.J0, np.eye(1))
    rec = s.R.conj_transpose() @ s.R
    assert mat_distance(rec, H) <= 1e-8
    unimodular = s.R[0, 0].coeff((0,)) / g.coeff((0,))
    assert abs(abs(unimodular) - 1) < 1e-8
    with pytest.raises(DomainError):
        symmetric_factorize(ApMatrix([[mono(b1, 1)]], b1), s1)


def test_symmetric_indefinite_matrix(b1, s1):
    c = mono(b1, 1, 0.3)
    H = ApMatrix([[one(b1), c], [c.conj(), -one(b1)]], b1)
    s = symmetric_factorize(H, s1)
    assert np.array_equal(np.diag(s.J0), [1.0, -1.0])
    J = ApMatrix.from_array(b1, s.J0)
    assert mat_distance(s.R.conj_transpose() @ J @ s.R, H) <= 1e-8
    assert s.certificates["inverse_residual"] <= 1e-7


def test_symmetric_positive_matrix(b1, s1):
    A = row(b1, one(b1) - mono(b1, 1, 0.5), mono(b1, 1, 0.5))
    H = ApMatrix.identity(b1, 2) - (A.conj_transpose() @ A).scale(1 / 9)
    s = symmetric_factorize(H, s1)
    assert np.array_equal(s.J0, np.eye(2))
    assert mat_distance(s.R.conj_transpose() @ s.R, H) <= 1e-8


def test_corona_unit_row(b1, s1):
    A = row(b1, one(b1), zero(b1))
    sol = corona_solve(A, ApMatrix([[one(b1)]], b1), 2.0, s1, cutoff=16)
    assert mat_distance(sol.F0, ApMatrix([[one(b1)], [zero(b1)]], b1)) <= 1e-8
    assert sol.residuals["theta_isometry"] <= 1e-8


def test_corona_worked_instance(worked, s1):
    A, B = worked
    sol = corona_solve(A, B, 3.0, s1, cutoff=32)
    assert sol.residuals["AF0_residual"] <= 1e-7
    assert sol.residuals["theta_isometry"] <= 1e-8
    assert mat_distance(A @ sol.F0, B) <= 1e-7
    assert sup_norm_matrix(sol.F0, 4096) <= 3 + 1e-6
    assert gram_test(A, B, 3.0, s1, 32).passes
    with pytest.raises(InfeasibleError):
        corona_solve(A, B, 1.0, s1, cutoff=32)


def test_corona_nonconstant_denominator(b1, s1):
    A = row(b1, one(b1) - mono(b1, 1, 0.3), mono(b1, 2, 0.4), one(b1) * 0.2)
    B = ApMatrix([[one(b1) + mono(b1, 1, 0.2)]], b1)
    sol = corona_solve(A, B, 4.0, s1, cutoff=32)
    assert sol.residuals["AF0_residual"] <= 1e-7
    assert sol.residuals["F0_sup_norm"] <= 4 + 1e-6
    assert sol.theta11.shape == (3, 2) and sol.theta22.shape == (1, 1)


def test_parametrize(worked, s1, b1):
    A, B = worked
    sol = corona_solve(A, B, 3.0, s1, cutoff=32)
    assert corona_parametrize(sol).F == sol.F0
    G = ApMatrix([[ApPolynomial.constant(b1, 0.6 - 0.3j)]], b1)
    par = corona_parametrize(sol, G)
    assert par.certificates["AF_residual"] <= 1e-6
    assert par.certificates["F_sup_norm"] <= 3 + 1e-4
    assert par.certificates["round_trip"] <= 1e-6
    Gz = ApMatrix([[mono(b1, 1, 0.5) + one(b1) * 0.2]], b1)
    assert corona_parametrize(sol, Gz).certificates["round_trip"] <= 1e-6
    with pytest.raises(DomainError):
        corona_parametrize(sol, ApMatrix([[ApPolynomial.constant(b1, 1.5)]], b1))


def test_square_case_unique_solution(b1, s1):
    A = ApMatrix([[one(b1) - mono(b1, 1, 0.5)]], b1)
    B = ApMatrix([[one(b1)]], b1)
    sol = corona_solve(A, B, 3.0, s1, cutoff=32)
    assert sol.theta11 is None and sol.theta21 is None
    assert sol.residuals["AF0_residual"] <= 1e-7
    assert corona_parametrize(sol).F == sol.F0
