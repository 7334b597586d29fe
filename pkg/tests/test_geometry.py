import math
from fractions import Fraction

import numpy as np
import pytest

from apwiener.apcore import ApMatrix, ApPolynomial, FrequencyBasis, wiener_norm
from apwiener.errors import DomainError
from apwiener.geometry import Halfspace, SpectralMask, contains, project, slice_damp, y_vector

from conftest import mono, random_poly


def test_contains_examples():
    I2 = Halfspace.standard(2)
    assert contains(I2, [0, 0])
    assert not contains(I2, [0, -3]) and contains(I2, [0, 3])
    swap = Halfspace.from_rows([[0, 1], [1, 0]])
    assert contains(swap, [-3, 1])


def test_invalid_halfspace():
    with pytest.raises(DomainError):
        Halfspace.from_rows([[1, 2], [2, 4]])


def test_y_vector_examples():
    direction, unit = y_vector(Halfspace.standard(3))
    assert direction == (1, 0, 0)
    direction, unit = y_vector(Halfspace.from_rows([[2, 0], [0, 2]]))
    assert direction == (Fraction(1, 2), 0)
    assert np.allclose(unit, [1, 0])


def test_projection_examples(b1, s1):
    f = ApPolynomial.constant(b1, 1.0) + mono(b1, 1) + mono(b1, -1)
    assert project(f, SpectralMask("S", s1)) == ApPolynomial.constant(b1, 1.0) + mono(b1, 1)
    assert project(f, SpectralMask("minus_S_minus_zero", s1)) == mono(b1, -1)
    assert project(f, SpectralMask("zero_only")) == ApPolynomial.constant(b1, 1.0)
    even = SpectralMask("predicate", predicate=lambda lam: lam.coords[0] % 2 == 0)
    assert project(f, even) == ApPolynomial.constant(b1, 1.0)


def test_v_cap_mask():
    b2 = FrequencyBasis.standard(2)
    S = Halfspace.standard(2)
    f = ApPolynomial(b2, {(0, 1): 1.0, (1, 0): 2.0, (0, -2): 3.0})
    assert project(f, SpectralMask("V_cap", S)) == ApPolynomial(b2, {(0, 1): 1.0, (0, -2): 3.0})


def test_projection_partition_on_matrices(s1, b1):
    rng = np.random.default_rng(2)
    G = ApMatrix([[random_poly(rng, b1) for _ in range(3)] for _ in range(2)], b1)
    plus = project(G, SpectralMask("S", s1))
    minus = project(G, SpectralMask("minus_S_minus_zero", s1))
    assert plus + minus == G


def test_slice_damp(b1, s1):
    assert slice_damp(ApPolynomial.constant(b1, 1.0), s1, 0.7) == ApPolynomial.constant(b1, 1.0)
    d = slice_damp(mono(b1, 2), s1, 1.0)
    assert abs(d.coeff((2,)) - math.exp(-2)) < 1e-15
    with pytest.raises(DomainError):
        slice_damp(mono(b1, -1), s1, 1.0)
    with pytest.raises(DomainError):
        slice_damp(mono(b1, 1), s1, 0.0)


def test_slice_damp_semigroup_and_contraction():
    rng = np.random.default_rng(9)
    basis = FrequencyBasis.from_columns([["1", "1/2"], ["0", "3"]])
    S = Halfspace.from_rows([[1, 1], [0, 1]])
    for _ in range(20):
        f = random_poly(rng, basis, support=6, spread=3)
        f = project(f, SpectralMask("S", S))
        a = slice_damp(slice_damp(f, S, 0.3), S, 0.4)
        b = slice_damp(f, S, 0.7)
        assert all(abs(a.coeff(c) - b.coeff(c)) <= 1e-12 for c in set(a.terms) | set(b.terms))
        assert wiener_norm(b) <= wiener_norm(f)
