import numpy as np
import pytest

from apwiener.apcore import ApMatrix, ApPolynomial, FrequencyBasis
from apwiener.geometry import Halfspace


@pytest.fixture
def b1():
    return FrequencyBasis.standard(1)


@pytest.fixture
def s1():
    return Halfspace.standard(1)


def mono(basis, n, c=1.0):
    """c e_{n beta} over a rank-1 basis."""
    return ApPolynomial.monomial(basis, (n,), c)


def laurent_ap(basis, coeffs, low=0):
    return ApPolynomial(basis, {(low + j,): complex(c) for j, c in enumerate(coeffs)})


def row(basis, *polys):
    return ApMatrix([list(polys)], basis)


def random_poly(rng, basis, support=6, spread=4):
    r = basis.rank_r
    terms = {}
    for _ in range(support):
        c = tuple(int(x) for x in rng.integers(-spread, spread + 1, size=r))
        terms[c] = complex(rng.normal(), rng.normal())
    return ApPolynomial(basis, terms)


def poly_from_roots(roots, lead=1.0, low=0):
    """Coefficients (ascending) of lead * prod(z - r), shifted by z^low."""
    c = lead * np.poly(roots)[::-1] if len(roots) else np.array([lead])
    return low, c
