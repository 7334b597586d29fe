"""Almost periodic polynomials with exact frequencies.

A frequency is an integer coordinate vector over an explicit rational basis
``beta_1..beta_r`` of R^k, so ``lambda = basis @ coords`` is exact.  Coefficients
are complex doubles.  Every value is immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from . import rational as rq
from .errors import BasisError, DimensionError, DomainError

Coords = tuple[int, ...]

ZERO_REL_TOL = 1e-14


@dataclass(frozen=True)
class FrequencyBasis:
    """Generators of the frequency group, stored as a k x r rational matrix."""

    matrix: rq.Matrix
    dim_k: int

    def __post_init__(self):
        if self.dim_k < 1:
            raise DimensionError("dim_k must be positive")
        if len(self.matrix) != self.dim_k:
            raise DimensionError("basis must have dim_k rows")
        widths = {len(row) for row in self.matrix}
        if len(widths) > 1:
            raise DimensionError("ragged basis matrix")
        if self.rank_r and rq.rank(self.matrix) != self.rank_r:
            raise BasisError("basis columns are not linearly independent over Q")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "FrequencyBasis":
        m = rq.as_matrix(rows)
        return cls(m, len(m))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], dim_k: int | None = None) -> "FrequencyBasis":
        cols = [tuple(rq.to_fraction(x) for x in c) for c in columns]
        if dim_k is None:
            if not cols:
                raise DimensionError("dim_k required for an empty basis")
            dim_k = len(cols[0])
        if any(len(c) != dim_k for c in cols):
            raise DimensionError("generator length differs from dim_k")
        rows = tuple(tuple(c[i] for c in cols) for i in range(dim_k))
        return cls(rows, dim_k)

    @classmethod
    def standard(cls, k: int) -> "FrequencyBasis":
        return cls.from_rows([[int(i == j) for j in range(k)] for i in range(k)])

    @property
    def rank_r(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix], dtype=float).reshape(
            self.dim_k, self.rank_r
        )

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [tuple(row[j] for row in self.matrix) for j in range(self.rank_r)]

    def embed(self, coords: Sequence[int]) -> tuple[Fraction, ...]:
        if len(coords) != self.rank_r:
            raise DimensionError(f"coordinate length {len(coords)} != rank {self.rank_r}")
        return tuple(sum((x * c for x, c in zip(row, coords)), Fraction(0)) for row in self.matrix)

    def coords_of(self, vec: Sequence) -> Coords | None:
        """Integer coordinates of a rational vector, or None if not in the group."""
        if len(vec) != self.dim_k:
            raise DimensionError("vector length differs from dim_k")
        if self.rank_r == 0:
            return () if all(rq.to_fraction(v) == 0 for v in vec) else None
        sol = rq.solve(self.matrix, vec)
        if sol is None or any(x.denominator != 1 for x in sol):
            return None
        return tuple(int(x) for x in sol)


@dataclass(frozen=True)
class Frequency:
    basis: FrequencyBasis
    coords: Coords

    def __post_init__(self):
        if len(self.coords) != self.basis.rank_r:
            raise DimensionError("coordinate length mismatch")

    def embed(self) -> tuple[Fraction, ...]:
        return self.basis.embed(self.coords)

    def __neg__(self) -> "Frequency":
        return Frequency(self.basis, tuple(-c for c in self.coords))


def _accumulate(pairs: Iterable[tuple[Coords, complex]]) -> dict[Coords, complex]:
    # fsum makes the result independent of contribution order
    re: dict[Coords, list[float]] = {}
    im: dict[Coords, list[float]] = {}
    for c, v in pairs:
        v = complex(v)
        re.setdefault(c, []).append(v.real)
        im.setdefault(c, []).append(v.imag)
    return {c: complex(math.fsum(re[c]), math.fsum(im[c])) for c in re}


class ApPolynomial:
    """Finite Bohr-Fourier sum ``sum_lambda f_lambda e_lambda``."""

    def __init__(self, basis: FrequencyBasis, terms: dict[Coords, complex] | None = None, *, _normalized=False):
        self.basis = basis
        terms = dict(terms or {})
        if not _normalized:
            r = basis.rank_r
            for c in terms:
                if len(c) != r:
                    raise DimensionError(f"coordinate {c} has length {len(c)}, expected {r}")
            norm = sum(abs(v) for v in terms.values())
            cut = ZERO_REL_TOL * (1.0 + norm)
            terms = {c: complex(v) for c, v in sorted(terms.items()) if abs(v) >= cut}
        self._terms = terms

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, basis: FrequencyBasis) -> "ApPolynomial":
        return cls(basis, {}, _normalized=True)

    @classmethod
    def constant(cls, basis: FrequencyBasis, c: complex) -> "ApPolynomial":
        return cls(basis, {(0,) * basis.rank_r: c})

    @classmethod
    def monomial(cls, basis: FrequencyBasis, coords: Sequence[int], c: complex = 1.0) -> "ApPolynomial":
        return cls(basis, {tuple(int(x) for x in coords): c})

    # mapping view -----------------------------------------------------------
    @property
    def terms(self) -> dict[Coords, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, coords: Sequence[int]) -> complex:
        return self._terms.get(tuple(coords), 0j)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, ApPolynomial):
            return NotImplemented
        return self.basis == other.basis and self._terms == other._terms

    def __hash__(self):
        return hash((self.basis, tuple(self._terms.items())))

    def __repr__(self):
        body = " + ".join(f"({v:.6g})e{list(c)}" for c, v in self._terms.items()) or "0"
        return f"ApPolynomial({body})"

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "ApPolynomial"):
        if not isinstance(other, ApPolynomial):
            raise TypeError("expected ApPolynomial")
        if other.basis != self.basis:
            raise BasisError("polynomials are over different frequency bases; rebase explicitly")

    def _lift(self, other) -> "ApPolynomial":
        if isinstance(other, ApPolynomial):
            self._check(other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return ApPolynomial.constant(self.basis, complex(other))
        raise TypeError(f"cannot combine ApPolynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        return ApPolynomial(self.basis, _accumulate([*self._terms.items(), *other._terms.items()]))

    __radd__ = __add__

    def __neg__(self):
        return ApPolynomial(self.basis, {c: -v for c, v in self._terms.items()}, _normalized=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return scale(self, other)
        other = self._lift(other)
        pairs = (
            (tuple(a + b for a, b in zip(c1, c2)), v1 * v2)
            for c1, v1 in self._terms.items()
            for c2, v2 in other._terms.items()
        )
        return ApPolynomial(self.basis, _accumulate(pairs))

    __rmul__ = __mul__

    def conj(self) -> "ApPolynomial":
        return conj(self)

    def __call__(self, x) -> complex:
        return evaluate(self, x)


# --- operations --------------------------------------------------------------

def make_polynomial(basis: FrequencyBasis, term_list: Iterable[tuple[Sequence[int], complex]]) -> ApPolynomial:
    pairs = []
    for coords, c in term_list:
        coords = tuple(int(x) for x in coords)
        if len(coords) != basis.rank_r:
            raise DimensionError(f"coordinate {coords} has length {len(coords)}, expected {basis.rank_r}")
        pairs.append((coords, c))
    return ApPolynomial(basis, _accumulate(pairs))


def add(f: ApPolynomial, g: ApPolynomial) -> ApPolynomial:
    f._check(g)
    return f + g


def mul(f: ApPolynomial, g: ApPolynomial) -> ApPolynomial:
    f._check(g)
    return f * g


def scale(f: ApPolynomial, c: complex) -> ApPolynomial:
    c = complex(c)
    return ApPolynomial(f.basis, {k: v * c for k, v in f._terms.items()})


def conj(f: ApPolynomial) -> ApPolynomial:
    """Pointwise complex conjugate: ``f_lambda e_lambda -> conj(f_lambda) e_{-lambda}``."""
    return ApPolynomial(
        f.basis, {tuple(-x for x in c): v.conjugate() for c, v in f._terms.items()}
    )


def _phases(f: ApPolynomial) -> tuple[np.ndarray, np.ndarray]:
    if not f._terms:
        return np.zeros((0, f.basis.rank_r)), np.zeros(0, complex)
    coords = np.array(list(f._terms.keys()), dtype=float).reshape(len(f), f.basis.rank_r)
    coeffs = np.array(list(f._terms.values()), dtype=complex)
    return coords, coeffs


def evaluate(f: ApPolynomial, x: Sequence[float]) -> complex:
    """Value of f at a point x of R^k."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != f.basis.dim_k:
        raise DimensionError(f"point has length {x.shape[0]}, expected {f.basis.dim_k}")
    return complex(eval_torus(f, f.basis.float_matrix.T @ x))


# `eval` is the public name in the operation table; keep both spellings
eval = evaluate  # noqa: A001


def eval_torus(f: ApPolynomial, theta: np.ndarray) -> np.ndarray | complex:
    """Evaluate at torus angles ``theta`` (shape (r,) or (N, r)): sum c_t exp(i t.theta)."""
    theta = np.asarray(theta, dtype=float)
    single = theta.ndim == 1
    th = theta.reshape(-1, f.basis.rank_r)
    coords, coeffs = _phases(f)
    vals = np.exp(1j * (th @ coords.T)) @ coeffs if len(coeffs) else np.zeros(th.shape[0], complex)
    return complex(vals[0]) if single else vals


def bohr_mean(f: ApPolynomial) -> complex:
    return f.coeff((0,) * f.basis.rank_r)


def spectrum(f: ApPolynomial) -> frozenset[Coords]:
    """Support of the coefficient map, as coordinate tuples."""
    return frozenset(f._terms)


def spectrum_frequencies(f: ApPolynomial) -> list[Frequency]:
    return [Frequency(f.basis, c) for c in f._terms]


def wiener_norm(f: ApPolynomial) -> float:
    return math.fsum(abs(v) for v in f._terms.values())


def sup_norm_bound(f: ApPolynomial) -> float:
    return wiener_norm(f)


def torus_grid(r: int, density: int, seed: int = 0) -> np.ndarray:
    """Deterministic sample of angles in [0, 2pi)^r.

    r = 1 uses an equispaced grid; r >= 2 an unscrambled Halton sequence
    skipped by ``seed`` points.  The origin is always included.
    """
    if density < 1:
        raise DomainError("grid density must be >= 1")
    if r == 0:
        return np.zeros((1, 0))
    if r == 1:
        return (2 * np.pi * np.arange(density) / density).reshape(-1, 1)
    pts = qmc.Halton(d=r, scramble=False).random(density + seed)[seed:]
    pts[0] = 0.0
    return 2 * np.pi * pts


def sup_norm_estimate(f: ApPolynomial, grid_density: int = 4096, seed: int = 0) -> float:
    """Max of |f| over a deterministic torus grid (a lower bound for the sup norm)."""
    grid = torus_grid(f.basis.rank_r, grid_density, seed)
    if f.is_zero():
        return 0.0
    return float(np.max(np.abs(eval_torus(f, grid))))


def bohr_inner(f: ApPolynomial, g: ApPolynomial) -> complex:
    """Besicovitch inner product M{f g*} = sum f_lambda conj(g_lambda)."""
    f._check(g)
    prods = [v * g._terms[c].conjugate() for c, v in f._terms.items() if c in g._terms]
    return complex(math.fsum(p.real for p in prods), math.fsum(p.imag for p in prods))


def rebase(f: ApPolynomial, target: FrequencyBasis) -> ApPolynomial:
    """Re-express f over another basis; fails if a frequency is not in its group."""
    if target.dim_k != f.basis.dim_k:
        raise DimensionError("bases live in different dimensions")
    out = {}
    for c, v in f._terms.items():
        t = target.coords_of(f.basis.embed(c))
        if t is None:
            raise BasisError(f"frequency {c} is not in the target group")
        out[t] = v
    return ApPolynomial(target, out)


def join_bases(*bases: FrequencyBasis) -> FrequencyBasis:
    """Basis of the group generated by all given bases (must be free of Q-relations)."""
    k = bases[0].dim_k
    if any(b.dim_k != k for b in bases):
        raise DimensionError("bases live in different dimensions")
    cols = [c for b in bases for c in b.columns()]
    gens = rq.lattice_basis(cols)
    return FrequencyBasis.from_columns(gens, dim_k=k)


# --- matrices ------------------------------------------------------------------

class ApMatrix:
    """m x n matrix of AP polynomials over a single basis."""

    def __init__(self, entries: Sequence[Sequence[ApPolynomial]], basis: FrequencyBasis | None = None):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise DimensionError("matrix must be at least 1x1")
        if len({len(r) for r in rows}) != 1:
            raise DimensionError("ragged matrix")
        b = basis or rows[0][0].basis
        for r in rows:
            for e in r:
                if not isinstance(e, ApPolynomial):
                    raise TypeError("entries must be ApPolynomial")
                if e.basis != b:
                    raise BasisError("matrix entries use different bases")
        self.basis = b
        self.entries = rows

    @classmethod
    def from_array(cls, basis: FrequencyBasis, a) -> "ApMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        return cls([[ApPolynomial.constant(basis, v) for v in row] for row in a], basis)

    @classmethod
    def identity(cls, basis: FrequencyBasis, n: int) -> "ApMatrix":
        return cls.from_array(basis, np.eye(n))

    @classmethod
    def zeros(cls, basis: FrequencyBasis, m: int, n: int) -> "ApMatrix":
        return cls.from_array(basis, np.zeros((m, n)))

    @classmethod
    def scalar(cls, f: ApPolynomial) -> "ApMatrix":
        return cls([[f]])

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.n

    def __getitem__(self, ij) -> ApPolynomial:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, ApMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"ApMatrix({self.m}x{self.n})"

    def __add__(self, other):
        return mat_add(self, other)

    def __sub__(self, other):
        return mat_add(self, mat_apply(other, lambda e: -e))

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __neg__(self):
        return mat_apply(self, lambda e: -e)

    def scale(self, c: complex) -> "ApMatrix":
        return mat_apply(self, lambda e: scale(e, c))

    def transpose(self) -> "ApMatrix":
        return ApMatrix([list(col) for col in zip(*self.entries)], self.basis)

    def conj_transpose(self) -> "ApMatrix":
        return mat_conj_transpose(self)

    def rows(self, idx) -> "ApMatrix":
        return ApMatrix([self.entries[i] for i in idx], self.basis)

    def cols(self, idx) -> "ApMatrix":
        return ApMatrix([[r[j] for j in idx] for r in self.entries], self.basis)

    def spectrum(self) -> frozenset[Coords]:
        return frozenset().union(*(spectrum(e) for r in self.entries for e in r))

    def wiener_norm(self) -> float:
        """Largest entry Wiener norm."""
        return max(wiener_norm(e) for r in self.entries for e in r)

    def eval_torus(self, theta: np.ndarray) -> np.ndarray:
        """Values at angles theta (N, r) as an array (N, m, n)."""
        theta = np.asarray(theta, dtype=float).reshape(-1, self.basis.rank_r)
        out = np.empty((theta.shape[0], self.m, self.n), complex)
        for i, r in enumerate(self.entries):
            for j, e in enumerate(r):
                out[:, i, j] = eval_torus(e, theta)
        return out

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.basis.dim_k:
            raise DimensionError("point length differs from dim_k")
        return self.eval_torus((self.basis.float_matrix.T @ x)[None, :])[0]


def _check_mats(a: ApMatrix, b: ApMatrix):
    if a.basis != b.basis:
        raise BasisError("matrices are over different frequency bases")


def mat_add(a: ApMatrix, b: ApMatrix) -> ApMatrix:
    _check_mats(a, b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return ApMatrix([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)], a.basis)


def mat_mul(a: ApMatrix, b: ApMatrix) -> ApMatrix:
    _check_mats(a, b)
    if a.n != b.m:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    for i in range(a.m):
        row = []
        for j in range(b.n):
            pairs = (
                (tuple(p + q for p, q in zip(c1, c2)), v1 * v2)
                for k in range(a.n)
                for c1, v1 in a.entries[i][k].items()
                for c2, v2 in b.entries[k][j].items()
            )
            row.append(ApPolynomial(a.basis, _accumulate(pairs)))
        out.append(row)
    return ApMatrix(out, a.basis)


def mat_conj_transpose(a: ApMatrix) -> ApMatrix:
    return ApMatrix([[conj(a.entries[j][i]) for j in range(a.m)] for i in range(a.n)], a.basis)


def mat_apply(a: ApMatrix, op: Callable[[ApPolynomial], ApPolynomial]) -> ApMatrix:
    return ApMatrix([[op(e) for e in r] for r in a.entries], a.basis)


def hstack(*mats: ApMatrix) -> ApMatrix:
    return ApMatrix([sum((list(m.entries[i]) for m in mats), []) for i in range(mats[0].m)], mats[0].basis)


def vstack(*mats: ApMatrix) -> ApMatrix:
    return ApMatrix([r for m in mats for r in m.entries], mats[0].basis)


def mat_distance(a: ApMatrix, b: ApMatrix) -> float:
    """Max entrywise Wiener norm of a - b."""
    return (a - b).wiener_norm()


def sup_norm_matrix(a: ApMatrix, grid_density: int = 4096, seed: int = 0) -> float:
    """Sampled max of the spectral (operator 2-) norm of a(t)."""
    grid = torus_grid(a.basis.rank_r, grid_density, seed)
    vals = a.eval_torus(grid)
    return float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))
