"""Halfspaces ``S = Z E_k``, spectral projections and slice damping.

``E_k`` is the lexicographic cone: a vector belongs to it when its first
nonzero coordinate is positive (or it is zero).  Membership of a frequency
in ``Z E_k`` is decided exactly from the sign pattern of ``Z^{-1} lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from . import rational as rq
from .apcore import ApMatrix, ApPolynomial, Coords, Frequency, FrequencyBasis, mat_apply
from .errors import DimensionError, DomainError


def lex_sign(v: Sequence[Fraction]) -> int:
    for x in v:
        if x > 0:
            return 1
        if x < 0:
            return -1
    return 0


@dataclass(frozen=True)
class Halfspace:
    Z: rq.Matrix

    def __post_init__(self):
        k = len(self.Z)
        if k < 1 or any(len(r) != k for r in self.Z):
            raise DimensionError("Z must be a nonempty square matrix")
        if rq.det(self.Z) == 0:
            raise DomainError("Z must be invertible")

    @classmethod
    def from_rows(cls, rows) -> "Halfspace":
        return cls(rq.as_matrix(rows))

    @classmethod
    def standard(cls, k: int) -> "Halfspace":
        return cls.from_rows([[int(i == j) for j in range(k)] for i in range(k)])

    @property
    def dim_k(self) -> int:
        return len(self.Z)

    @cached_property
    def Zinv(self) -> rq.Matrix:
        return rq.inverse(self.Z)

    def negated(self) -> "Halfspace":
        """-S, again of the form Z' E_k."""
        return Halfspace(tuple(tuple(-x for x in r) for r in self.Z))

    @lru_cache(maxsize=64)
    def _coord_map(self, basis: FrequencyBasis) -> rq.Matrix:
        if basis.dim_k != self.dim_k:
            raise DimensionError(f"basis dimension {basis.dim_k} != halfspace dimension {self.dim_k}")
        bt = rq.transpose(basis.matrix)  # r x k
        # rows of Z^{-1} applied to basis columns: (Z^{-1} B) as k x r
        return tuple(
            tuple(sum((zi[l] * bt[j][l] for l in range(self.dim_k)), Fraction(0)) for j in range(basis.rank_r))
            for zi in self.Zinv
        )

    def sign(self, basis: FrequencyBasis, coords: Coords) -> int:
        """+1 if lambda in S\\{0}, -1 if in (-S)\\{0}, 0 if lambda = 0."""
        if len(coords) != basis.rank_r:
            raise DimensionError("coordinate length mismatch")
        m = self._coord_map(basis)
        return lex_sign([sum((a * c for a, c in zip(row, coords)), Fraction(0)) for row in m])

    def leading_coordinate(self, basis: FrequencyBasis, coords: Coords) -> Fraction:
        """First coordinate of Z^{-1} lambda, i.e. <lambda, Y(S) direction>."""
        row = self._coord_map(basis)[0]
        return sum((a * c for a, c in zip(row, coords)), Fraction(0))


def contains(S: Halfspace, lam: Frequency | Sequence) -> bool:
    """Exact membership of a frequency (or a rational vector of R^k) in S."""
    if isinstance(lam, Frequency):
        return S.sign(lam.basis, lam.coords) >= 0
    vec = [rq.to_fraction(x) for x in lam]
    if len(vec) != S.dim_k:
        raise DimensionError(f"vector length {len(vec)} != {S.dim_k}")
    return lex_sign(rq.matvec(S.Zinv, vec)) >= 0


def y_vector(S: Halfspace) -> tuple[tuple[Fraction, ...], np.ndarray]:
    """The direction (Z^{-1})^T e_1 exactly, and its float normalization."""
    direction = tuple(S.Zinv[0])
    d = np.array([float(x) for x in direction])
    return direction, d / np.linalg.norm(d)


MASK_KINDS = ("S", "S_minus_zero", "minus_S", "minus_S_minus_zero", "V_cap", "zero_only", "predicate")


@dataclass(frozen=True)
class SpectralMask:
    kind: str
    halfspace: Halfspace | None = None
    predicate: Callable[[Frequency], bool] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in MASK_KINDS:
            raise DomainError(f"unknown mask kind {self.kind!r}")
        if self.kind == "predicate" and self.predicate is None:
            raise DomainError("predicate mask needs a callable")
        if self.kind not in ("zero_only", "predicate") and self.halfspace is None:
            raise DomainError(f"mask {self.kind!r} needs a halfspace")

    def keeps(self, basis: FrequencyBasis, coords: Coords) -> bool:
        kind = self.kind
        if kind == "zero_only":
            return not any(coords)
        if kind == "predicate":
            return bool(self.predicate(Frequency(basis, coords)))
        S = self.halfspace
        if kind == "V_cap":
            return S.leading_coordinate(basis, coords) == 0
        s = S.sign(basis, coords)
        return {
            "S": s >= 0,
            "S_minus_zero": s > 0,
            "minus_S": s <= 0,
            "minus_S_minus_zero": s < 0,
        }[kind]


def project(f: ApPolynomial | ApMatrix, mask: SpectralMask):
    """Keep exactly the Bohr-Fourier terms whose frequency passes ``mask``."""
    if isinstance(f, ApMatrix):
        return mat_apply(f, lambda e: project(e, mask))
    if mask.halfspace is not None and mask.halfspace.dim_k != f.basis.dim_k:
        raise DimensionError("mask and polynomial live in different dimensions")
    return ApPolynomial(f.basis, {c: v for c, v in f.items() if mask.keeps(f.basis, c)}, _normalized=True)


def spectrum_in(f: ApPolynomial | ApMatrix, mask: SpectralMask) -> bool:
    spec = f.spectrum() if isinstance(f, ApMatrix) else f.terms.keys()
    return all(mask.keeps(f.basis, c) for c in spec)


def slice_damp(f: ApPolynomial, S: Halfspace, y: float) -> ApPolynomial:
    """Multiply the coefficient at lambda by exp(-<lambda, Y(S)> y).

    Requires sigma(f) in S, so every factor is at most 1.
    """
    if y <= 0:
        raise DomainError("damping parameter must be positive")
    if not spectrum_in(f, SpectralMask("S", S)):
        raise DomainError("spectrum is not contained in the halfspace")
    direction, _ = y_vector(S)
    dnorm = math.sqrt(sum(float(x) ** 2 for x in direction))
    out = {}
    for c, v in f.items():
        # <lambda, direction> is the exact leading coordinate, hence >= 0 on S
        out[c] = v * math.exp(-float(S.leading_coordinate(f.basis, c)) / dnorm * y)
    return ApPolynomial(f.basis, out)
