"""Rank-1 reduction of AP polynomials to Laurent polynomials and the
one-variable machinery built on it: winding index, root splitting,
truncated one-sided inverses, Bezout identities and unimodular completion.

When every frequency in play is an integer multiple of a single generator
``beta`` chosen inside the halfspace, ``e_{n beta}`` maps to ``z^n`` and the
plus algebra becomes power series in ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rational as rq
from .apcore import ApMatrix, ApPolynomial, Coords, Frequency, FrequencyBasis
from .errors import (
    CompletionError,
    ConditioningError,
    DomainError,
    NotInvertibleError,
    UnsupportedRankError,
)
from .geometry import Halfspace

CIRCLE_TOL = 1e-9
TRIM_REL = 1e-14
MAX_SERIES_TERMS = 1 << 15


class LaurentPoly:
    """sum_j coeffs[j] z^(low + j) with nonzero end coefficients (or zero)."""

    def __init__(self, low: int, coeffs, *, trim: bool = True):
        c = np.array(coeffs, dtype=complex).ravel()
        low = int(low)
        if trim and c.size:
            cut = TRIM_REL * (1.0 + float(np.sum(np.abs(c))))
            nz = np.flatnonzero(np.abs(c) > cut)
            if nz.size == 0:
                c = c[:0]
            else:
                low += int(nz[0])
                c = c[nz[0] : nz[-1] + 1].copy()
        if c.size == 0:
            low = 0
        c.setflags(write=False)
        self.low = low
        self.coeffs = c

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls(0, [])

    @classmethod
    def const(cls, c: complex) -> "LaurentPoly":
        return cls(0, [c])

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "LaurentPoly":
        return cls(n, [c])

    @classmethod
    def from_dict(cls, d: dict[int, complex]) -> "LaurentPoly":
        if not d:
            return cls.zero()
        lo, hi = min(d), max(d)
        c = np.zeros(hi - lo + 1, complex)
        for k, v in d.items():
            c[k - lo] += v
        return cls(lo, c)

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def to_dict(self) -> dict[int, complex]:
        return {self.low + j: complex(v) for j, v in enumerate(self.coeffs) if v != 0}

    def coeff(self, n: int) -> complex:
        j = n - self.low
        return complex(self.coeffs[j]) if 0 <= j < len(self.coeffs) else 0j

    def norm1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def __repr__(self):
        return f"LaurentPoly(low={self.low}, coeffs={np.round(self.coeffs, 12).tolist()})"

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.low == other.low
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def _lift(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly.const(complex(other))

    def __add__(self, other):
        other = self._lift(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        c = np.zeros(hi - lo + 1, complex)
        c[self.low - lo : self.high - lo + 1] += self.coeffs
        c[other.low - lo : other.high - lo + 1] += other.coeffs
        return LaurentPoly(lo, c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.low, -self.coeffs, trim=False)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return LaurentPoly.zero()
        return LaurentPoly(self.low + other.low, np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def shift(self, n: int) -> "LaurentPoly":
        return LaurentPoly(self.low + n, self.coeffs, trim=False)

    def star(self) -> "LaurentPoly":
        """Pointwise conjugate on the unit circle: c_j z^j -> conj(c_j) z^-j."""
        if self.is_zero():
            return self
        return LaurentPoly(-self.high, np.conj(self.coeffs[::-1]))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            return np.zeros_like(z)
        # Horner on the polynomial part
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc * z ** self.low

    def poly_part(self) -> np.ndarray:
        """Coefficients (ascending) of q with self = z^low q."""
        return np.array(self.coeffs)

    def roots(self) -> np.ndarray:
        """Nonzero roots (of the polynomial part)."""
        if len(self.coeffs) <= 1:
            return np.zeros(0, complex)
        return np.roots(self.coeffs[::-1])

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1


def circle_samples(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


# --- rank-1 reduction ---------------------------------------------------------

@dataclass(frozen=True)
class Rank1Reduction:
    """Images of AP data under e_{n beta} -> z^n.

    ``generator`` is None when every frequency is zero (constants only).
    ``images`` mirrors the input: a LaurentPoly, a list of lists, or a list of those.
    """

    basis: FrequencyBasis
    halfspace: Halfspace
    generator: Frequency | None
    images: object

    def exponent(self, coords: Coords) -> int:
        return _exponent(self.generator, coords)

    def to_laurent(self, f: ApPolynomial) -> LaurentPoly:
        return LaurentPoly.from_dict({self.exponent(c): v for c, v in f.items()})

    def to_laurent_matrix(self, G: ApMatrix) -> list[list[LaurentPoly]]:
        return [[self.to_laurent(e) for e in row] for row in G.entries]

    def back(self, p: LaurentPoly) -> ApPolynomial:
        g = self.generator
        terms = {}
        for n, v in p.to_dict().items():
            if g is None:
                if n != 0:
                    raise DomainError("no generator to carry a nonzero exponent")
                terms[(0,) * self.basis.rank_r] = v
            else:
                terms[tuple(n * x for x in g.coords)] = v
        return ApPolynomial(self.basis, terms)

    def back_matrix(self, M: Sequence[Sequence[LaurentPoly]]) -> ApMatrix:
        return ApMatrix([[self.back(p) for p in row] for row in M], self.basis)


def _exponent(generator: Frequency | None, coords: Coords) -> int:
    if not any(coords):
        return 0
    if generator is None:
        raise UnsupportedRankError("frequency outside the rank-0 group")
    g = generator.coords
    i = next(i for i, x in enumerate(g) if x)
    n, rem = divmod(coords[i], g[i])
    if rem or any(n * gx != cx for gx, cx in zip(g, coords)):
        raise UnsupportedRankError(f"frequency {coords} is not a multiple of the generator {g}")
    return n


def _collect_spectrum(obj, acc: set):
    if isinstance(obj, ApPolynomial):
        acc.update(c for c, _ in obj.items())
        return obj.basis
    if isinstance(obj, ApMatrix):
        acc.update(obj.spectrum())
        return obj.basis
    basis = None
    for o in obj:
        b = _collect_spectrum(o, acc)
        if basis is not None and b != basis:
            raise DomainError("inputs use different bases")
        basis = b
    return basis


def find_generator(basis: FrequencyBasis, spectrum, S: Halfspace) -> Frequency | None:
    """Generator (inside S) of the group spanned by ``spectrum``; rank must be <= 1."""
    vecs = [c for c in spectrum if any(c)]
    if not vecs:
        return None
    rows = rq.hnf_rows(vecs)
    if len(rows) > 1:
        raise UnsupportedRankError(
            f"spectra generate a group of rank {len(rows)}; only commensurable (rank-1) spectra are supported"
        )
    g = rows[0]
    if S.sign(basis, g) < 0:
        g = tuple(-x for x in g)
    return Frequency(basis, g)


def rank1_reduce(f, S: Halfspace) -> Rank1Reduction:
    """Map an ApPolynomial, ApMatrix, or a list of them to Laurent data."""
    spec: set = set()
    basis = _collect_spectrum(f, spec)
    gen = find_generator(basis, spec, S)

    def image(o):
        if isinstance(o, ApPolynomial):
            return LaurentPoly.from_dict({_exponent(gen, c): v for c, v in o.items()})
        if isinstance(o, ApMatrix):
            return [[image(e) for e in row] for row in o.entries]
        return [image(x) for x in o]

    return Rank1Reduction(basis, S, gen, image(f))


# --- winding and splitting ----------------------------------------------------

def _check_circle(roots: np.ndarray):
    if roots.size and np.min(np.abs(np.abs(roots) - 1.0)) < CIRCLE_TOL:
        raise NotInvertibleError("symbol has a root on the unit circle")


def winding_index(p: LaurentPoly) -> int:
    """Winding number of p(e^{i theta}) about 0."""
    if p.is_zero():
        raise NotInvertibleError("zero symbol")
    r = p.roots()
    _check_circle(r)
    return p.low + int(np.sum(np.abs(r) < 1.0))


def phase_winding(p: LaurentPoly, samples: int = 4096) -> int:
    """Independent winding count: accumulated phase of p on a circle grid / 2pi."""
    z = np.exp(2j * np.pi * np.arange(samples + 1) / samples)
    v = p(z)
    dphi = np.angle(v[1:] / v[:-1])
    return int(np.rint(np.sum(dphi) / (2 * np.pi)))


def spectral_split(p: LaurentPoly) -> tuple[LaurentPoly, int, LaurentPoly]:
    """p = p_plus * z^w * p_minus with p_plus invertible in the plus algebra
    (roots outside the closed disc) and p_minus = prod(1 - r/z) over inner roots."""
    if p.is_zero():
        raise NotInvertibleError("zero symbol")
    q = p.poly_part()
    r = p.roots()
    _check_circle(r)
    inner = r[np.abs(r) < 1.0]
    if inner.size == 0:
        return LaurentPoly(0, q), p.low, LaurentPoly.const(1.0)
    monic_in = np.poly(inner)  # descending, prod(z - r)
    quot, _ = np.polydiv(q[::-1], monic_in)  # division by inner roots is stable from the top
    p_plus = LaurentPoly(0, quot[::-1])
    p_minus = LaurentPoly(-len(inner), monic_in[::-1])
    return p_plus, p.low + len(inner), p_minus


def _tail_residual(c: np.ndarray, q: np.ndarray, N: int) -> float:
    """||c * q[:N] - 1||_1 given that q obeys the inverse recurrence up to N."""
    d = len(c) - 1
    lo = max(0, N - d)
    w = q[lo:N]
    conv = np.convolve(c, w)
    # entries of the full product at indices >= N
    return float(np.sum(np.abs(conv[N - lo :])))


def series_inverse(c: np.ndarray, tail_tol: float, max_terms: int = MAX_SERIES_TERMS) -> np.ndarray:
    """Truncated power series q with ||c * q - 1||_1 <= tail_tol (c[0] != 0)."""
    c = np.asarray(c, complex)
    d = len(c) - 1
    if d == 0:
        return np.array([1.0 / c[0]])
    inv0 = 1.0 / c[0]
    q = np.zeros(256, complex)
    q[0] = inv0
    k = 1
    while _tail_residual(c, q, k) > tail_tol:
        if k >= max_terms:
            raise ConditioningError("series inverse did not reach the tail tolerance")
        if k == len(q):
            q = np.concatenate([q, np.zeros(len(q), complex)])
        m = min(d, k)
        q[k] = -inv0 * np.dot(c[1 : m + 1], q[k - 1 :: -1][:m])
        k += 1
    return q[:k].copy()


def laurent_inverse_truncated(p: LaurentPoly, side: str = "plus", tail_tol: float = 1e-12) -> LaurentPoly:
    """One-sided truncated inverse of a plus factor (side='plus') or minus factor."""
    if side not in ("plus", "minus"):
        raise DomainError("side must be 'plus' or 'minus'")
    if p.is_zero():
        raise NotInvertibleError("zero has no inverse")
    if side == "minus":
        return _reflect(laurent_inverse_truncated(_reflect(p), "plus", tail_tol))
    if p.low < 0:
        raise DomainError("plus factor has negative exponents")
    if p.low > 0:
        raise NotInvertibleError("plus factor vanishes at z = 0")
    r = p.roots()
    _check_circle(r)
    if r.size and np.min(np.abs(r)) < 1.0:
        raise NotInvertibleError("plus factor has a root inside the unit disc")
    return LaurentPoly(0, series_inverse(p.coeffs, tail_tol))


def _reflect(p: LaurentPoly) -> LaurentPoly:
    """z -> 1/z (without conjugation)."""
    if p.is_zero():
        return p
    return LaurentPoly(-p.high, p.coeffs[::-1])


# --- polynomial matrices ------------------------------------------------------
#
# A polynomial matrix is an object ndarray of LaurentPoly; helpers below keep
# everything in the polynomial ring C[z] unless stated otherwise.

def pm(rows) -> np.ndarray:
    rows = [[x if isinstance(x, LaurentPoly) else LaurentPoly.const(x) for x in r] for r in rows]
    a = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            a[i, j] = x
    return a


def pm_identity(n: int) -> np.ndarray:
    return pm([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)])


def pm_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DomainError("shape mismatch")
    out = np.empty((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = LaurentPoly.zero()
            for k in range(a.shape[1]):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def pm_eval(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Values at points z: shape (len(z), m, n)."""
    z = np.atleast_1d(np.asarray(z, complex))
    out = np.empty((len(z),) + a.shape, complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[:, i, j] = a[i, j](z)
    return out


def pm_norm1(a: np.ndarray) -> float:
    return max(x.norm1() for x in a.flat)


def pm_star(a: np.ndarray) -> np.ndarray:
    return np.array([[a[j, i].star() for j in range(a.shape[0])] for i in range(a.shape[1])], dtype=object).reshape(
        a.shape[1], a.shape[0]
    )


def unit_det_spread(a: np.ndarray, samples: int = 256) -> float:
    """Relative spread of |det a(z)| on the circle (0 for a unit c z^d)."""
    d = np.abs(np.linalg.det(pm_eval(a, circle_samples(samples))))
    if np.max(d) == 0:
        return np.inf
    return float((np.max(d) - np.min(d)) / np.max(d))


# --- gcd / bezout -------------------------------------------------------------

def _vanishes(q: LaurentPoly, r: complex, rel: float = 1e-7) -> bool:
    scale = sum(abs(c) * abs(r) ** (q.low + j) for j, c in enumerate(q.coeffs))
    return abs(q(np.array([r]))[0]) <= rel * max(scale, 1e-300)


def common_roots(polys: Sequence[LaurentPoly]) -> list[complex]:
    """Nonzero roots shared (numerically) by every nonzero entry, with multiplicity."""
    work = [LaurentPoly(0, p.coeffs) for p in polys if not p.is_zero()]
    found: list[complex] = []
    while work:
        base = min(work, key=lambda p: len(p.coeffs))
        hit = None
        for r in base.roots():
            if all(_vanishes(p, r) for p in work):
                hit = r
                break
        if hit is None:
            break
        found.append(complex(hit))
        lin = np.array([1.0, -hit])
        work = [LaurentPoly(0, np.polydiv(p.coeffs[::-1], lin)[0][::-1]) for p in work]
    return found


def _sylvester_bezout(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polynomials x, y (ascending coefficients) with a x + b y = 1, deg x < deg b, deg y < deg a."""
    da, db = len(a) - 1, len(b) - 1
    if da == 0:
        return np.array([1.0 / a[0]]), np.zeros(1, complex)
    if db == 0:
        return np.zeros(1, complex), np.array([1.0 / b[0]])
    n = da + db
    M = np.zeros((n, n), complex)
    for j in range(db):
        M[j : j + da + 1, j] = a
    for j in range(da):
        M[j : j + db + 1, db + j] = b
    rhs = np.zeros(n, complex)
    rhs[0] = 1.0
    sol = np.linalg.solve(M, rhs)
    # one round of iterative refinement
    sol = sol + np.linalg.solve(M, rhs - M @ sol)
    return sol[:db], sol[db:]


def _strip(p: LaurentPoly) -> tuple[int, LaurentPoly]:
    return p.low, LaurentPoly(0, p.coeffs)


def _mix_weights(count: int, attempt: int) -> np.ndarray:
    rng = np.random.default_rng(1000 + attempt)
    return rng.uniform(0.5, 1.5, count) * np.exp(2j * np.pi * rng.uniform(size=count))


def bezout_solve(a: Sequence[LaurentPoly], ring: str = "laurent", tol: float = 1e-9):
    """b with sum a_i b_i = 1 over the Laurent ring (or C[z] with ring='poly'),
    or None when the entries share a root (in C\\{0}, resp. C)."""
    a = list(a)
    if not a or all(p.is_zero() for p in a):
        return None
    if ring not in ("laurent", "poly"):
        raise DomainError("ring must be 'laurent' or 'poly'")
    if ring == "poly" and any(p.low < 0 for p in a if not p.is_zero()):
        raise DomainError("negative exponents in a polynomial-ring Bezout problem")
    zero = LaurentPoly.zero()
    if ring == "poly":
        # a root at 0 is common iff every entry has low > 0
        if all(p.low > 0 for p in a if not p.is_zero()):
            return None
        shifts = [0] * len(a)
        q = [p for p in a]
    else:
        shifts, q = zip(*[_strip(p) for p in a]) if a else ((), ())
        shifts, q = list(shifts), list(q)
    nz = [i for i, p in enumerate(q) if not p.is_zero()]
    # unit shortcut
    for i in nz:
        if len(q[i].coeffs) == 1 and (ring == "laurent" or q[i].low == 0):
            b = [zero] * len(a)
            b[i] = LaurentPoly(-a[i].low, [1.0 / a[i].coeffs[0]])
            return b
    if common_roots([q[i] for i in nz]):
        return None
    if len(nz) == 1:
        return None
    base = min(nz, key=lambda i: (len(q[i].coeffs), i))
    others = [i for i in nz if i != base]
    for attempt in range(20):
        w = _mix_weights(len(others), attempt)
        if len(others) == 1:
            w = np.ones(1)
        mix = LaurentPoly.zero()
        for t, i in zip(w, others):
            mix = mix + q[i] * complex(t)
        qb = q[base]
        if not _coprime(qb, mix, ring):
            if len(others) == 1:
                return None
            continue
        # q's with ring 'poly' may carry z-powers; work on full polynomial arrays
        ab = np.concatenate([np.zeros(qb.low, complex), qb.coeffs])
        am = np.concatenate([np.zeros(mix.low, complex), mix.coeffs])
        x, y = _sylvester_bezout(ab, am)
        b = [zero] * len(a)
        b[base] = LaurentPoly(-shifts[base], x)
        for t, i in zip(w, others):
            b[i] = LaurentPoly(-shifts[i], y * complex(t))
        res = sum((ai * bi for ai, bi in zip(a, b)), LaurentPoly.zero()) - 1.0
        if res.norm1() <= tol:
            return b
        if len(others) == 1:
            break
    raise ConditioningError("Bezout system too ill-conditioned to meet the residual tolerance")


def bezout_residual(a: Sequence[LaurentPoly], b: Sequence[LaurentPoly]) -> float:
    return (sum((x * y for x, y in zip(a, b)), LaurentPoly.zero()) - 1.0).norm1()


# --- unimodular column reduction ----------------------------------------------

def _row_reducer(r: Sequence[LaurentPoly], ring: str):
    """Unimodular U, U^{-1} (over ``ring``) with r U = e_1 for a unimodular row r."""
    n = len(r)
    U = pm_identity(n)
    Ui = pm_identity(n)
    r = list(r)
    if n == 1:
        if not (len(r[0].coeffs) == 1 and (ring == "laurent" or r[0].low == 0)):
            raise CompletionError("single entry is not a unit")
        c = r[0]
        return pm([[LaurentPoly(-c.low, [1.0 / c.coeffs[0]])]]), pm([[c]])

    def unit_at(i):
        p = r[i]
        return len(p.coeffs) == 1 and (ring == "laurent" or p.low == 0)

    piv = next((i for i in range(n) if unit_at(i)), None)
    if piv is not None:
        inv = LaurentPoly(-r[piv].low, [1.0 / r[piv].coeffs[0]])
        # column swap piv <-> 0, scale col 0 by 1/unit, clear the rest
        P = _perm(n, 0, piv)
        Sc = pm_identity(n)
        Sc[0, 0] = inv
        Sci = pm_identity(n)
        Sci[0, 0] = r[piv]
        rp = [r[piv]] + [r[j] for j in _perm_order(n, 0, piv)[1:]]
        E = pm_identity(n)
        Ei = pm_identity(n)
        for l in range(1, n):
            E[0, l] = -rp[l]
            Ei[0, l] = rp[l]
        U = pm_mul(pm_mul(P, Sc), E)
        Ui = pm_mul(pm_mul(Ei, Sci), P)
        return U, Ui

    # find a coprime pair, mixing further columns into column j when needed
    pair = None
    for i in range(n):
        for j in range(i + 1, n):
            if _coprime(r[i], r[j], ring):
                pair = (i, j)
                break
        if pair:
            break
    E1 = pm_identity(n)
    E1i = pm_identity(n)
    if pair is None:
        i, j = 0, 1
        rest = list(range(2, n))
        for attempt in range(20):
            w = _mix_weights(len(rest), attempt)
            rj = r[j]
            for t, l in zip(w, rest):
                rj = rj + r[l] * complex(t)
            if _coprime(r[i], rj, ring):
                for t, l in zip(w, rest):
                    E1[l, j] = LaurentPoly.const(complex(t))
                    E1i[l, j] = LaurentPoly.const(-complex(t))
                r = list(r)
                r[j] = rj
                pair = (i, j)
                break
        if pair is None:
            raise CompletionError("row is not unimodular")
    i, j = pair
    b = bezout_solve([r[i], r[j]], ring=ring)
    if b is None:
        raise CompletionError("row is not unimodular")
    x, y = b
    # move (i, j) to (0, 1)
    order = [i, j] + [l for l in range(n) if l not in (i, j)]
    P = _perm_matrix(order)
    Pi = _perm_matrix_inverse(order)
    rp = [r[l] for l in order]
    Blk = pm_identity(n)
    Blk[0, 0], Blk[0, 1], Blk[1, 0], Blk[1, 1] = x, -rp[1], y, rp[0]
    Blki = pm_identity(n)
    Blki[0, 0], Blki[0, 1], Blki[1, 0], Blki[1, 1] = rp[0], rp[1], -y, x
    E2 = pm_identity(n)
    E2i = pm_identity(n)
    for l in range(2, n):
        E2[0, l] = -rp[l]
        E2i[0, l] = rp[l]
    U = pm_mul(pm_mul(pm_mul(E1, P), Blk), E2)
    Ui = pm_mul(pm_mul(pm_mul(E2i, Blki), Pi), E1i)
    return U, Ui


def _coprime(a: LaurentPoly, b: LaurentPoly, ring: str) -> bool:
    if a.is_zero() or b.is_zero():
        return False
    if ring == "poly" and a.low > 0 and b.low > 0:
        return False
    return not common_roots([a, b])


def _perm_order(n, i, j):
    order = list(range(n))
    order[i], order[j] = order[j], order[i]
    return order


def _perm(n, i, j):
    return _perm_matrix(_perm_order(n, i, j))


def _perm_matrix(order):
    """Column permutation: (A P)[:, k] = A[:, order[k]]."""
    n = len(order)
    return pm([[1.0 if i == order[k] else 0.0 for k in range(n)] for i in range(n)])


def _perm_matrix_inverse(order):
    P = _perm_matrix(order)
    return P.T.copy()


def row_gcd(r: Sequence[LaurentPoly]) -> LaurentPoly:
    """Monic gcd over C[z] of polynomial entries (from common roots)."""
    roots = common_roots(r)
    g = np.poly(roots)[::-1] if roots else np.array([1.0])
    low = min((p.low for p in r if not p.is_zero()), default=0)
    return LaurentPoly(low, g, trim=False) if low > 0 else LaurentPoly(0, g)


def exact_divide(p: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    if p.is_zero():
        return p
    quot, _ = np.polydiv(p.coeffs[::-1], g.coeffs[::-1])
    return LaurentPoly(p.low - g.low, quot[::-1])


def column_reduce(M: np.ndarray, ring: str = "poly"):
    """Unimodular U (with inverse) such that M U = [L, 0], L lower triangular p x p.

    Returns (U, Uinv, diag) where diag are the gcd pivots on L's diagonal.
    """
    p, n = M.shape
    if p > n:
        raise DomainError("more rows than columns")
    U = pm_identity(n)
    Ui = pm_identity(n)
    pivots = []
    work = M.copy()
    for k in range(p):
        row = list(work[k, k:])
        if all(x.is_zero() for x in row):
            raise CompletionError("rank-deficient row in column reduction")
        g = row_gcd(row)
        red = [exact_divide(x, g) for x in row]
        Uk, Uki = _row_reducer(red, ring)
        full = pm_identity(n)
        fulli = pm_identity(n)
        full[k:, k:] = Uk
        fulli[k:, k:] = Uki
        U = pm_mul(U, full)
        Ui = pm_mul(fulli, Ui)
        work = pm_mul(work, full)
        pivots.append(g)
    return U, Ui, pivots


def complete_unimodular_row(a: Sequence[LaurentPoly], ring: str = "laurent") -> np.ndarray:
    """Square matrix with first row exactly ``a`` and unit determinant."""
    a = list(a)
    n = len(a)
    if bezout_solve(a, ring=ring) is None:
        raise CompletionError("row is not unimodular")
    _, Ui = _row_reducer(a, ring)
    F = Ui.copy()
    for j in range(n):
        F[0, j] = a[j]
    return F


# --- matrix power series ------------------------------------------------------

def pm_to_array(P: np.ndarray) -> tuple[int, np.ndarray]:
    """(low, coeffs) with coeffs of shape (deg + 1, m, n) so P = sum z^(low+j) coeffs[j]."""
    nz = [x for x in P.flat if not x.is_zero()]
    if not nz:
        return 0, np.zeros((1,) + P.shape, complex)
    low = min(x.low for x in nz)
    high = max(x.high for x in nz)
    out = np.zeros((high - low + 1,) + P.shape, complex)
    for (i, j), x in np.ndenumerate(P):
        if not x.is_zero():
            out[x.low - low : x.high - low + 1, i, j] = x.coeffs
    return low, out


def array_to_pm(low: int, coeffs: np.ndarray) -> np.ndarray:
    _, m, n = coeffs.shape
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            out[i, j] = LaurentPoly(low, coeffs[:, i, j])
    return out


def _matrix_tail_residual(P: np.ndarray, X: np.ndarray, N: int) -> float:
    d = P.shape[0] - 1
    res = 0.0
    # entries of P * X[:N] at indices N .. N + d - 1
    for n in range(N, N + d):
        acc = np.zeros(P.shape[1:], complex) if d else None
        for j in range(n - N + 1, d + 1):
            acc = acc + P[j] @ X[n - j]
        res = max(res, float(np.max(np.sum(np.abs(acc), axis=1))) if acc is not None else 0.0)
    return res


def matrix_series_inverse(P: np.ndarray, tail_tol: float = 1e-12, max_terms: int = 1 << 14) -> np.ndarray:
    """Truncated inverse (as a polynomial matrix) of a square plus-side polynomial matrix.

    The residual ``P X - I`` is supported beyond the truncation; its size per
    coefficient is kept below ``tail_tol``.  Raises NotInvertibleError when
    P(0) is singular or det P has zeros in the closed unit disc.
    """
    low, C = pm_to_array(P)
    if low < 0:
        raise DomainError("negative exponents in a plus-side matrix")
    if low > 0:
        raise NotInvertibleError("plus-side matrix vanishes at z = 0")
    m = C.shape[1]
    if C.shape[1] != C.shape[2]:
        raise DomainError("matrix must be square")
    z = circle_samples(1024)
    dets = np.linalg.det(pm_eval(P, z))
    if np.min(np.abs(dets)) < CIRCLE_TOL * max(1.0, np.max(np.abs(dets))):
        raise NotInvertibleError("determinant vanishes on the unit circle")
    if phase_winding_values(dets) != 0:
        raise NotInvertibleError("determinant has zeros inside the unit disc")
    try:
        inv0 = np.linalg.inv(C[0])
    except np.linalg.LinAlgError as exc:
        raise NotInvertibleError("P(0) is singular") from exc
    d = C.shape[0] - 1
    X = np.zeros((256, m, m), complex)
    X[0] = inv0
    k = 1
    while _matrix_tail_residual(C, X, k) > tail_tol:
        if k >= max_terms:
            raise ConditioningError("matrix series inverse did not reach the tail tolerance")
        if k == X.shape[0]:
            X = np.concatenate([X, np.zeros_like(X)])
        acc = np.zeros((m, m), complex)
        for j in range(1, min(d, k) + 1):
            acc += C[j] @ X[k - j]
        X[k] = -inv0 @ acc
        k += 1
    return array_to_pm(0, X[:k])


def phase_winding_values(v: np.ndarray) -> int:
    """Winding number from values sampled at equispaced circle points (closed loop)."""
    v = np.concatenate([v, v[:1]])
    return int(np.rint(np.sum(np.angle(v[1:] / v[:-1])) / (2 * np.pi)))
