"""Factorizations G = G+ diag(e_lambda) G- of AP matrix functions.

G+ has spectrum in the halfspace S and is right invertible over the plus
algebra; G- has spectrum in -S and is left invertible over the minus algebra.
All constructive paths go through the rank-1 Laurent reduction, so they apply
to commensurable spectra only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .apcore import ApMatrix, ApPolynomial, Frequency, hstack, mat_distance, vstack
from .errors import (
    ApwError,
    CompletionError,
    ConditioningError,
    DimensionError,
    DomainError,
    NotInvertibleError,
    UnsupportedRankError,
)
from .geometry import Halfspace, SpectralMask, project, spectrum_in
from .laurent import (
    LaurentPoly,
    Rank1Reduction,
    circle_samples,
    column_reduce,
    find_generator,
    laurent_inverse_truncated,
    matrix_series_inverse,
    phase_winding_values,
    pm,
    pm_eval,
    pm_mul,
    rank1_reduce,
    spectral_split,
)

STATUSES = ("factored", "canonical", "not_invertible", "unsupported_rank", "completion_failed")
VERDICTS = ("likely_canonical", "not_canonical_evidence", "inconclusive")


@dataclass
class ApFactorization:
    g_plus: ApMatrix
    indices: tuple[Frequency, ...]
    g_minus: ApMatrix
    halfspace: Halfspace
    residual: float
    p: int
    certificates: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.indices = tuple(self.indices)
        if self.g_plus.n != self.p or self.g_minus.m != self.p or len(self.indices) != self.p:
            raise DimensionError("factor shapes disagree with p")
        if self.residual < 0:
            raise DomainError("residual must be nonnegative")

    @property
    def is_canonical(self) -> bool:
        return all(not any(lam.coords) for lam in self.indices)

    def middle(self) -> ApMatrix:
        basis = self.g_plus.basis
        rows = []
        for i, lam in enumerate(self.indices):
            row = [ApPolynomial.zero(basis)] * self.p
            row[i] = ApPolynomial.monomial(basis, lam.coords)
            rows.append(row)
        return ApMatrix(rows, basis)

    def product(self) -> ApMatrix:
        return self.g_plus @ self.middle() @ self.g_minus


@dataclass
class FactorizationReport:
    status: str
    factorization: ApFactorization | None = None
    diagnostics: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DomainError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status in ("factored", "canonical")


def _zero_index(basis) -> Frequency:
    return Frequency(basis, (0,) * basis.rank_r)


def _index(red: Rank1Reduction, w: int) -> Frequency:
    if red.generator is None:
        if w:
            raise DomainError("nonzero index without a generator")
        return _zero_index(red.basis)
    return Frequency(red.basis, tuple(w * c for c in red.generator.coords))


def _split_at_zero(q: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """(terms with exponent >= 0, terms with exponent < 0)."""
    d = q.to_dict()
    return (
        LaurentPoly.from_dict({n: c for n, c in d.items() if n >= 0}),
        LaurentPoly.from_dict({n: c for n, c in d.items() if n < 0}),
    )


def _pm_residual_to_identity(P: np.ndarray) -> float:
    n = P.shape[0]
    return max((P[i, j] - (1.0 if i == j else 0.0)).norm1() for i in range(n) for j in range(P.shape[1]))


# --- trivial representation ---------------------------------------------------

def trivial_representation(G: ApMatrix, S: Halfspace) -> tuple[ApMatrix, ApMatrix]:
    """G = [Pi_S G | I_m] [I_n ; Pi_{(-S)\\{0}} G], exactly.

    The middle dimension is n + m, larger than max(m, n); this is the
    cautionary example showing why the size constraint p = max(m, n) matters.
    """
    basis = G.basis
    plus = project(G, SpectralMask("S", S))
    minus = project(G, SpectralMask("minus_S_minus_zero", S))
    g_plus = hstack(plus, ApMatrix.identity(basis, G.m))
    g_minus = vstack(ApMatrix.identity(basis, G.n), minus)
    return g_plus, g_minus


# --- scalar ---------------------------------------------------------------------

@dataclass
class _ScalarSplit:
    plus: LaurentPoly
    w: int
    minus: LaurentPoly
    inv_plus: LaurentPoly
    inv_minus: LaurentPoly


def _split_scalar(p: LaurentPoly, tail_tol: float) -> _ScalarSplit:
    pp, w, pm_ = spectral_split(p)
    inv_p = laurent_inverse_truncated(pp, "plus", tail_tol)
    inv_m = laurent_inverse_truncated(pm_, "minus", tail_tol)
    return _ScalarSplit(pp, w, pm_, inv_p, inv_m)


def scalar_factorize(g: ApPolynomial, S: Halfspace, tail_tol: float = 1e-12) -> FactorizationReport:
    """Wiener-Hopf factorization of a scalar with commensurable spectrum."""
    try:
        red = rank1_reduce(g, S)
    except UnsupportedRankError as exc:
        return FactorizationReport("unsupported_rank", None, str(exc))
    try:
        sp = _split_scalar(red.images, tail_tol)
    except (NotInvertibleError, ConditioningError) as exc:
        return FactorizationReport("not_invertible", None, str(exc))
    basis = g.basis
    lam = _index(red, sp.w)
    g_plus = ApMatrix([[red.back(sp.plus)]], basis)
    g_minus = ApMatrix([[red.back(sp.minus)]], basis)
    fact = ApFactorization(g_plus, (lam,), g_minus, S, 0.0, 1)
    fact.residual = mat_distance(ApMatrix([[g]], basis), fact.product())
    fact.certificates = {
        "plus_inverse_residual": (sp.plus * sp.inv_plus - 1.0).norm1(),
        "minus_inverse_residual": (sp.minus * sp.inv_minus - 1.0).norm1(),
    }
    status = "canonical" if sp.w == 0 else "factored"
    return FactorizationReport(status, fact, f"winding index {sp.w}")


# --- rows and columns -----------------------------------------------------------

def row_factorize(
    G: ApMatrix, S: Halfspace, pivot: int | None = None, tail_tol: float = 1e-12
) -> FactorizationReport:
    """Factor a 1 x n row around an invertible pivot entry g_j.

    With g_j = g+ e_lam g- and q_k = g_j^{-1} g_k, the other entries get
    h_k+ = g+ Pi_S(q_k) and h_k- = g- Pi_{(-S)\\{0}}(q_k), so that
    g_k = e_lam (g+ h_k- + h_k+ g-).  The pivot is tried first and the
    remaining entries serve as fallbacks in their natural order.
    """
    if G.m != 1:
        raise DimensionError("row_factorize expects a single row")
    n = G.n
    try:
        red = rank1_reduce(G, S)
    except UnsupportedRankError as exc:
        return FactorizationReport("unsupported_rank", None, str(exc))
    row = red.images[0]
    if pivot is not None and not 0 <= pivot < n:
        raise DimensionError(f"pivot {pivot} out of range")
    candidates = ([pivot] if pivot is not None else []) + [j for j in range(n) if j != pivot]
    failures = []
    sp = None
    for j in candidates:
        try:
            sp = _split_scalar(row[j], tail_tol)
            break
        except (NotInvertibleError, ConditioningError) as exc:
            failures.append(f"entry {j}: {exc}")
    if sp is None:
        return FactorizationReport("not_invertible", None, "no invertible pivot; " + "; ".join(failures))
    order = [j] + [k for k in range(n) if k != j]

    inv1 = sp.inv_minus * LaurentPoly.monomial(-sp.w) * sp.inv_plus
    plus_row = [sp.plus]
    minus_first = [sp.minus]
    for k in order[1:]:
        q_plus, q_minus = _split_at_zero(inv1 * row[k])
        plus_row.append(sp.plus * q_plus)
        minus_first.append(sp.minus * q_minus)

    # minus factor in pivot-first order, then columns scattered back
    Mperm = pm([[LaurentPoly.zero()] * n for _ in range(n)])
    Mperm[0, :] = minus_first
    for i in range(1, n):
        Mperm[i, i] = sp.minus
    Gm = Mperm.copy()
    for c, k in enumerate(order):
        Gm[:, k] = Mperm[:, c]

    lam = _index(red, sp.w)
    g_plus = red.back_matrix([plus_row])
    g_minus = red.back_matrix(Gm.tolist())
    fact = ApFactorization(g_plus, (lam,) * n, g_minus, S, 0.0, n)
    fact.residual = mat_distance(G, fact.product())

    # certificates: X = [g+^{-1}; 0...] and the explicit inverse of the triangular minus factor
    inv_m2 = sp.inv_minus * sp.inv_minus
    Linv = pm([[LaurentPoly.zero()] * n for _ in range(n)])
    for i in range(n):
        Linv[i, i] = sp.inv_minus
    for c in range(1, n):
        Linv[0, c] = -(inv_m2 * minus_first[c])
    fact.certificates = {
        "plus_right_inverse_residual": (sp.plus * sp.inv_plus - 1.0).norm1(),
        "minus_left_inverse_residual": _pm_residual_to_identity(pm_mul(Linv, Mperm)),
    }
    status = "canonical" if sp.w == 0 else "factored"
    return FactorizationReport(status, fact, f"pivot {j}, winding index {sp.w}")


def _transpose_fact(fact: ApFactorization, S: Halfspace) -> ApFactorization:
    return ApFactorization(
        fact.g_minus.transpose(), fact.indices, fact.g_plus.transpose(), S, fact.residual, fact.p,
        {_dual_name(k): v for k, v in fact.certificates.items()},
    )


def _dual_name(name: str) -> str:
    swaps = {"plus_right": "minus_left", "minus_left": "plus_right", "plus_": "minus_", "minus_": "plus_"}
    for a, b in swaps.items():
        if name.startswith(a):
            return b + name[len(a):]
    return name


def column_factorize(
    G: ApMatrix, S: Halfspace, pivot: int | None = None, tail_tol: float = 1e-12
) -> FactorizationReport:
    """m x 1 case by transposition: factor G^T over -S and transpose back."""
    if G.n != 1:
        raise DimensionError("column_factorize expects a single column")
    rep = row_factorize(G.transpose(), S.negated(), pivot, tail_tol)
    if rep.factorization is None:
        return rep
    return FactorizationReport(rep.status, _transpose_fact(rep.factorization, S), rep.diagnostics)


def factorize(G: ApMatrix | ApPolynomial, S: Halfspace, pivot: int | None = None,
              tail_tol: float = 1e-12) -> FactorizationReport:
    """Dispatch on shape: scalar, single row, or single column."""
    if isinstance(G, ApPolynomial):
        return scalar_factorize(G, S, tail_tol)
    if G.shape == (1, 1):
        return scalar_factorize(G[0, 0], S, tail_tol)
    if G.m == 1:
        return row_factorize(G, S, pivot, tail_tol)
    if G.n == 1:
        return column_factorize(G, S, pivot, tail_tol)
    raise DomainError("explicit factorization is implemented for scalars, rows and columns only")


# --- augmentation ---------------------------------------------------------------

def _plus_unit_det(P: np.ndarray, samples: int = 1024) -> tuple[float, int]:
    vals = np.linalg.det(pm_eval(P, circle_samples(samples)))
    return float(np.min(np.abs(vals))), phase_winding_values(vals)


def _extra_rows(Gp: np.ndarray) -> np.ndarray:
    """Rows completing a plus-side m x n polynomial matrix to a plus-invertible square one."""
    m, n = Gp.shape
    if m == 1:
        # a plus-invertible entry lets the remaining unit vectors finish the job
        for j in range(n):
            x = Gp[0, j]
            if x.is_zero() or x.low != 0:
                continue
            r = x.roots()
            if r.size == 0 or np.min(np.abs(r)) > 1.0 + 1e-9:
                return pm([[1.0 if c == i else 0.0 for c in range(n)] for i in range(n) if i != j])
    _, Ui, pivots = column_reduce(Gp, ring="poly")
    for g in pivots:
        r = g.roots()
        if g.low > 0 or (r.size and np.min(np.abs(r)) <= 1.0 + 1e-9):
            raise CompletionError("plus factor is not right invertible over the plus algebra")
    return Ui[m:, :]


def augment_to_square(
    G: ApMatrix, fact: ApFactorization, S: Halfspace
) -> tuple[ApMatrix, ApFactorization]:
    """Extend G (m x n, m < n) by n - m rows to a square F with the same indices.

    F+ keeps G+ as its first rows and appends rows making it invertible over
    the plus algebra; F = F+ D G-.  The first m rows of F are set to G itself.
    The column case m > n is handled by transposition.
    """
    m, n = G.shape
    if m == n:
        return G, fact
    if m > n:
        dual = _transpose_fact(fact, S.negated())
        Ft, ft = augment_to_square(G.transpose(), dual, S.negated())
        return Ft.transpose(), _transpose_fact(ft, S)
    if fact.g_plus.shape != (m, n) or fact.g_minus.shape != (n, n):
        raise DimensionError("factorization does not have p = n")
    try:
        red = rank1_reduce([fact.g_plus, fact.g_minus, G], S)
    except UnsupportedRankError:
        raise
    Gp = pm(red.images[0])
    if any((not x.is_zero()) and x.low < 0 for x in Gp.flat):
        raise CompletionError("G+ has frequencies outside S")
    try:
        extra = _extra_rows(Gp)
    except (ConditioningError, CompletionError) as exc:
        raise CompletionError(f"plus-ring completion failed: {exc}") from exc
    Fp_poly = np.vstack([Gp, extra])
    det_min, det_wind = _plus_unit_det(Fp_poly)
    if det_min < 1e-9 or det_wind != 0:
        raise CompletionError("completed plus factor is not invertible over the plus algebra")
    extra_ap = red.back_matrix(extra.tolist())
    F_plus = ApMatrix(list(fact.g_plus.entries) + list(extra_ap.entries), G.basis)
    ffact = ApFactorization(F_plus, fact.indices, fact.g_minus, S, 0.0, n)
    prod = ffact.product()
    F = ApMatrix(list(G.entries) + list(prod.entries[m:]), G.basis)
    ffact.residual = mat_distance(F, prod)
    ffact.certificates = dict(fact.certificates)
    ffact.certificates["plus_det_min_modulus"] = det_min
    return F, ffact


def drop_rows(F: ApMatrix, fact: ApFactorization, m: int) -> tuple[ApMatrix, ApFactorization]:
    """Keep the first m rows of F; the factorization keeps its indices and minus factor."""
    G = F.rows(range(m))
    sub = ApFactorization(fact.g_plus.rows(range(m)), fact.indices, fact.g_minus, fact.halfspace, 0.0, fact.p)
    sub.residual = mat_distance(G, sub.product())
    return G, sub


# --- verification ---------------------------------------------------------------

@dataclass
class VerificationReport:
    residual: float
    plus_mask_ok: bool
    minus_mask_ok: bool
    index_order_ok: bool
    plus_right_inverse_residual: float | None
    minus_left_inverse_residual: float | None
    violations: list[str] = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return self.plus_mask_ok and self.minus_mask_ok and self.index_order_ok


def _right_inverse_residual(P: np.ndarray, tail_tol: float) -> float:
    """Residual of G X = I for a plus-side polynomial matrix, X built by column reduction."""
    m, n = P.shape
    if m == n:
        X = matrix_series_inverse(P, tail_tol)
        return _pm_residual_to_identity(pm_mul(P, X))
    U, _, _ = column_reduce(P, ring="poly")
    L = pm_mul(P, U)[:, :m]
    X = pm_mul(U[:, :m], matrix_series_inverse(L, tail_tol))
    return _pm_residual_to_identity(pm_mul(P, X))


def _reflect_t(P: np.ndarray) -> np.ndarray:
    out = np.empty((P.shape[1], P.shape[0]), dtype=object)
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            x = P[i, j]
            out[j, i] = x if x.is_zero() else LaurentPoly(-x.high, x.coeffs[::-1])
    return out


def verify_factorization(G: ApMatrix, fact: ApFactorization, tail_tol: float = 1e-12) -> VerificationReport:
    """Residual, exact mask checks, index ordering and one-sided inverse residuals."""
    S = fact.halfspace
    violations = []
    if (G.m, G.n) != (fact.g_plus.m, fact.g_minus.n):
        raise DimensionError("factorization shape does not match G")
    residual = mat_distance(G, fact.product())
    plus_ok = spectrum_in(fact.g_plus, SpectralMask("S", S))
    minus_ok = spectrum_in(fact.g_minus, SpectralMask("minus_S", S))
    if not plus_ok:
        violations.append("g_plus has frequencies outside S")
    if not minus_ok:
        violations.append("g_minus has frequencies outside -S")
    order_ok = True
    for a, b in zip(fact.indices, fact.indices[1:]):
        diff = tuple(y - x for x, y in zip(a.coords, b.coords))
        if S.sign(a.basis, diff) < 0:
            order_ok = False
            violations.append(f"indices {a.coords} -> {b.coords} not increasing in S")
    right = fact.certificates.get("plus_right_inverse_residual")
    left = fact.certificates.get("minus_left_inverse_residual")
    if (right is None or left is None) and plus_ok and minus_ok:
        try:
            red = rank1_reduce([fact.g_plus, fact.g_minus], S)
            if right is None:
                right = _right_inverse_residual(pm(red.images[0]), tail_tol)
            if left is None:
                left = _right_inverse_residual(_reflect_t(pm(red.images[1])), tail_tol)
        except ApwError as exc:
            violations.append(f"inverse certificate unavailable: {exc}")
    return VerificationReport(residual, plus_ok, minus_ok, order_ok, right, left, violations)


# --- canonical test -------------------------------------------------------------

@dataclass
class CanonicalVerdict:
    verdict: str
    cutoffs: tuple[int, ...]
    sigma_min: tuple[float, ...]
    note: str = "finite-section heuristic for Toeplitz invertibility"


def _settles(s: Sequence[float]) -> bool:
    """Increments contract twofold and the extrapolated limit stays near the last value."""
    if len(s) < 3:
        return False
    d1, d2 = s[-3] - s[-2], s[-2] - s[-1]
    if d1 == 0 or abs(d2) > 0.5 * abs(d1):
        return False
    r = d2 / d1
    limit = s[-1] - d2 * r / (1 - r)
    return limit >= 0.5 * s[-1]


def canonical_test(
    G: ApMatrix | ApPolynomial,
    S: Halfspace,
    cutoffs: Sequence[int] = (8, 16, 32, 64),
    floor: float = 1e-6,
    rel_change: float = 1e-2,
) -> CanonicalVerdict:
    """Smallest singular values of truncated Toeplitz matrices of G^T.

    likely_canonical: the last two values stay above ``floor`` and have
    settled, either agreeing to ``rel_change`` or moving by increments that
    shrink at least twofold toward an extrapolated limit no smaller than half
    the last value (finite sections of a symbol with no zero index often
    converge only algebraically).  not_canonical_evidence: the last value is
    numerically zero, or the values halve (at least) across the last three
    cutoffs.
    """
    from .toepcorona import toeplitz_truncate

    if isinstance(G, ApPolynomial):
        G = ApMatrix([[G]], G.basis)
    if G.m != G.n:
        raise DimensionError("canonical_test needs a square matrix")
    cutoffs = tuple(sorted(int(c) for c in cutoffs))
    if len(cutoffs) < 2:
        raise DomainError("need at least two cutoffs")
    gen = find_generator(G.basis, G.spectrum(), S)
    group = [gen.coords] if gen is not None else []
    Gt = G.transpose()
    sig = []
    for N in cutoffs:
        T = toeplitz_truncate(Gt, S, N, group=group).matrix
        sig.append(float(np.linalg.svd(T, compute_uv=False)[-1]))
    scale = max(1.0, G.wiener_norm())
    s = sig
    if s[-1] < 1e-10 * scale or (len(s) >= 3 and s[-1] <= 0.5 * s[-2] and s[-2] <= 0.5 * s[-3]):
        verdict = "not_canonical_evidence"
    elif min(s[-2:]) >= floor and (abs(s[-1] - s[-2]) <= rel_change * s[-2] or _settles(s)):
        verdict = "likely_canonical"
    else:
        verdict = "inconclusive"
    return CanonicalVerdict(verdict, cutoffs, tuple(sig))
