"""Truncated Toeplitz operators and the Toeplitz corona solver.

Operators on Besicovitch coefficient space are replaced by finite sections
indexed by the group elements lambda = sum t_i g_i in S with ||t||_1 <= cutoff.
Every operator statement therefore becomes a numerical test with a margin.
The constructive corona pipeline works on the rank-1 Laurent reduction:

    B <- B / gamma,  B^{-1} A = C D^{-1},  D* D - C* C = R* J0 R,
    Theta = [D; C] R^{-1},  F = gamma (Theta11 G + Theta12)(Theta21 G + Theta22)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rational as rq
from .apcore import ApMatrix, ApPolynomial, Coords, Frequency, torus_grid
from .errors import (
    ApwError,
    CoprimenessError,
    DimensionError,
    DomainError,
    InconsistencyError,
    InfeasibleError,
    NotInvertibleError,
    ConditioningError,
)
from .factorization import canonical_test
from .geometry import Halfspace, SpectralMask, spectrum_in
from .laurent import (
    Rank1Reduction,
    array_to_pm,
    circle_samples,
    column_reduce,
    matrix_series_inverse,
    phase_winding_values,
    pm,
    pm_eval,
    pm_identity,
    pm_mul,
    pm_star,
    pm_to_array,
    rank1_reduce,
)

GRAM_PASS = -1e-9
GRAM_SOLVE_MARGIN = 1e-6


# --- finite sections ------------------------------------------------------------

@dataclass
class TruncatedToeplitz:
    index_set: list[Frequency]
    matrix: np.ndarray
    symbol_shape: tuple[int, int]


def spectrum_group(*objs) -> list[Coords]:
    """Z-basis (integer coordinates) of the group generated by the spectra of ``objs``."""
    spec = set()
    for o in objs:
        spec |= set(o.spectrum()) if isinstance(o, ApMatrix) else set(c for c, _ in o.items())
    return [tuple(r) for r in rq.hnf_rows([c for c in spec if any(c)])]


def _lattice_points(s: int, cutoff: int):
    """All t in Z^s with ||t||_1 <= cutoff."""
    if s == 0:
        yield ()
        return
    for head in range(-cutoff, cutoff + 1):
        for rest in _lattice_points(s - 1, cutoff - abs(head)):
            yield (head,) + rest


def truncation_index(basis, S: Halfspace, cutoff: int, group: Sequence[Coords] | None = None) -> list[Coords]:
    """Coordinates of the index set, ordered by (||t||_1, t)."""
    if cutoff < 0:
        raise DomainError("cutoff must be nonnegative")
    gens = [tuple(int(x) for x in g) for g in group] if group is not None else [
        tuple(int(i == j) for j in range(basis.rank_r)) for i in range(basis.rank_r)
    ]
    keep = []
    for t in _lattice_points(len(gens), cutoff):
        lam = tuple(sum(ti * g[j] for ti, g in zip(t, gens)) for j in range(basis.rank_r))
        if S.sign(basis, lam) >= 0:
            keep.append((sum(abs(x) for x in t), t, lam))
    keep.sort()
    seen, out = set(), []
    for _, _, lam in keep:
        if lam not in seen:
            seen.add(lam)
            out.append(lam)
    return out


def toeplitz_truncate(
    F: ApMatrix | ApPolynomial, S: Halfspace, cutoff: int, group: Sequence[Coords] | None = None
) -> TruncatedToeplitz:
    """Finite section of T(F) = Pi_S (F .): block (mu, nu) is the coefficient F_{mu - nu}.

    ``group`` lists integer generators (basis coordinates) of the frequency
    group carrying the index set; by default the whole basis lattice.
    """
    if isinstance(F, ApPolynomial):
        F = ApMatrix([[F]], F.basis)
    basis = F.basis
    idx = truncation_index(basis, S, cutoff, group)
    m, n = F.shape
    coeff: dict[Coords, np.ndarray] = {}
    for i in range(m):
        for j in range(n):
            for c, v in F[i, j].items():
                coeff.setdefault(c, np.zeros((m, n), complex))[i, j] = v
    N = len(idx)
    T = np.zeros((N * m, N * n), complex)
    for a, mu in enumerate(idx):
        for b, nu in enumerate(idx):
            blk = coeff.get(tuple(x - y for x, y in zip(mu, nu)))
            if blk is not None:
                T[a * m : (a + 1) * m, b * n : (b + 1) * n] = blk
    return TruncatedToeplitz([Frequency(basis, c) for c in idx], T, (m, n))


# --- Gram test ------------------------------------------------------------------

@dataclass
class GramResult:
    passes: bool
    margin: float
    cutoff: int
    size: int
    threshold: float = GRAM_PASS
    note: str = "finite-section test; failure is certified only up to truncation"

    @property
    def verdict(self) -> str:
        return "passes" if self.passes else "fails"


def _check_invertible_det(B: ApMatrix, grid: int, seed: int, tol: float = 1e-9) -> float:
    theta = torus_grid(B.basis.rank_r, grid, seed)
    dets = np.abs(np.linalg.det(B.eval_torus(theta)))
    dmin = float(np.min(dets))
    if dmin < tol:
        raise DomainError(f"B is not invertible on the sample grid (min |det| = {dmin:.3e})")
    return dmin


def gram_test(
    A: ApMatrix, B: ApMatrix, gamma: float, S: Halfspace, cutoff: int = 32,
    group: Sequence[Coords] | None = None, grid: int = 4096, seed: int = 0,
) -> GramResult:
    """Smallest eigenvalue of T(A)T(A)* - gamma^-2 T(B)T(B)* on the finite section."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if A.m != B.m or B.m != B.n:
        raise DimensionError("need A p x m and B p x p")
    for name, X in (("A", A), ("B", B)):
        if not spectrum_in(X, SpectralMask("S", S)):
            raise DomainError(f"spectrum of {name} is not contained in S")
    _check_invertible_det(B, grid, seed)
    if group is None:
        group = spectrum_group(A, B)
    TA = toeplitz_truncate(A, S, cutoff, group).matrix
    TB = toeplitz_truncate(B, S, cutoff, group).matrix
    M = TA @ TA.conj().T - (TB @ TB.conj().T) / gamma**2
    margin = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])
    return GramResult(margin >= GRAM_PASS, margin, cutoff, M.shape[0])


# --- coprime factorizations -----------------------------------------------------

def _pm_zero(m: int, n: int) -> np.ndarray:
    return pm([[0.0] * n for _ in range(m)])


def _pm_norm(P: np.ndarray) -> float:
    return max((x.norm1() for x in P.flat), default=0.0)


def _pm_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx] - b[idx]
    return out


def _pm_scale(a: np.ndarray, c: complex) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx] * c
    return out


def _pm_id_residual(P: np.ndarray) -> float:
    return _pm_norm(_pm_sub(P, pm_identity(P.shape[0])))


def _constant_det(P: np.ndarray, samples: int = 256) -> bool:
    vals = np.linalg.det(pm_eval(P, circle_samples(samples)))
    a = np.abs(vals)
    return a.min() > 1e-12 and (a.max() - a.min()) <= 1e-10 * a.max() and phase_winding_values(vals) == 0


def _min_abs_det(P: np.ndarray, samples: int = 1024) -> float:
    return float(np.min(np.abs(np.linalg.det(pm_eval(P, circle_samples(samples))))))


@dataclass
class CoprimeResult:
    C: ApMatrix
    D: ApMatrix
    certificates: dict[str, float]
    reduction: Rank1Reduction = field(repr=False)
    C_poly: np.ndarray = field(repr=False)
    D_poly: np.ndarray = field(repr=False)


def _right_coprime_poly(Ap: np.ndarray, Bp: np.ndarray, tail_tol: float):
    p, m = Ap.shape
    if _constant_det(Bp):
        Binv = matrix_series_inverse(Bp, tail_tol)
        C = pm_mul(Binv, Ap)
        D = pm_identity(m)
        certs = {"bezout_residual": 0.0, "denominator_inverse_residual": _pm_id_residual(pm_mul(Bp, Binv))}
        return C, D, certs
    M = np.hstack([Ap, _pm_scale(Bp, -1.0)])
    try:
        U, Ui, pivots = column_reduce(M, ring="poly")
    except ApwError as exc:
        raise CoprimenessError(f"column reduction of [A, -B] failed: {exc}") from exc
    for g in pivots:
        r = g.roots()
        if g.low > 0 or (r.size and np.min(np.abs(r)) <= 1.0 + 1e-9):
            raise CoprimenessError("A and B are not left coprime over the plus algebra")
    D = U[:m, p:]
    C = U[m:, p:]
    X = Ui[p:, :m]
    Y = Ui[p:, m:]
    certs = {"bezout_residual": _pm_id_residual(_pm_add(pm_mul(X, D), pm_mul(Y, C)))}
    return C, D, certs


def _pm_add(a, b):
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx] + b[idx]
    return out


def right_coprime_from_left(A: ApMatrix, B: ApMatrix, S: Halfspace, tail_tol: float = 1e-12) -> CoprimeResult:
    """C, D over the plus algebra with B^{-1} A = C D^{-1} and X D + Y C = I."""
    p, m = A.shape
    if B.shape != (p, p):
        raise DimensionError("B must be p x p")
    for name, X in (("A", A), ("B", B)):
        if not spectrum_in(X, SpectralMask("S", S)):
            raise DomainError(f"spectrum of {name} is not contained in S")
    red = rank1_reduce([A, B], S)
    Ap, Bp = pm(red.images[0]), pm(red.images[1])
    if _min_abs_det(Bp) < 1e-9:
        raise DomainError("B is not invertible on the circle")
    C, D, certs = _right_coprime_poly(Ap, Bp, tail_tol)
    certs["fraction_residual"] = _pm_norm(_pm_sub(pm_mul(Ap, D), pm_mul(Bp, C)))
    certs["denominator_min_abs_det"] = _min_abs_det(D)
    if certs["denominator_min_abs_det"] < 1e-9:
        raise CoprimenessError("D is not invertible on the circle")
    return CoprimeResult(red.back_matrix(C.tolist()), red.back_matrix(D.tolist()), certs, red, C, D)


@dataclass
class KernelRangeResult:
    product_residual: float
    dim_gap: int
    kernel_dim: int
    image_rank: int

    @property
    def residual(self) -> float:
        return max(self.product_residual, float(self.dim_gap))


def _numerical_rank(M: np.ndarray, rtol: float = 1e-9) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def kernel_range_check(
    A: ApMatrix, B: ApMatrix, C: ApMatrix, D: ApMatrix, S: Halfspace, cutoff: int = 16
) -> KernelRangeResult:
    """Compare Ker [T(A), -T(B)] with Im [T(D); T(C)] on a finite section."""
    group = spectrum_group(A, B, C, D)
    TA, TB, TC, TD = (toeplitz_truncate(X, S, cutoff, group).matrix for X in (A, B, C, D))
    K = np.hstack([TA, -TB])
    R = np.vstack([TD, TC])
    prod = float(np.linalg.norm(K @ R, 2)) if K.size and R.size else 0.0
    kdim = K.shape[1] - _numerical_rank(K)
    rrank = _numerical_rank(R)
    return KernelRangeResult(prod, abs(kdim - rrank), kdim, rrank)


# --- symmetric factorization ----------------------------------------------------

@dataclass
class SymmetricFactorization:
    R: ApMatrix
    J0: np.ndarray
    certificates: dict[str, float]
    R_poly: np.ndarray = field(repr=False)
    R_inv_poly: np.ndarray = field(repr=False)
    reduction: Rank1Reduction = field(repr=False)


# An accepted symmetric factor must reproduce H to this relative accuracy; the
# plus-invertibility of R is then certified by its truncated series inverse.
SYM_RESIDUAL_MAX = 1e-8


def _two_sided_array(H: np.ndarray) -> tuple[int, np.ndarray]:
    low, arr = pm_to_array(H)
    d = max(-low, arr.shape[0] - 1 + low, 0)
    out = np.zeros((2 * d + 1,) + arr.shape[1:], complex)
    out[low + d : low + d + arr.shape[0]] = arr
    return d, out  # out[j + d] = H_j


def _factor_from_section(Hc: np.ndarray, d: int, N: int):
    """R (coefficients R_0..R_d) and J0 from the finite section of size N + 1 blocks."""
    m = Hc.shape[1]
    T = np.zeros(((N + 1) * m, (N + 1) * m), complex)
    for a in range(N + 1):
        for b in range(max(0, a - d), min(N, a + d) + 1):
            T[a * m : (a + 1) * m, b * m : (b + 1) * m] = Hc[a - b + d]
    E = np.zeros(((N + 1) * m, m), complex)
    E[:m] = np.eye(m)
    Y = np.linalg.solve(T, E).reshape(N + 1, m, m)
    Y0 = (Y[0] + Y[0].conj().T) / 2
    ev, V = np.linalg.eigh(Y0)
    if np.min(np.abs(ev)) < 1e-14 * np.max(np.abs(ev)):
        raise NotInvertibleError("degenerate leading block in the symmetric factorization")
    order = np.argsort(-np.sign(ev), kind="stable")  # positive signs first
    ev, V = ev[order], V[:, order]
    s = np.sign(ev)
    K = V * np.sqrt(np.abs(ev))
    R0 = np.linalg.inv(K)
    X = Y[: d + 1] @ R0.conj().T @ np.diag(s)  # X_i = Y_i K^{-*} J0, leading coefficients of R^{-1}
    R = np.zeros((d + 1, m, m), complex)
    for j in range(d + 1):
        acc = np.zeros((m, m), complex)
        for i in range(d + 1 - j):
            acc += Hc[-j - i + d] @ X[i]
        R[j] = np.diag(s) @ acc.conj().T
    return R, s


def _sym_residual(Hc: np.ndarray, d: int, R: np.ndarray, s: np.ndarray) -> float:
    m = Hc.shape[1]
    J = np.diag(s)
    worst = 0.0
    for j in range(-d, d + 1):
        acc = np.zeros((m, m), complex)
        for i in range(d + 1):
            k = i + j
            if 0 <= k <= d:
                acc += R[i].conj().T @ J @ R[k]
        worst = max(worst, float(np.max(np.abs(Hc[j + d] - acc))))
    return worst


def _symmetric_checked(
    H: ApMatrix, Hp: np.ndarray, red: Rank1Reduction, S: Halfspace, tail_tol: float, grid: int, seed: int,
    check_canonical: bool,
) -> SymmetricFactorization:
    if check_canonical:
        verdict = canonical_test(H, S)
        if verdict.verdict != "likely_canonical":
            raise NotInvertibleError(f"H has no detectable canonical factorization ({verdict.verdict})")
    d, Hc = _two_sided_array(Hp)
    best = None
    for N in (4 * d + 32, 8 * d + 64, 16 * d + 128, 32 * d + 256):
        R, s = _factor_from_section(Hc, d, N)
        res = _sym_residual(Hc, d, R, s)
        if best is None or res < best[2]:
            best = (R, s, res)
        if res <= 1e-13 * max(1.0, float(np.max(np.abs(Hc)))):
            break
    R, s, res = best
    if res > SYM_RESIDUAL_MAX * max(1.0, float(np.max(np.abs(Hc)))):
        raise NotInvertibleError(f"finite sections did not converge to a canonical factorization (residual {res:.2e})")
    R_poly = array_to_pm(0, R)
    R_inv = matrix_series_inverse(R_poly, tail_tol)
    theta = torus_grid(H.basis.rank_r, grid, seed)
    negs = np.sum(np.linalg.eigvalsh(H.eval_torus(theta)) < 0, axis=1)
    if np.any(negs != negs[0]):
        raise InconsistencyError("inertia of H varies over the sample grid")
    if int(negs[0]) != int(np.sum(s < 0)):
        raise InconsistencyError("signature of J0 differs from the sampled inertia of H")
    certs = {
        "factorization_residual": res,
        "inverse_residual": _pm_id_residual(pm_mul(R_poly, R_inv)),
    }
    return SymmetricFactorization(red.back_matrix(R_poly.tolist()), np.diag(s), certs, R_poly, R_inv, red)


def symmetric_factorize(
    H: ApMatrix, S: Halfspace, tail_tol: float = 1e-12, grid: int = 4096, seed: int = 0,
    check_canonical: bool = True,
) -> SymmetricFactorization:
    """H = R* J0 R with R, R^{-1} over the plus algebra and J0 = diag(+1.., -1..).

    R is a polynomial of the same degree as H.  It is read off from the first
    block column of the inverse of a finite section of T(H), which converges
    geometrically in the section size.
    """
    if H.m != H.n:
        raise DimensionError("H must be square")
    if H != H.conj_transpose():
        raise DomainError("H is not Hermitian")
    red = rank1_reduce(H, S)
    return _symmetric_checked(H, pm(red.images), red, S, tail_tol, grid, seed, check_canonical)


# --- corona solver --------------------------------------------------------------

@dataclass
class CoronaSolution:
    C: ApMatrix
    D: ApMatrix
    R: ApMatrix
    J0: np.ndarray
    theta11: ApMatrix | None
    theta12: ApMatrix
    theta21: ApMatrix | None
    theta22: ApMatrix
    F0: ApMatrix
    gamma: float
    residuals: dict[str, float]
    halfspace: Halfspace
    A: ApMatrix = field(repr=False)
    B: ApMatrix = field(repr=False)
    _theta: np.ndarray = field(repr=False, default=None)
    _reduction: Rank1Reduction = field(repr=False, default=None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


def _stage(name: str, exc: ApwError) -> ApwError:
    return type(exc)(f"[{name}] {exc}")


def _sup_norm_poly(P: np.ndarray, samples: int = 4096) -> float:
    vals = pm_eval(P, circle_samples(samples))
    return float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))


def _block(red: Rank1Reduction, P: np.ndarray) -> ApMatrix | None:
    if P.shape[0] == 0 or P.shape[1] == 0:
        return None
    return red.back_matrix(P.tolist())


def corona_solve(
    A: ApMatrix, B: ApMatrix, gamma: float, S: Halfspace, cutoff: int = 32,
    tail_tol: float = 1e-12, grid: int = 4096, seed: int = 0,
) -> CoronaSolution:
    """Solve A F = B with ||F||_inf <= gamma over the plus algebra (rank-1 spectra)."""
    p, m = A.shape
    if B.shape != (p, p):
        raise DimensionError("B must be p x p")
    if m < p:
        raise DimensionError("need m >= p")
    try:
        gram = gram_test(A, B, gamma, S, cutoff, grid=grid, seed=seed)
    except ApwError as exc:
        raise _stage("gram", exc) from exc
    if gram.margin < GRAM_SOLVE_MARGIN:
        raise InfeasibleError(f"[gram] margin {gram.margin:.3e} below {GRAM_SOLVE_MARGIN:g} at gamma = {gamma}")
    Bs = B.scale(1.0 / gamma)
    try:
        cop = right_coprime_from_left(A, Bs, S, tail_tol)
    except ApwError as exc:
        raise _stage("coprime", exc) from exc
    red = cop.reduction
    Cp, Dp = cop.C_poly, cop.D_poly
    Hp = _hermitize(_pm_sub(pm_mul(pm_star(Dp), Dp), pm_mul(pm_star(Cp), Cp)))
    H = red.back_matrix(Hp.tolist())
    try:
        sym = _symmetric_checked(H, Hp, red, S, tail_tol, grid, seed, True)
    except ApwError as exc:
        raise _stage("symmetric", exc) from exc
    s = np.diag(sym.J0)
    expected = np.array([1.0] * (m - p) + [-1.0] * p)
    if not np.array_equal(s, expected):
        raise InconsistencyError(f"[signature] J0 = {s.tolist()}, expected {expected.tolist()}")
    Theta = pm_mul(np.vstack([Dp, Cp]), sym.R_inv_poly)
    T11, T12 = Theta[:m, : m - p], Theta[:m, m - p :]
    T21, T22 = Theta[m:, : m - p], Theta[m:, m - p :]
    try:
        T22inv = matrix_series_inverse(T22, tail_tol)
    except ApwError as exc:
        raise _stage("theta22", exc) from exc
    F0p = _pm_scale(pm_mul(T12, T22inv), gamma)

    Ap, Bp = _map_param(A, red), _map_param(B, red)
    J1 = np.diag([1.0] * m + [-1.0] * p)
    ThJ = pm_mul(pm_star(Theta), pm_mul(pm([[complex(x) for x in r] for r in J1]), Theta))
    residuals = dict(sym.certificates)
    residuals.update({f"coprime_{k}": v for k, v in cop.certificates.items()})
    residuals["gram_margin"] = gram.margin
    residuals["theta_isometry"] = _pm_norm(_pm_sub(ThJ, pm([[complex(x) for x in r] for r in sym.J0])))
    residuals["AF0_residual"] = _pm_norm(_pm_sub(pm_mul(Ap, F0p), Bp))
    residuals["F0_sup_norm"] = _sup_norm_poly(F0p)
    residuals["theta22_inverse_residual"] = _pm_id_residual(pm_mul(T22, T22inv))

    return CoronaSolution(
        C=cop.C, D=cop.D, R=sym.R, J0=sym.J0,
        theta11=_block(red, T11), theta12=red.back_matrix(T12.tolist()),
        theta21=_block(red, T21), theta22=red.back_matrix(T22.tolist()),
        F0=red.back_matrix(F0p.tolist()), gamma=float(gamma), residuals=residuals, halfspace=S,
        A=A, B=B, _theta=Theta, _reduction=red,
    )


def _hermitize(P: np.ndarray) -> np.ndarray:
    Ps = pm_star(P)
    out = np.empty(P.shape, dtype=object)
    for idx in np.ndindex(P.shape):
        out[idx] = (P[idx] + Ps[idx]) * 0.5
    return out


def _theta_blocks(sol: CoronaSolution):
    m = sol.A.n
    p = sol.A.m
    T = sol._theta
    if T is None:
        raise DomainError("solution lacks its Laurent data; rebuild it with corona_solve")
    return T[:m, : m - p], T[:m, m - p :], T[m:, : m - p], T[m:, m - p :]


@dataclass
class Parametrization:
    F: ApMatrix
    certificates: dict[str, float]


def corona_parametrize(
    sol: CoronaSolution, G: ApMatrix | None = None, tail_tol: float = 1e-12, samples: int = 1024,
) -> Parametrization:
    """F = gamma (Theta11 G + Theta12)(Theta21 G + Theta22)^{-1} for a contractive G.

    The round trip recovers G pointwise from F through
    G = (Theta11* F' - Theta21*)(Theta22* - Theta12* F')^{-1}, F' = F / gamma.
    """
    p, m = sol.A.shape
    T11, T12, T21, T22 = _theta_blocks(sol)
    red = sol._reduction
    if m == p:
        if G is not None and G.m * G.n != 0:
            raise DimensionError("the square case admits only the empty parameter")
        Gp = np.empty((0, p), dtype=object)
    else:
        if G is None:
            G = ApMatrix.zeros(sol.A.basis, m - p, p)
        if G.shape != (m - p, p):
            raise DimensionError(f"parameter must be {(m - p, p)}")
        if not spectrum_in(G, SpectralMask("S", sol.halfspace)):
            raise DomainError("parameter spectrum is not contained in S")
        try:
            Gp = _map_param(G, red)
        except ApwError as exc:
            raise DomainError(f"parameter outside the solution's frequency group: {exc}") from exc
    z = circle_samples(samples)
    Gv = pm_eval(Gp, z) if Gp.size else np.zeros((len(z), m - p, p))
    gsup = float(np.max(np.linalg.norm(Gv, ord=2, axis=(1, 2)))) if Gp.size else 0.0
    if gsup > 1.0 + 1e-12:
        raise DomainError(f"parameter is not contractive (sampled sup norm {gsup:.6g})")
    if m == p:
        num, den = T12, T22
    else:
        num = _pm_add(pm_mul(T11, Gp), T12)
        den = _pm_add(pm_mul(T21, Gp), T22)
    if _min_abs_det(den, samples) < 1e-8:
        raise ConditioningError("Theta21 G + Theta22 is nearly singular")
    den_inv = matrix_series_inverse(den, tail_tol)
    Fp = _pm_scale(pm_mul(num, den_inv), sol.gamma)

    Ap = _map_param(sol.A, red)
    Bp = _map_param(sol.B, red)
    certs = {
        "AF_residual": _pm_norm(_pm_sub(pm_mul(Ap, Fp), Bp)),
        "F_sup_norm": _sup_norm_poly(Fp, samples),
        "denominator_inverse_residual": _pm_id_residual(pm_mul(den, den_inv)),
    }
    if m > p:
        Fv = pm_eval(Fp, z) / sol.gamma
        t11, t12, t21, t22 = (pm_eval(X, z) for X in (T11, T12, T21, T22))
        h = lambda X: np.conj(np.swapaxes(X, 1, 2))  # noqa: E731
        rec = (h(t11) @ Fv - h(t21)) @ np.linalg.inv(h(t22) - h(t12) @ Fv)
        certs["round_trip"] = float(np.max(np.abs(rec - Gv)))
    return Parametrization(red.back_matrix(Fp.tolist()), certs)


def _map_param(X: ApMatrix, red: Rank1Reduction) -> np.ndarray:
    return pm([[red.to_laurent(X[i, j]) for j in range(X.n)] for i in range(X.m)])
