"""
Finite sections of operators on l^2(Z).

Everything here lives on the basis ``e_{-T}, ..., e_T`` (array index
``n + T`` holds ``e_n``), optionally tensored with a finite multiplicity
space.  Entries of a section coincide with the entries of the infinite
operator, but products of sections do not near the cut; claims that depend on
products are therefore only made on *interior* indices, recorded per basis
vector in :attr:`TruncatedOperator.interior`.

The bilateral shift ``U e_n = e_{n-1}`` is the building block.  Its section
sends ``e_{-T}`` to zero.
"""

from dataclasses import dataclass
import math

import numpy as np

from .corners import decompose, normality_defect
from .errors import InvalidInput, InvalidTarget, NotNormal
from .linalg import (
    DEFAULT_TOL,
    RankResult,
    as_matrix,
    direct_sum,
    numerical_rank,
    operator_norm,
)

__all__ = [
    "INFINITE",
    "TruncatedOperator",
    "WeightedPair",
    "WeightedShiftSection",
    "CaseResult",
    "truncated_bilateral_shift",
    "shift_projection",
    "build_case1",
    "build_case2",
    "build_case3",
    "weighted_pair",
    "build_weighted_section",
    "kernel_recursion_oracle",
    "kernel_ratio_from_entries",
    "assemble_injective_corner",
    "assemble_noncyclic",
    "hs_corner_sweep",
    "rank_sweep",
    "interior_sigma_min",
]

INFINITE = math.inf


@dataclass(frozen=True)
class TruncatedOperator:
    half_width: int
    matrix: np.ndarray
    interior_margin: int = 1
    multiplicity: int = 1

    def __post_init__(self):
        if self.half_width < 1:
            raise InvalidInput(f"half width must be at least 1, got {self.half_width}")
        expected = (2 * self.half_width + 1) * self.multiplicity
        if self.matrix.shape != (expected, expected):
            raise InvalidInput(f"matrix shape {self.matrix.shape} does not match {expected}")

    @property
    def indices(self):
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def interior(self):
        site = np.abs(self.indices) <= self.half_width - self.interior_margin
        return np.repeat(site, self.multiplicity)


def truncated_bilateral_shift(T):
    """Section of ``U e_n = e_{n-1}``: ones on the superdiagonal."""
    if T < 1:
        raise InvalidInput(f"T must be at least 1, got {T}")
    size = 2 * T + 1
    return TruncatedOperator(T, np.eye(size, k=1, dtype=np.complex128))


def shift_projection(T):
    """Diagonal projection onto ``span{e_n : n <= 0}``."""
    return np.diag((np.arange(-T, T + 1) <= 0).astype(np.complex128))


@dataclass(frozen=True)
class CaseResult:
    """An assembled ``(D, P)`` with certified corner ranks.

    ``rank3`` is the rank of ``(I-P)DP`` and ``rank2`` that of ``PD(I-P)``.
    """

    D: np.ndarray
    P: np.ndarray
    rank3: RankResult
    rank2: RankResult
    T: int
    realized: dict
    interior: np.ndarray = None

    @property
    def ranks(self):
        return self.rank3.rank, self.rank2.rank

    @property
    def certified(self):
        return self.rank2.certified and self.rank3.certified

    def to_dict(self):
        return {
            "T": self.T,
            "realized": dict(self.realized),
            "rank3": self.rank3.to_dict(),
            "rank2": self.rank2.to_dict(),
            "normality_defect": normality_defect(self.D),
            "interior_normality_defect": interior_normality_defect(self.D, self.interior),
        }


def _multiplicity(k, T):
    # an infinite multiplicity is realised as T copies, so it grows with the section
    return T if k == INFINITE else int(k)


def _diag_corners(D, P, tol):
    # P is diagonal in every assembly here; compress with index sets directly
    p = np.real(np.diag(P)) > 0.5
    scale = operator_norm(D)
    D2 = D[np.ix_(p, ~p)]
    D3 = D[np.ix_(~p, p)]
    return numerical_rank(D3, tol, scale=scale), numerical_rank(D2, tol, scale=scale)


def _kron_shift(T, k):
    U = truncated_bilateral_shift(T).matrix
    return np.kron(U, np.eye(k)), np.kron(shift_projection(T), np.eye(k))


def build_case1(k, T, tol=DEFAULT_TOL):
    """``D = U (x) I_k`` with ``P = P_0 (x) I_k``: corner ranks ``(0, k)``.

    ``k = 0`` gives ``D = I``; ``k = INFINITE`` uses ``T`` copies.
    """
    if T < 2:
        raise InvalidInput(f"T must be at least 2, got {T}")
    if k == 0:
        size = 2 * T + 1
        D, P = np.eye(size, dtype=np.complex128), shift_projection(T)
        mult = 1
    else:
        mult = _multiplicity(k, T)
        D, P = _kron_shift(T, mult)
    r3, r2 = _diag_corners(D, P, tol)
    return CaseResult(D, P, r3, r2, T, {"j": 0, "k": k, "copies": mult})


def build_case2(j, k, T, tol=DEFAULT_TOL):
    """``D = ((U + U*) (x) I_j) (+) (U (x) I_{k-j})``: corner ranks ``(j, k)``."""
    if T < 2:
        raise InvalidInput(f"T must be at least 2, got {T}")
    if not (1 <= j < INFINITE) or int(j) != j:
        raise InvalidTarget(f"j must be a positive integer, got {j}")
    if k != INFINITE and (int(k) != k or k < j):
        raise InvalidTarget(f"need j <= k, got j={j}, k={k}")
    U = truncated_bilateral_shift(T).matrix
    P0 = shift_projection(T)
    H = np.kron(U + U.conj().T, np.eye(j))
    Q1 = np.kron(P0, np.eye(j))
    rest = T if k == INFINITE else int(k) - j
    if rest:
        R, Q2 = _kron_shift(T, rest)
        D, P = direct_sum(H, R), direct_sum(Q1, Q2)
    else:
        D, P = H, Q1
    r3, r2 = _diag_corners(D, P, tol)
    return CaseResult(D, P, r3, r2, T, {"j": j, "k": k, "shift_copies": rest})


def build_case3(n, tol=DEFAULT_TOL):
    """``D = [[I_n, I_n], [I_n, I_n]]`` with ``P = I_n (+) 0``: ranks ``(n, n)``."""
    if n < 1:
        raise InvalidInput(f"block size must be positive, got {n}")
    I = np.eye(n, dtype=np.complex128)
    D = np.block([[I, I], [I, I]])
    P = direct_sum(I, np.zeros((n, n)))
    r3, r2 = _diag_corners(D, P, tol)
    return CaseResult(D, P, r3, r2, n, {"n": n})


@dataclass(frozen=True)
class WeightedPair:
    """Diagonal weights with ``alpha_n^2 + beta_n^2 = 1`` and ``beta_n = 2^{-n} alpha_n``."""

    indices: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def at(self, n):
        i = int(n) - int(self.indices[0])
        return self.alpha[i], self.beta[i]


def weighted_pair(T):
    """``alpha_n = 1/sqrt(1 + 4^-n)``, ``beta_n = 2^-n alpha_n`` for ``|n| <= T``.

    Both are evaluated without forming ``4^{|n|}`` and ``beta`` is an exact
    power-of-two rescaling of ``alpha``, so the two weight identities used in
    the construction hold bit for bit.
    """
    n = np.arange(-T, T + 1)
    alpha = np.empty(n.size)
    pos = n >= 0
    alpha[pos] = 1.0 / np.sqrt(1.0 + np.ldexp(1.0, -2 * n[pos]))
    # for n < 0: alpha_n = 2^n / sqrt(1 + 4^n)
    alpha[~pos] = np.ldexp(1.0 / np.sqrt(1.0 + np.ldexp(1.0, 2 * n[~pos])), n[~pos])
    beta = np.ldexp(alpha, -n)
    return WeightedPair(n, alpha, beta)


@dataclass(frozen=True)
class WeightedShiftSection:
    """Sections of ``A = U + 2U*``, ``M = diag(alpha)``, ``N = diag(beta)`` and the
    two off-diagonal products ``lower = NAM - MA*N`` (zero) and
    ``upper = MAN - NA*M`` (skew-hermitian, injective)."""

    T: int
    A: np.ndarray
    M: np.ndarray
    N: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    weights: WeightedPair

    @property
    def interior(self):
        return np.abs(self.weights.indices) <= self.T - 1

    def normal_blocks(self):
        """Blocks of ``A (+) A*`` in the basis given by ``[M; N]`` and ``[N; -M]``."""
        A, M, N = self.A, self.M, self.N
        B = A.conj().T
        N1 = M @ A @ M + N @ B @ N
        N4 = N @ A @ N + M @ B @ M
        return N1, self.upper, self.lower, N4

    def normal_operator(self):
        N1, N2, N3, N4 = self.normal_blocks()
        return np.block([[N1, N2], [N3, N4]])


def build_weighted_section(T):
    if T < 3:
        raise InvalidInput(f"T must be at least 3, got {T}")
    w = weighted_pair(T)
    U = truncated_bilateral_shift(T).matrix
    A = U + 2 * U.conj().T
    Ah = A.conj().T
    a, b = w.alpha, w.beta
    # diagonal scalings applied entrywise: each entry is one product
    lower = b[:, None] * A * a[None, :] - a[:, None] * Ah * b[None, :]
    upper = a[:, None] * A * b[None, :] - b[:, None] * Ah * a[None, :]
    return WeightedShiftSection(T, A, np.diag(a).astype(np.complex128),
                        np.diag(b).astype(np.complex128), lower, upper, w)


def kernel_recursion_oracle(p):
    """Closed form of ``(2 a_p b_{p-1} - a_{p-1} b_p) / (a_p b_{p+1} - 2 a_{p+1} b_p)``.

    It equals ``-2 alpha_{p-1} / alpha_{p+1}``, i.e.
    ``-2 sqrt(1 + 4^-(p+1)) / sqrt(1 + 4^-(p-1))``; evaluated here in a form
    that is stable for large ``|p|``.
    """
    p = int(p)
    if p >= 1:
        return -2.0 * math.sqrt((1.0 + 4.0 ** -(p + 1)) / (1.0 + 4.0 ** -(p - 1)))
    # scale inside the root by 4^{p+1}; the factor 4^{-2} leaves -1/2 outside
    return -0.5 * math.sqrt((4.0 ** (p + 1) + 1.0) / (4.0 ** (p - 1) + 1.0))


def kernel_ratio_from_entries(section, p):
    """The same ratio read off the matrix entries of ``upper``.

    The ``e_p`` coefficient of ``upper x`` is
    ``x_{p+1} upper[p, p+1] + x_{p-1} upper[p, p-1]``.
    """
    i = p + section.T
    if not 1 <= i <= 2 * section.T - 1:
        raise InvalidInput(f"p={p} is not interior for T={section.T}")
    up = section.upper
    return float((up[i, i - 1] / up[i, i + 1]).real)


def interior_sigma_min(section):
    """Smallest singular value of ``upper`` on vectors supported at interior sites.

    All rows are kept, so every column is the exact image of the infinite
    operator; a positive value certifies there is no kernel vector with that
    support.  (A square interior block has odd size and a zero diagonal with
    tridiagonal structure, hence is always singular.)
    """
    cols = section.interior
    s = np.linalg.svd(section.upper[:, cols], compute_uv=False)
    return float(s[-1])


def interior_normality_defect(D, interior):
    """Normality defect restricted to interior rows and columns."""
    if interior is None:
        return normality_defect(D)
    Dh = D.conj().T
    C = (D @ Dh - Dh @ D)[np.ix_(interior, interior)]
    fro = np.linalg.norm(D, "fro")
    return float(np.linalg.norm(C, "fro") / max(1.0, fro * fro))


def _injective_corner_blocks(j, T):
    sec = build_weighted_section(T)
    N1, N2, N3, N4 = sec.normal_blocks()
    h = N1.shape[0]
    I = np.eye(j)
    size = 2 * j + 2 * h
    D = np.zeros((size, size), dtype=np.complex128)
    a, b, c, d = 0, j, j + h, j + 2 * h
    D[a:b, a:b] = I
    D[a:b, d:] = I
    D[d:, a:b] = I
    D[d:, d:] = I
    D[b:c, b:c] = N1
    D[b:c, c:d] = N2
    D[c:d, b:c] = N3
    D[c:d, c:d] = N4
    site = sec.interior
    interior = np.concatenate([np.ones(j, bool), site, site, np.ones(j, bool)])
    P = direct_sum(np.eye(j + h), np.zeros((h + j, h + j)))
    return D, P, interior, sec


def assemble_injective_corner(j, T, tol=DEFAULT_TOL):
    """``D = N (+) [[I_j, I_j], [I_j, I_j]]`` arranged so that ``(I-P)DP`` has
    rank ``j`` while ``PD(I-P)`` contains the injective ``upper`` block.

    The returned ``realized`` dict holds the quasiaffinity proxy
    ``d2_interior_sigma_min`` and both normality defects.
    """
    if j < 1:
        raise InvalidTarget(f"j must be positive, got {j}")
    D, P, interior, sec = _injective_corner_blocks(j, T)
    r3, r2 = _diag_corners(D, P, tol)
    p = np.real(np.diag(P)) > 0.5
    D2 = D[np.ix_(p, ~p)]
    cols = interior[~p]
    sigma = np.linalg.svd(D2[:, cols], compute_uv=False)[-1]
    info = {
        "j": j,
        "d2_interior_sigma_min": float(sigma),
        "normality_defect": normality_defect(D),
        "interior_normality_defect": interior_normality_defect(D, interior),
    }
    return CaseResult(D, P, r3, r2, T, info, interior)


def assemble_noncyclic(j, T, tol=DEFAULT_TOL):
    """Six-block matrix unitarily equivalent to ``N (+) N (+) M``.

    ``M`` is the injective-corner assembly for ``j >= 1`` and ``N`` itself for
    ``j = 0``.  The duplicated ``N`` makes every eigenvalue of ``N`` at least
    double, so the section is not cyclic.
    """
    if j < 0:
        raise InvalidTarget(f"j must be non-negative, got {j}")
    sec = build_weighted_section(T)
    N1, N2, N3, N4 = sec.normal_blocks()
    site = sec.interior
    if j == 0:
        M = sec.normal_operator()
        mp = N1.shape[0]
        m_interior = np.concatenate([site, site])
    else:
        M, PM, m_interior, _ = _injective_corner_blocks(j, T)
        mp = int(round(np.real(np.trace(PM))))
    M1, M2 = M[:mp, :mp], M[:mp, mp:]
    M3, M4 = M[mp:, :mp], M[mp:, mp:]
    h = N1.shape[0]
    mq = M.shape[0] - mp
    sizes = [h, h, mp, mq, h, h]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    D = np.zeros((offs[-1], offs[-1]), dtype=np.complex128)

    def put(r, c, X):
        D[offs[r]:offs[r + 1], offs[c]:offs[c + 1]] = X

    put(0, 0, N1); put(0, 5, N2)
    put(1, 1, N1); put(1, 4, N2)
    put(2, 2, M1); put(2, 3, M2)
    put(3, 2, M3); put(3, 3, M4)
    put(4, 1, N3); put(4, 4, N4)
    put(5, 0, N3); put(5, 5, N4)
    P = direct_sum(np.eye(offs[3]), np.zeros((offs[-1] - offs[3],) * 2))
    interior = np.concatenate([site, site, m_interior[:mp], m_interior[mp:], site, site])
    r3, r2 = _diag_corners(D, P, tol)
    # N (+) N: the rotated N block appears twice, so its spectrum is duplicated
    Nop = sec.normal_operator()
    ev_N = np.linalg.eigvals(Nop)
    ev_D = np.linalg.eigvals(D)
    mult = _min_multiplicity(ev_D, ev_N)
    info = {
        "j": j,
        "min_multiplicity_of_N_eigenvalues": mult,
        "normality_defect": normality_defect(D),
        "interior_normality_defect": interior_normality_defect(D, interior),
    }
    return CaseResult(D, P, r3, r2, T, info, interior)


def _min_multiplicity(ev_D, ev_N, rel=1e-7):
    """Smallest count, over eigenvalues of ``N``, of nearby eigenvalues of ``D``.

    ``D`` contains ``N`` twice as a direct summand, so every eigenvalue of
    ``N`` should appear at least twice in ``D``.
    """
    scale = max(1.0, float(np.abs(ev_D).max()))
    d = np.abs(ev_N[:, None] - ev_D[None, :])
    counts = (d <= rel * scale).sum(axis=1)
    return int(counts.min())


def hs_corner_sweep(K_builder, P_builder, T_list, tol=DEFAULT_TOL):
    """Frobenius norms of both corners of normal sections ``K(T)``.

    ``P_builder(T, size)`` returns the projection to use for that section.

    Returns
    -------
    list of dict
        One row per ``T`` with ``frob2``, ``frob3``, ``gap`` and the allowed
        ``bound = 1e-10 * ||K||_F``.
    """
    rows = []
    for T in T_list:
        K = as_matrix(K_builder(T), "K")
        defect = normality_defect(K)
        if defect > tol.normality_rel_tol:
            raise NotNormal(f"section at T={T} has normality defect {defect:.3e}", defect=defect)
        P = P_builder(T, K.shape[0])
        dec = decompose(K, P, tol)
        f2 = float(np.linalg.norm(dec.D2, "fro"))
        f3 = float(np.linalg.norm(dec.D3, "fro"))
        fk = float(np.linalg.norm(K, "fro"))
        rows.append({"T": T, "frob2": f2, "frob3": f3, "gap": abs(f2 - f3),
                     "bound": 1e-10 * fk, "normality_defect": defect})
    return rows


def rank_sweep(builder, T_list):
    """Corner ranks of ``builder(T)`` across sections plus the fitted slope
    of each rank in ``T``.

    Returns
    -------
    rows : list of dict
    slopes : dict
        Least-squares slopes of ``rank3`` and ``rank2`` against ``T``.
    """
    rows = []
    for T in T_list:
        res = builder(T)
        row = {"T": T, "rank3": res.rank3.rank, "rank2": res.rank2.rank}
        row.update({k: v for k, v in res.realized.items() if isinstance(v, (int, float))})
        rows.append(row)
    Ts = np.array([r["T"] for r in rows], dtype=float)
    slopes = {}
    for key in ("rank3", "rank2"):
        ys = np.array([r[key] for r in rows], dtype=float)
        slopes[key] = float(np.polyfit(Ts, ys, 1)[0]) if len(rows) > 1 else math.nan
    return rows, slopes
