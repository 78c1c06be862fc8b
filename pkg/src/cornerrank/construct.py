"""
Finite-dimensional normal matrices with prescribed, unequal corner ranks.

The core builder produces, for any ``m >= 1``, a normal ``2m x 2m`` matrix
``D`` and a rank ``m`` projection ``P`` with ``rank PD(I-P) = m`` and
``rank (I-P)DP = 1``.  For ``m >= 3`` this goes through diagonal ``A``,
``B = A*`` with ``alpha_j = j*gamma + i`` and the hermitian matrix
``S = [2i / (alpha_j - conj(alpha_k))]``; ``S o Z`` is then the constant
matrix ``2i`` (rank one) while ``S^t o Z`` is ``2i`` times an invertible
hermitian Toeplitz matrix.  Writing ``S = M N^{-1}`` with commuting positive
``M, N`` and ``M^2 + N^2 = I`` gives the projection
``P = [[M^2, MN], [MN, N^2]]``.

:func:`compose_target_ranks` embeds these blocks to reach every ``(n, j, k)`` with
``1 <= j, k <= n // 2``.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .corners import (
    NEITHER,
    corner_ranks,
    decompose,
    normality_defect,
    spectrum_line_circle_classify,
)
from .errors import (
    AmbiguousRank,
    HypothesesNotMet,
    InvalidInput,
    InvalidTarget,
    NotPositiveDefinite,
    OutOfScope,
    PerturbationTooLarge,
    SearchExhausted,
    ShapeError,
)
from .linalg import (
    DEFAULT_TOL,
    RankResult,
    as_matrix,
    commuting_mn_factorization,
    direct_sum,
    hadamard,
    haar_unitary,
    hermitian_eig,
    max_entry_norm,
    numerical_rank,
    operator_norm,
    orthonormal_basis,
)

__all__ = [
    "GammaSpec",
    "TargetRanks",
    "ConstructionCertificate",
    "ToeplitzCertificate",
    "HadamardRankCheck",
    "build_alpha_beta",
    "build_Z",
    "build_S",
    "verify_hadamard_ranks",
    "toeplitz_invertibility_cert",
    "assemble_from_weights",
    "build_unequal_corners",
    "search_m2",
    "compose_target_ranks",
    "perturb_and_rebuild",
    "REDUCTIVITY_MESSAGE",
]

REDUCTIVITY_MESSAGE = (
    "a zero corner forces the other corner to vanish: every normal matrix is "
    "orthogonally reductive, so ranks (0, k) with k > 0 are impossible"
)

# certified builds need gamma above this multiple of m
GAMMA_FACTOR = 8


@dataclass(frozen=True)
class GammaSpec:
    m: int
    gamma: float = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidInput(f"m must be a positive integer, got {self.m!r}")
        if self.gamma is None:
            object.__setattr__(self, "gamma", float(GAMMA_FACTOR * self.m + 1))
        if not self.gamma > 1:
            raise InvalidInput(f"gamma must exceed 1, got {self.gamma!r}")

    @property
    def above_threshold(self):
        return self.gamma > GAMMA_FACTOR * self.m


@dataclass(frozen=True)
class TargetRanks:
    """``k`` is the target rank of ``PD(I-P)``, ``j`` that of ``(I-P)DP``."""

    n: int
    j: int
    k: int

    def __post_init__(self):
        n, j, k = self.n, self.j, self.k
        if n < 2:
            raise InvalidTarget(f"n must be at least 2, got {n}")
        if (j == 0) != (k == 0):
            raise InvalidTarget(REDUCTIVITY_MESSAGE)
        half = n // 2
        if not (1 <= j <= half and 1 <= k <= half):
            raise InvalidTarget(f"need 1 <= j, k <= floor(n/2) = {half}; got j={j}, k={k}")

    def to_dict(self):
        return {"n": self.n, "j": self.j, "k": self.k}


@dataclass(frozen=True)
class ConstructionCertificate:
    D: np.ndarray
    P: np.ndarray
    target: TargetRanks
    rank2: RankResult
    rank3: RankResult
    normality_defect: float
    s_pd_min_eig: float
    toeplitz_margin: float = math.nan
    claim: str = ""
    inputs: dict = field(default_factory=dict)
    alpha: np.ndarray = None
    normality_tol: float = DEFAULT_TOL.normality_rel_tol

    @property
    def achieved(self):
        return self.rank2, self.rank3

    @property
    def certified(self):
        return (
            self.normality_defect <= self.normality_tol
            and self.rank2.certified
            and self.rank3.certified
            and self.rank2.rank == self.target.k
            and self.rank3.rank == self.target.j
            and self.s_pd_min_eig > 0
        )

    @property
    def verdict(self):
        if self.certified:
            return "certified"
        if self.rank2.ambiguous or self.rank3.ambiguous:
            return "ambiguous"
        return "violated"

    def to_dict(self):
        return {
            "claim": self.claim,
            "inputs": dict(self.inputs),
            "target": self.target.to_dict(),
            "ranks": {"rank2": self.rank2.to_dict(), "rank3": self.rank3.to_dict()},
            "residuals": {
                "normality_defect": self.normality_defect,
                "s_pd_min_eig": self.s_pd_min_eig,
                "toeplitz_margin": self.toeplitz_margin,
                "projection_trace": float(np.trace(self.P).real),
            },
            "verdict": self.verdict,
        }


def build_alpha_beta(spec):
    """``alpha_j = j*gamma + i`` and ``beta_k = conj(alpha_k)`` for ``j, k = 1..m``."""
    idx = np.arange(1, spec.m + 1, dtype=float)
    alpha = idx * spec.gamma + 1j
    return alpha, alpha.conj()


def build_Z(alpha, beta):
    alpha = np.asarray(alpha, dtype=np.complex128).ravel()
    beta = np.asarray(beta, dtype=np.complex128).ravel()
    if alpha.shape != beta.shape:
        raise ShapeError(f"length mismatch: {alpha.size} vs {beta.size}")
    return alpha[:, None] - beta[None, :]


def _gauge_S(alpha):
    # S o Z = 2i * ones, with B = A*
    return 2j / build_Z(alpha, np.conj(alpha))


def build_S(spec):
    """``s_jk = 2i / ((j-k) gamma + 2i)``: hermitian with unit diagonal."""
    alpha, _ = build_alpha_beta(spec)
    return _gauge_S(alpha)


@dataclass(frozen=True)
class HadamardRankCheck:
    rank_SZ: RankResult
    rank_StZ: RankResult
    pd: bool
    min_eig: float

    def __iter__(self):
        return iter((self.rank_SZ, self.rank_StZ, self.pd))


def verify_hadamard_ranks(S, Z, tol=DEFAULT_TOL):
    """Certified ranks of ``S o Z`` and ``S^t o Z`` and positivity of ``S``."""
    S = as_matrix(S, "S")
    Z = as_matrix(Z, "Z")
    if S.shape != Z.shape or S.shape[0] != S.shape[1]:
        raise ShapeError(f"S {S.shape} and Z {Z.shape} must be equal and square")
    r1 = numerical_rank(hadamard(S, Z), tol)
    r2 = numerical_rank(hadamard(S.T, Z), tol)
    for name, rr in (("S o Z", r1), ("S^t o Z", r2)):
        if rr.ambiguous:
            raise AmbiguousRank(f"rank of {name} is ambiguous (gap {rr.gap_ratio:.3g})")
    w, _ = hermitian_eig(S, tol)
    return HadamardRankCheck(r1, r2, bool(w[0] > 0), float(w[0]))


@dataclass(frozen=True)
class ToeplitzCertificate:
    """Perturbation certificate that the Toeplitz matrix ``T`` is invertible.

    ``T_hat = 2I - m Q`` (``Q`` the all-``1/m`` projection) is the limit of
    ``T`` as ``gamma`` grows; ``margin = 1/||T_hat^{-1}|| - ||T - T_hat||``.
    """

    margin: float
    dist: float
    dist_entry_bound: float
    inv_norm_hat: float
    s_minus_i: float
    chain_holds: bool

    @property
    def certified(self):
        return self.margin > 0


def toeplitz_invertibility_cert(spec):
    m, gamma = spec.m, spec.gamma
    if m < 3:
        raise OutOfScope("the Toeplitz certificate needs m >= 3 (T_hat is singular at m = 2)")
    S = build_S(spec)
    Z = build_Z(*build_alpha_beta(spec))
    T = hadamard(S.T, Z) / 2j
    T_hat = 2 * np.eye(m) - np.ones((m, m))
    # eigenvalues of T_hat: 2 - m on the constant vector, 2 elsewhere
    inv_norm_hat = max(1 / abs(2 - m), 0.5)
    dist = operator_norm(T - T_hat)
    entry_bound = m * max_entry_norm(T - T_hat)
    s_minus_i = operator_norm(S - np.eye(m))
    chain = dist <= entry_bound * (1 + 1e-12) and entry_bound < 4 * m / gamma < 0.5
    return ToeplitzCertificate(
        margin=1 / inv_norm_hat - dist,
        dist=dist,
        dist_entry_bound=entry_bound,
        inv_norm_hat=inv_norm_hat,
        s_minus_i=s_minus_i,
        chain_holds=bool(chain) if spec.above_threshold else False,
    )


def mn_projection(M, N):
    """``[[M^2, MN], [MN, N^2]]`` and the two isometries ``[M; N]``, ``[N; -M]``."""
    V = np.vstack([M, N])
    W = np.vstack([N, -M])
    P = V @ V.conj().T
    return (P + P.conj().T) / 2, V, W


def assemble_from_weights(A_diag, B_diag, S, tol=DEFAULT_TOL):
    """Turn diagonal data and a positive ``S`` into ``(D, P)``.

    Requires ``rank S o Z = 1`` and ``rank S^t o Z = m``.  The resulting
    ``(I-P)DP`` has rank one and ``PD(I-P)`` rank ``m``; both are re-derived
    from ``N A M - M B N`` and ``M A N - N B M`` as an internal check.
    """
    a = np.asarray(A_diag, dtype=np.complex128).ravel()
    b = np.asarray(B_diag, dtype=np.complex128).ravel()
    S = as_matrix(S, "S")
    m = a.size
    if b.size != m or S.shape != (m, m):
        raise ShapeError("A, B and S sizes disagree")
    Z = build_Z(a, b)
    check = verify_hadamard_ranks(S, Z, tol)
    if not check.pd:
        raise HypothesesNotMet(f"S is not positive definite (min eigenvalue {check.min_eig:.3e})")
    if check.rank_SZ.rank != 1 or check.rank_StZ.rank != m:
        raise HypothesesNotMet(
            f"need ranks (1, {m}) for (S o Z, S^t o Z); got "
            f"({check.rank_SZ.rank}, {check.rank_StZ.rank})")
    try:
        M, N = commuting_mn_factorization(S, tol)
    except NotPositiveDefinite as exc:
        raise HypothesesNotMet(str(exc)) from exc
    A, B = np.diag(a), np.diag(b)
    scale = max(np.abs(a).max(), np.abs(b).max())
    lower = numerical_rank(N @ A @ M - M @ B @ N, tol, scale=scale)
    upper = numerical_rank(M @ A @ N - N @ B @ M, tol, scale=scale)
    if lower.ambiguous or upper.ambiguous:
        raise AmbiguousRank("rank of NAM - MBN or MAN - NBM is ambiguous")
    if lower.rank != check.rank_SZ.rank or upper.rank != check.rank_StZ.rank:
        raise HypothesesNotMet(
            f"rank identities failed: NAM-MBN has rank {lower.rank}, MAN-NBM has rank {upper.rank}")
    D = np.diag(np.concatenate([a, b]))
    P, _, _ = mn_projection(M, N)
    return D, P


def _certificate(D, P, target, tol, claim, inputs, s_min=1.0, margin=math.nan, alpha=None):
    dec = decompose(D, P, tol)
    r2, r3 = corner_ranks(dec, tol)
    return ConstructionCertificate(
        D=D, P=P, target=target, rank2=r2, rank3=r3,
        normality_defect=normality_defect(D), s_pd_min_eig=float(s_min),
        toeplitz_margin=float(margin), claim=claim, inputs=inputs, alpha=alpha,
        normality_tol=tol.normality_rel_tol,
    )


def _build_from_alpha(alpha, spec, tol, claim, inputs):
    S = _gauge_S(alpha)
    S = (S + S.conj().T) / 2
    w, _ = hermitian_eig(S, tol)
    if w[0] <= 0:
        raise NotPositiveDefinite(f"S has smallest eigenvalue {w[0]:.3e}")
    margin = math.nan
    if spec is not None and spec.m >= 3:
        margin = toeplitz_invertibility_cert(spec).margin
    D, P = assemble_from_weights(alpha, alpha.conj(), S, tol)
    m = alpha.size
    return _certificate(D, P, TargetRanks(2 * m, 1, m), tol, claim, inputs,
                        s_min=w[0], margin=margin, alpha=alpha)


def build_unequal_corners(spec, tol=DEFAULT_TOL, seed=7, budget=100_000):
    """Normal ``2m x 2m`` matrix with corner ranks ``(m, 1)``.

    ``m = 1`` uses the all-ones 2x2 matrix with ``P = diag(1, 0)``; ``m = 2``
    runs :func:`search_m2`; ``m >= 3`` runs the explicit construction.  Below
    ``gamma = 8m`` the analytic Toeplitz certificate may fail, in which case
    the direct numerical rank of ``S^t o Z`` decides.
    """
    if not isinstance(spec, GammaSpec):
        spec = GammaSpec(int(spec))
    m = spec.m
    inputs = {"m": m, "gamma": spec.gamma}
    claim = f"normal D in M_{2 * m} with rank PD(I-P) = {m} and rank (I-P)DP = 1"
    if m == 1:
        D = np.ones((2, 2), dtype=np.complex128)
        P = np.diag([1.0, 0.0]).astype(np.complex128)
        return _certificate(D, P, TargetRanks(2, 1, 1), tol, claim, inputs)
    if m == 2:
        cert = search_m2(seed=seed, budget=budget, tol=tol)
        return replace(cert, claim=claim, inputs={**inputs, **cert.inputs})
    alpha, _ = build_alpha_beta(spec)
    return _build_from_alpha(alpha, spec, tol, claim, inputs)


def _random_neither_spectrum(rng, n=4, tol=1e-8):
    while True:
        eigs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if spectrum_line_circle_classify(eigs, tol=1e-3) == NEITHER:
            return eigs


def search_m2(seed=7, budget=100_000, tol=DEFAULT_TOL, min_gap=1e6):
    """Seeded search for a normal 4x4 matrix with corner ranks ``(2, 1)``.

    Draws a normal ``D = U diag(e) U*`` whose eigenvalues are neither
    collinear nor concyclic.  Candidate projections are built on
    ``span{v, Dv}`` for random ``v``, which makes ``(I-P)DP`` rank one by
    construction; the candidate is kept when ``PD(I-P)`` is certified to have
    rank two.  Each accepted candidate is then refined by a small local
    perturbation of ``v`` that increases the smallest singular value of the
    rank-two corner.
    """
    if budget < 1:
        raise InvalidInput("budget must be positive")
    rng = np.random.default_rng(seed)
    eigs = _random_neither_spectrum(rng)
    U = haar_unitary(4, rng)
    D = (U * eigs) @ U.conj().T
    target = TargetRanks(4, 1, 2)

    def score(v):
        V, rr = orthonormal_basis(np.column_stack([v, D @ v]), tol)
        if rr.rank != 2:
            return None, -1.0
        P = V @ V.conj().T
        P = (P + P.conj().T) / 2
        dec = decompose(D, P, tol)
        s = np.linalg.svd(dec.D2, compute_uv=False)
        return P, float(s[-1] / max(s[0], 1e-300))

    for attempt in range(budget):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        P, sc = score(v)
        if P is None or sc <= tol.rank_rel_tol:
            continue
        # local refinement: a handful of shrinking perturbations, keep improvements
        step = 0.1
        for _ in range(20):
            trial = v + step * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
            P_t, sc_t = score(trial)
            if P_t is not None and sc_t > sc:
                v, P, sc = trial, P_t, sc_t
            else:
                step /= 2
        cert = _certificate(D, P, target, tol, "normal D in M_4 with corner ranks (2, 1)",
                            {"seed": seed, "budget": budget, "attempts": attempt + 1})
        good = (cert.certified and cert.rank3.gap_ratio >= min_gap
                and cert.rank2.gap_ratio >= min_gap)
        if good:
            return cert
    raise SearchExhausted(f"no certified (2, 1) witness within budget {budget}")


def _block_form(cert, tol):
    """Re-express a certificate's ``D`` so that its projection is ``I_r (+) 0``."""
    dec = decompose(cert.D, cert.P, tol)
    W = dec.unitary
    return W.conj().T @ cert.D @ W, dec.rank_P.rank


def compose_target_ranks(target, tol=DEFAULT_TOL, seed=7):
    """Normal ``n x n`` matrix with ``rank PD(I-P) = k`` and ``rank (I-P)DP = j``.

    With ``j <= k`` and ``m = k - j + 1`` the matrix is
    ``0_{n-2k} (+) D_hat`` where ``D_hat`` wraps a ``(m, 1)`` block ``M`` with
    ``j - 1`` corner pairs ``[[I, I], [I, I]]``, and
    ``P = I_{(n-2k)+(j-1)+m} (+) 0_{m+(j-1)}``.  For ``j > k`` the roles of
    ``P`` and ``I - P`` are exchanged.
    """
    if not isinstance(target, TargetRanks):
        target = TargetRanks(*target)
    n, j, k = target.n, target.j, target.k
    swapped = j > k
    if swapped:
        j, k = k, j
    m = k - j + 1
    base = build_unequal_corners(GammaSpec(m), tol, seed=seed)
    if not base.certified:
        raise AmbiguousRank(f"inner (m={m}) construction was not certified")
    Mb, r = _block_form(base, tol)
    assert r == m
    z = n - 2 * k
    p = j - 1
    size = z + 2 * p + 2 * m
    D = np.zeros((size, size), dtype=np.complex128)
    a = z                  # first identity block
    b = z + p              # M block
    c = z + p + 2 * m      # second identity block
    D[b:b + 2 * m, b:b + 2 * m] = Mb
    if p:
        I = np.eye(p)
        D[a:a + p, a:a + p] = I
        D[a:a + p, c:c + p] = I
        D[c:c + p, a:a + p] = I
        D[c:c + p, c:c + p] = I
    P = direct_sum(np.eye(z + p + m), np.zeros((m + p, m + p)))
    if swapped:
        P = np.eye(size) - P
    inputs = {"n": n, "j": target.j, "k": target.k, "m": m}
    claim = f"normal D in M_{n} with rank PD(I-P) = {target.k} and rank (I-P)DP = {target.j}"
    return _certificate(D, P, target, tol, claim, inputs, s_min=base.s_pd_min_eig,
                        margin=base.toeplitz_margin)


def perturb_and_rebuild(cert, epsilon=None, seed=0, tol=DEFAULT_TOL):
    """Perturb the diagonal weights of a ``(m, 1)`` build and certify again.

    ``A_0 = A + epsilon * G`` (``G`` complex Gaussian), ``B_0 = A_0*`` and
    ``S_0`` is recomputed from ``S_0 o Z_0 = 2i``.  ``S_0`` is hermitian for
    every such perturbation; it stays positive definite for small ``epsilon``.
    """
    if cert.alpha is None or cert.alpha.size < 3:
        raise OutOfScope("perturbation needs an explicit build with m >= 3")
    alpha = cert.alpha
    m = alpha.size
    gamma = cert.inputs.get("gamma", float(alpha[0].real))
    if epsilon is None:
        epsilon = 1e-3 * gamma
    if epsilon == 0:
        return cert
    rng = np.random.default_rng(seed)
    alpha0 = alpha + epsilon * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    if np.any(alpha0.imag <= 0):
        raise PerturbationTooLarge("a perturbed weight left the upper half plane")
    S0 = _gauge_S(alpha0)
    w, _ = hermitian_eig((S0 + S0.conj().T) / 2, tol)
    if w[0] <= 0:
        raise PerturbationTooLarge(f"S_0 lost positivity (min eigenvalue {w[0]:.3e})")
    inputs = {**cert.inputs, "epsilon": epsilon, "perturb_seed": seed}
    return _build_from_alpha(alpha0, None, tol, cert.claim + " (perturbed)", inputs)
