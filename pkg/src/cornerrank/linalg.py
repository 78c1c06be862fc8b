"""
Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Every
public routine validates its input with :func:`as_matrix`, which rejects
non-finite entries.

Randomness always comes from ``numpy.random.default_rng(seed)`` (PCG64), so
seeded results are reproducible on a given platform.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    InvalidInput,
    InvalidRank,
    NotHermitian,
    NotPositiveDefinite,
    ShapeError,
)

__all__ = [
    "ToleranceProfile",
    "RankResult",
    "DEFAULT_TOL",
    "as_matrix",
    "numerical_rank",
    "frobenius_norm",
    "operator_norm",
    "max_entry_norm",
    "hadamard",
    "hermitian_eig",
    "hermitian_function",
    "commuting_mn_factorization",
    "haar_unitary",
    "haar_random_projection",
    "orthonormal_basis",
    "direct_sum",
]


@dataclass(frozen=True)
class ToleranceProfile:
    """Numerical thresholds used to turn floating point output into claims."""

    rank_rel_tol: float = 1e-8
    normality_rel_tol: float = 1e-10
    gap_factor: float = 1e3
    eig_distinct_rel_tol: float = 1e-6

    def __post_init__(self):
        for name in ("rank_rel_tol", "normality_rel_tol", "gap_factor",
                     "eig_distinct_rel_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")
        if self.gap_factor <= 1:
            raise InvalidInput(f"gap_factor must exceed 1, got {self.gap_factor!r}")


DEFAULT_TOL = ToleranceProfile()


@dataclass(frozen=True)
class RankResult:
    """A numerical rank together with its singular-value gap certificate.

    ``gap_ratio`` is ``sigma[rank-1] / sigma[rank]`` where ``sigma[-1]`` is
    read as the reference scale; it is ``inf`` when nothing sits below the
    threshold or the next singular value is exactly zero.
    """

    rank: int
    sigma_max: float
    gap_ratio: float
    ambiguous: bool

    @property
    def certified(self):
        return not self.ambiguous

    def to_dict(self):
        return {
            "rank": self.rank,
            "sigma_max": self.sigma_max,
            "gap_ratio": _json_float(self.gap_ratio),
            "ambiguous": self.ambiguous,
        }


def _json_float(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def as_matrix(A, name="A"):
    """Return ``A`` as a 2-d complex128 array, rejecting NaN/Inf."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} has non-finite entries")
    return arr


def _rank_from_singular_values(s, tol, scale):
    s = np.asarray(s, dtype=float)
    sigma_max = float(s[0]) if s.size else 0.0
    ref = max(sigma_max, float(scale or 0.0))
    if ref == 0.0:
        return RankResult(0, 0.0, math.inf, False)
    thresh = tol.rank_rel_tol * ref
    rank = int(np.count_nonzero(s > thresh))
    if rank == s.size:
        gap = math.inf
    else:
        above = s[rank - 1] if rank > 0 else ref
        below = s[rank]
        gap = math.inf if below == 0.0 else float(above / below)
    return RankResult(rank, sigma_max, gap, gap < tol.gap_factor)


def numerical_rank(A, tol=DEFAULT_TOL, scale=None):
    """Numerical rank of ``A`` with a gap certificate.

    Singular values above ``tol.rank_rel_tol * max(sigma_max, scale)`` are
    counted.  Passing ``scale`` (typically the norm of an enclosing operator)
    lets a block that is entirely round-off be recognised as zero.
    """
    A = as_matrix(A)
    if A.size == 0:
        return RankResult(0, 0.0, math.inf, False)
    s = np.linalg.svd(A, compute_uv=False)
    return _rank_from_singular_values(s, tol, scale)


def frobenius_norm(A):
    return float(np.linalg.norm(as_matrix(A), "fro"))


def operator_norm(A):
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def max_entry_norm(A):
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A)))


def hadamard(X, Y):
    """Entrywise (Schur) product."""
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch: {X.shape} vs {Y.shape}")
    return X * Y


def _check_hermitian(A, tol):
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got {A.shape}")
    nrm = np.linalg.norm(A, "fro")
    if np.linalg.norm(A - A.conj().T, "fro") > tol.normality_rel_tol * nrm:
        raise NotHermitian("matrix is not hermitian within tolerance")
    return (A + A.conj().T) / 2


def hermitian_eig(A, tol=DEFAULT_TOL):
    """Eigenvalues (ascending) and a unitary eigenvector matrix of hermitian ``A``."""
    H = _check_hermitian(A, tol)
    w, U = np.linalg.eigh(H)
    return w, U


def hermitian_function(A, f, tol=DEFAULT_TOL):
    """Apply a scalar function to a hermitian matrix through its eigenbasis."""
    w, U = hermitian_eig(A, tol)
    return (U * f(w)) @ U.conj().T


def commuting_mn_factorization(S, tol=DEFAULT_TOL):
    """Split a positive definite ``S`` as ``S = M N^{-1}``.

    ``N = (I + S^2)^{-1/2}`` and ``M = S N``; both are positive definite,
    they commute and satisfy ``M^2 + N^2 = I``.

    Returns
    -------
    M, N : ndarray
    """
    w, U = hermitian_eig(S, tol)
    if w[0] <= tol.rank_rel_tol * max(abs(w[-1]), 1.0):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} is not positive")
    nw = 1.0 / np.sqrt(1.0 + w * w)
    Uh = U.conj().T
    N = (U * nw) @ Uh
    M = (U * (w * nw)) @ Uh
    # symmetrize away the round-off in the outer products
    return (M + M.conj().T) / 2, (N + N.conj().T) / 2


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(n, seed=0):
    """Haar-distributed ``n x n`` unitary (QR of a complex Ginibre matrix)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Q, R = np.linalg.qr(_complex_gaussian(rng, (n, n)))
    d = np.diagonal(R)
    phases = np.where(np.abs(d) > 0, d / np.where(d == 0, 1, np.abs(d)), 1.0)
    return Q * phases


def haar_random_projection(n, r, seed=0):
    """Orthogonal projection of rank ``r`` onto a Haar-random subspace of C^n."""
    if n < 1:
        raise InvalidInput(f"dimension must be positive, got {n}")
    if not 0 <= r <= n:
        raise InvalidRank(f"rank {r} outside 0..{n}")
    if r == 0:
        return np.zeros((n, n), dtype=np.complex128)
    if r == n:
        return np.eye(n, dtype=np.complex128)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Q, _ = np.linalg.qr(_complex_gaussian(rng, (n, r)))
    P = Q @ Q.conj().T
    return (P + P.conj().T) / 2


def orthonormal_basis(A, tol=DEFAULT_TOL, scale=None):
    """Orthonormal basis for the column space of ``A`` with its rank certificate."""
    A = as_matrix(A)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.complex128), RankResult(0, 0.0, math.inf, False)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rr = _rank_from_singular_values(s, tol, scale)
    return U[:, :rr.rank], rr


def direct_sum(*blocks):
    """Block-diagonal assembly; zero-sized blocks are allowed."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) if np.size(b) else
              np.zeros(np.shape(b) if np.ndim(b) == 2 else (0, 0), dtype=np.complex128)
              for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.complex128)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out
