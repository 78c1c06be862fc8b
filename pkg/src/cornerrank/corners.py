"""
Off-diagonal corners of a matrix relative to an orthogonal projection.

Given ``D`` and a projection ``P`` we write ``D`` as a 2x2 block matrix
relative to ``ran P (+) ran (I-P)``; ``D2`` is the compression ``P D (I-P)``
and ``D3`` is ``(I-P) D P``.  For normal ``D`` the two corners always have
equal Frobenius norm, while their ranks can differ.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    AmbiguousRank,
    InvalidComparator,
    InvalidInput,
    NotAProjection,
    NotNormal,
    ShapeError,
)
from .linalg import (
    DEFAULT_TOL,
    RankResult,
    as_matrix,
    haar_random_projection,
    hermitian_eig,
    numerical_rank,
    operator_norm,
)

__all__ = [
    "CornerDecomposition",
    "CornerReport",
    "Witness",
    "NoViolationFound",
    "LINE",
    "CIRCLE",
    "NEITHER",
    "decompose",
    "normality_defect",
    "corner_identity_check",
    "corner_ranks",
    "cr_sample_test",
    "spectrum_line_circle_classify",
    "rank_distance",
    "cr_distance_bound_check",
    "herm",
]

LINE = "Line"
CIRCLE = "Circle"
NEITHER = "Neither"

PROJECTION_TOL = 1e-10


@dataclass(frozen=True)
class CornerDecomposition:
    D: np.ndarray
    P: np.ndarray
    ranP_basis: np.ndarray
    ranQ_basis: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    D4: np.ndarray
    rank_P: RankResult

    @property
    def unitary(self):
        return np.hstack([self.ranP_basis, self.ranQ_basis])

    def reassemble(self):
        """Return ``W [[D1, D2], [D3, D4]] W*`` which should equal ``D``."""
        top = np.hstack([self.D1, self.D2])
        bottom = np.hstack([self.D3, self.D4])
        W = self.unitary
        return W @ np.vstack([top, bottom]) @ W.conj().T


@dataclass(frozen=True)
class CornerReport:
    rank2: RankResult
    rank3: RankResult
    frob2: float
    frob3: float
    normality_defect: float
    commutator_residual: float
    norm_D: float = 0.0

    @property
    def frob_gap(self):
        return abs(self.frob2 - self.frob3)

    def to_dict(self):
        return {
            "rank2": self.rank2.to_dict(),
            "rank3": self.rank3.to_dict(),
            "frob2": self.frob2,
            "frob3": self.frob3,
            "frob_gap": self.frob_gap,
            "normality_defect": self.normality_defect,
            "commutator_residual": self.commutator_residual,
        }


@dataclass(frozen=True)
class Witness:
    """A projection under which the two corners have certified unequal ranks."""

    P: np.ndarray
    rank2: RankResult
    rank3: RankResult
    trial: int


@dataclass(frozen=True)
class NoViolationFound:
    trials: int
    ambiguous_trials: int = 0


def _check_projection(P, n):
    if P.shape != (n, n):
        raise ShapeError(f"projection has shape {P.shape}, expected {(n, n)}")
    if np.linalg.norm(P - P.conj().T, 2) > PROJECTION_TOL:
        raise NotAProjection("P is not hermitian")
    if np.linalg.norm(P @ P - P, 2) > PROJECTION_TOL:
        raise NotAProjection("P is not idempotent")


def decompose(D, P, tol=DEFAULT_TOL):
    """Compress ``D`` onto orthonormal bases of ``ran P`` and ``ran (I-P)``.

    The bases are eigenvectors of ``P``; the rank of ``P`` must be certified.
    """
    D = as_matrix(D, "D")
    P = as_matrix(P, "P")
    n = D.shape[0]
    if D.shape != (n, n):
        raise ShapeError(f"D must be square, got {D.shape}")
    _check_projection(P, n)
    rank_P = numerical_rank(P, tol)
    if rank_P.ambiguous:
        raise AmbiguousRank(f"rank of P is ambiguous (gap ratio {rank_P.gap_ratio:.3g})")
    r = rank_P.rank
    _, U = hermitian_eig(P, tol)
    # eigh sorts ascending: the last r eigenvectors span ran P
    basis_P = U[:, n - r:]
    basis_Q = U[:, :n - r]
    W = np.hstack([basis_P, basis_Q])
    C = W.conj().T @ D @ W
    return CornerDecomposition(
        D=D, P=P, ranP_basis=basis_P, ranQ_basis=basis_Q,
        D1=C[:r, :r], D2=C[:r, r:], D3=C[r:, :r], D4=C[r:, r:],
        rank_P=rank_P,
    )


def normality_defect(D):
    """``||DD* - D*D||_F / max(1, ||D||_F^2)``."""
    D = as_matrix(D, "D")
    if D.shape[0] != D.shape[1]:
        raise ShapeError(f"D must be square, got {D.shape}")
    Dh = D.conj().T
    fro = np.linalg.norm(D, "fro")
    return float(np.linalg.norm(D @ Dh - Dh @ D, "fro") / max(1.0, fro * fro))


def corner_ranks(dec, tol=DEFAULT_TOL):
    """Certified ranks of ``D2`` and ``D3``, both measured against ``||D||``."""
    scale = operator_norm(dec.D)
    return numerical_rank(dec.D2, tol, scale=scale), numerical_rank(dec.D3, tol, scale=scale)


def corner_identity_check(dec, tol=DEFAULT_TOL):
    """Check ``D1*D1 - D1D1* = D2D2* - D3*D3`` and ``||D2||_2 = ||D3||_2``."""
    defect = normality_defect(dec.D)
    if defect > tol.normality_rel_tol:
        raise NotNormal(f"normality defect {defect:.3e} exceeds tolerance", defect=defect)
    D1, D2, D3 = dec.D1, dec.D2, dec.D3
    lhs = D1.conj().T @ D1 - D1 @ D1.conj().T
    rhs = D2 @ D2.conj().T - D3.conj().T @ D3
    residual = float(np.linalg.norm(lhs - rhs, "fro")) if lhs.size else 0.0
    rank2, rank3 = corner_ranks(dec, tol)
    return CornerReport(
        rank2=rank2,
        rank3=rank3,
        frob2=float(np.linalg.norm(D2, "fro")) if D2.size else 0.0,
        frob3=float(np.linalg.norm(D3, "fro")) if D3.size else 0.0,
        normality_defect=defect,
        commutator_residual=residual,
        norm_D=float(np.linalg.norm(dec.D, "fro")),
    )


def cr_sample_test(D, trials=200, seed=0, tol=DEFAULT_TOL, extra_projections=()):
    """Search for a projection that breaks the common rank property.

    Projections in ``extra_projections`` are tried first; then ``trials``
    Haar-random projections whose ranks cycle through ``1..n-1``.  Each random
    trial draws from its own child of ``SeedSequence(seed)``, so the outcome
    does not depend on evaluation order.

    Returns
    -------
    Witness or NoViolationFound
        Finding nothing is evidence, not proof.
    """
    D = as_matrix(D, "D")
    n = D.shape[0]
    if D.shape != (n, n) or n < 2:
        raise ShapeError(f"D must be square with n >= 2, got {D.shape}")
    candidates = [np.asarray(P) for P in extra_projections]
    children = np.random.SeedSequence(seed).spawn(trials)
    ambiguous = 0
    for t in range(len(candidates) + trials):
        if t < len(candidates):
            P = candidates[t]
        else:
            i = t - len(candidates)
            r = 1 + i % (n - 1)
            P = haar_random_projection(n, r, seed=np.random.default_rng(children[i]))
        dec = decompose(D, P, tol)
        r2, r3 = corner_ranks(dec, tol)
        if r2.ambiguous or r3.ambiguous:
            ambiguous += 1
            continue
        if r2.rank != r3.rank:
            return Witness(P=P, rank2=r2, rank3=r3, trial=t)
    return NoViolationFound(trials=len(candidates) + trials, ambiguous_trials=ambiguous)


def spectrum_line_circle_classify(eigs, tol=1e-8):
    """Classify a finite point set in the plane as collinear, concyclic or neither.

    Collinearity is a rank test on the difference vectors; the circle is the
    linear least-squares solution of ``|z|^2 = 2 Re(conj(c) z) + (rho^2 - |c|^2)``
    and is accepted when every point lies within ``tol * diameter`` of it.
    """
    z = np.asarray(eigs, dtype=np.complex128).ravel()
    if z.size == 0:
        raise InvalidInput("need at least one point")
    if not np.all(np.isfinite(z)):
        raise InvalidInput("non-finite point")
    diffs = z - z[0]
    diameter = float(np.max(np.abs(z[:, None] - z[None, :])))
    if diameter == 0.0:
        return LINE
    V = np.column_stack([diffs.real, diffs.imag])
    s = np.linalg.svd(V, compute_uv=False)
    if s.size < 2 or s[1] <= tol * s[0]:
        return LINE
    if z.size <= 3:
        return CIRCLE
    # centre the data for conditioning; the fit is translation-equivariant
    w = z - z.mean()
    A = np.column_stack([2 * w.real, 2 * w.imag, np.ones(w.size)])
    b = np.abs(w) ** 2
    (cx, cy, d), *_ = np.linalg.lstsq(A, b, rcond=None)
    c = complex(cx, cy)
    rho2 = d + abs(c) ** 2
    if rho2 <= 0:
        return NEITHER
    resid = np.abs(np.abs(w - c) - math.sqrt(rho2))
    return CIRCLE if float(resid.max()) <= tol * diameter else NEITHER


def rank_distance(A, B, tol=DEFAULT_TOL, scale=None):
    """The rank metric ``rank(A - B)`` with its certificate."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    if scale is None:
        scale = max(operator_norm(A), operator_norm(B))
    return numerical_rank(A - B, tol, scale=scale)


def herm(D):
    D = as_matrix(D, "D")
    return (D + D.conj().T) / 2


def _comparator_has_cr(Y, tol, trials, seed):
    """Finite-dimensional (CR) holds exactly for normal matrices whose spectrum
    lies on a line or a circle; sampling adds a cheap falsification pass."""
    if normality_defect(Y) > tol.normality_rel_tol:
        return False, "not normal"
    cls = spectrum_line_circle_classify(np.linalg.eigvals(Y))
    if cls == NEITHER:
        return False, "spectrum is neither collinear nor concyclic"
    if trials:
        found = cr_sample_test(Y, trials=trials, seed=seed, tol=tol)
        if isinstance(found, Witness):
            return False, f"sampling found unequal corner ranks at trial {found.trial}"
    return True, cls


def cr_distance_bound_check(D, P, Ys, tol=DEFAULT_TOL, cr_trials=4, seed=0):
    """Check ``rank(D - Y) >= floor(|k - j| / 2)`` for comparators with (CR).

    ``j`` and ``k`` are the certified ranks of ``(I-P)DP`` and ``PD(I-P)``.

    Returns
    -------
    dict
        ``bound``, ``ranks`` (one entry per comparator), ``margins`` and
        ``min_margin``.
    """
    dec = decompose(D, P, tol)
    r2, r3 = corner_ranks(dec, tol)
    if r2.ambiguous or r3.ambiguous:
        raise AmbiguousRank("corner ranks of D are not certified")
    bound = abs(r2.rank - r3.rank) // 2
    ranks, margins = [], []
    for idx, Y in enumerate(Ys):
        ok, why = _comparator_has_cr(as_matrix(Y, "Y"), tol, cr_trials, seed + idx)
        if not ok:
            raise InvalidComparator(f"comparator {idx}: {why}")
        rd = rank_distance(D, Y, tol)
        ranks.append(rd)
        margins.append(rd.rank - bound)
    return {
        "rank2": r2.rank,
        "rank3": r3.rank,
        "bound": bound,
        "ranks": ranks,
        "margins": margins,
        "min_margin": min(margins) if margins else None,
        "holds": all(m >= 0 for m in margins),
    }
