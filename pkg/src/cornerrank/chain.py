"""
Subspace ladders ``V_{k+1} = V_k + D V_k`` and ``V_{k-1} = V_k cap D^{-1} V_k``.

Starting from ``V_0 = ran P`` for a normal ``D`` whose corners have ranks
``(m, 1)``, the ladder climbs one dimension per step from ``0`` to ``2m``; a
unit vector in the one-dimensional rung is then cyclic for ``D``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import AmbiguousChain, InvalidInput, NotCyclicWitness, NumericalFailure, ShapeError
from .linalg import (
    DEFAULT_TOL,
    RankResult,
    _rank_from_singular_values,
    as_matrix,
    numerical_rank,
    operator_norm,
    orthonormal_basis,
)

__all__ = [
    "SubspaceChain",
    "CyclicityReport",
    "shift_to_invertible",
    "subspace_sum",
    "subspace_intersection",
    "build_chain",
    "chain_from_projection",
    "krylov_report",
    "extract_cyclic_vector",
    "distinct_eigenvalue_check",
    "verify_shifts_forward",
    "projector",
]


def projector(basis):
    return basis @ basis.conj().T


@dataclass(frozen=True)
class SubspaceChain:
    """Nested orthonormal bases indexed ``start, start+1, ...``."""

    bases: tuple
    start: int
    ranks: tuple = ()

    @property
    def dims(self):
        return [b.shape[1] for b in self.bases]

    @property
    def indices(self):
        return list(range(self.start, self.start + len(self.bases)))

    def __getitem__(self, k):
        i = k - self.start
        if not 0 <= i < len(self.bases):
            raise IndexError(f"chain index {k} outside {self.indices[0]}..{self.indices[-1]}")
        return self.bases[i]

    def __len__(self):
        return len(self.bases)

    def nesting_residuals(self):
        """``||(I - P_{k+1}) V_k||`` for consecutive rungs."""
        out = []
        for lo, hi in zip(self.bases, self.bases[1:]):
            if lo.shape[1] == 0:
                out.append(0.0)
                continue
            out.append(float(np.linalg.norm(lo - hi @ (hi.conj().T @ lo), 2)))
        return out

    @property
    def strictly_increasing(self):
        d = self.dims
        return all(b == a + 1 for a, b in zip(d, d[1:]))


@dataclass(frozen=True)
class CyclicityReport:
    x: np.ndarray
    krylov_rank: RankResult
    eig_min_gap: float
    distinct: bool
    span_residuals: tuple = ()

    def to_dict(self):
        return {
            "krylov_rank": self.krylov_rank.to_dict(),
            "eig_min_gap": self.eig_min_gap,
            "distinct": self.distinct,
            "span_residuals": list(self.span_residuals),
        }


def shift_to_invertible(D):
    """Return ``(D + lam I, lam)`` with ``lam = ||D|| + 1``."""
    D = as_matrix(D, "D")
    if D.shape[0] != D.shape[1]:
        raise ShapeError(f"D must be square, got {D.shape}")
    lam = operator_norm(D) + 1.0
    return D + lam * np.eye(D.shape[0]), complex(lam)


def subspace_sum(V, W, tol=DEFAULT_TOL):
    """Orthonormal basis of ``ran V + ran W`` for isometries ``V``, ``W``."""
    return orthonormal_basis(np.hstack([V, W]), tol, scale=1.0)


def subspace_intersection(V, W, tol=DEFAULT_TOL):
    """Orthonormal basis of ``ran V cap ran W`` via ``ker [(I - P_V); (I - P_W)]``."""
    n = V.shape[0]
    if V.shape[1] == 0 or W.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.complex128), RankResult(n, 1.0, math.inf, False)
    I = np.eye(n)
    stacked = np.vstack([I - projector(V), I - projector(W)])
    _, s, vh = np.linalg.svd(stacked)
    rr = _rank_from_singular_values(s, tol, 1.0)
    basis = vh[rr.rank:].conj().T
    return basis, rr


def build_chain(D, V0_basis, steps_up, steps_down, tol=DEFAULT_TOL):
    """Ladder of subspaces from ``V_0`` upward by ``V + DV`` and downward by
    ``V cap D^{-1} V``.

    Every rung's dimension comes from a certified rank decision; an
    ambiguous decision raises :class:`AmbiguousChain` naming the step.
    """
    D = as_matrix(D, "D")
    n = D.shape[0]
    if D.shape != (n, n):
        raise ShapeError(f"D must be square, got {D.shape}")
    inv = numerical_rank(D, tol)
    if inv.rank < n or inv.ambiguous:
        raise InvalidInput("D is not certifiably invertible; use shift_to_invertible first")
    V0 = as_matrix(V0_basis, "V0_basis")
    if V0.shape[0] != n:
        raise ShapeError(f"V0 basis has {V0.shape[0]} rows, expected {n}")
    if V0.shape[1] and np.linalg.norm(V0.conj().T @ V0 - np.eye(V0.shape[1]), 2) > 1e-10:
        raise InvalidInput("V0 basis is not an isometry")

    up, down, ranks_up, ranks_down = [], [], [], []
    V = V0
    for step in range(1, steps_up + 1):
        DV, _ = orthonormal_basis(D @ V, tol, scale=1.0)
        V, rr = subspace_sum(V, DV, tol)
        if rr.ambiguous:
            raise AmbiguousChain(f"dimension of V_{step} is ambiguous (gap {rr.gap_ratio:.3g})", step=step)
        up.append(V)
        ranks_up.append(rr)
    V = V0
    for step in range(1, steps_down + 1):
        if V.shape[1] == 0:
            down.append(V)
            ranks_down.append(RankResult(0, 0.0, math.inf, False))
            continue
        Dinv_V, _ = orthonormal_basis(np.linalg.solve(D, V), tol, scale=1.0)
        V, rr = subspace_intersection(V, Dinv_V, tol)
        if rr.ambiguous:
            raise AmbiguousChain(f"dimension of V_-{step} is ambiguous (gap {rr.gap_ratio:.3g})", step=-step)
        down.append(V)
        ranks_down.append(rr)
    bases = tuple(reversed(down)) + (V0,) + tuple(up)
    ranks = tuple(reversed(ranks_down)) + (None,) + tuple(ranks_up)
    return SubspaceChain(bases=bases, start=-steps_down, ranks=ranks)


def chain_from_projection(D, P, tol=DEFAULT_TOL, steps_up=None, steps_down=None):
    """Chain started at ``ran P``; ``D`` is shifted first when singular.

    By default it climbs ``n - rank P`` steps and descends ``rank P`` steps.

    Returns
    -------
    chain : SubspaceChain
    shift : complex
        The ``lam`` added to ``D`` (zero when ``D`` was already invertible).
    """
    from .corners import decompose

    D = as_matrix(D, "D")
    dec = decompose(D, P, tol)
    n, r = D.shape[0], dec.rank_P.rank
    inv = numerical_rank(D, tol)
    D_work, lam = D, 0j
    if inv.rank < n or inv.ambiguous:
        D_work, lam = shift_to_invertible(D)
    up = n - r if steps_up is None else steps_up
    down = r if steps_down is None else steps_down
    return build_chain(D_work, dec.ranP_basis, up, down, tol), lam


def krylov_report(D, x, tol=DEFAULT_TOL):
    """Dimension of ``span{x, Dx, D^2 x, ...}`` by Arnoldi with full
    reorthogonalization.

    Each step contributes a new direction of relative size
    ``h = ||w_perp|| / ||D||``; the rank is the number of steps before ``h``
    drops under ``rank_rel_tol``.  The gap ratio compares the smallest
    accepted ``h`` with the first rejected one.

    Returns
    -------
    Q : ndarray
        Orthonormal Krylov basis (columns in Krylov order).
    rank : RankResult
    """
    D = as_matrix(D, "D")
    n = D.shape[0]
    x = np.asarray(x, dtype=np.complex128).ravel()
    nx = np.linalg.norm(x)
    if nx == 0:
        raise InvalidInput("starting vector is zero")
    scale = max(operator_norm(D), 1e-300)
    Q = np.zeros((n, n), dtype=np.complex128)
    Q[:, 0] = x / nx
    accepted = [1.0]
    rejected = None
    k = 1
    while k < n:
        w = D @ Q[:, k - 1]
        for _ in range(2):
            w = w - Q[:, :k] @ (Q[:, :k].conj().T @ w)
        h = np.linalg.norm(w) / scale
        if not np.isfinite(h):
            raise NumericalFailure("Arnoldi produced a non-finite vector")
        if h <= tol.rank_rel_tol:
            rejected = h
            break
        Q[:, k] = w / np.linalg.norm(w)
        accepted.append(h)
        k += 1
    low = min(accepted)
    if rejected is None:
        gap = math.inf
    else:
        gap = math.inf if rejected == 0 else low / rejected
    return Q[:, :k], RankResult(k, 1.0, gap, gap < tol.gap_factor)


def extract_cyclic_vector(D, chain, tol=DEFAULT_TOL):
    """Pick a unit vector in the lowest nonzero rung and certify it is cyclic.

    Besides the Krylov rank, the report records how far each partial Krylov
    span ``span{x, ..., D^j x}`` sits from the matching chain rung.

    Raises
    ------
    NotCyclicWitness
        When the Krylov rank falls short of ``n``.
    """
    D = as_matrix(D, "D")
    n = D.shape[0]
    rungs = [b for b in chain.bases if b.shape[1] > 0]
    if not rungs:
        raise InvalidInput("chain has no nonzero rung")
    first = rungs[0]
    x = first[:, 0] / np.linalg.norm(first[:, 0])
    Q, rr = krylov_report(D, x, tol)
    gap, distinct = distinct_eigenvalue_check(D, tol)
    residuals = []
    for j in range(min(Q.shape[1], len(rungs))):
        rung = rungs[j]
        if rung.shape[1] != j + 1:
            residuals.append(math.inf)
            continue
        Qj = Q[:, :j + 1]
        residuals.append(float(np.linalg.norm(Qj - rung @ (rung.conj().T @ Qj), 2)))
    report = CyclicityReport(x=x, krylov_rank=rr, eig_min_gap=gap, distinct=distinct,
                             span_residuals=tuple(residuals))
    if rr.rank < n or rr.ambiguous:
        raise NotCyclicWitness(f"Krylov rank {rr.rank} < {n}: no cyclic vector certified", report=report)
    return report


def distinct_eigenvalue_check(D, tol=DEFAULT_TOL):
    """Minimum pairwise eigenvalue distance and whether it clears
    ``eig_distinct_rel_tol`` times the spectral diameter."""
    D = as_matrix(D, "D")
    if D.shape[0] != D.shape[1]:
        raise ShapeError(f"D must be square, got {D.shape}")
    try:
        ev = np.linalg.eigvals(D)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    if ev.size < 2:
        return math.inf, True
    dist = np.abs(ev[:, None] - ev[None, :])
    spread = float(dist.max())
    dist[np.diag_indices_from(dist)] = np.inf
    min_gap = float(dist.min())
    return min_gap, min_gap > tol.eig_distinct_rel_tol * spread


def verify_shifts_forward(T_matrix, chain, tol=1e-10):
    """Residuals ``||(I - P_{j+1}) T V_j||`` for every consecutive pair of rungs.

    Returns
    -------
    residuals : list of float
    holds : bool
        All residuals are at most ``tol`` (relative to ``||T||`` when that
        exceeds one).
    """
    T = as_matrix(T_matrix, "T")
    scale = max(1.0, operator_norm(T))
    res = []
    for lo, hi in zip(chain.bases, chain.bases[1:]):
        if lo.shape[1] == 0:
            res.append(0.0)
            continue
        TV = T @ lo
        res.append(float(np.linalg.norm(TV - hi @ (hi.conj().T @ TV), 2)))
    return res, all(r <= tol * scale for r in res)
