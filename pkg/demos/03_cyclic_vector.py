"""Grow a ladder of subspaces from ran P and read off a cyclic vector.

Starting from V_0 = ran P, the ladder V_{k+1} = V_k + D V_k goes up and
V_{k-1} = V_k cap D^{-1} V_k goes down.  For the (m, 1) construction each
step changes the dimension by exactly one, so the one-dimensional rung holds
a vector whose Krylov space is everything.
"""

from cornerrank import GammaSpec, build_unequal_corners
from cornerrank.chain import chain_from_projection, extract_cyclic_vector, verify_shifts_forward

for m in (3, 5, 8):
    cert = build_unequal_corners(GammaSpec(m))
    chain, _ = chain_from_projection(cert.D, cert.P)
    residuals, holds = verify_shifts_forward(cert.D, chain)
    rep = extract_cyclic_vector(cert.D, chain)
    print(f"m={m}: dims {chain.dims}")
    print(f"   D V_k inside V_(k+1): {holds} (worst {max(residuals):.1e})")
    print(f"   Krylov rank {rep.krylov_rank.rank} of {2 * m}, min eigenvalue gap {rep.eig_min_gap:.3f}")
