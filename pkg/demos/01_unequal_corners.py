"""Build a normal matrix whose two off-diagonal corners have different ranks.

For a normal D and any orthogonal projection P the corners PD(I-P) and
(I-P)DP always have the same Frobenius norm.  Their ranks need not agree.
This script builds the 6x6 example with ranks 3 and 1, checks the norm
identity, and shows that random projections almost never expose the gap.
"""

import numpy as np

from cornerrank import (
    GammaSpec,
    build_unequal_corners,
    corner_identity_check,
    cr_sample_test,
    decompose,
    spectrum_line_circle_classify,
)

cert = build_unequal_corners(GammaSpec(3))
print(cert.claim)
print("  normality defect:", cert.normality_defect)
print("  rank PD(I-P) =", cert.rank2.rank, " gap ratio", cert.rank2.gap_ratio)
print("  rank (I-P)DP =", cert.rank3.rank, " gap ratio", f"{cert.rank3.gap_ratio:.2e}")

rep = corner_identity_check(decompose(cert.D, cert.P))
print(f"  Frobenius norms: {rep.frob2:.15f} vs {rep.frob3:.15f}")

eigs = np.linalg.eigvals(cert.D)
print("  eigenvalues:", np.round(np.sort_complex(eigs), 6))
print("  spectrum shape:", spectrum_line_circle_classify(eigs))

# a random subspace of C^6 sees equal ranks with probability one
found = cr_sample_test(cert.D, trials=200, seed=0)
print("  200 random projections:", type(found).__name__)
found = cr_sample_test(cert.D, trials=0, extra_projections=[cert.P])
print("  the constructed projection:", type(found).__name__)
