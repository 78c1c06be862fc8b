"""Look at finite sections of weighted bilateral shift constructions.

The infinite-dimensional examples live on l^2(Z).  At a finite half width T
only entries away from the cut are trustworthy, so the checks are made on
the interior.  The lower product vanishes exactly, the kernel recursion of
the upper product matches a closed form, and the smallest singular value of
the upper product on interior vectors shrinks with T without reaching zero.
"""

from cornerrank import shiftlab

for T in (10, 20, 40):
    sec = shiftlab.build_weighted_section(T)
    print(f"T={T:3d}  sigma_min(interior) = {shiftlab.interior_sigma_min(sec):.3e}")

print("\nkernel recursion ratio x_(p-1)/x_(p+1) coefficient:")
sec = shiftlab.build_weighted_section(40)
for p in (-30, -5, -1, 0, 1, 5, 30):
    print(f"  p={p:4d}  entries {shiftlab.kernel_ratio_from_entries(sec, p):+.12f}"
          f"  closed form {shiftlab.kernel_recursion_oracle(p):+.12f}")

print("\ncorner ranks of the three shift families at T = 20:")
for label, res in [("U (x) I_3", shiftlab.build_case1(3, 20)),
                   ("(U+U*) (+) U (x) I_2", shiftlab.build_case2(1, 3, 20)),
                   ("[[I,I],[I,I]], n=5", shiftlab.build_case3(5))]:
    print(f"  {label:22s} (rank (I-P)DP, rank PD(I-P)) = {res.ranks}")

rows, slopes = shiftlab.rank_sweep(lambda T: shiftlab.build_case2(1, shiftlab.INFINITE, T), [5, 10, 20])
print("\ninfinite multiplicity as growth in T:", [(r["T"], r["rank2"]) for r in rows],
      "slope", round(slopes["rank2"], 3))
