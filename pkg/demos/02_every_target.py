"""Reach every admissible pair of corner ranks in a fixed dimension.

In dimension n the corner ranks j and k can be anything in 1..n//2, and
a zero corner forces the other one to vanish.  The grid below is built from
one core block padded with zeros and identity pairs.
"""

import time

from cornerrank import InvalidTarget, TargetRanks, compose_target_ranks

n = 10
t0 = time.perf_counter()
print(f"n = {n}: achieved (rank PD(I-P), rank (I-P)DP)")
for j in range(1, n // 2 + 1):
    row = []
    for k in range(1, n // 2 + 1):
        cert = compose_target_ranks(TargetRanks(n, j, k))
        mark = "" if cert.certified else "?"
        row.append(f"({cert.rank2.rank},{cert.rank3.rank}){mark}")
    print("  j=%d  " % j + " ".join(row))
print(f"  {(n // 2) ** 2} builds in {time.perf_counter() - t0:.2f}s")

try:
    TargetRanks(n, 0, 2)
except InvalidTarget as exc:
    print("  (0, 2) rejected:", exc)
