"""
A PPT entangled non-Gaussian family and the truncated R-matrix test
====================================================================

Project the Horodecki-Lewenstein state onto Fock levels 1..3 on each side,
expand it in the basis {I/sqrt3, lambda_k/sqrt2}, and compare the trace
norm of the resulting 9x9 correlation matrix R with the weight of the
truncated subspace.  A ratio above 1 certifies entanglement.
"""

import sys

from cvwitness.hlstate import HLParams, hl_truncated_block, prop2_check, scan_hl_region

p = HLParams(0.5, 0.8)
block = hl_truncated_block(p, 3)
print("normalization A =", block.norm_A)
print("weight of the truncated block =", block.trace())
print("block equals its partial transpose:",
      (block.partial_transpose().elements == block.elements).all())
print("ratio at (a, c) = (0.5, 0.8):", prop2_check(p).details["ratio"])

# coarse map of the triangle 0 < a < c < 1; '#' = detected
steps = int(sys.argv[1]) if len(sys.argv) > 1 else 40
rows = scan_hl_region(steps)
grid = {(round(r.a * steps - 0.5), round(r.c * steps - 0.5)): r.detected for r in rows}
print(f"\nc ->   ({steps} x {steps} grid, rows are a)")
for i in range(steps):
    line = "".join("#" if grid.get((i, j)) else ("." if (i, j) in grid else " ")
                   for j in range(steps))
    print(f"{(i + 0.5) / steps:5.3f} {line}")
print(f"\n{sum(r.detected for r in rows)} of {len(rows)} grid points detected")

# larger truncations change the picture
for levels in (3, 4, 5):
    print(f"levels={levels}: ratio at (0.5, 0.8) =", prop2_check(p, levels).details["ratio"])
