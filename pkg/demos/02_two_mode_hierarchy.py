"""
Two-mode criteria side by side
==============================

Duan's sum test, the TLUR refinement, the Mancini product test and the
two-mode trace-norm covariance test, on a two-mode squeezed vacuum, a lossy
copy of it, and a batch of random Gaussian states.  Whenever Duan or TLUR
fires, the trace-norm test fires too.
"""

import math

import numpy as np

from cvwitness.gaussian import (
    CovarianceMatrix,
    ModePartition,
    duan_check,
    gaussian_ppt_check,
    mancini_check,
    prop1b_check,
    tlur_check,
    tmsv,
)
from cvwitness.sampling import random_physical_cov


def lossy(cov, mode, eta):
    scale = np.ones(4)
    scale[2 * mode:2 * mode + 2] = math.sqrt(eta)
    g = cov.gamma * np.outer(scale, scale)
    g[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] += (1 - eta) * np.eye(2)
    return CovarianceMatrix(g)


def table(cov, a=1.0):
    for rep in (duan_check(cov, a), tlur_check(cov, a), mancini_check(cov),
                prop1b_check(cov), gaussian_ppt_check(cov, ModePartition(1, 1))):
        print(f"  {rep.criterion:8s} lhs={rep.lhs:9.5f} rhs={rep.rhs:9.5f} "
              f"violation={rep.violation:+9.5f} detected={rep.detected}")


print("TMSV, r = 1")
table(tmsv(1.0))

print("\nTMSV, r = 1, 50% loss on mode 2, Duan/TLUR with a = 1.3")
table(lossy(tmsv(1.0), 1, 0.5), a=1.3)

rng = np.random.default_rng(1)
counts = dict(duan=0, tlur=0, prop1b=0, ppt=0)
for _ in range(2000):
    cov = random_physical_cov(rng, 2, max_thermal=0.5)
    a = rng.uniform(0.2, 3.0) * rng.choice([-1, 1])
    counts["duan"] += duan_check(cov, a).detected
    counts["tlur"] += tlur_check(cov, a).detected
    counts["prop1b"] += prop1b_check(cov).detected
    counts["ppt"] += gaussian_ppt_check(cov, ModePartition(1, 1)).detected
print("\ndetections over 2000 random states (random a for Duan/TLUR):", counts)
