"""
Certifying a planted clustering
===============================

Draw two unit balls in R^6, build the dual certificate for the planted
partition and read off the three certification margins.
"""

import numpy as np

from sdpkmeans import BallConfig, RadialDistribution, generate
from sdpkmeans.certificate import MODES, build_certificate, evaluate
from sdpkmeans.clustering import brute_force, lloyd

# Two balls whose centers sit 3 apart: above the 2 + k^2/m = 2.667 line
cfg = BallConfig.simplex(2, 6, 3.0)
cloud = generate(cfg, RadialDistribution("uniform-ball"), 100, seed=0)
print("points:", cloud.points.shape)

# The certificate pieces. z comes from the tightest cross-cluster row sum
parts = build_certificate(cloud.points, cloud.clustering())
print("z =", parts.z)
print("rho_min =", parts.rho_min)
print("dual objective %.6f vs primal %.6f" % (parts.dual_objective(), parts.primal_objective()))

# Q must be PSD off the cluster indicators. The two bounds are cheaper and weaker
for mode in MODES:
    r = evaluate(parts, mode)
    print("%-16s success=%d margin=%.4g" % (mode, r.success, r.margin))

# Lloyd's algorithm lands on the same partition here
found = lloyd(cloud.points, 2, rng=np.random.default_rng(0))
print("lloyd agrees with planted:", found == cloud.clustering())

# %%
# On a tiny instance the certificate can be checked against exhaustive search
small = generate(BallConfig.simplex(2, 2, 2.5), RadialDistribution(), 5, seed=1)
best, value = brute_force(small.points, 2)
print("brute force optimum %.4f, planted optimal: %s" % (value, best == small.clustering()))
print("certified:", evaluate(build_certificate(small.points, small.clustering()), "exact-psd").success)
