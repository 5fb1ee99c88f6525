"""Fractional Brownian motion paths used to build rough test functions.

Checks the sample variance at t=1 and one covariance against the closed form.
"""

import numpy as np

from mixholder import fbm_generate
from mixholder.testfn import fbm_covariance

h = 0.8
path = fbm_generate(h, levels=10, seed=0)
print(f"{path!r}: {path.nodes.size} nodes, B(1) = {path.values[-1]:+.4f}, integral {path.integral():+.4f}")

paths = np.array([fbm_generate(h, 2, seed).values for seed in range(10_000)])
print(f"Var B(1): {paths[:, 4].var():.4f} (exact 1)")
print(f"Cov(B(0.75), B(0.25)): {np.mean(paths[:, 3] * paths[:, 1]):.4f} "
      f"(exact {fbm_covariance(0.75, 0.25, h):.4f})")
