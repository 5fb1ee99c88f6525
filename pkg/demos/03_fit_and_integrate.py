"""Fit from random samples with randomized Kaczmarz, then integrate for free.

Samples are uniform in the cube; each one is a single Kaczmarz step.  The
integral of the fitted model only needs the indicator block of the weights.
"""

import time

import numpy as np

from mixholder import draw_samples, exact_integral, fbm_product, fit_arrays, integrate, required_samples

d = 3
f = fbm_product(d, hurst=0.8, seed=0)
truth = exact_integral(f)
T = np.random.default_rng(7).random((200_000, d))
ref = f(T)
print(" m        n   rel L2 err   rel integral err   seconds")
for m in range(5, 11):
    n = required_samples(d, m)
    X, y = draw_samples(f, d, n, seed=m)
    t0 = time.perf_counter()
    model = fit_arrays(X, y, m)
    secs = time.perf_counter() - t0
    err2 = np.linalg.norm(model(T) - ref) / np.linalg.norm(ref)
    err_int = abs(integrate(model) - truth) / abs(truth)
    print(f"{m:2d} {n:8d}   {err2:.3e}    {err_int:.3e}         {secs:.2f}")
