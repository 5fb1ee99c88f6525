"""Mixed Hölder test functions built from fractional Brownian motion paths."""

from __future__ import annotations

import csv
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .dyadic import validate_points

# Cholesky on 2**14 + 1 nodes is the upper limit; 2**12 is a sub-second default.
MAX_LEVELS = 14
DEFAULT_LEVELS = 12

# Diagonal jitter tried, relative to the mean variance, when Cholesky fails.
JITTER_STEPS = (1e-14, 1e-12, 1e-10)


class PiecewiseLinear:
    """Continuous piecewise-linear function on [0, 1] through ``(nodes, values)``."""

    def __init__(self, nodes, values):
        self.nodes = np.asarray(nodes, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.float64)
        if self.nodes.shape != self.values.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and values must be 1-D arrays of equal length")

    def __call__(self, t):
        return np.interp(t, self.nodes, self.values)

    def integral(self) -> float:
        """Exact integral over [0, 1] (the trapezoid rule is exact here)."""
        return float(np.trapezoid(self.values, self.nodes))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "value"])
            for t, v in zip(self.nodes, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


class FbmPath(PiecewiseLinear):
    """Fractional Brownian motion sampled on ``2**J + 1`` equispaced nodes."""

    def __init__(self, hurst: float, levels: int, values):
        super().__init__(np.linspace(0.0, 1.0, (1 << levels) + 1), values)
        self.hurst = hurst
        self.levels = levels

    def __repr__(self):
        return f"FbmPath(hurst={self.hurst}, levels={self.levels})"


def fbm_covariance(t: np.ndarray, s: np.ndarray, hurst: float) -> np.ndarray:
    """``E[B(t) B(s)] = (t**2h + s**2h - |t - s|**2h) / 2``."""
    h2 = 2.0 * hurst
    return 0.5 * (t**h2 + s**h2 - np.abs(t - s) ** h2)


@lru_cache(maxsize=4)
def _cholesky_factor(hurst: float, levels: int) -> np.ndarray:
    t = np.arange(1, (1 << levels) + 1) / float(1 << levels)
    cov = fbm_covariance(t[:, None], t[None, :], hurst)
    try:
        return scipy.linalg.cholesky(cov, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        pass
    scale = float(np.mean(np.diag(cov)))
    for jitter in JITTER_STEPS:
        try:
            return scipy.linalg.cholesky(cov + jitter * scale * np.eye(len(t)), lower=True,
                                         check_finite=False)
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        f"fBm covariance (hurst={hurst}, levels={levels}) is not positive definite "
        f"even with relative jitter {JITTER_STEPS[-1]:g}")


def fbm_generate(hurst: float, levels: int = DEFAULT_LEVELS, seed=None) -> FbmPath:
    """Draw an fBm path on ``2**levels + 1`` nodes by Cholesky factorization.

    ``seed`` may be an int or a ``numpy.random.Generator``; Gaussian variates come
    from ``Generator.standard_normal``, so paths are reproducible per seed.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError("hurst must lie in (0, 1)")
    if not 0 <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must lie in [0, {MAX_LEVELS}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    L = _cholesky_factor(float(hurst), int(levels))
    z = rng.standard_normal(L.shape[0])
    return FbmPath(hurst, levels, np.concatenate(([0.0], L @ z)))


class ProductFunction:
    """``f(x) = g_1(x_1) * ... * g_d(x_d)`` for 1-D factors ``g_j``."""

    def __init__(self, factors: Sequence[Callable]):
        self.factors = list(factors)

    @property
    def d(self) -> int:
        return len(self.factors)

    def __call__(self, X) -> np.ndarray:
        X = validate_points(X, self.d)
        out = np.ones(X.shape[0])
        for j, g in enumerate(self.factors):
            out *= g(X[:, j])
        return out


def product_eval(f: ProductFunction, x):
    """Evaluate ``f`` at a point (returns a float) or at the rows of an array."""
    vals = f(x)
    return float(vals[0]) if np.ndim(x) == 1 else vals


def exact_integral(f: ProductFunction) -> float:
    """Integral over the unit cube, as the product of the factor integrals."""
    total = 1.0
    for g in f.factors:
        if not hasattr(g, "integral"):
            raise TypeError(f"factor {g!r} has no closed-form integral")
        total *= g.integral()
    return total


def fbm_product(d: int, hurst: float = 0.8, levels: int = DEFAULT_LEVELS,
                seed=None) -> ProductFunction:
    """Product of ``d`` independent fBm paths drawn from one seed."""
    rng = np.random.default_rng(seed)
    return ProductFunction([fbm_generate(hurst, levels, rng) for _ in range(d)])
