"""Deterministic sparse-grid approximation from samples at dyadic box centers.

The approximant at ``x`` combines the values of ``f`` at the centers of the
boxes containing ``x`` whose level vectors sum to ``m - k``, for
``k = 0..min(d-1, m)``, with weights ``(-1)**k * C(d-1, k)``.  The same
approximant is reproduced exactly by a linear functional on the sparse
embedding; :func:`best_linear_weights` computes it by orthogonal projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import (VectorFunction, _checked, cell_centers, cell_index, level_vectors,
                     shape_count, validate_points)
from .embedding import _check_grid, embedding_matrix, enumerate_triples


def _centers_of_shape(levels: tuple[int, ...]) -> np.ndarray:
    axes = [(np.arange(1 << l) + 0.5) / 2**l for l in levels]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _lookup(arr: np.ndarray, levels: tuple[int, ...], X: np.ndarray) -> np.ndarray:
    offs = tuple(cell_index(X[:, a], lev) for a, lev in enumerate(levels))
    return arr[offs]


@dataclass
class CenterSamplePlan:
    """Values of ``f`` at the centers of all dyadic boxes of measure ``>= 2**-m``.

    ``values[levels]`` is an array of shape ``(2**l_1, ..., 2**l_d)`` indexed by
    the box offsets; it is NaN until :meth:`fill` is called.
    """

    d: int
    m: int
    values: dict = field(default_factory=dict)

    @classmethod
    def build(cls, d: int, m: int) -> "CenterSamplePlan":
        if d < 1 or m < 0:
            raise ValueError("need d >= 1 and m >= 0")
        values = {}
        for total in range(m + 1):
            for levels in level_vectors(total, d):
                values[levels] = np.full(tuple(1 << l for l in levels), np.nan)
        return cls(d, m, values)

    def __len__(self) -> int:
        return sum(v.size for v in self.values.values())

    def centers(self, levels: tuple[int, ...]) -> np.ndarray:
        return _centers_of_shape(levels)

    def fill(self, f: VectorFunction) -> "CenterSamplePlan":
        for levels, arr in self.values.items():
            arr[...] = np.asarray(f(self.centers(levels)), dtype=np.float64).reshape(arr.shape)
        return self

    @property
    def filled(self) -> bool:
        return all(not np.isnan(v).any() for v in self.values.values())

    def get(self, levels: tuple[int, ...]) -> np.ndarray:
        try:
            arr = self.values[tuple(levels)]
        except KeyError:
            raise KeyError(f"plan has no entries for level vector {tuple(levels)}") from None
        if np.isnan(arr).any():
            raise ValueError(f"plan entries for level vector {tuple(levels)} are not filled")
        return arr


def smolyak_evaluate(x, plan: CenterSamplePlan, m: int | None = None):
    """Sparse-grid combination of center values at ``x`` (a point or an ``(n, d)`` array)."""
    m = plan.m if m is None else m
    if m > plan.m:
        raise KeyError(f"plan covers scales up to {plan.m}, asked for {m}")
    single = np.ndim(x) == 1
    X = validate_points(x, plan.d)
    d = plan.d
    out = np.zeros(X.shape[0])
    for k in range(min(d - 1, m) + 1):
        coeff = (-1) ** k * math.comb(d - 1, k)
        for levels in level_vectors(m - k, d):
            out += coeff * _lookup(plan.get(levels), levels, X)
    return float(out[0]) if single else out


def binomial_identity(d: int, m: int) -> int:
    """``sum_k (-1)**k C(d-1, k) C(m-k+d-1, d-1)``, which equals 1 for all d, m >= 1."""
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    total = 0
    for k in range(min(d - 1, m) + 1):
        total += (-1) ** k * _checked(math.comb(d - 1, k) * shape_count(d, m - k),
                                      "binomial_identity term")
    return _checked(total, "binomial_identity")


@dataclass
class FullEmbeddingWeights:
    """One weight per finest dyadic box (level sum ``m``), keyed like a plan."""

    d: int
    m: int
    values: dict

    def __len__(self) -> int:
        return sum(v.size for v in self.values.values())

    @property
    def vector(self) -> np.ndarray:
        """All weights concatenated: shapes lexicographic, offsets row-major."""
        return np.concatenate([self.values[lv].ravel() for lv in level_vectors(self.m, self.d)])

    def evaluate(self, x) -> np.ndarray:
        """Inner product with the indicator vector of the finest boxes containing ``x``."""
        X = validate_points(x, self.d)
        out = np.zeros(X.shape[0])
        for levels, arr in self.values.items():
            out += _lookup(arr, levels, X)
        return out


def _sub_vectors(levels: tuple[int, ...], k: int):
    # Vectors 0 <= delta <= levels (componentwise) with |delta| = k.
    for delta in level_vectors(k, len(levels)):
        if all(dl <= l for dl, l in zip(delta, levels)):
            yield delta


def phi_prime(plan: CenterSamplePlan, m: int | None = None) -> FullEmbeddingWeights:
    """Weights on the finest boxes whose indicator expansion equals the sparse-grid combination.

    The weight of a finest box is
    ``sum_k (-1)**k C(d-1,k) / C(k+d-1,d-1) * sum f(c_R)`` over the boxes ``R``
    of measure ``2**(k-m)`` that contain it.
    """
    m = plan.m if m is None else m
    d = plan.d
    out = {}
    for levels in level_vectors(m, d):
        acc = np.zeros(tuple(1 << l for l in levels))
        for k in range(min(d - 1, m) + 1):
            weight = (-1) ** k * math.comb(d - 1, k) / math.comb(k + d - 1, d - 1)
            for delta in _sub_vectors(levels, k):
                coarse = plan.get(tuple(l - dl for l, dl in zip(levels, delta)))
                for a, dl in enumerate(delta):
                    coarse = np.repeat(coarse, 1 << dl, axis=a)
                acc += weight * coarse
        out[levels] = acc
    return FullEmbeddingWeights(d, m, out)


def best_linear_weights(f: VectorFunction | None, d: int, m: int,
                        plan: CenterSamplePlan | None = None) -> np.ndarray:
    """Embedding weights ``w`` with ``<w, embed(x)> = smolyak_evaluate(x)`` on every finest cell.

    Solves the least-squares fit over all ``2**(d*m)`` cell centers in closed
    form: the embedding columns are orthogonal with squared norm
    ``2**((d-1)*m)``, so ``w = A.T @ g / 2**((d-1)*m)``.
    """
    _check_grid(d, m)
    if plan is None:
        if f is None:
            raise ValueError("need either f or a filled plan")
        plan = CenterSamplePlan.build(d, m).fill(f)
    centers = cell_centers(d, m)
    g = smolyak_evaluate(centers, plan, m)
    A = embedding_matrix(centers, enumerate_triples(d, m))
    return (A.T @ g) / 2.0 ** ((d - 1) * m)
