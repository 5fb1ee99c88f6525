"""Dyadic boxes in the unit cube, mixed differences and counting identities.

Functions of several variables are passed around in vectorized form: a
callable taking an ``(n, d)`` array of points and returning ``n`` values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

# Counting results must fit a signed 128-bit integer.
INT128_MAX = (1 << 127) - 1

VectorFunction = Callable[[np.ndarray], np.ndarray]


def _checked(value: int, what: str) -> int:
    if value > INT128_MAX:
        raise OverflowError(f"{what} exceeds the 128-bit integer range")
    return value


@dataclass(frozen=True)
class DyadicBox:
    """Product of dyadic intervals ``[o * 2**-l, (o + 1) * 2**-l)``, one per axis."""

    levels: tuple[int, ...]
    offsets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))
        object.__setattr__(self, "offsets", tuple(int(v) for v in self.offsets))
        if len(self.levels) != len(self.offsets):
            raise ValueError("levels and offsets must have the same length")
        for lev, off in zip(self.levels, self.offsets):
            if lev < 0 or not 0 <= off < (1 << lev):
                raise ValueError(f"invalid dyadic interval (level={lev}, offset={off})")

    @property
    def d(self) -> int:
        return len(self.levels)

    @property
    def measure(self) -> float:
        return 2.0 ** -sum(self.levels)

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [(o / 2**l, (o + 1) / 2**l) for l, o in zip(self.levels, self.offsets)]

    @property
    def center(self) -> np.ndarray:
        return np.array([(o + 0.5) / 2**l for l, o in zip(self.levels, self.offsets)])

    def contains(self, x: Sequence[float]) -> bool:
        """Half-open containment, with coordinate 1.0 counted in the last interval."""
        return locate_box(x, self.levels) == self


def validate_points(x, d: Optional[int] = None) -> np.ndarray:
    """Return ``x`` as a float array of shape ``(n, d)``, checking the unit cube."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("points must be a vector or an (n, d) array")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"dimension mismatch: expected {d} coordinates, got {arr.shape[1]}")
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("point coordinates must lie in [0, 1]")
    return arr


def cell_index(x: np.ndarray, level) -> np.ndarray:
    """Offset of the level-``level`` dyadic interval holding each ``x``; 1.0 maps to the last one."""
    level = np.asarray(level)
    n_cells = np.left_shift(1, level)
    idx = np.floor(np.ldexp(x, level)).astype(np.int64)
    return np.minimum(idx, n_cells - 1)


def locate_box(x: Sequence[float], levels: Sequence[int]) -> DyadicBox:
    """Return the dyadic box with per-axis ``levels`` that contains ``x``."""
    levels = tuple(int(l) for l in levels)
    pt = validate_points(x)
    if pt.shape[0] != 1:
        raise ValueError("locate_box expects a single point")
    if pt.shape[1] != len(levels):
        raise ValueError(f"dimension mismatch: point has {pt.shape[1]} coordinates, "
                         f"levels has {len(levels)}")
    offsets = cell_index(pt[0], np.array(levels, dtype=np.int64))
    return DyadicBox(levels, tuple(int(o) for o in offsets))


def shape_count(d: int, m: int) -> int:
    """Number of level vectors in ``Z_{>=0}^d`` summing to ``m``: C(m+d-1, d-1)."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    return _checked(math.comb(m + d - 1, d - 1), "shape_count")


def box_count(d: int, m: int) -> int:
    """Number of dyadic boxes of measure ``2**-m`` in the unit ``d``-cube."""
    return _checked(shape_count(d, m) << m, "box_count")


def level_vectors(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative integer vectors of length ``parts`` summing to ``total``, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in level_vectors(total - first, parts - 1):
            yield (first,) + rest


def boxes_of_shape(levels: Sequence[int]) -> Iterator[DyadicBox]:
    """All boxes with the given level vector, offsets in row-major order."""
    for offs in itertools.product(*(range(1 << l) for l in levels)):
        yield DyadicBox(tuple(levels), offs)


def cell_centers(d: int, m: int) -> np.ndarray:
    """Centers of the ``2**(d*m)`` cubes of side ``2**-m``, row-major (last axis fastest)."""
    side = (np.arange(1 << m) + 0.5) / 2**m
    grids = np.meshgrid(*([side] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@dataclass(frozen=True)
class GeneralBox:
    """Box with live axes ``[a, a+h)`` and point axes ``{a}`` (``side`` is None)."""

    corner: tuple[float, ...]
    sides: tuple[Optional[float], ...]

    def __post_init__(self):
        if len(self.corner) != len(self.sides):
            raise ValueError("corner and sides must have the same length")

    @property
    def live_axes(self) -> list[int]:
        return [j for j, h in enumerate(self.sides) if h is not None]

    @property
    def measure(self) -> float:
        """``r``-dimensional measure: product of the live side lengths."""
        return float(np.prod([self.sides[j] for j in self.live_axes]))


def corner_points(box: GeneralBox) -> tuple[np.ndarray, np.ndarray]:
    """The ``2**r`` corners of ``box`` and their signs in the alternating sum."""
    live = box.live_axes
    r = len(live)
    base = np.asarray(box.corner, dtype=np.float64)
    bits = np.array(list(itertools.product((0, 1), repeat=r)), dtype=np.int64).reshape(-1, r)
    pts = np.repeat(base[None, :], len(bits), axis=0)
    for col, j in enumerate(live):
        pts[:, j] += bits[:, col] * box.sides[j]
    signs = (-1.0) ** (r - bits.sum(axis=1))
    return pts, signs


def mixed_difference(f: VectorFunction, box: GeneralBox) -> float:
    """Iterated forward difference of ``f`` along every live axis of ``box``."""
    pts, signs = corner_points(box)
    vals = np.asarray(f(pts), dtype=np.float64)
    return float(np.dot(signs, vals))


def estimate_mixed_holder_constant(f: VectorFunction, d: int, alpha: float,
                                   trials: int = 1000, seed=None) -> float:
    """Empirical lower bound on the mixed Hölder constant of ``f``.

    Draws ``trials`` random boxes with 1..d live axes (side lengths log-uniform
    in ``[1e-4, 1]``, point axes uniform) and returns the largest observed
    ``|delta_R f| / |R|**alpha``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    best = 0.0
    for r in range(1, d + 1):
        count = trials // d + (1 if r <= trials % d else 0)
        if count == 0:
            continue
        bits = np.array(list(itertools.product((0, 1), repeat=r)), dtype=np.int64)
        signs = (-1.0) ** (r - bits.sum(axis=1))
        live = np.array([rng.choice(d, size=r, replace=False) for _ in range(count)])
        corner = rng.random((count, d))
        sides = 10.0 ** rng.uniform(-4.0, 0.0, size=(count, r))
        rows = np.arange(count)[:, None]
        # Keep a + h inside [0, 1] on live axes.
        corner[rows, live] = rng.random((count, r)) * (1.0 - sides)
        pts = np.repeat(corner[:, None, :], len(bits), axis=1)
        for col in range(r):
            pts[np.arange(count), :, live[:, col]] += bits[None, :, col] * sides[:, col][:, None]
        vals = np.asarray(f(pts.reshape(-1, d)), dtype=np.float64).reshape(count, len(bits))
        delta = np.abs(vals @ signs)
        ratio = delta / np.prod(sides, axis=1) ** alpha
        best = max(best, float(ratio.max()))
    return best
