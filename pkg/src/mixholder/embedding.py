"""Sparse tensor-Haar embedding of points in the unit cube.

Every coordinate is labeled by a triple ``(k, r, R)``: ``k`` in ``0..d-1``,
``r = (0, r_1, ..., r_k)`` a strictly increasing tuple of 0-based axes that
starts at axis 0, and ``R`` a dyadic box of measure ``2**(k-m)`` whose level is
zero on every axis outside ``r``.  The coordinate value at ``x`` is the
indicator of ``R`` when ``k == 0``, and otherwise ``2**(-k/2)`` times the
product over ``r_1..r_k`` of +1 (right half of the box along that axis) or -1
(left half), restricted to ``R``.

Flat indices are 0-based.  Order: ascending ``k``; ``r`` lexicographic; the
shape of ``R`` lexicographic in the levels of the trailing axes
``r_1..r_k`` (the level on axis 0 is what remains); offsets row-major over
the axes of ``r``.  For ``d == 3`` this is the block layout of the classical
three-dimensional construction (indicator block, then ``(0, 1)``, ``(0, 2)``,
then ``(0, 1, 2)``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numba
import numpy as np
import scipy.sparse as sp

from .dyadic import DyadicBox, _checked, cell_centers, validate_points
from .exceptions import GuardError

LAYOUT_TAG = "k-r-trailing_shape-rowmajor/v1"

# Brute-force enumeration of all 2**(d*m) finest cells is allowed up to this.
GRID_GUARD = 24


def embedding_dim(d: int, m: int) -> int:
    """Number of embedding coordinates, ``sum_k 2**(m-k) C(m,k) C(d-1,k)``."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    total = sum((math.comb(m, k) * math.comb(d - 1, k)) << (m - k)
                for k in range(min(d - 1, m) + 1))
    return _checked(total, "embedding_dim")


def embedding_nnz(d: int, m: int) -> int:
    """Nonzero entries of every embedded point, ``sum_k C(m,k) C(d-1,k)``."""
    return sum(math.comb(m, k) * math.comb(d - 1, k) for k in range(min(d - 1, m) + 1))


def embedding_norm_sq(d: int, m: int) -> float:
    """Squared Euclidean norm shared by all embedded points."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    return float(sum(math.comb(m, k) * math.comb(d - 1, k) * 2.0**-k
                     for k in range(min(d - 1, m) + 1)))


@dataclass(frozen=True)
class Triple:
    k: int
    r: tuple[int, ...]
    box: DyadicBox


@dataclass(frozen=True)
class Block:
    """All triples sharing ``(k, r)``; ``shapes`` holds full level vectors per live axis."""

    k: int
    r: tuple[int, ...]
    start: int
    shapes: tuple[tuple[int, ...], ...]

    @property
    def boxes_per_shape(self) -> int:
        return 1 << sum(self.shapes[0]) if self.shapes else 0

    @property
    def size(self) -> int:
        return len(self.shapes) * self.boxes_per_shape


def _trailing_shapes(total: int, k: int) -> Iterator[tuple[int, ...]]:
    # Trailing levels (L_1..L_k) with sum <= total in lexicographic order.
    if k == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _trailing_shapes(total - first, k - 1):
            yield (first,) + rest


class TripleIndex:
    """Bijection between the triple set and ``range(p)``, plus the per-slot tables
    used by the compiled kernels."""

    def __init__(self, d: int, m: int):
        if d < 1 or m < 0:
            raise ValueError("need d >= 1 and m >= 0")
        self.d = d
        self.m = m
        self.p = embedding_dim(d, m)
        self.norm_sq = embedding_norm_sq(d, m)
        blocks = []
        start = 0
        for k in range(min(d - 1, m) + 1):
            for tail in itertools.combinations(range(1, d), k):
                shapes = tuple((m - k - sum(t),) + t for t in _trailing_shapes(m - k, k))
                block = Block(k, (0,) + tail, start, shapes)
                blocks.append(block)
                start += block.size
        assert start == self.p
        self.blocks = tuple(blocks)
        self._block_at = {(b.k, b.r): b for b in blocks}
        self._shape_rank = {(b.k, b.r): {s: i for i, s in enumerate(b.shapes)} for b in blocks}
        self._build_tables()

    def _build_tables(self):
        slots = [(b, j, s) for b in self.blocks for j, s in enumerate(b.shapes)]
        nnz = len(slots)
        base = np.zeros(nnz, dtype=np.int64)
        levels = np.full((nnz, self.d), -1, dtype=np.int64)
        strides = np.zeros((nnz, self.d), dtype=np.int64)
        signed = np.zeros((nnz, self.d), dtype=np.bool_)
        scale = np.zeros(nnz, dtype=np.float64)
        for t, (b, j, shape) in enumerate(slots):
            base[t] = b.start + j * b.boxes_per_shape
            scale[t] = 2.0 ** (-b.k / 2)
            stride = 1
            for axis, lev in reversed(list(zip(b.r, shape))):
                levels[t, axis] = lev
                strides[t, axis] = stride
                stride <<= lev
            signed[t, list(b.r[1:])] = True
        self.nnz = nnz
        self.slot_base = base
        self.slot_levels = levels
        self.slot_strides = strides
        self.slot_signed = signed
        self.slot_scale = scale
        self.slot_k = np.array([b.k for b, _, _ in slots], dtype=np.int64)

    def __len__(self) -> int:
        return self.p

    def __repr__(self) -> str:
        return f"TripleIndex(d={self.d}, m={self.m}, p={self.p})"

    def block(self, k: int, r: tuple[int, ...]) -> Block:
        return self._block_at[(k, tuple(r))]

    def index_of(self, triple: Triple) -> int:
        b = self._block_at[(triple.k, tuple(triple.r))]
        levels = tuple(triple.box.levels[a] for a in b.r)
        if any(triple.box.levels[a] for a in range(self.d) if a not in b.r):
            raise KeyError("box has a positive level on an axis outside r")
        rank = self._shape_rank[(b.k, b.r)][levels]
        offset = 0
        for a in b.r:
            offset = (offset << triple.box.levels[a]) + triple.box.offsets[a]
        return b.start + rank * b.boxes_per_shape + offset

    def triple(self, index: int) -> Triple:
        if not 0 <= index < self.p:
            raise IndexError(index)
        for b in self.blocks:
            if index < b.start + b.size:
                break
        rank, offset = divmod(index - b.start, b.boxes_per_shape)
        shape = b.shapes[rank]
        levels = [0] * self.d
        offsets = [0] * self.d
        for a, lev in reversed(list(zip(b.r, shape))):
            levels[a] = lev
            offsets[a] = offset & ((1 << lev) - 1)
            offset >>= lev
        return Triple(b.k, b.r, DyadicBox(tuple(levels), tuple(offsets)))

    def __iter__(self) -> Iterator[Triple]:
        for i in range(self.p):
            yield self.triple(i)

    def k_of(self) -> np.ndarray:
        """The ``k`` of every coordinate, as an array of length ``p``."""
        out = np.empty(self.p, dtype=np.int64)
        for b in self.blocks:
            out[b.start:b.start + b.size] = b.k
        return out


@lru_cache(maxsize=32)
def enumerate_triples(d: int, m: int) -> TripleIndex:
    """Build (and cache) the canonical :class:`TripleIndex` for ``(d, m)``."""
    return TripleIndex(d, m)


@dataclass(frozen=True)
class SparseEmbedding:
    indices: np.ndarray
    values: np.ndarray

    def dot(self, w: np.ndarray) -> float:
        return float(np.dot(w[self.indices], self.values))

    def toarray(self, p: int) -> np.ndarray:
        out = np.zeros(p)
        out[self.indices] = self.values
        return out

    @property
    def norm_sq(self) -> float:
        return float(np.dot(self.values, self.values))


@numba.njit(cache=True, nogil=True, inline="always")
def _slot_entry(x, t, base, levels, strides, signed, scale):
    idx = base[t]
    sgn = 1.0
    for a in range(x.shape[0]):
        lev = levels[t, a]
        if lev < 0:
            continue
        n = 1 << (lev + 1)
        c = int(x[a] * n)
        if c >= n:
            c = n - 1
        idx += (c >> 1) * strides[t, a]
        if signed[t, a] and (c & 1) == 0:
            sgn = -sgn
    return idx, sgn * scale[t]


@numba.njit(cache=True, nogil=True)
def _embed_kernel(X, base, levels, strides, signed, scale, out_idx, out_val):
    for i in range(X.shape[0]):
        for t in range(base.shape[0]):
            idx, val = _slot_entry(X[i], t, base, levels, strides, signed, scale)
            out_idx[i, t] = idx
            out_val[i, t] = val


@numba.njit(cache=True, nogil=True)
def _dot_kernel(X, w, base, levels, strides, signed, scale, out):
    for i in range(X.shape[0]):
        acc = 0.0
        for t in range(base.shape[0]):
            idx, val = _slot_entry(X[i], t, base, levels, strides, signed, scale)
            acc += w[idx] * val
        out[i] = acc


def _tables(idx: TripleIndex):
    return (idx.slot_base, idx.slot_levels, idx.slot_strides, idx.slot_signed, idx.slot_scale)


def embed_batch(X, idx: TripleIndex) -> tuple[np.ndarray, np.ndarray]:
    """Embed many points at once; returns ``(indices, values)`` of shape ``(n, nnz)``."""
    X = np.ascontiguousarray(validate_points(X, idx.d))
    out_idx = np.empty((X.shape[0], idx.nnz), dtype=np.int64)
    out_val = np.empty((X.shape[0], idx.nnz), dtype=np.float64)
    _embed_kernel(X, *_tables(idx), out_idx, out_val)
    return out_idx, out_val


def embed(x, idx: TripleIndex) -> SparseEmbedding:
    """Sparse embedding of a single point, entries sorted by index."""
    X = validate_points(x, idx.d)
    if X.shape[0] != 1:
        raise ValueError("embed expects a single point; use embed_batch")
    ind, val = embed_batch(X, idx)
    return SparseEmbedding(ind[0], val[0])


def embed_dot(X, w: np.ndarray, idx: TripleIndex, chunk: int = 1 << 16) -> np.ndarray:
    """``<w, embed(x)>`` for every row of ``X`` without materializing the embeddings."""
    X = validate_points(X, idx.d)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape != (idx.p,):
        raise ValueError(f"weight vector must have length {idx.p}")
    out = np.empty(X.shape[0])
    tables = _tables(idx)
    for lo in range(0, X.shape[0], chunk):
        blk = np.ascontiguousarray(X[lo:lo + chunk])
        _dot_kernel(blk, w, *tables, out[lo:lo + chunk])
    return out


def embedding_matrix(X, idx: TripleIndex) -> sp.csr_matrix:
    """Sparse matrix whose rows are the embeddings of the rows of ``X``."""
    ind, val = embed_batch(X, idx)
    n = ind.shape[0]
    indptr = np.arange(0, n * idx.nnz + 1, idx.nnz)
    return sp.csr_matrix((val.ravel(), ind.ravel(), indptr), shape=(n, idx.p))


def _check_grid(d: int, m: int):
    if d * m > GRID_GUARD:
        raise GuardError(f"d*m = {d * m} exceeds the brute-force grid guard {GRID_GUARD}")


def sign_gram_matrix(d: int, m: int) -> np.ndarray:
    """Integer Gram matrix of the embedding signs over all finest cell centers.

    Entries are ``sum_c s_i(x_c) s_j(x_c)`` with ``s`` the embedding value divided
    by ``2**(-k/2)``, so the computation is exact.
    """
    _check_grid(d, m)
    idx = enumerate_triples(d, m)
    A = embedding_matrix(cell_centers(d, m), idx)
    A.data = np.rint(A.data / np.repeat(idx.slot_scale[None, :], A.shape[0], 0).ravel())
    S = A.astype(np.int64)
    return (S.T @ S).toarray()


def gram_matrix(d: int, m: int) -> np.ndarray:
    """``A.T @ A`` for ``A`` with one embedded row per finest cell center."""
    G = sign_gram_matrix(d, m).astype(np.float64)
    k = enumerate_triples(d, m).k_of()
    # 2**(-(k_i + k_j)/2) in one power keeps the diagonal exact.
    return G * 2.0 ** (-(k[:, None] + k[None, :]) / 2)
