"""Randomized Kaczmarz fitting of embedding weights from random samples.

Each sample ``(X_i, f(X_i))`` is one equation ``<embed(X_i), w> = f(X_i)``;
since the points are uniform, the rows arrive in uniformly random order and
all rows share the same norm.  The fitted approximant is
``x -> <w, embed(x)> + centering``.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numba
import numpy as np

from .dyadic import validate_points
from .embedding import (LAYOUT_TAG, SparseEmbedding, TripleIndex, embed_batch, embed_dot,
                        embedding_dim, enumerate_triples)
from .exceptions import InsufficientSamplesError, LedgerViolation

CHUNK = 1 << 15
MODEL_MAGIC = b"MHKZ"
MODEL_VERSION = 1


@dataclass
class FitConfig:
    """Kaczmarz run settings.

    ``c1`` sets the default step count ``ceil(c1 * p * ln(2**m))``;
    ``n_override`` replaces it.  ``seed`` is recorded in saved models and used
    by :func:`draw_samples`.  ``center`` subtracts the first sample value
    before fitting.
    """

    c1: float = 3.5
    n_override: Optional[int] = None
    seed: int = 0
    center: bool = True
    log_base: float = math.e

    def __post_init__(self):
        if not self.c1 > 0:
            raise ValueError("c1 must be positive")
        if self.n_override is not None and self.n_override < 1:
            raise ValueError("n_override must be >= 1")

    def steps(self, d: int, m: int) -> int:
        if self.n_override is not None:
            return int(self.n_override)
        return required_samples(d, m, self.c1, self.log_base)


def required_samples(d: int, m: int, c1: float = 3.5, log_base: float = math.e) -> int:
    """``ceil(c1 * p * log(2**m))``, at least 1."""
    p = embedding_dim(d, m)
    return max(1, math.ceil(c1 * p * m * math.log(2.0, log_base)))


def kaczmarz_step(w: np.ndarray, row: SparseEmbedding, b: float, norm_sq: float) -> np.ndarray:
    """Project ``w`` in place onto the hyperplane ``<row, w> = b``."""
    if not norm_sq > 0:
        raise ValueError("norm_sq must be positive")
    resid = b - np.dot(w[row.indices], row.values)
    w[row.indices] += (resid / norm_sq) * row.values
    return w


@numba.njit(cache=True, nogil=True)
def _kaczmarz_kernel(w, idx, val, b, inv_norm_sq):
    ops = 0
    for i in range(idx.shape[0]):
        acc = 0.0
        for t in range(idx.shape[1]):
            acc += w[idx[i, t]] * val[i, t]
        c = (b[i] - acc) * inv_norm_sq
        for t in range(idx.shape[1]):
            w[idx[i, t]] += c * val[i, t]
        ops += 2 * idx.shape[1]
    return ops


@numba.njit(cache=True, nogil=True)
def _kaczmarz_error_kernel(w, w_ref, idx, val, b, inv_norm_sq, out):
    for i in range(idx.shape[0]):
        acc = 0.0
        for t in range(idx.shape[1]):
            acc += w[idx[i, t]] * val[i, t]
        c = (b[i] - acc) * inv_norm_sq
        for t in range(idx.shape[1]):
            w[idx[i, t]] += c * val[i, t]
        err = 0.0
        for j in range(w.shape[0]):
            err += (w[j] - w_ref[j]) ** 2
        out[i] = err


@dataclass
class Approximant:
    """Fitted model ``x -> <weights, embed(x)> + centering``."""

    d: int
    m: int
    weights: np.ndarray
    centering: float = 0.0
    c1: float = 3.5
    seed: int = 0
    n_steps: int = 0
    ops: int = 0
    layout: str = LAYOUT_TAG

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if self.weights.shape != (embedding_dim(self.d, self.m),):
            raise ValueError("weights length must equal embedding_dim(d, m)")

    @property
    def index(self) -> TripleIndex:
        return enumerate_triples(self.d, self.m)

    def __call__(self, X) -> np.ndarray:
        return embed_dot(X, self.weights, self.index) + self.centering

    def integrate(self) -> float:
        return integrate(self)


def evaluate(model, x):
    """Evaluate a model at a point (returns a float) or at the rows of an ``(n, d)`` array."""
    vals = model(x)
    return float(vals[0]) if np.ndim(x) == 1 else vals


def integrate(model: Approximant) -> float:
    """Exact integral of the approximant over the unit cube.

    Only the ``2**m`` indicator coordinates have nonzero integral (``2**-m``
    each); every signed coordinate integrates to zero.
    """
    k0 = 1 << model.m
    return math.fsum(model.weights[:k0]) / k0 + model.centering


def _pairs_to_chunks(samples: Iterable, d: int, size: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    it = iter(samples)
    while True:
        batch = list(itertools.islice(it, size))
        if not batch:
            return
        X = np.array([np.asarray(s[0], dtype=np.float64) for s in batch])
        y = np.array([float(s[1]) for s in batch])
        yield validate_points(X, d), y


def _array_chunks(X: np.ndarray, y: np.ndarray, size: int):
    for lo in range(0, X.shape[0], size):
        yield X[lo:lo + size], y[lo:lo + size]


def _fit_stream(chunks, d: int, m: int, config: FitConfig) -> Approximant:
    idx = enumerate_triples(d, m)
    n_target = config.steps(d, m)
    w = np.zeros(idx.p)
    inv_norm_sq = 1.0 / idx.norm_sq
    centering = None
    done = 0
    ops = 0
    for X, y in chunks:
        if done >= n_target:
            break
        take = min(len(y), n_target - done)
        X = X[:take]
        y = np.asarray(y[:take], dtype=np.float64)
        if centering is None:
            centering = float(y[0]) if config.center else 0.0
        ind, val = embed_batch(X, idx)
        ops += _kaczmarz_kernel(w, ind, val, y - centering, inv_norm_sq)
        done += take
    if done < n_target:
        raise InsufficientSamplesError(
            f"needed {n_target} samples for d={d}, m={m}, got {done}")
    return Approximant(d, m, w, centering, config.c1, config.seed, done, ops)


def fit(samples: Iterable, d: int, m: int, config: Optional[FitConfig] = None) -> Approximant:
    """Fit from a stream of ``(point, value)`` pairs.

    Consumes exactly ``config.steps(d, m)`` samples; raises
    :class:`InsufficientSamplesError` if the stream is shorter.
    """
    config = config or FitConfig()
    return _fit_stream(_pairs_to_chunks(samples, d, CHUNK), d, m, config)


def fit_arrays(X, y, m: int, config: Optional[FitConfig] = None) -> Approximant:
    """Fit from sample arrays ``X`` of shape ``(n, d)`` and ``y`` of shape ``(n,)``."""
    config = config or FitConfig()
    X = validate_points(X)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise ValueError("y must have one value per row of X")
    return _fit_stream(_array_chunks(X, y, CHUNK), X.shape[1], m, config)


def draw_samples(f, d: int, n: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """``n`` uniform points in ``[0, 1)**d`` and the values of ``f`` there."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.random((n, d))
    return X, np.asarray(f(X), dtype=np.float64)


def kaczmarz_error_trace(X, b, m: int, w_ref: np.ndarray, w0: Optional[np.ndarray] = None):
    """Run plain Kaczmarz on ``<embed(X_i), w> = b_i`` and return ``||w_n - w_ref||**2`` per step."""
    X = validate_points(X)
    idx = enumerate_triples(X.shape[1], m)
    w = np.zeros(idx.p) if w0 is None else np.array(w0, dtype=np.float64)
    ind, val = embed_batch(X, idx)
    out = np.empty(X.shape[0])
    _kaczmarz_error_kernel(w, np.asarray(w_ref, dtype=np.float64), ind, val,
                           np.asarray(b, dtype=np.float64), 1.0 / idx.norm_sq, out)
    return out, w


@dataclass
class SpinConfig:
    """Torus shifts used for spin cycling; ``shifts`` has shape ``(s, d)``."""

    shifts: np.ndarray

    def __post_init__(self):
        self.shifts = np.atleast_2d(np.asarray(self.shifts, dtype=np.float64))
        if self.shifts.shape[0] < 1:
            raise ValueError("spin cycling needs at least one shift")

    @classmethod
    def random(cls, d: int, s: int, seed=None) -> "SpinConfig":
        rng = np.random.default_rng(seed)
        return cls(rng.random((s, d)))


def _shift(X: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    return np.mod(X + gamma, 1.0)


@dataclass
class SpinCycledApproximant:
    """Average of approximants fitted on shifted copies of the same samples."""

    models: list
    shifts: np.ndarray

    @property
    def d(self) -> int:
        return self.models[0].d

    def __call__(self, X) -> np.ndarray:
        X = validate_points(X, self.d)
        total = np.zeros(X.shape[0])
        for model, gamma in zip(self.models, self.shifts):
            total += model(_shift(X, gamma))
        return total / len(self.models)

    def integrate(self) -> float:
        # Shifting on the torus leaves the integral unchanged.
        return math.fsum(integrate(mdl) for mdl in self.models) / len(self.models)


def spin_cycle(X, y, m: int, config: Optional[FitConfig], spin: SpinConfig) -> SpinCycledApproximant:
    """Fit one model per shift ``g`` on ``(X + g mod 1, y)`` and average them back in place."""
    config = config or FitConfig()
    X = validate_points(X)
    if spin.shifts.shape[1] != X.shape[1]:
        raise ValueError("shift dimension does not match the samples")
    models = [fit_arrays(_shift(X, gamma), y, m, config) for gamma in spin.shifts]
    return SpinCycledApproximant(models, spin.shifts)


@dataclass
class NoiseLedger:
    """Per-step quantities of the decomposition ``w*_n = w_n + e_n``.

    ``identity_error[n]`` is ``max |w*_n - w_n - e_n|``; ``noise_norm_sq`` is
    ``||e_n||**2`` and ``noise_bound`` the running sum of
    ``eps_j**2 / ||embed(X_j)||**2``; ``clean_error_sq`` is ``||w_n - w_ref||**2``.
    """

    identity_error: np.ndarray
    noise_norm_sq: np.ndarray
    noise_bound: np.ndarray
    clean_error_sq: np.ndarray
    noise: np.ndarray

    @property
    def bound_holds(self) -> np.ndarray:
        return self.noise_norm_sq <= self.noise_bound * (1 + 1e-12) + 1e-15


def noise_ledger(X, y, w_ref: np.ndarray, m: int, check: bool = True) -> NoiseLedger:
    """Run the noisy, noiseless and pure-noise Kaczmarz iterations side by side.

    ``w_ref`` defines the noiseless targets ``<w_ref, embed(X_i)>``; the noise is
    ``eps_i = y_i - <w_ref, embed(X_i)>``.  All three start from zero.  With
    ``check`` set, raises :class:`LedgerViolation` if the noise bound fails at
    any step.
    """
    X = validate_points(X)
    y = np.asarray(y, dtype=np.float64)
    idx = enumerate_triples(X.shape[1], m)
    w_ref = np.asarray(w_ref, dtype=np.float64)
    ind, val = embed_batch(X, idx)
    clean_b = np.einsum("ij,ij->i", w_ref[ind], val)
    eps = y - clean_b
    w_star = np.zeros(idx.p)
    w_clean = np.zeros(idx.p)
    e = np.zeros(idx.p)
    n = len(y)
    ident = np.empty(n)
    e_sq = np.empty(n)
    clean_sq = np.empty(n)
    bound = np.cumsum(eps**2 / idx.norm_sq)
    for i in range(n):
        row = SparseEmbedding(ind[i], val[i])
        kaczmarz_step(w_star, row, y[i], idx.norm_sq)
        kaczmarz_step(w_clean, row, clean_b[i], idx.norm_sq)
        kaczmarz_step(e, row, eps[i], idx.norm_sq)
        ident[i] = np.abs(w_star - w_clean - e).max()
        e_sq[i] = e @ e
        clean_sq[i] = np.sum((w_clean - w_ref) ** 2)
    ledger = NoiseLedger(ident, e_sq, bound, clean_sq, eps)
    if check and not ledger.bound_holds.all():
        step = int(np.argmin(ledger.bound_holds))
        raise LedgerViolation(f"noise bound fails at step {step + 1}: "
                              f"{e_sq[step]:.6e} > {bound[step]:.6e}")
    return ledger


def save_model(model: Approximant, path) -> None:
    """Write ``MHKZ`` magic, a length-prefixed JSON header, then little-endian float64 weights."""
    header = {
        "format_version": MODEL_VERSION,
        "d": model.d,
        "m": model.m,
        "p": int(model.weights.size),
        "c1": model.c1,
        "seed": model.seed,
        "centering": model.centering,
        "n_steps": model.n_steps,
        "layout": model.layout,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(model.weights.astype("<f8").tobytes())


def load_model(path) -> Approximant:
    with open(path, "rb") as fh:
        if fh.read(4) != MODEL_MAGIC:
            raise ValueError(f"{path}: not a mixholder model file")
        (size,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(size))
        if header.get("format_version") != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model format {header.get('format_version')}")
        if header["layout"] != LAYOUT_TAG:
            raise ValueError(f"{path}: unknown coordinate layout {header['layout']!r}")
        weights = np.frombuffer(fh.read(8 * header["p"]), dtype="<f8").astype(np.float64)
    if weights.size != header["p"]:
        raise ValueError(f"{path}: truncated weight array")
    return Approximant(header["d"], header["m"], weights, header["centering"], header["c1"],
                       header["seed"], header["n_steps"], 0, header["layout"])


def load_samples_csv(path, d: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Read ``d`` coordinate columns followed by a value column; a header row is skipped."""
    rows = []
    with open(path, newline="") as fh:
        for i, rec in enumerate(csv.reader(fh)):
            if not rec:
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError:
                if i == 0:
                    continue
                raise ValueError(f"{path}: non-numeric row {i + 1}") from None
    if not rows:
        raise ValueError(f"{path}: no samples")
    data = np.array(rows)
    if d is not None and data.shape[1] != d + 1:
        raise ValueError(f"{path}: expected {d + 1} columns, found {data.shape[1]}")
    return validate_points(data[:, :-1]), data[:, -1]


def save_samples_csv(path, X, y) -> None:
    X = validate_points(X)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(X.shape[1])] + ["value"])
        for row, v in zip(X, y):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(v))])
