"""Scale-sweep experiment: fit an fBm product function at each scale and report errors."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional, Sequence

import numpy as np

from .embedding import embedding_dim
from .exceptions import GuardError
from .kaczmarz import FitConfig, SpinConfig, draw_samples, fit_arrays, integrate, required_samples, spin_cycle
from .testfn import DEFAULT_LEVELS, exact_integral, fbm_product

CSV_HEADER = ["m", "n", "p", "err2", "err_inf", "err_int", "seconds"]

RECORD_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": CSV_HEADER,
        "additionalProperties": False,
        "properties": {
            "m": {"type": "integer", "minimum": 0},
            "n": {"type": "integer", "minimum": 1},
            "p": {"type": "integer", "minimum": 1},
            "err2": {"type": "number", "minimum": 0},
            "err_inf": {"type": "number", "minimum": 0},
            "err_int": {"type": "number", "minimum": 0},
            "seconds": {"type": "number", "minimum": 0},
        },
    },
}


@dataclass
class ExperimentConfig:
    d: int = 3
    m_range: tuple[int, int] = (5, 12)  # inclusive
    c1: float = 3.5
    hurst: float = 0.8
    alpha: float = 0.79
    seed: int = 0
    test_points: int = 10**6
    shifts: Optional[int] = None
    fbm_levels: int = DEFAULT_LEVELS
    max_p: Optional[int] = 1 << 21
    max_steps: Optional[int] = 2 * 10**8
    record_timing: bool = True
    workers: int = 1
    # Overrides the fBm product; must be vectorized over (n, d) arrays.
    function: Optional[Callable] = field(default=None, repr=False)
    integral: Optional[float] = None

    def __post_init__(self):
        self.m_range = tuple(int(v) for v in self.m_range)
        if len(self.m_range) != 2 or self.m_range[0] > self.m_range[1]:
            raise ValueError("m_range must be a nonempty inclusive range (lo, hi)")
        if self.test_points < 1:
            raise ValueError("test_points must be >= 1")
        if self.shifts is not None and self.shifts < 1:
            raise ValueError("shifts must be >= 1")

    @property
    def scales(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)


@dataclass
class ExperimentRecord:
    m: int
    n: int
    p: int
    err2: float
    err_inf: float
    err_int: float
    seconds: float


def _check_guards(config: ExperimentConfig):
    for m in config.scales:
        p = embedding_dim(config.d, m)
        n = required_samples(config.d, m, config.c1)
        if config.max_p is not None and p > config.max_p:
            raise GuardError(f"m={m}: embedding dimension {p} exceeds max_p={config.max_p}")
        if config.max_steps is not None and n > config.max_steps:
            raise GuardError(f"m={m}: {n} Kaczmarz steps exceed max_steps={config.max_steps}")


def _relative_errors(f, model, rng, d: int, n_test: int, chunk: int = 1 << 17):
    diff_sq = ref_sq = 0.0
    diff_max = ref_max = 0.0
    for lo in range(0, n_test, chunk):
        T = rng.random((min(chunk, n_test - lo), d))
        F = np.asarray(f(T), dtype=np.float64)
        diff = F - model(T)
        diff_sq += float(diff @ diff)
        ref_sq += float(F @ F)
        diff_max = max(diff_max, float(np.abs(diff).max()))
        ref_max = max(ref_max, float(np.abs(F).max()))
    err2 = np.sqrt(diff_sq) / np.sqrt(ref_sq) if ref_sq > 0 else np.sqrt(diff_sq)
    err_inf = diff_max / ref_max if ref_max > 0 else diff_max
    return float(err2), float(err_inf)


def run_scale(config: ExperimentConfig, m: int, f, integral: float) -> ExperimentRecord:
    """One row: draw samples, fit at scale ``m``, measure errors on fresh test points."""
    t0 = time.perf_counter()
    d = config.d
    sample_seq, test_seq, shift_seq = np.random.SeedSequence(config.seed, spawn_key=(m,)).spawn(3)
    n = required_samples(d, m, config.c1)
    X, y = draw_samples(f, d, n, np.random.default_rng(sample_seq))
    fit_cfg = FitConfig(c1=config.c1, seed=config.seed)
    if config.shifts:
        spin = SpinConfig.random(d, config.shifts, shift_seq)
        model = spin_cycle(X, y, m, fit_cfg, spin)
        approx_integral = model.integrate()
    else:
        model = fit_arrays(X, y, m, fit_cfg)
        approx_integral = integrate(model)
    err2, err_inf = _relative_errors(f, model, np.random.default_rng(test_seq), d,
                                     config.test_points)
    err_int = abs(integral - approx_integral)
    if integral != 0:
        err_int /= abs(integral)
    seconds = time.perf_counter() - t0 if config.record_timing else 0.0
    return ExperimentRecord(m, n, embedding_dim(d, m), err2, err_inf, float(err_int), seconds)


def run_experiment(config: ExperimentConfig) -> list[ExperimentRecord]:
    """Run every scale of ``config``; records come back ordered by ``m``."""
    _check_guards(config)
    if config.function is None:
        f = fbm_product(config.d, config.hurst, config.fbm_levels, config.seed)
        integral = exact_integral(f)
    else:
        f = config.function
        integral = config.integral if config.integral is not None else exact_integral(f)
    scales = list(config.scales)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda m: run_scale(config, m, f, integral), scales))
    else:
        records = [run_scale(config, m, f, integral) for m in scales]
    return sorted(records, key=lambda r: r.m)


def emit_table(records: Sequence[ExperimentRecord], fmt: str = "csv", path=None) -> str:
    """Render records as CSV (E-notation, round-trip exact) or a JSON array.

    Writes to ``path`` when given and returns the text either way.
    """
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        lines = [",".join(CSV_HEADER)]
        for r in records:
            lines.append(",".join([str(r.m), str(r.n), str(r.p)] +
                                  [f"{v:.16e}" for v in (r.err2, r.err_inf, r.err_int, r.seconds)]))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps([asdict(r) for r in records], indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write table to {path}: {exc.strerror}") from exc
    return text


def read_table(path, fmt: str = "csv") -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        if fmt == "json":
            return [ExperimentRecord(**rec) for rec in json.load(fh)]
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        types = {f.name: f.type for f in fields(ExperimentRecord)}
        return [ExperimentRecord(**{k: (int(v) if types[k] in (int, "int") else float(v))
                                    for k, v in row.items()}) for row in reader]
