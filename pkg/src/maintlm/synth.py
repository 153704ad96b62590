"""Seeded synthetic change logs standing in for the unpublished tracker data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SynthError
from .ingest import MaintenanceRecord


def _uniform_int_var(lo: int, hi: int) -> float:
    k = hi - lo + 1
    return (k * k - 1) / 12.0


def noise_sigma_for_rho(
    rho: float, e_range: tuple[int, int], f_range: tuple[int, int], days_per_unit: float
) -> float:
    """Per-component noise sigma giving population corr(X, Y) = rho for the sum variant.

    X = e + f and Y = d*X + eps + eps', so
    rho = d*sd(X) / sqrt(d^2 var(X) + 2 sigma^2). Clamping at 0 is ignored.
    """
    if not 0 < rho <= 1:
        raise SynthError(f"rho must be in (0, 1], got {rho}")
    var_x = _uniform_int_var(*e_range) + _uniform_int_var(*f_range)
    return abs(days_per_unit) * math.sqrt(var_x * (1.0 / (rho * rho) - 1.0) / 2.0)


DEFAULT_E_RANGE = (10, 30)
DEFAULT_F_RANGE = (10, 30)
DEFAULT_DAYS_PER_UNIT = 2.0
DEFAULT_RHO = 0.65


@dataclass(frozen=True)
class SynthSpec:
    n: int = 56
    e_range: tuple[int, int] = DEFAULT_E_RANGE
    f_range: tuple[int, int] = DEFAULT_F_RANGE
    days_per_unit: float = DEFAULT_DAYS_PER_UNIT
    noise_sigma: float = noise_sigma_for_rho(
        DEFAULT_RHO, DEFAULT_E_RANGE, DEFAULT_F_RANGE, DEFAULT_DAYS_PER_UNIT
    )
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise SynthError(f"n must be >= 3, got {self.n}")
        for name in ("e_range", "f_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or lo > hi:
                raise SynthError(f"{name} must satisfy 0 <= lo <= hi, got {(lo, hi)}")
        if not (math.isfinite(self.days_per_unit) and self.days_per_unit >= 0):
            raise SynthError(f"days_per_unit must be finite and >= 0, got {self.days_per_unit}")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise SynthError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        if not 0 <= self.seed < 2**64:
            raise SynthError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def polar_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Standard normals by the Marsaglia polar method on rng.random() draws."""
    out = np.empty(count)
    i = 0
    while i < count:
        u = 2.0 * rng.random() - 1.0
        v = 2.0 * rng.random() - 1.0
        s = u * u + v * v
        if s == 0.0 or s >= 1.0:
            continue
        m = math.sqrt(-2.0 * math.log(s) / s)
        out[i] = u * m
        if i + 1 < count:
            out[i + 1] = v * m
        i += 2
    return out


def generate(spec: SynthSpec) -> list[MaintenanceRecord]:
    """days = days_per_unit * count + N(0, sigma^2), clamped at 0 (slight upward bias)."""
    rng = np.random.default_rng(spec.seed)
    e = rng.integers(spec.e_range[0], spec.e_range[1], endpoint=True, size=spec.n)
    f = rng.integers(spec.f_range[0], spec.f_range[1], endpoint=True, size=spec.n)
    noise = polar_normals(rng, 2 * spec.n) * spec.noise_sigma
    width = len(str(spec.n))
    records = []
    for i in range(spec.n):
        de = max(0.0, spec.days_per_unit * int(e[i]) + float(noise[2 * i]))
        df = max(0.0, spec.days_per_unit * int(f[i]) + float(noise[2 * i + 1]))
        records.append(MaintenanceRecord(f"s{i + 1:0{width}d}", int(e[i]), int(f[i]), de, df))
    return records
