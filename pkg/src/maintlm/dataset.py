"""Min-max scaling onto [-1, 1] and the seeded 70/15/15 split."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DatasetError
from .ingest import SamplePair


@dataclass(frozen=True)
class NormParams:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise DatasetError(f"inverted normalization range: {self}")


@dataclass(frozen=True)
class DataSplit:
    train_idx: tuple[int, ...]
    val_idx: tuple[int, ...]
    test_idx: tuple[int, ...]

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train_idx), len(self.val_idx), len(self.test_idx)


def split_sizes(n: int) -> tuple[int, int, int]:
    """(train, val, test) sizes: round-half-up of 0.70n and 0.15n, test takes the rest.

    Integer arithmetic avoids 0.7*5 == 3.4999999999999996 rounding down.
    """
    n_train = (7 * n + 5) // 10
    n_val = (15 * n + 50) // 100
    return n_train, n_val, n - n_train - n_val


def split_indices(n: int, seed: int) -> DataSplit:
    if n < 3:
        raise DatasetError(f"split needs n >= 3 samples, got {n}")
    if seed < 0 or seed >= 2**64:
        raise DatasetError(f"seed must be an unsigned 64-bit integer, got {seed}")
    perm = np.random.default_rng(seed).permutation(n)
    n_train, n_val, _ = split_sizes(n)
    perm = [int(i) for i in perm]
    return DataSplit(
        tuple(perm[:n_train]),
        tuple(perm[n_train:n_train + n_val]),
        tuple(perm[n_train + n_val:]),
    )


def fit_normalization(samples: Sequence[SamplePair]) -> NormParams:
    if not samples:
        raise DatasetError("cannot fit normalization on an empty sample list")
    xs = [s.x for s in samples]
    ys = [s.y for s in samples]
    return NormParams(min(xs), max(xs), min(ys), max(ys))


def normalize(v, lo: float, hi: float):
    """Affine map of [lo, hi] onto [-1, 1]; maps everything to 0 when lo == hi.

    Works elementwise on arrays. Values outside [lo, hi] are not clamped.
    """
    if lo > hi:
        raise DatasetError(f"normalize: lo={lo!r} > hi={hi!r}")
    if lo == hi:
        return v * 0.0
    return 2.0 * (v - lo) / (hi - lo) - 1.0


def denormalize(u, lo: float, hi: float):
    if lo > hi:
        raise DatasetError(f"denormalize: lo={lo!r} > hi={hi!r}")
    if lo == hi:
        return u * 0.0 + lo
    return (u + 1.0) * (hi - lo) / 2.0 + lo


def normalize_samples(samples: Sequence[SamplePair], norm: NormParams) -> list[SamplePair]:
    return [
        SamplePair(
            float(normalize(s.x, norm.x_min, norm.x_max)),
            float(normalize(s.y, norm.y_min, norm.y_max)),
        )
        for s in samples
    ]


def take(samples: Sequence[SamplePair], idx: Sequence[int]) -> list[SamplePair]:
    return [samples[i] for i in idx]
