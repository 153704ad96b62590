"""The [1, H, 1] network: tanh hidden layer, identity output.

Parameters are flattened in the fixed order w1[0..H), b1[0..H), w2[0..H), b2,
so P = 3H + 1. Residuals use the target - output convention; the Jacobian is
of the residuals, hence every entry carries a leading minus sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import NormParams
from .errors import MlpError, ModelFormatError
from .ingest import SamplePair

MODEL_MAGIC = "maintlm-model v1"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    hidden_activation: str = "tanh"
    output_activation: str = "identity"

    def __post_init__(self):
        for name in ("w1", "b1", "w2"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "b2", float(self.b2))
        h = self.w1.shape
        if len(h) != 1 or h[0] < 1 or self.b1.shape != h or self.w2.shape != h:
            raise MlpError("w1, b1, w2 must be 1-D arrays of equal positive length")
        if not np.all(np.isfinite(self.flatten())):
            raise MlpError("model parameters must be finite")

    @property
    def hidden_count(self) -> int:
        return int(self.w1.shape[0])

    @property
    def param_count(self) -> int:
        return 3 * self.hidden_count + 1

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.w1, self.b1, self.w2, [self.b2]])

    @classmethod
    def from_flat(cls, params) -> "MlpModel":
        p = np.asarray(params, dtype=np.float64)
        if p.ndim != 1 or p.size < 4 or (p.size - 1) % 3:
            raise MlpError(f"parameter vector length {p.size} is not 3H+1 for any H >= 1")
        h = (p.size - 1) // 3
        return cls(p[:h], p[h:2 * h], p[2 * h:3 * h], p[3 * h])


def init_model(hidden: int, seed: int) -> MlpModel:
    """All 3H+1 parameters drawn i.i.d. uniform on [-0.5, 0.5]."""
    if hidden < 1:
        raise MlpError(f"hidden_count must be >= 1, got {hidden}")
    rng = np.random.default_rng(seed)
    return MlpModel.from_flat(rng.uniform(-0.5, 0.5, size=3 * hidden + 1))


def _as_xy(samples: Sequence[SamplePair]) -> tuple[np.ndarray, np.ndarray]:
    xs = np.fromiter((s.x for s in samples), dtype=np.float64, count=len(samples))
    ys = np.fromiter((s.y for s in samples), dtype=np.float64, count=len(samples))
    return xs, ys


def predict(model: MlpModel, xs) -> np.ndarray:
    """Vectorised forward pass over an array of inputs.

    Hidden units are accumulated in index order rather than via a BLAS
    mat-vec, so each output is bitwise independent of the batch it is in.
    """
    xs = np.asarray(xs, dtype=np.float64)
    hidden = np.tanh(np.outer(xs, model.w1) + model.b1)
    out = np.full(xs.shape[0], model.b2)
    for j in range(model.hidden_count):
        out += model.w2[j] * hidden[:, j]
    return out


def forward(model: MlpModel, x: float) -> float:
    if not math.isfinite(x):
        raise MlpError(f"forward: input must be finite, got {x!r}")
    return float(predict(model, [x])[0])


@dataclass(frozen=True)
class ResidualReport:
    residuals: tuple[float, ...]
    sse: float
    mse: float


def batch_residuals(model: MlpModel, samples: Sequence[SamplePair]) -> ResidualReport:
    if not samples:
        raise MlpError("batch_residuals: empty sample list")
    xs, ys = _as_xy(samples)
    r = ys - predict(model, xs)
    sse = float(r @ r)
    return ResidualReport(tuple(float(v) for v in r), sse, sse / len(r))


def jacobian_xy(model: MlpModel, xs: np.ndarray) -> np.ndarray:
    t = np.tanh(np.outer(xs, model.w1) + model.b1)
    dz = -model.w2 * (1.0 - t * t)
    h = model.hidden_count
    jac = np.empty((xs.shape[0], 3 * h + 1))
    jac[:, :h] = dz * xs[:, None]
    jac[:, h:2 * h] = dz
    jac[:, 2 * h:3 * h] = -t
    jac[:, 3 * h] = -1.0
    return jac


def jacobian(model: MlpModel, samples: Sequence[SamplePair]) -> np.ndarray:
    """n x P matrix of d(residual_i)/d(param_k)."""
    if not samples:
        raise MlpError("jacobian: empty sample list")
    xs, _ = _as_xy(samples)
    return jacobian_xy(model, xs)


def dumps_model(model: MlpModel, norm: NormParams) -> str:
    norm_line = " ".join(repr(float(v)) for v in (norm.x_min, norm.x_max, norm.y_min, norm.y_max))
    params = " ".join(repr(float(v)) for v in model.flatten())
    return f"{MODEL_MAGIC}\nH={model.hidden_count}\n{norm_line}\n{params}\n"


def loads_model(text: str) -> tuple[MlpModel, NormParams]:
    lines = text.splitlines()
    if len(lines) != 4 or lines[0] != MODEL_MAGIC:
        raise ModelFormatError(f"not a {MODEL_MAGIC!r} file")
    if not lines[1].startswith("H="):
        raise ModelFormatError("line 2 must be H=<int>")
    try:
        h = int(lines[1][2:])
        norm_vals = [float(v) for v in lines[2].split(" ")]
        params = [float(v) for v in lines[3].split(" ")]
    except ValueError as exc:
        raise ModelFormatError(f"unparseable model file ({exc})") from None
    if h < 1 or len(norm_vals) != 4 or len(params) != 3 * h + 1:
        raise ModelFormatError(f"field counts do not match H={h}")
    if not all(math.isfinite(v) for v in norm_vals):
        raise ModelFormatError("normalization parameters must be finite")
    try:
        return MlpModel.from_flat(params), NormParams(*norm_vals)
    except Exception as exc:
        raise ModelFormatError(str(exc)) from None
