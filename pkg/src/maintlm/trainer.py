"""Levenberg-Marquardt training with validation early stopping.

One epoch is one accepted full-batch update. Epoch 0 is the untrained state.
The objective is the training SSE in normalized units; traces report MSEs in
raw (denormalized) units when NormParams are supplied.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .dataset import NormParams, denormalize
from .errors import SingularStepError, TrainError
from .ingest import SamplePair
from .mlp import MlpModel, _as_xy, jacobian_xy, predict


class StopReason(enum.Enum):
    MAX_FAIL = "MaxFail"
    MIN_GRAD = "MinGrad"
    MU_OVERFLOW = "MuOverflow"
    MAX_EPOCHS = "MaxEpochs"


@dataclass(frozen=True)
class TrainConfig:
    mu0: float = 1e-3
    mu_inc: float = 10.0
    mu_dec: float = 0.1
    mu_max: float = 1e10
    max_epochs: int = 1000
    max_fail: int = 6
    min_grad: float = 1e-7
    seed: int = 0
    # floor so repeated acceptances cannot underflow mu to 0
    mu_min: float = 1e-20

    def __post_init__(self):
        if not self.mu0 > 0:
            raise TrainError(f"mu0 must be > 0, got {self.mu0}")
        if not self.mu_inc > 1:
            raise TrainError(f"mu_inc must be > 1, got {self.mu_inc}")
        if not 0 < self.mu_dec < 1:
            raise TrainError(f"mu_dec must be in (0, 1), got {self.mu_dec}")
        if not self.mu_max >= self.mu0:
            raise TrainError(f"mu_max must be >= mu0, got {self.mu_max}")
        if not 0 < self.mu_min <= self.mu0:
            raise TrainError(f"mu_min must be in (0, mu0], got {self.mu_min}")
        if self.max_epochs < 1:
            raise TrainError(f"max_epochs must be >= 1 (at least one epoch), got {self.max_epochs}")
        if self.max_fail < 1:
            raise TrainError(f"max_fail must be >= 1, got {self.max_fail}")
        if not self.min_grad >= 0:
            raise TrainError(f"min_grad must be >= 0, got {self.min_grad}")
        if not 0 <= self.seed < 2**64:
            raise TrainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class EpochTrace:
    epoch: int
    mse_train: float
    mse_val: float
    mse_test: float
    mu: float
    # normalized-unit training SSE, the quantity LM actually minimises
    sse_train: float = math.nan


@dataclass(frozen=True)
class TrainResult:
    best_model: MlpModel
    best_epoch: int
    stop_reason: StopReason
    traces: tuple[EpochTrace, ...]
    final_model: Optional[MlpModel] = None


def damped_solve(jac: np.ndarray, resid: np.ndarray, mu: float) -> np.ndarray:
    """Damped Gauss-Newton step: delta = -(J^T J + mu I)^-1 J^T r, by Cholesky.

    J is the Jacobian of the residuals r = target - output, so the
    linearised residual is r + J delta and descent needs the minus sign.
    """
    a = jac.T @ jac
    a[np.diag_indices_from(a)] += mu
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError):
        raise SingularStepError(mu) from None
    return -scipy.linalg.cho_solve(factor, jac.T @ resid)


def lm_step(
    model: MlpModel,
    train_samples: Sequence[SamplePair],
    mu: float,
    free: Optional[Sequence[int]] = None,
) -> tuple[MlpModel, float]:
    """One damped Gauss-Newton step; returns the candidate and its training SSE.

    `free` restricts the update to a subset of flat parameter indices, the
    rest stay frozen. The input model is not modified.
    """
    if not mu > 0:
        raise TrainError(f"lm_step: mu must be > 0, got {mu}")
    if not train_samples:
        raise TrainError("lm_step: empty training set")
    xs, ys = _as_xy(train_samples)
    jac = jacobian_xy(model, xs)
    r = ys - predict(model, xs)
    p = model.flatten()
    if free is None:
        p = p + damped_solve(jac, r, mu)
    else:
        cols = np.asarray(free, dtype=int)
        p[cols] += damped_solve(jac[:, cols], r, mu)
    cand = MlpModel.from_flat(p)
    rc = ys - predict(cand, xs)
    return cand, float(rc @ rc)


class _SplitEval:
    """MSE of a model on one split, reported in raw units."""

    def __init__(self, samples: Sequence[SamplePair], norm: Optional[NormParams]):
        self.n = len(samples)
        if self.n:
            self.xs, ys = _as_xy(samples)
            self.y_raw = ys if norm is None else denormalize(ys, norm.y_min, norm.y_max)
        self.norm = norm

    def mse(self, model: MlpModel) -> float:
        if not self.n:
            return math.nan
        out = predict(model, self.xs)
        if self.norm is not None:
            out = denormalize(out, self.norm.y_min, self.norm.y_max)
        d = self.y_raw - out
        return float(d @ d) / self.n


def train(
    model: MlpModel,
    samples_by_split: tuple[Sequence[SamplePair], Sequence[SamplePair], Sequence[SamplePair]],
    config: TrainConfig = TrainConfig(),
    norm: Optional[NormParams] = None,
    on_epoch: Optional[Callable[[EpochTrace], None]] = None,
) -> TrainResult:
    """Train `model` on normalized (train, val, test) samples.

    Early stopping fires after `max_fail` consecutive epochs whose validation
    MSE is not below the best so far; the best-validation snapshot is
    returned. With an empty validation split early stopping is disabled and
    the last accepted model is returned as best. The test split is only
    recorded.
    """
    train_s, val_s, test_s = samples_by_split
    if not train_s:
        raise TrainError("empty training split")
    xs, ys = _as_xy(train_s)
    evals = [_SplitEval(s, norm) for s in (train_s, val_s, test_s)]
    has_val = evals[1].n > 0
    eye_idx = None

    cur = model
    p = cur.flatten()
    r = ys - predict(cur, xs)
    sse = float(r @ r)
    if not math.isfinite(sse):
        raise TrainError("non-finite training loss at epoch 0")
    mu = config.mu0

    traces: list[EpochTrace] = []

    def record(epoch: int) -> EpochTrace:
        tr = EpochTrace(epoch, *(e.mse(cur) for e in evals), mu, sse)
        traces.append(tr)
        if on_epoch is not None:
            on_epoch(tr)
        return tr

    first = record(0)
    best_model, best_epoch, best_val = cur, 0, first.mse_val
    fails = 0
    epoch = 0
    stop: Optional[StopReason] = None

    while stop is None:
        if epoch >= config.max_epochs:
            stop = StopReason.MAX_EPOCHS
            break
        jac = jacobian_xy(cur, xs)
        grad = jac.T @ r
        if float(np.max(np.abs(grad))) < config.min_grad:
            stop = StopReason.MIN_GRAD
            break
        jtj = jac.T @ jac
        if eye_idx is None:
            eye_idx = np.diag_indices_from(jtj)
        diag = jtj[eye_idx].copy()
        while True:
            jtj[eye_idx] = diag + mu
            try:
                factor = scipy.linalg.cho_factor(jtj, lower=True)
            except (np.linalg.LinAlgError, ValueError):
                factor = None
            if factor is not None:
                p_new = p - scipy.linalg.cho_solve(factor, grad)
                if not np.all(np.isfinite(p_new)):
                    raise TrainError(f"non-finite parameters at epoch {epoch + 1}")
                cand = MlpModel.from_flat(p_new)
                r_new = ys - predict(cand, xs)
                sse_new = float(r_new @ r_new)
                if not math.isfinite(sse_new):
                    raise TrainError(f"non-finite training loss at epoch {epoch + 1}")
                if sse_new < sse:
                    break
            mu *= config.mu_inc
            if mu > config.mu_max:
                stop = StopReason.MU_OVERFLOW
                break
        if stop is not None:
            break

        cur, p, r, sse = cand, p_new, r_new, sse_new
        mu = max(mu * config.mu_dec, config.mu_min)
        epoch += 1
        tr = record(epoch)

        if has_val:
            if tr.mse_val < best_val:
                best_model, best_epoch, best_val = cur, epoch, tr.mse_val
                fails = 0
            else:
                fails += 1
                if fails >= config.max_fail:
                    stop = StopReason.MAX_FAIL
        else:
            best_model, best_epoch = cur, epoch

    return TrainResult(best_model, best_epoch, stop, tuple(traces), final_model=cur)


TRACE_HEADER = "epoch,mse_train,mse_val,mse_test,mu"


def traces_to_csv(traces: Sequence[EpochTrace]) -> str:
    buf = io.StringIO()
    buf.write(TRACE_HEADER + "\n")
    for t in traces:
        buf.write(f"{t.epoch},{t.mse_train!r},{t.mse_val!r},{t.mse_test!r},{t.mu!r}\n")
    return buf.getvalue()
