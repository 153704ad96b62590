import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maintlm.errors import TrainError
from maintlm.ingest import SamplePair
from maintlm.mlp import MlpModel, batch_residuals, forward, init_model, jacobian
from maintlm.trainer import (
    TRACE_HEADER,
    StopReason,
    TrainConfig,
    lm_step,
    train,
    traces_to_csv,
)

from helpers import linear_samples, params_bytes, synth_splits, tanh_line_samples
from oracles import ols_exact

FROZEN_HIDDEN = MlpModel.from_flat([1.0, 0.0, 0.0, 0.0])  # w1=1, b1=0, w2=0, b2=0


@pytest.mark.parametrize("noise", [0.0, 0.3])
def test_lm_step_output_layer_is_ols(noise):
    samples = tanh_line_samples(noise=noise, seed=1)
    slope, intercept, *_ = ols_exact([math.tanh(s.x) for s in samples], [s.y for s in samples])
    cand, sse = lm_step(FROZEN_HIDDEN, samples, 1e-15, free=[2, 3])
    assert cand.w2[0] == pytest.approx(slope, abs=1e-9)
    assert cand.b2 == pytest.approx(intercept, abs=1e-9)
    if noise == 0.0:
        assert cand.w2[0] == pytest.approx(3.0, abs=1e-9)
        assert cand.b2 == pytest.approx(1.0, abs=1e-9)
    assert cand.w1[0] == 1.0 and cand.b1[0] == 0.0
    assert sse == pytest.approx(batch_residuals(cand, samples).sse, rel=1e-12)


def test_lm_step_zero_residuals_is_noop():
    m = init_model(3, 4)
    samples = [SamplePair(x, forward(m, x)) for x in (-0.5, 0.1, 0.7)]
    cand, sse = lm_step(m, samples, 1e-3)
    assert params_bytes(cand) == params_bytes(m)
    assert sse == 0


def test_lm_step_does_not_modify_input():
    m = init_model(4, 1)
    before = params_bytes(m)
    lm_step(m, linear_samples(0), 1e-2)
    assert params_bytes(m) == before


@pytest.mark.parametrize("seed", range(5))
def test_lm_step_huge_damping_bound(seed):
    m = init_model(4, seed)
    samples = linear_samples(seed)
    jac = jacobian(m, samples)
    r = np.array(batch_residuals(m, samples).residuals)
    cand, _ = lm_step(m, samples, 1e12)
    delta = cand.flatten() - m.flatten()
    assert np.max(np.abs(delta)) < np.max(np.abs(jac.T @ r)) / 1e12 + 1e-12


def test_lm_step_rejects_bad_mu():
    with pytest.raises(TrainError):
        lm_step(init_model(2, 0), linear_samples(0), 0.0)
    with pytest.raises(TrainError):
        lm_step(init_model(2, 0), [], 1.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(max_epochs=0), dict(mu0=0.0), dict(mu_inc=1.0), dict(mu_dec=1.0), dict(max_fail=0),
     dict(min_grad=-1.0), dict(mu_max=1e-6), dict(seed=-1)],
)
def test_config_validation(kwargs):
    with pytest.raises(TrainError):
        TrainConfig(**kwargs)


def test_train_empty_train_split():
    with pytest.raises(TrainError, match="empty training"):
        train(init_model(2, 0), ([], [], []))


def test_train_nonfinite_loss():
    with pytest.raises(TrainError, match="epoch 0"):
        train(init_model(2, 0), ([SamplePair(0.0, math.inf)], [], []))


def test_linear_convergence_seed0():
    res = train(init_model(3, 0), (linear_samples(0), [], []), TrainConfig())
    first = next(t.epoch for t in res.traces if t.mse_train < 1e-8)
    assert first <= 200
    assert res.stop_reason in (StopReason.MIN_GRAD, StopReason.MAX_EPOCHS)


def test_scipy_lm_reference_attains_linear_fit():
    # independent optimiser as an attainability check for the y = 2x target
    from scipy.optimize import least_squares

    samples = linear_samples(0)
    xs = np.array([s.x for s in samples])
    ys = 2 * xs

    def resid(p):
        h = 3
        return ys - (np.tanh(np.outer(xs, p[:h]) + p[h:2 * h]) @ p[2 * h:3 * h] + p[-1])

    sol = least_squares(resid, init_model(3, 0).flatten(), method="lm", xtol=1e-15, ftol=1e-15)
    assert np.mean(sol.fun ** 2) < 1e-8


def test_min_grad_stop_on_exact_fit():
    m = init_model(2, 3)
    xs = [-0.3, 0.2, 0.9]
    samples = [SamplePair(x, forward(m, x)) for x in xs]
    res = train(m, (samples, [], []))
    assert res.stop_reason is StopReason.MIN_GRAD
    assert len(res.traces) == 1 and res.best_epoch == 0


def test_mu_overflow():
    # the zero-weight model has a zero gradient for everything but b2, so the
    # first accepted step nails b2 and further improvement is impossible
    samples = [SamplePair(x, 0.5) for x in (-1.0, 0.0, 1.0)]
    cfg = TrainConfig(min_grad=0.0, mu_max=1e-1)
    res = train(MlpModel.from_flat(np.zeros(4)), (samples, [], []), cfg)
    assert res.stop_reason is StopReason.MU_OVERFLOW
    assert all(0 < t.mu <= cfg.mu_max * cfg.mu_inc for t in res.traces)


def test_max_epochs_stop():
    res = train(init_model(3, 0), (linear_samples(0), [], []), TrainConfig(max_epochs=5))
    assert res.stop_reason is StopReason.MAX_EPOCHS
    assert [t.epoch for t in res.traces] == list(range(6))


def test_degraded_mode_returns_last_model():
    res = train(init_model(3, 0), (linear_samples(0), [], []), TrainConfig(max_epochs=7))
    assert res.best_epoch == 7
    assert params_bytes(res.best_model) == params_bytes(res.final_model)
    assert all(math.isnan(t.mse_val) and math.isnan(t.mse_test) for t in res.traces)


def test_adversarial_validation_stops_early():
    train_s = linear_samples(0)
    val_s = [SamplePair(s.x, -s.y) for s in linear_samples(1, n=5)]
    m0 = init_model(3, 0)
    cfg = TrainConfig()
    res = train(m0, (train_s, val_s, []), cfg)
    assert res.stop_reason is StopReason.MAX_FAIL
    assert res.best_epoch <= 1
    assert res.traces[-1].epoch == res.best_epoch + cfg.max_fail


def test_on_epoch_observes_every_trace():
    seen = []
    res = train(init_model(3, 0), (linear_samples(0), [], []), TrainConfig(max_epochs=4),
                on_epoch=seen.append)
    assert tuple(seen) == res.traces


def test_traces_csv():
    res = train(init_model(3, 0), synth_splits(0)[0], TrainConfig(max_epochs=3))
    text = traces_to_csv(res.traces)
    lines = text.splitlines()
    assert lines[0] == TRACE_HEADER == "epoch,mse_train,mse_val,mse_test,mu"
    assert len(lines) == len(res.traces) + 1
    for line, t in zip(lines[1:], res.traces):
        vals = [float(v) for v in line.split(",")]
        assert vals == [t.epoch, t.mse_train, t.mse_val, t.mse_test, t.mu]


def test_raw_unit_mse():
    (parts, norm) = synth_splits(2)
    res = train(init_model(10, 2), parts, TrainConfig(max_epochs=2), norm=norm)
    scale = ((norm.y_max - norm.y_min) / 2) ** 2
    for t in res.traces:
        assert t.mse_train == pytest.approx(t.sse_train / len(parts[0]) * scale, rel=1e-9)


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 12))
def test_training_invariants(seed, hidden, max_fail):
    parts, norm = synth_splits(seed % 1000)
    cfg = TrainConfig(max_fail=max_fail, max_epochs=60)
    res = train(init_model(hidden, seed), parts, cfg, norm=norm)
    tr = res.traces
    assert [t.epoch for t in tr] == list(range(len(tr)))
    # accepted steps strictly decrease the objective
    assert all(b.sse_train < a.sse_train for a, b in zip(tr, tr[1:]))
    # best epoch: earliest argmin of validation MSE
    vals = [t.mse_val for t in tr]
    assert res.best_epoch == vals.index(min(vals))
    assert all(0 < t.mu <= cfg.mu_max * cfg.mu_inc for t in tr)
    if res.stop_reason is StopReason.MAX_FAIL:
        assert tr[-1].epoch == res.best_epoch + max_fail
    # snapshot is the model at best_epoch: replaying to that epoch reproduces it
    if res.best_epoch == 0:
        assert params_bytes(res.best_model) == params_bytes(init_model(hidden, seed))
    else:
        replay = train(init_model(hidden, seed), parts, TrainConfig(max_epochs=res.best_epoch,
                                                                    max_fail=10**6), norm=norm)
        assert params_bytes(replay.final_model) == params_bytes(res.best_model)


def test_determinism():
    parts, norm = synth_splits(11)
    a = train(init_model(10, 11), parts, TrainConfig(), norm=norm)
    b = train(init_model(10, 11), parts, TrainConfig(), norm=norm)
    assert a.traces == b.traces
    assert traces_to_csv(a.traces) == traces_to_csv(b.traces)
    assert params_bytes(a.best_model) == params_bytes(b.best_model)
    assert a.stop_reason == b.stop_reason and a.best_epoch == b.best_epoch
